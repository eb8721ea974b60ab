import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from snntwin.errors import DomainError, OutOfPremiseError
from snntwin.neuron import (
    NeuronParams,
    SpikeMatrix,
    SpikeTrain,
    check_premise,
    encode_rate,
    simulate_if,
    spike_count_oracle,
)

from conftest import ref_simulate


# -- encode_rate ----------------------------------------------------------

def test_encode_zero_and_saturated():
    assert encode_rate(0, 4).slots == (0, 0, 0, 0)
    assert encode_rate(4, 4).slots == (1, 1, 1, 1)


def test_encode_even_spacing_positions():
    # floor(i*7/3) for i = 0, 1, 2
    train = encode_rate(3, 7)
    assert [t for t, s in enumerate(train) if s] == [0, 2, 4]


@pytest.mark.parametrize("k,T", [(-1, 4), (5, 4)])
def test_encode_out_of_range(k, T):
    with pytest.raises(DomainError):
        encode_rate(k, T)


def test_encode_random_is_seeded():
    a = encode_rate(5, 20, "random", seed=11)
    b = encode_rate(5, 20, "random", seed=11)
    assert a == b and a.count == 5
    with pytest.raises(DomainError):
        encode_rate(2, 5, "random")


@given(st.integers(1, 64).flatmap(lambda T: st.tuples(st.just(T), st.integers(0, T))), st.integers(0, 2**31))
def test_encode_exact_count(Tk, seed):
    T, k = Tk
    for train in (encode_rate(k, T), encode_rate(k, T, "random", seed=seed)):
        assert train.window == T
        assert train.count == k


def test_matrix_requires_common_window():
    with pytest.raises(DomainError):
        SpikeMatrix.from_rows([[0, 1], [1, 0, 1]])
    with pytest.raises(DomainError):
        SpikeMatrix(())


# -- simulate_if ----------------------------------------------------------

def test_all_zero_input():
    tr = simulate_if(SpikeMatrix.from_rows([[0] * 5] * 3), NeuronParams((1, 2, 3), 1))
    assert tr.n == 0 and tr.residual == 0
    assert all(v == 0 for v in tr.potentials)


def test_action_table_single_fire_at_step_five():
    # inputs: step 1 -> w0+w2, 2 -> w0+w1, 3 -> w1, 5 -> w2, 6 -> w0, 7 -> w1
    rows = [
        [1, 1, 0, 0, 0, 1, 0, 0],
        [0, 1, 1, 0, 0, 0, 1, 0],
        [1, 0, 0, 0, 1, 0, 0, 0],
    ]
    # unit weights reach 6 at step 5; 5 < theta <= 6 fires only there
    tr = simulate_if(SpikeMatrix.from_rows(rows), NeuronParams((1, 1, 1), Fraction(11, 2)))
    assert tr.out_spikes.slots == (0, 0, 0, 0, 1, 0, 0, 0)
    assert tr.potentials[4] == 6 - Fraction(11, 2)
    assert tr.premise_ok


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        simulate_if(SpikeMatrix.from_rows([[1, 0]]), NeuronParams((1, 1), 3))
    with pytest.raises(DomainError):
        check_premise(SpikeMatrix.from_rows([[1, 0]]), NeuronParams((1, 1), 3))


def test_threshold_must_be_positive():
    with pytest.raises(DomainError):
        NeuronParams((1,), 0)


def test_float_inputs_parsed_as_decimals():
    p = NeuronParams((0.1, 0.2), 0.3)
    assert p.weights == (Fraction(1, 10), Fraction(1, 5))
    # 0.1 + 0.2 reaches 0.3 exactly, so it fires; binary floats would not
    tr = simulate_if(SpikeMatrix.from_rows([[1], [1]]), p)
    assert tr.n == 1 and tr.residual == 0


def test_negative_weight_flagged_not_rejected():
    tr = simulate_if(SpikeMatrix.from_rows([[0, 1], [1, 1]]), NeuronParams((2, -1), 3))
    assert not tr.premise_ok
    assert check_premise(SpikeMatrix.from_rows([[0, 1], [1, 1]]), NeuronParams((2, -1), 3)).violations() == [0]


# -- spike_count_oracle ---------------------------------------------------

def test_oracle_examples():
    assert spike_count_oracle([0, 0], NeuronParams((1, 1), 1)) == 0
    assert spike_count_oracle([5], NeuronParams((1,), 2)) == 2
    assert spike_count_oracle([4, 2], NeuronParams((0.3, 0.5), 1.0)) == 2


def test_oracle_negative_drive():
    with pytest.raises(OutOfPremiseError):
        spike_count_oracle([3], NeuronParams((-1,), 1))


# -- check_premise --------------------------------------------------------

def test_premise_zero_inputs_pass():
    rep = check_premise(SpikeMatrix.from_rows([[0, 0, 0]]), NeuronParams((5,), 1))
    assert rep.ok and all(rep.step_ok)


def test_premise_constructed_violation():
    rep = check_premise(SpikeMatrix.from_rows([[0, 1, 0]]), NeuronParams((4,), 2))
    assert rep.step_ok == (True, False, True)
    assert rep.currents[1] == 4
    assert rep.violations() == [1]


# -- properties -----------------------------------------------------------

weights_st = st.fractions(min_value=0, max_value=4, max_denominator=12)


@st.composite
def instances(draw, premise_safe=True):
    n = draw(st.integers(1, 16))
    T = draw(st.integers(1, 32))
    theta = draw(st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=9))
    if premise_safe:
        u = draw(st.lists(st.integers(0, 30), min_size=n, max_size=n))
        slack = draw(st.integers(1, 30))
        weights = [theta * x / (sum(u) + slack) for x in u]
    else:
        weights = draw(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=12), min_size=n, max_size=n))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=T, max_size=T), min_size=n, max_size=n))
    return weights, theta, rows


@settings(max_examples=150, deadline=None)
@given(instances(premise_safe=False))
def test_matches_reference_and_telescopes(inst):
    weights, theta, rows = inst
    params = NeuronParams(tuple(weights), theta)
    tr = simulate_if(SpikeMatrix.from_rows(rows), params)
    pots, out = ref_simulate(weights, theta, rows)
    assert list(tr.potentials) == pots and list(tr.out_spikes) == out
    counts = [sum(r) for r in rows]
    assert tr.residual == params.drive(counts) - params.threshold * tr.n
    assert tr.n == sum(tr.out_spikes) <= len(rows[0])
    assert tr.premise_ok == check_premise(SpikeMatrix.from_rows(rows), params).ok


@settings(max_examples=150, deadline=None)
@given(instances())
def test_premise_implies_bound_and_oracle(inst):
    weights, theta, rows = inst
    params = NeuronParams(tuple(weights), theta)
    tr = simulate_if(SpikeMatrix.from_rows(rows), params)
    assert tr.premise_ok
    assert all(0 <= v < params.threshold for v in tr.potentials)
    counts = [sum(r) for r in rows]
    drive = params.drive(counts)
    # integer floor division on numerator/denominator, independent of math.floor on Fraction
    q = drive / params.threshold
    assert tr.n == spike_count_oracle(counts, params) == q.numerator // q.denominator


@settings(max_examples=100, deadline=None)
@given(instances(), st.integers(0, 2**31))
def test_timing_invariance(inst, seed):
    weights, theta, rows = inst
    params = NeuronParams(tuple(weights), theta)
    counts = [sum(r) for r in rows]
    T = len(rows[0])
    base = simulate_if(SpikeMatrix.from_rows(rows), params).n
    for m in (SpikeMatrix.from_counts(counts, T), SpikeMatrix.from_counts(counts, T, "random", seed=seed)):
        tr = simulate_if(m, params)
        assume(tr.premise_ok)
        assert tr.n == base
