import io
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snntwin.analysis import (
    CSV_FIELDS,
    MODEL_PRESETS,
    breakeven_annotations,
    breakeven_spike_rate,
    csv_text,
    landscape,
    sensitivity,
    sparse_dense_threshold,
    write_breakeven_csv,
)
from snntwin.energy import DENSE, SPARSE, WorkloadConfig, total_energy
from snntwin.errors import DomainError
from snntwin.profiles import builtin_profiles, multiplier_mac_table


def e_snn(hw, T, n, g, wb, s):
    return total_energy(WorkloadConfig(n_src=n, T=T, s_r=s, gamma=g, weight_bits=wb), hw)[0].total_pj


def e_qnn(hw, T, n, g, wb):
    return total_energy(WorkloadConfig(n_src=n, T=T, s_r=0, gamma=g, weight_bits=wb), hw)[1].total_pj


def bisect_root(hw, T, n, g, wb, iters=80):
    """Independent reference: bisection on the full energy model."""
    target = e_qnn(hw, T, n, g, wb)
    lo, hi = F(0), F(1)
    if e_snn(hw, T, n, g, wb, lo) > target or e_snn(hw, T, n, g, wb, hi) < target:
        return None
    for _ in range(iters):
        mid = (lo + hi) / 2
        if e_snn(hw, T, n, g, wb, mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def test_threshold_examples(presets, typical):
    assert sparse_dense_threshold(typical, 8) == F(43, 318)
    assert abs(float(F(43, 318)) - 0.1352) < 1e-4
    eq = typical.replace(e_move_sparse=typical.e_move_dense)
    assert sparse_dense_threshold(eq, 8) == 1
    with pytest.raises(DomainError):
        sparse_dense_threshold(presets["theoretical-min"].replace(e_weight={8: F(0)}), 8)


def test_threshold_flips_mode(typical):
    th = sparse_dense_threshold(typical, 8)
    for s, mode in ((th - F(1, 10**6), SPARSE), (th, DENSE), (th + F(1, 10**6), DENSE)):
        snn, _ = total_energy(WorkloadConfig(n_src=4096, T=4, s_r=s, gamma=F("0.8")), typical)
        assert snn.transmission_mode == mode


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.sampled_from([16, 64, 1000, 4096]), st.fractions(0, F(99, 100), max_denominator=100),
       st.sampled_from([4, 8]), st.sampled_from(["theoretical-min", "typical-neuromorphic", "worst-sparse"]))
def test_breakeven_matches_bisection(T, n, g, wb, name):
    hw = builtin_profiles()[name]
    r = breakeven_spike_rate(T, n, g, wb, hw)
    ref = bisect_root(hw, T, n, g, wb)
    if r.has_root:
        assert ref is not None
        assert abs(r.s_star - ref) < F(1, 10**12)
        assert e_snn(hw, T, n, g, wb, r.s_star) == r.qnn_energy_pj
    else:
        assert r.status in ("infeasible", "snn_always_wins")


def test_breakeven_infeasible_and_always(typical):
    # dense QNN with gamma close to 1 is tiny; E_SNN(0) = T*E_CMP exceeds it only if QNN data is ~0
    r = breakeven_spike_rate(4, 1, F(1), 8, typical)
    assert r.status == "infeasible" and r.s_star is None
    cheap = typical.replace(e_mac={k: v * 1000 for k, v in typical.e_mac.items()})
    r = breakeven_spike_rate(2, 4096, F(0), 8, cheap)
    assert r.status == "snn_always_wins" and r.s_star == 1


def test_breakeven_root_on_threshold_goes_dense(typical):
    from snntwin.energy import compute_energy_qnn, data_energy_qnn
    th = sparse_dense_threshold(typical, 8)
    T, n = 1, 64
    target = e_snn(typical, T, n, F(0), 8, th)

    def q(g):
        c = WorkloadConfig(n_src=n, T=T, s_r=0, gamma=g)
        return compute_energy_qnn(c, typical) + min(data_energy_qnn(c, typical, SPARSE), data_energy_qnn(c, typical, DENSE))

    lo, hi = F(0), F(1)
    assert q(lo) >= target >= q(hi)
    for _ in range(60):
        mid = (lo + hi) / 2
        if q(mid) > target:
            lo = mid
        else:
            hi = mid
    # q is affine near the crossing; solve it exactly
    g = lo + (target - q(lo)) * (hi - lo) / (q(hi) - q(lo))
    assert q(g) == target
    r = breakeven_spike_rate(T, n, g, 8, typical)
    assert r.has_root and r.s_star == th and r.segment == DENSE


def test_breakeven_decreases_with_T(typical):
    roots = {T: breakeven_spike_rate(T, 4096, F("0.8"), 8, typical).s_star for T in range(1, 9)}
    assert roots[5] > roots[7]
    assert roots[1] > roots[3]


def test_bit_step_raises_breakeven(typical):
    table = multiplier_mac_table()
    table[(3, 8)] = table[(2, 8)]
    table[(4, 8)] = table[(2, 8)] * 4
    hw = typical.replace(e_mac=table)
    r3 = breakeven_spike_rate(3, 4096, F("0.8"), 8, hw).s_star
    r4 = breakeven_spike_rate(4, 4096, F("0.8"), 8, hw).s_star
    assert r4 > r3


def test_precision_effect(typical):
    b8 = breakeven_spike_rate(2, 4096, F("0.8"), 8, typical).s_star
    b4 = breakeven_spike_rate(2, 4096, F("0.8"), 4, typical).s_star
    assert b8 > b4


@pytest.mark.parametrize("T", [1, 2, 4, 8])
def test_n_src_scaling_is_bounded(typical, T):
    # per-neuron overheads shift s* by at most O(1/N)
    a = breakeven_spike_rate(T, 64, F("0.8"), 8, typical).s_star
    b = breakeven_spike_rate(T, 4096, F("0.8"), 8, typical).s_star
    c = breakeven_spike_rate(T, 10**6, F("0.8"), 8, typical).s_star
    assert abs(b - c) <= abs(a - c)
    assert abs(a - c) < F(4, 64)


def test_annotations(typical):
    res = [breakeven_spike_rate(T, 4096, F("0.8"), 8, typical) for T in range(1, 12)]
    notes = breakeven_annotations(res)
    assert notes["max_s_star_T_below_5"] == float(max(r.s_star for r in res if r.T < 5))
    assert notes["max_s_star_T_above_5"] == float(max(r.s_star for r in res if r.T > 5))
    assert breakeven_annotations([])["max_s_star_T_5_to_10"] is None


def test_landscape_shape(presets):
    recs = landscape(MODEL_PRESETS, list(presets.values()))
    assert len(recs) == 27
    assert [(r.model, r.hw, r.scenario) for r in recs[:3]] == [
        ("efficient", "theoretical-min", "worst"),
        ("efficient", "theoretical-min", "average"),
        ("efficient", "theoretical-min", "best"),
    ]
    hp_best = [r for r in recs if r.model == "high-performance" and r.scenario == "best"]
    assert len(hp_best) == 3 and not any(r.feasible for r in hp_best)
    assert all(r.ratio is None and r.gamma is None for r in hp_best)
    assert sum(r.feasible for r in recs) == 24


def test_landscape_best_efficient_ratio_drops_with_sparse_cost(presets):
    recs = landscape([MODEL_PRESETS[0]], list(presets.values()), ["best"])
    ratios = {r.hw: r.ratio for r in recs}
    assert ratios["theoretical-min"] > ratios["typical-neuromorphic"]


def test_landscape_csv_deterministic(presets):
    a = csv_text(landscape(MODEL_PRESETS, list(presets.values())))
    b = csv_text(landscape(MODEL_PRESETS, list(presets.values())))
    assert a == b
    header, first = a.splitlines()[:2]
    assert header.split(",") == list(CSV_FIELDS)
    row = dict(zip(CSV_FIELDS, first.split(",")))
    assert row["feasible"] == "true" and row["activation_bits"] == "2"
    marker = [ln for ln in a.splitlines() if ln.endswith(",false")]
    assert len(marker) == 3 and all(",,," in ln for ln in marker)


def test_sensitivity_shape_and_minimum(typical):
    grid = [F(i, 100) for i in range(0, 51, 5)]
    recs, bes = sensitivity(range(1, 9), grid, [4, 8], [64, 4096], typical)
    assert len(recs) == 8 * 2 * 2 * len(grid)
    assert len(bes) == 32
    for T in range(1, 9):
        group = [r for r in recs if r.T == T and r.weight_bits == 8 and r.n_src == 4096]
        assert min(group, key=lambda r: r.e_snn_pj).s_r == 0
        assert all(r.model == "sweep" and r.scenario == "fixed-gamma" for r in group)
    with pytest.raises(DomainError):
        sensitivity([], grid, [8], [64], typical)


def test_breakeven_csv(typical):
    buf = io.StringIO()
    write_breakeven_csv([breakeven_spike_rate(2, 4096, F("0.8"), 8, typical)], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("hw,T,n_src,gamma")
    assert ",root," in lines[1]
