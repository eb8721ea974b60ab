"""QNN twin of a rate-coded integrate-and-fire neuron.

A window of ``T`` steps yields spike counts ``0..T``. The twin QNN reproduces
them with the activation ``h(z) = floor(z*T/theta) / T`` on
``bits_for_window(T)``-bit activations. This module also maps between the SNN
spike rate and the QNN activation sparsity for the three spike-rate scenarios.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DomainError, InfeasibleScenarioError
from .exact import as_fraction
from .neuron import EVEN, NeuronParams, SpikeMatrix, simulate_if

__all__ = [
    "Scenario",
    "TwinSpec",
    "QuantizedOutput",
    "EquivalenceReport",
    "bits_for_window",
    "qnn_activation",
    "check_equivalence",
    "spike_rate_bounds",
    "scenario_spike_rate",
    "scenario_sparsity",
    "encode_activations",
    "activation_sparsity",
    "measured_spike_rate",
]


class Scenario(str, enum.Enum):
    """Spike-rate scenarios, named from the SNN's point of view.

    WORST has every active input at full rate, BEST has one spike per active
    input, and AVERAGE has activations spread uniformly over ``[1/T, 1]``.
    """

    WORST = "worst"
    AVERAGE = "average"
    BEST = "best"

    @classmethod
    def parse(cls, value) -> "Scenario":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown scenario {value!r}; expected one of worst, average, best") from None


def bits_for_window(T: int) -> int:
    """``ceil(log2(T+1))`` computed on integers."""
    if isinstance(T, bool) or int(T) != T or T < 1:
        raise DomainError(f"window must be a positive integer, got {T!r}")
    # for T >= 1, bit_length(T) is the smallest b with 2**b >= T+1
    return int(T).bit_length()


@dataclass(frozen=True)
class TwinSpec:
    T: int
    theta: Fraction

    def __post_init__(self):
        bits_for_window(self.T)
        theta = as_fraction(self.theta)
        if theta <= 0:
            raise DomainError(f"threshold must be positive, got {theta}")
        object.__setattr__(self, "theta", theta)

    @property
    def activation_bits(self) -> int:
        return bits_for_window(self.T)

    @property
    def levels(self) -> int:
        return self.T + 1


class QuantizedOutput(NamedTuple):
    level: int
    value: Fraction
    clamped: bool


def qnn_activation(z, spec: TwinSpec) -> QuantizedOutput:
    """Quantize a pre-activation onto the ``T+1`` levels ``{0, 1/T, ..., 1}``."""
    z = as_fraction(z)
    level = math.floor(z * spec.T / spec.theta)
    clamped = False
    if level < 0:
        level, clamped = 0, True
    elif level > spec.T:
        level, clamped = spec.T, True
    return QuantizedOutput(level, Fraction(level, spec.T), clamped)


@dataclass(frozen=True)
class EquivalenceReport:
    n_snn: int
    n_qnn_level: int
    match: bool
    premise_ok: bool
    residual_eps: Fraction
    clamped: bool = False


def check_equivalence(counts: Sequence[int], params: NeuronParams, spec: TwinSpec,
                      schedule: str = EVEN, seed=None) -> EquivalenceReport:
    if params.threshold != spec.theta:
        raise DomainError(f"neuron threshold {params.threshold} differs from twin threshold {spec.theta}")
    inputs = SpikeMatrix.from_counts(counts, spec.T, schedule, seed=seed)
    trace = simulate_if(inputs, params)
    z = params.drive(counts) / spec.T
    q = qnn_activation(z, spec)
    return EquivalenceReport(
        n_snn=trace.n,
        n_qnn_level=q.level,
        match=trace.n == q.level,
        premise_ok=trace.premise_ok,
        residual_eps=trace.residual_eps,
        clamped=q.clamped,
    )


def _gamma(gamma) -> Fraction:
    g = as_fraction(gamma)
    if not 0 <= g <= 1:
        raise DomainError(f"sparsity must lie in [0, 1], got {g}")
    return g


def spike_rate_bounds(gamma, T: int) -> tuple[Fraction, Fraction]:
    g = _gamma(gamma)
    bits_for_window(T)
    return (1 - g) / T, 1 - g


def scenario_spike_rate(gamma, T: int, scenario) -> Fraction:
    g = _gamma(gamma)
    bits_for_window(T)
    scenario = Scenario.parse(scenario)
    if scenario is Scenario.WORST:
        return 1 - g
    if scenario is Scenario.BEST:
        return (1 - g) / T
    return (1 - g) * (Fraction(1, T) + 1) / 2


def scenario_sparsity(s_r, T: int, scenario) -> Fraction:
    """Inverse of :func:`scenario_spike_rate`; raises if the sparsity leaves [0, 1]."""
    s = as_fraction(s_r)
    bits_for_window(T)
    scenario = Scenario.parse(scenario)
    if s < 0:
        raise DomainError(f"spike rate must be non-negative, got {s}")
    if scenario is Scenario.WORST:
        g = 1 - s
        bound = "s_r <= 1"
    elif scenario is Scenario.BEST:
        g = 1 - s * T
        bound = "s_r * T <= 1"
    else:
        g = 1 - 2 * s * T / (T + 1)
        bound = "2 * s_r * T / (T + 1) <= 1"
    if not 0 <= g <= 1:
        raise InfeasibleScenarioError(
            f"{scenario.value} scenario infeasible for s_r={s}, T={T}: requires {bound} (gamma would be {g})",
            bound=bound,
        )
    return g


def encode_activations(activations: Sequence, T: int, schedule: str = EVEN, seed=None) -> SpikeMatrix:
    """Rate-encode QNN activations on the ``1/T`` lattice as ``a*T`` spikes per channel."""
    counts = []
    for a in activations:
        k = as_fraction(a) * T
        if k.denominator != 1 or not 0 <= k <= T:
            raise DomainError(f"activation {a} is not on the 1/{T} lattice in [0, 1]")
        counts.append(int(k))
    return SpikeMatrix.from_counts(counts, T, schedule, seed=seed)


def activation_sparsity(activations: Sequence) -> Fraction:
    acts = [as_fraction(a) for a in activations]
    if not acts:
        raise DomainError("empty activation vector")
    return Fraction(sum(1 for a in acts if a == 0), len(acts))


def measured_spike_rate(inputs: SpikeMatrix) -> Fraction:
    """Spikes per channel per step actually present in ``inputs``."""
    return Fraction(sum(inputs.counts()), inputs.n_src * inputs.window)
