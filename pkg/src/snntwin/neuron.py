"""Exact integrate-and-fire simulation with reset-by-subtraction.

The neuron has no leak and starts from ``v(0) = 0``. At each step it adds the
weighted input, fires when the potential reaches the threshold and then
subtracts the threshold. Weights and threshold are exact rationals. They are
rescaled to a common integer denominator before the time loop, so the hot
path only does integer arithmetic.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, OutOfPremiseError
from .exact import as_fraction

__all__ = [
    "SpikeTrain",
    "SpikeMatrix",
    "NeuronParams",
    "SimulationTrace",
    "PremiseReport",
    "encode_rate",
    "simulate_if",
    "spike_count_oracle",
    "check_premise",
]

EVEN = "even"
RANDOM = "random"


@dataclass(frozen=True)
class SpikeTrain:
    slots: tuple[int, ...]

    def __post_init__(self):
        slots = tuple(map(int, self.slots))
        if not slots:
            raise DomainError("a spike train needs a window of at least one step")
        if not set(slots) <= {0, 1}:
            raise DomainError("spike slots must be 0 or 1")
        object.__setattr__(self, "slots", slots)

    @property
    def window(self) -> int:
        return len(self.slots)

    @property
    def count(self) -> int:
        return sum(self.slots)

    def __len__(self):
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)


@dataclass(frozen=True)
class SpikeMatrix:
    trains: tuple[SpikeTrain, ...]

    def __post_init__(self):
        trains = tuple(t if isinstance(t, SpikeTrain) else SpikeTrain(tuple(t)) for t in self.trains)
        if not trains:
            raise DomainError("a spike matrix needs at least one input channel")
        windows = {t.window for t in trains}
        if len(windows) != 1:
            raise DomainError(f"all trains must share one window, got {sorted(windows)}")
        object.__setattr__(self, "trains", trains)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "SpikeMatrix":
        return cls(tuple(SpikeTrain(tuple(r)) for r in rows))

    @classmethod
    def from_counts(cls, counts: Sequence[int], T: int, schedule: str = EVEN, seed=None) -> "SpikeMatrix":
        """Rate-encode per-channel spike counts. With a seed, channel ``j`` uses ``seed + j``."""
        trains = []
        for j, k in enumerate(counts):
            s = None if seed is None else seed + j
            trains.append(encode_rate(k, T, schedule, seed=s))
        return cls(tuple(trains))

    @property
    def n_src(self) -> int:
        return len(self.trains)

    @property
    def window(self) -> int:
        return self.trains[0].window

    def counts(self) -> tuple[int, ...]:
        return tuple(t.count for t in self.trains)

    def column(self, t: int) -> tuple[int, ...]:
        return tuple(tr.slots[t] for tr in self.trains)


@dataclass(frozen=True)
class NeuronParams:
    weights: tuple[Fraction, ...]
    threshold: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(as_fraction(w) for w in self.weights))
        theta = as_fraction(self.threshold)
        if theta <= 0:
            raise DomainError(f"threshold must be positive, got {theta}")
        object.__setattr__(self, "threshold", theta)

    @property
    def n_src(self) -> int:
        return len(self.weights)

    def drive(self, counts: Sequence[int]) -> Fraction:
        """Total weighted input ``sum_j w_j k_j``."""
        if len(counts) != len(self.weights):
            raise DomainError(f"{len(counts)} counts for {len(self.weights)} weights")
        return sum((w * k for w, k in zip(self.weights, counts)), Fraction(0))


@dataclass(frozen=True)
class SimulationTrace:
    potentials: tuple[Fraction, ...]
    out_spikes: SpikeTrain
    n: int
    residual: Fraction
    premise_ok: bool
    threshold: Fraction

    @property
    def residual_eps(self) -> Fraction:
        """Residual potential in units of the threshold."""
        return self.residual / self.threshold


@dataclass(frozen=True)
class PremiseReport:
    currents: tuple[Fraction, ...]
    step_ok: tuple[bool, ...]

    @property
    def ok(self) -> bool:
        return all(self.step_ok)

    def violations(self) -> list[int]:
        return [t for t, ok in enumerate(self.step_ok) if not ok]


def encode_rate(k: int, T: int, schedule: str = EVEN, seed=None) -> SpikeTrain:
    """Place exactly ``k`` spikes in a window of ``T`` steps.

    ``even`` puts spike ``i`` at ``floor(i*T/k)``; ``random`` draws a uniform
    ``k``-subset of positions from ``random.Random(seed)``.
    """
    if T < 1:
        raise DomainError(f"window must be >= 1, got {T}")
    if not 0 <= k <= T:
        raise DomainError(f"spike count {k} outside [0, {T}]")
    slots = [0] * T
    if schedule == EVEN:
        for i in range(k):
            slots[i * T // k] = 1
    elif schedule == RANDOM:
        if seed is None:
            raise DomainError("random schedule needs an explicit seed")
        for pos in random.Random(seed).sample(range(T), k):
            slots[pos] = 1
    else:
        raise DomainError(f"unknown schedule {schedule!r}")
    return SpikeTrain(tuple(slots))


def _integer_scale(params: NeuronParams):
    """Common denominator D and the integer weights/threshold scaled by it."""
    D = math.lcm(params.threshold.denominator, *(w.denominator for w in params.weights))
    ws = [w.numerator * (D // w.denominator) for w in params.weights]
    th = params.threshold.numerator * (D // params.threshold.denominator)
    return D, ws, th


def _check_dims(inputs: SpikeMatrix, params: NeuronParams):
    if inputs.n_src != params.n_src:
        raise DomainError(f"spike matrix has {inputs.n_src} channels but {params.n_src} weights were given")


def _step_currents(inputs: SpikeMatrix, ws: list[int]) -> list[int]:
    T = inputs.window
    currents = [0] * T
    for w, train in zip(ws, inputs.trains):
        if w == 0:
            continue
        for t, s in enumerate(train.slots):
            if s:
                currents[t] += w
    return currents


def simulate_if(inputs: SpikeMatrix, params: NeuronParams) -> SimulationTrace:
    _check_dims(inputs, params)
    D, ws, th = _integer_scale(params)
    currents = _step_currents(inputs, ws)

    v = 0
    premise_ok = True
    vs = []
    out = []
    for i in currents:
        if i < 0 or i >= th:
            premise_ok = False
        v += i
        if v >= th:
            v -= th
            out.append(1)
        else:
            out.append(0)
        vs.append(v)

    n = sum(out)
    return SimulationTrace(
        potentials=tuple(Fraction(x, D) for x in vs),
        out_spikes=SpikeTrain(tuple(out)),
        n=n,
        residual=Fraction(v, D),
        premise_ok=premise_ok,
        threshold=params.threshold,
    )


def spike_count_oracle(counts: Sequence[int], params: NeuronParams) -> int:
    """Closed-form output count ``floor(sum_j w_j k_j / theta)``."""
    drive = params.drive(counts)
    if drive < 0:
        raise OutOfPremiseError(f"negative total drive {drive}; the floor formula does not apply")
    return math.floor(drive / params.threshold)


def check_premise(inputs: SpikeMatrix, params: NeuronParams) -> PremiseReport:
    """Per-step net current and whether ``0 <= I(t) < theta`` holds."""
    _check_dims(inputs, params)
    D, ws, th = _integer_scale(params)
    currents = _step_currents(inputs, ws)
    return PremiseReport(
        currents=tuple(Fraction(i, D) for i in currents),
        step_ok=tuple(0 <= i < th for i in currents),
    )
