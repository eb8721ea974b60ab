"""Randomized cross-check of the simulator against the closed-form spike count."""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import DomainError, OutOfPremiseError
from .neuron import EVEN, RANDOM, NeuronParams, SpikeMatrix, simulate_if, spike_count_oracle
from .twin import TwinSpec, qnn_activation

__all__ = ["VerificationReport", "random_instance", "run_verification"]


@dataclass
class VerificationReport:
    trials: int
    seed: int
    premise_ok: int = 0
    premise_violations: int = 0
    oracle_mismatches: int = 0
    equivalence_mismatches: int = 0
    bound_violations: int = 0
    out_of_premise_mismatches: int = 0
    max_eps: float = 0.0
    max_abs_eps_out_of_premise: float = 0.0
    max_count_deviation: int = 0

    @property
    def violation_rate(self) -> float:
        return self.premise_violations / self.trials if self.trials else 0.0

    @property
    def passed(self) -> bool:
        return self.oracle_mismatches == 0 and self.equivalence_mismatches == 0 and self.bound_violations == 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["violation_rate"] = self.violation_rate
        d["passed"] = self.passed
        return d


def random_instance(rng: random.Random, max_n_src=16, max_T=32, max_weight=None):
    """Draw ``(counts, params, T, schedule_seed)``.

    With ``max_weight=None`` the weights are non-negative rationals summing to
    less than the threshold, so the premise holds at every step. Otherwise
    each weight is drawn independently from ``[0, max_weight * theta]``.
    """
    n = rng.randint(1, max_n_src)
    T = rng.randint(1, max_T)
    theta = Fraction(rng.randint(1, 64), rng.randint(1, 16))
    if max_weight is None:
        u = [rng.randint(0, 20) for _ in range(n)]
        total = sum(u) + rng.randint(1, 20)
        weights = [theta * x / total for x in u]
    else:
        scale = Fraction(max_weight) * theta
        weights = [scale * Fraction(rng.randint(0, 64), 64) for _ in range(n)]
    counts = [rng.randint(0, T) for _ in range(n)]
    return counts, NeuronParams(tuple(weights), theta), T, rng.randrange(2**32)


def run_verification(trials: int, seed: int, max_n_src=16, max_T=32, max_weight=None) -> VerificationReport:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = random.Random(seed)
    rep = VerificationReport(trials=trials, seed=seed)
    for i in range(trials):
        counts, params, T, sseed = random_instance(rng, max_n_src, max_T, max_weight)
        schedule = RANDOM if i % 2 else EVEN
        trace = simulate_if(SpikeMatrix.from_counts(counts, T, schedule, seed=sseed), params)
        try:
            n_oracle = spike_count_oracle(counts, params)
        except OutOfPremiseError:
            n_oracle = None
        if trace.premise_ok:
            rep.premise_ok += 1
            if trace.n != n_oracle:
                rep.oracle_mismatches += 1
            # same comparison check_equivalence makes, without simulating twice
            if trace.n != qnn_activation(params.drive(counts) / T, TwinSpec(T, params.threshold)).level:
                rep.equivalence_mismatches += 1
            th = params.threshold
            if not all(0 <= v < th for v in trace.potentials) or not 0 <= trace.residual_eps < 1:
                rep.bound_violations += 1
            rep.max_eps = max(rep.max_eps, float(trace.residual_eps))
        else:
            rep.premise_violations += 1
            if n_oracle is None or trace.n != n_oracle:
                rep.out_of_premise_mismatches += 1
            if n_oracle is not None:
                rep.max_count_deviation = max(rep.max_count_deviation, abs(trace.n - n_oracle))
            rep.max_abs_eps_out_of_premise = max(rep.max_abs_eps_out_of_premise, abs(float(trace.residual_eps)))
    return rep
