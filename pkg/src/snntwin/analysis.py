"""Breakeven solving, transmission threshold and parameter sweeps.

For a fixed configuration the SNN total energy is piecewise affine in the
spike rate. It uses sparse transmission below the sparse/dense threshold and
dense transmission at or above it, so each breakeven root is found in closed
form on one segment, exactly.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .energy import (
    AUTO,
    DENSE,
    SPARSE,
    HardwareProfile,
    WorkloadConfig,
    compute_energy_qnn,
    compute_energy_snn,
    total_energy,
)
from .errors import DomainError, InfeasibleScenarioError
from .exact import as_fraction, fmt_float
from .twin import Scenario, bits_for_window, scenario_sparsity

__all__ = [
    "ModelPreset",
    "MODEL_PRESETS",
    "BreakevenResult",
    "SweepRecord",
    "CSV_FIELDS",
    "BREAKEVEN_FIELDS",
    "sparse_dense_threshold",
    "breakeven_spike_rate",
    "breakeven_annotations",
    "landscape",
    "sensitivity",
    "evaluate_point",
    "write_csv",
    "write_breakeven_csv",
    "records_to_json",
    "breakeven_to_json",
]

ROOT = "root"
NO_ROOT = "infeasible"
SNN_ALWAYS = "snn_always_wins"


@dataclass(frozen=True)
class ModelPreset:
    name: str
    T: int
    s_r: Fraction

    def __post_init__(self):
        bits_for_window(self.T)
        s = as_fraction(self.s_r)
        if not 0 <= s <= 1:
            raise DomainError(f"preset {self.name}: spike rate {s} outside [0, 1]")
        object.__setattr__(self, "s_r", s)


MODEL_PRESETS = (
    ModelPreset("efficient", 2, Fraction("0.02")),
    ModelPreset("typical", 4, Fraction("0.1")),
    ModelPreset("high-performance", 32, Fraction("0.20")),
)


def sparse_dense_threshold(hw: HardwareProfile, weight_bits: int) -> Fraction:
    """Spike rate at or above which dense SNN transmission is no dearer than sparse."""
    ew = hw.weight(weight_bits)
    denom = hw.e_move_sparse + ew
    if denom == 0:
        raise DomainError("threshold undefined: sparse per-event cost and weight cost are both zero")
    return (hw.e_move_dense + ew) / denom


@dataclass(frozen=True)
class BreakevenResult:
    s_star: Fraction | None
    segment: str | None
    bracket: tuple[Fraction, Fraction]
    qnn_energy_pj: Fraction
    status: str
    T: int
    n_src: int
    gamma: Fraction
    weight_bits: int
    hw: str
    threshold: Fraction

    @property
    def has_root(self) -> bool:
        return self.status == ROOT


def _snn_affine(T, n_src, weight_bits, hw):
    """Intercepts and slopes of E_SNN(s) on the sparse and dense segments."""
    ew = hw.weight(weight_bits)
    base = T * hw.e_cmp
    slope_c = n_src * T * hw.e_acc + T * hw.e_sub
    sparse = (base, slope_c + n_src * T * (hw.e_move_sparse + ew))
    dense = (base + n_src * T * (hw.e_move_dense + ew), slope_c)
    return sparse, dense


def _segment_root(line, target, lo, hi):
    a, b = line
    if b == 0:
        return lo if a == target else None
    s = (target - a) / b
    return s if lo <= s <= hi else None


def breakeven_spike_rate(T: int, n_src: int, gamma_qnn, weight_bits: int, hw: HardwareProfile) -> BreakevenResult:
    """Smallest spike rate at which the SNN (auto transmission) costs as much as the QNN."""
    gamma = as_fraction(gamma_qnn)
    cfg = WorkloadConfig(n_src=n_src, T=T, s_r=0, gamma=gamma, weight_bits=weight_bits)
    e_q = total_energy(cfg, hw)[1].total_pj
    sparse, dense = _snn_affine(T, n_src, weight_bits, hw)

    try:
        th = sparse_dense_threshold(hw, weight_bits)
    except DomainError:
        th = Fraction(2)  # sparse path is free; it wins on all of [0, 1]
    echo = dict(qnn_energy_pj=e_q, T=T, n_src=n_src, gamma=gamma, weight_bits=weight_bits, hw=hw.name, threshold=th)

    def e_snn(s):
        return sparse[0] + sparse[1] * s if s < th else dense[0] + dense[1] * s

    e0, e1 = e_snn(Fraction(0)), e_snn(Fraction(1))
    if e0 > e_q:
        return BreakevenResult(None, None, (Fraction(0), Fraction(1)), status=NO_ROOT, **echo)
    if e1 < e_q:
        seg = SPARSE if th > 1 else DENSE
        return BreakevenResult(Fraction(1), seg, (Fraction(0), Fraction(1)), status=SNN_ALWAYS, **echo)

    segments = []
    if th > 0:
        segments.append((SPARSE, sparse, Fraction(0), min(th, Fraction(1))))
    if th <= 1:
        segments.append((DENSE, dense, max(th, Fraction(0)), Fraction(1)))
    for name, line, lo, hi in segments:
        s = _segment_root(line, e_q, lo, hi)
        # the sparse segment is half-open at th; a root exactly there belongs to dense
        if s is not None and not (name == SPARSE and s == th):
            return BreakevenResult(s, name, (lo, hi), status=ROOT, **echo)
    raise AssertionError("continuous non-decreasing E_SNN brackets E_QNN but no root found")  # pragma: no cover


def breakeven_annotations(results: Iterable[BreakevenResult]) -> dict:
    """Worst-case breakeven spike rates over window ranges, from the roots found."""
    roots = [(r.T, r.s_star) for r in results if r.has_root]

    def worst(pred):
        vals = [s for t, s in roots if pred(t)]
        return float(max(vals)) if vals else None

    return {
        "max_s_star_T_below_5": worst(lambda t: t < 5),
        "max_s_star_T_5_to_10": worst(lambda t: 5 <= t <= 10),
        "max_s_star_T_above_5": worst(lambda t: t > 5),
    }


@dataclass(frozen=True)
class SweepRecord:
    model: str
    hw: str
    scenario: str
    T: int
    s_r: Fraction
    gamma: Fraction | None
    n_src: int
    weight_bits: int
    feasible: bool
    e_snn_compute_pj: Fraction | None = None
    e_snn_data_pj: Fraction | None = None
    snn_mode: str = ""
    e_qnn_compute_pj: Fraction | None = None
    e_qnn_data_pj: Fraction | None = None
    compute_advantage: bool | None = None
    data_advantage: bool | None = None
    total_advantage: bool | None = None

    @property
    def activation_bits(self) -> int:
        return bits_for_window(self.T)

    @property
    def e_snn_pj(self):
        return None if not self.feasible else self.e_snn_compute_pj + self.e_snn_data_pj

    @property
    def e_qnn_pj(self):
        return None if not self.feasible else self.e_qnn_compute_pj + self.e_qnn_data_pj

    @property
    def ratio(self) -> float | None:
        if not self.feasible or self.e_qnn_pj == 0:
            return None
        return float(self.e_snn_pj / self.e_qnn_pj)


def evaluate_point(model, hw, scenario_label, cfg, snn_mode=AUTO) -> SweepRecord:
    snn, qnn = total_energy(cfg, hw, snn_mode)
    mode = ("aggregated-" if snn.aggregated else "") + snn.transmission_mode
    return SweepRecord(
        model=model, hw=hw.name, scenario=scenario_label, T=cfg.T, s_r=cfg.s_r, gamma=cfg.gamma,
        n_src=cfg.n_src, weight_bits=cfg.weight_bits, feasible=True,
        e_snn_compute_pj=snn.compute_pj, e_snn_data_pj=snn.data_pj, snn_mode=mode,
        e_qnn_compute_pj=qnn.compute_pj, e_qnn_data_pj=qnn.data_pj,
        compute_advantage=compute_energy_snn(cfg, hw) <= compute_energy_qnn(cfg, hw),
        data_advantage=snn.data_pj <= qnn.data_pj,
        total_advantage=snn.total_pj <= qnn.total_pj,
    )


def landscape(models: Sequence[ModelPreset] = MODEL_PRESETS, hws: Sequence[HardwareProfile] = (),
              scenarios: Sequence = tuple(Scenario), n_src: int = 4096, weight_bits: int = 8) -> list[SweepRecord]:
    """One record per (model, hardware, scenario) in that nesting order.

    The QNN sparsity for each cell is derived from the model's spike rate
    under the scenario; cells where that is impossible get a marker record.
    """
    records = []
    for m in models:
        for hw in hws:
            for sc in scenarios:
                sc = Scenario.parse(sc)
                try:
                    gamma = scenario_sparsity(m.s_r, m.T, sc)
                except InfeasibleScenarioError:
                    records.append(SweepRecord(m.name, hw.name, sc.value, m.T, m.s_r, None, n_src, weight_bits, False))
                    continue
                cfg = WorkloadConfig(n_src=n_src, T=m.T, s_r=m.s_r, gamma=gamma, weight_bits=weight_bits)
                records.append(evaluate_point(m.name, hw, sc.value, cfg))
    return records


def sensitivity(T_range: Iterable[int], s_r_grid: Iterable, weight_bits_set: Iterable[int],
                n_src_set: Iterable[int], hw: HardwareProfile, gamma_qnn=Fraction("0.8")):
    """Energy versus spike rate against a QNN at fixed sparsity.

    Returns ``(records, breakevens)``. Records are ordered by T, then weight
    bits, then n_src, then spike rate. There is one breakeven result per
    (T, weight bits, n_src).
    """
    T_range = list(T_range)
    s_grid = [as_fraction(s) for s in s_r_grid]
    bits_set = list(weight_bits_set)
    n_set = list(n_src_set)
    if not (T_range and s_grid and bits_set and n_set):
        raise DomainError("sensitivity grids must be non-empty")
    gamma = as_fraction(gamma_qnn)
    records, breakevens = [], []
    for T in T_range:
        for wb in bits_set:
            for n in n_set:
                for s in s_grid:
                    cfg = WorkloadConfig(n_src=n, T=T, s_r=s, gamma=gamma, weight_bits=wb)
                    records.append(evaluate_point("sweep", hw, "fixed-gamma", cfg))
                breakevens.append(breakeven_spike_rate(T, n, gamma, wb, hw))
    return records, breakevens


# -- output ----------------------------------------------------------------

CSV_FIELDS = (
    "model", "hw", "scenario", "T", "s_r", "gamma", "n_src", "weight_bits", "activation_bits",
    "e_snn_compute_pj", "e_snn_data_pj", "e_snn_total_pj", "snn_mode",
    "e_qnn_compute_pj", "e_qnn_data_pj", "e_qnn_total_pj", "ratio", "feasible",
)

BREAKEVEN_FIELDS = (
    "hw", "T", "n_src", "gamma", "weight_bits", "activation_bits", "qnn_energy_pj",
    "s_star", "segment", "segment_lo", "segment_hi", "status", "transmission_threshold",
)


def _record_values(r: SweepRecord) -> dict:
    return {
        "model": r.model, "hw": r.hw, "scenario": r.scenario, "T": r.T, "s_r": r.s_r, "gamma": r.gamma,
        "n_src": r.n_src, "weight_bits": r.weight_bits, "activation_bits": r.activation_bits,
        "e_snn_compute_pj": r.e_snn_compute_pj, "e_snn_data_pj": r.e_snn_data_pj, "e_snn_total_pj": r.e_snn_pj,
        "snn_mode": r.snn_mode,
        "e_qnn_compute_pj": r.e_qnn_compute_pj, "e_qnn_data_pj": r.e_qnn_data_pj, "e_qnn_total_pj": r.e_qnn_pj,
        "ratio": r.ratio, "feasible": r.feasible,
    }


def _cell(key, value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, str)):
        return str(value)
    return fmt_float(value, 6 if key == "ratio" else 10)


def _json_value(key, value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return float(_cell(key, value))


def write_csv(records: Iterable[SweepRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        vals = _record_values(r)
        w.writerow([_cell(k, vals[k]) for k in CSV_FIELDS])


def records_to_json(records: Iterable[SweepRecord]) -> list[dict]:
    out = []
    for r in records:
        vals = _record_values(r)
        out.append({k: _json_value(k, vals[k]) for k in CSV_FIELDS})
    return out


def _breakeven_values(b: BreakevenResult) -> dict:
    return {
        "hw": b.hw, "T": b.T, "n_src": b.n_src, "gamma": b.gamma, "weight_bits": b.weight_bits,
        "activation_bits": bits_for_window(b.T), "qnn_energy_pj": b.qnn_energy_pj,
        "s_star": b.s_star, "segment": b.segment, "segment_lo": b.bracket[0], "segment_hi": b.bracket[1],
        "status": b.status, "transmission_threshold": b.threshold,
    }


def write_breakeven_csv(results: Iterable[BreakevenResult], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BREAKEVEN_FIELDS)
    for b in results:
        vals = _breakeven_values(b)
        w.writerow([_cell(k, vals[k]) for k in BREAKEVEN_FIELDS])


def breakeven_to_json(results: Iterable[BreakevenResult]) -> list[dict]:
    out = []
    for b in results:
        vals = _breakeven_values(b)
        out.append({k: _json_value(k, vals[k]) for k in BREAKEVEN_FIELDS})
    return out


def csv_text(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"
