"""Analytical compute and data-movement energy for an SNN/QNN twin pair.

Everything is evaluated for one output neuron with ``n_src`` inputs. Energies
are exact :class:`~fractions.Fraction` picojoules, so the threshold
predicates and the direct energy comparisons they summarize agree bit for
bit, ties included.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

from .errors import ConfigurationError, DomainError
from .exact import as_fraction
from .twin import Scenario, bits_for_window, scenario_spike_rate

logger = logging.getLogger(__name__)

__all__ = [
    "HardwareProfile",
    "WorkloadConfig",
    "EnergyBreakdown",
    "AdvantageResult",
    "DataAdvantage",
    "SPARSE",
    "DENSE",
    "compute_energy_qnn",
    "compute_energy_snn",
    "mac_ratio",
    "compute_advantage",
    "data_energy_qnn",
    "data_energy_snn",
    "data_energy_snn_aggregated",
    "factor_F",
    "data_advantage",
    "total_energy",
]

SPARSE = "sparse"
DENSE = "dense"
AUTO = "auto"
AGGREGATED = "aggregated"
_MODES = (SPARSE, DENSE)


def _nonneg(name, value) -> Fraction:
    q = as_fraction(value)
    if q < 0:
        raise DomainError(f"{name} must be >= 0 pJ, got {q}")
    return q


@dataclass(frozen=True)
class HardwareProfile:
    """Per-operation and per-bit energy constants (pJ) for one technology point.

    ``e_mac`` is keyed by ``(activation_bits, weight_bits)`` and ``e_weight``
    by ``weight_bits``. Lookups that miss raise :class:`ConfigurationError`.
    """

    name: str
    e_acc: Fraction
    e_cmp: Fraction
    e_sub: Fraction
    e_move_dense: Fraction
    e_move_sparse: Fraction
    e_mac: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    e_weight: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for attr in ("e_acc", "e_cmp", "e_sub", "e_move_dense", "e_move_sparse"):
            object.__setattr__(self, attr, _nonneg(attr, getattr(self, attr)))
        mac = {(int(a), int(w)): _nonneg(f"e_mac[{a},{w}]", v) for (a, w), v in dict(self.e_mac).items()}
        wt = {int(b): _nonneg(f"e_weight[{b}]", v) for b, v in dict(self.e_weight).items()}
        object.__setattr__(self, "e_mac", mac)
        object.__setattr__(self, "e_weight", wt)
        if self.e_move_sparse < self.e_move_dense:
            warnings.warn(
                f"profile {self.name!r}: sparse per-bit cost {self.e_move_sparse} is below dense {self.e_move_dense}",
                stacklevel=3,
            )

    def mac(self, activation_bits: int, weight_bits: int) -> Fraction:
        try:
            return self.e_mac[(activation_bits, weight_bits)]
        except KeyError:
            raise ConfigurationError(
                f"profile {self.name!r} has no E_MAC entry for "
                f"(activation_bits={activation_bits}, weight_bits={weight_bits})"
            ) from None

    def weight(self, weight_bits: int) -> Fraction:
        try:
            return self.e_weight[weight_bits]
        except KeyError:
            raise ConfigurationError(
                f"profile {self.name!r} has no E_weight entry for weight_bits={weight_bits}"
            ) from None

    def uniform_unit_costs(self) -> bool:
        """True when accumulate, compare and subtract all cost the same."""
        return self.e_acc == self.e_cmp == self.e_sub

    def replace(self, **changes) -> "HardwareProfile":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return HardwareProfile(**data)


@dataclass(frozen=True)
class WorkloadConfig:
    n_src: int
    T: int
    s_r: Fraction
    gamma: Fraction
    weight_bits: int = 8

    def __post_init__(self):
        if int(self.n_src) != self.n_src or self.n_src < 1:
            raise DomainError(f"n_src must be a positive integer, got {self.n_src}")
        bits_for_window(self.T)
        if int(self.weight_bits) != self.weight_bits or self.weight_bits < 1:
            raise DomainError(f"weight_bits must be a positive integer, got {self.weight_bits}")
        s = as_fraction(self.s_r)
        g = as_fraction(self.gamma)
        if not 0 <= s <= 1:
            raise DomainError(f"spike rate must lie in [0, 1], got {s}")
        if not 0 <= g <= 1:
            raise DomainError(f"sparsity must lie in [0, 1], got {g}")
        object.__setattr__(self, "s_r", s)
        object.__setattr__(self, "gamma", g)

    @property
    def activation_bits(self) -> int:
        return bits_for_window(self.T)

    def with_(self, **changes) -> "WorkloadConfig":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return WorkloadConfig(**data)


@dataclass(frozen=True)
class EnergyBreakdown:
    compute_pj: Fraction
    data_pj: Fraction
    transmission_mode: str
    terms: dict
    aggregated: bool = False

    @property
    def total_pj(self) -> Fraction:
        return self.compute_pj + self.data_pj


class AdvantageResult(NamedTuple):
    holds: bool
    margin: Fraction
    closed_form: bool


class DataAdvantage(NamedTuple):
    holds: bool
    threshold: Fraction | None
    variable: str
    degenerate: bool = False


def _mode(mode: str) -> str:
    if mode not in _MODES:
        raise DomainError(f"transmission mode must be 'sparse' or 'dense', got {mode!r}")
    return mode


# -- compute ---------------------------------------------------------------

def compute_energy_qnn(cfg: WorkloadConfig, hw: HardwareProfile) -> Fraction:
    e_mac = hw.mac(cfg.activation_bits, cfg.weight_bits)
    return cfg.n_src * (1 - cfg.gamma) * e_mac + 2 * hw.e_cmp


def compute_energy_snn(cfg: WorkloadConfig, hw: HardwareProfile) -> Fraction:
    return cfg.n_src * cfg.T * cfg.s_r * hw.e_acc + cfg.T * (hw.e_cmp + cfg.s_r * hw.e_sub)


def mac_ratio(cfg: WorkloadConfig, hw: HardwareProfile) -> Fraction:
    """``k = E_MAC / E_ACC`` at the twin's activation width."""
    if hw.e_acc <= 0:
        raise DomainError("MAC ratio undefined for a zero accumulate cost")
    k = hw.mac(cfg.activation_bits, cfg.weight_bits) / hw.e_acc
    if k <= 0:
        raise DomainError(f"MAC ratio must be positive, got {k}")
    return k


def compute_advantage(cfg: WorkloadConfig, hw: HardwareProfile, exact: bool = True) -> AdvantageResult:
    """Does the SNN spend no more compute energy than its twin?

    With equal accumulate/compare/subtract costs this is the closed form
    ``T*s + (T + T*s - 2)/N <= k*(1-gamma)``. ``exact=False`` drops the 1/N
    term. Otherwise the two compute energies are compared directly, with the
    margin expressed in the same ``N*E_ACC`` units.
    """
    if hw.uniform_unit_costs() and hw.e_acc > 0:
        k = mac_ratio(cfg, hw)
        ts = cfg.T * cfg.s_r
        lhs = ts + (cfg.T + ts - 2) / cfg.n_src if exact else ts
        rhs = k * (1 - cfg.gamma)
        return AdvantageResult(lhs <= rhs, rhs - lhs, True)
    diff = compute_energy_qnn(cfg, hw) - compute_energy_snn(cfg, hw)
    scale = cfg.n_src * hw.e_acc if hw.e_acc > 0 else 1
    return AdvantageResult(diff >= 0, diff / scale, False)


# -- data movement ---------------------------------------------------------

def data_energy_qnn(cfg: WorkloadConfig, hw: HardwareProfile, mode: str) -> Fraction:
    ew = hw.weight(cfg.weight_bits)
    B = cfg.activation_bits
    if _mode(mode) == SPARSE:
        return cfg.n_src * (1 - cfg.gamma) * (B * hw.e_move_sparse + ew)
    return cfg.n_src * (B * hw.e_move_dense + ew)


def data_energy_snn(cfg: WorkloadConfig, hw: HardwareProfile, mode: str) -> Fraction:
    ew = hw.weight(cfg.weight_bits)
    if _mode(mode) == SPARSE:
        return cfg.n_src * cfg.T * cfg.s_r * (hw.e_move_sparse + ew)
    return cfg.n_src * cfg.T * (hw.e_move_dense + ew)


def aggregated_bits(T: int, strict_log2: bool = False) -> Fraction:
    """Word width for sending a spike count instead of individual slots.

    The default is ``ceil(log2(T+1))``, the width that can hold counts 0..T.
    ``strict_log2`` uses the real-valued ``log2(T)`` instead; that value is
    not exact, so it only serves comparisons against published curves.
    """
    if strict_log2:
        bits_for_window(T)
        return Fraction(math.log2(T))
    return Fraction(bits_for_window(T))


def data_energy_snn_aggregated(cfg: WorkloadConfig, hw: HardwareProfile, mode: str,
                               strict_log2: bool = False) -> Fraction:
    """Count-word transmission; sparsity is skipped per channel like a QNN."""
    ew = hw.weight(cfg.weight_bits)
    B = aggregated_bits(cfg.T, strict_log2)
    if _mode(mode) == SPARSE:
        return cfg.n_src * (1 - cfg.gamma) * (B * hw.e_move_sparse + ew)
    return cfg.n_src * (B * hw.e_move_dense + ew)


def factor_F(lambda_mode: str, T: int, weight_bits: int, hw: HardwareProfile) -> Fraction:
    """Ratio of the QNN's per-active-input data cost to one sparse SNN event.

    ``lambda_mode`` picks the QNN activation per-bit cost (sparse or dense).
    """
    ew = hw.weight(weight_bits)
    lam = hw.e_move_sparse if _mode(lambda_mode) == SPARSE else hw.e_move_dense
    denom = hw.e_move_sparse + ew
    if denom == 0:
        raise DomainError("F is undefined when the sparse per-event cost and weight cost are both zero")
    return (bits_for_window(T) * lam + ew) / denom


def data_advantage(cfg: WorkloadConfig, hw: HardwareProfile, scenario, qnn_mode: str) -> DataAdvantage:
    """Closed-form test of whether sparse SNN transmission beats the QNN's data cost.

    The scenario fixes the spike rate from ``gamma`` and ``T``; ``cfg.s_r`` is
    ignored. The returned threshold bounds ``T`` except for best-vs-dense,
    where it bounds ``gamma``.
    """
    scenario = Scenario.parse(scenario)
    qnn_mode = _mode(qnn_mode)
    g, T = cfg.gamma, cfg.T
    ew = hw.weight(cfg.weight_bits)

    if hw.e_move_sparse + ew == 0:
        # every sparse SNN event is free
        return DataAdvantage(True, None, "T", degenerate=True)

    if scenario is Scenario.BEST:
        if qnn_mode == SPARSE:
            return DataAdvantage(True, None, "T")
        thr = 1 - factor_F(DENSE, T, cfg.weight_bits, hw)
        return DataAdvantage(g >= thr, thr, "gamma")

    if g == 1:
        # no active inputs: both sides move nothing (sparse) or the SNN moves nothing (dense)
        return DataAdvantage(True, None, "T", degenerate=True)

    if scenario is Scenario.AVERAGE:
        if qnn_mode == SPARSE:
            thr = 2 * factor_F(SPARSE, T, cfg.weight_bits, hw) - 1
        else:
            thr = 2 * factor_F(DENSE, T, cfg.weight_bits, hw) / (1 - g) - 1
    else:
        if qnn_mode == SPARSE:
            thr = factor_F(SPARSE, T, cfg.weight_bits, hw)
        else:
            thr = factor_F(DENSE, T, cfg.weight_bits, hw) / (1 - g)
    return DataAdvantage(T <= thr, thr, "T")


# -- assembly --------------------------------------------------------------

def _pick(sparse: Fraction, dense: Fraction) -> tuple[Fraction, str]:
    # ties go to dense, the simpler hardware path
    return (sparse, SPARSE) if sparse < dense else (dense, DENSE)


def total_energy(cfg: WorkloadConfig, hw: HardwareProfile, snn_transmission: str = AUTO,
                 strict_log2: bool = False) -> tuple[EnergyBreakdown, EnergyBreakdown]:
    """SNN and QNN energy breakdowns for one operating point.

    The QNN always takes the cheaper of its sparse and dense data paths. The
    SNN does the same under ``auto``, or follows ``sparse``/``dense``, or uses
    count-word transmission under ``aggregated`` (cheaper of its two paths).
    """
    # QNN
    e_mac = hw.mac(cfg.activation_bits, cfg.weight_bits)
    q_active = cfg.n_src * (1 - cfg.gamma) * e_mac
    q_clamp = 2 * hw.e_cmp
    q_data, q_mode = _pick(data_energy_qnn(cfg, hw, SPARSE), data_energy_qnn(cfg, hw, DENSE))
    ew = hw.weight(cfg.weight_bits)
    q_wt = cfg.n_src * (1 - cfg.gamma) * ew if q_mode == SPARSE else cfg.n_src * ew
    qnn = EnergyBreakdown(
        compute_pj=q_active + q_clamp,
        data_pj=q_data,
        transmission_mode=q_mode,
        terms={
            "mac": q_active,
            "clamping": q_clamp,
            "activation-move": q_data - q_wt,
            "weight-fetch": q_wt,
        },
    )

    # SNN
    membrane = cfg.n_src * cfg.T * cfg.s_r * hw.e_acc
    spiking = cfg.T * (hw.e_cmp + cfg.s_r * hw.e_sub)
    aggregated = snn_transmission == AGGREGATED
    if aggregated:
        sp = data_energy_snn_aggregated(cfg, hw, SPARSE, strict_log2)
        de = data_energy_snn_aggregated(cfg, hw, DENSE, strict_log2)
        s_data, s_mode = _pick(sp, de)
        s_wt = cfg.n_src * (1 - cfg.gamma) * ew if s_mode == SPARSE else cfg.n_src * ew
    else:
        if snn_transmission == AUTO:
            s_data, s_mode = _pick(data_energy_snn(cfg, hw, SPARSE), data_energy_snn(cfg, hw, DENSE))
        elif snn_transmission in _MODES:
            s_mode = snn_transmission
            s_data = data_energy_snn(cfg, hw, s_mode)
        else:
            raise DomainError(f"unknown SNN transmission {snn_transmission!r}")
        events = cfg.n_src * cfg.T * (cfg.s_r if s_mode == SPARSE else 1)
        s_wt = events * ew
    snn = EnergyBreakdown(
        compute_pj=membrane + spiking,
        data_pj=s_data,
        transmission_mode=s_mode,
        terms={
            "membrane-update": membrane,
            "spiking-ops": spiking,
            "activation-move": s_data - s_wt,
            "weight-fetch": s_wt,
        },
        aggregated=aggregated,
    )
    return snn, qnn
