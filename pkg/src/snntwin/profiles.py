"""Built-in hardware presets, default cost tables and JSON (de)serialization.

Profile JSON layout::

    {
      "name": "typical-neuromorphic",
      "e_acc": "0.05448", "e_cmp": "0.05448", "e_sub": "0.05448",
      "e_move_dense": "0.25", "e_move_sparse": "3.0",
      "e_weight": [{"weight_bits": 8, "pj": "0.18"}, ...],
      "e_mac": [{"activation_bits": 3, "weight_bits": 8, "pj": "0.32688"}, ...]
    }

Energies are decimal strings (``"n/d"`` is also accepted); plain JSON numbers
are read through :class:`decimal.Decimal` so they stay exact.
"""
from __future__ import annotations

import json
import os
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .energy import HardwareProfile
from .errors import ConfigurationError
from .exact import as_fraction, to_decimal_str

__all__ = [
    "UNIT_OP_PJ",
    "WEIGHT_8BIT_PJ",
    "PRESET_NAMES",
    "multiplier_mac_table",
    "weight_energy_table",
    "builtin_profiles",
    "profile_to_dict",
    "profile_from_dict",
    "load_profile",
    "save_profile",
    "resolve_profile",
    "PROFILE_DIR_ENV",
]

PROFILE_DIR_ENV = "SNN_TWIN_PROFILE_DIR"

UNIT_OP_PJ = Fraction("0.05448")
WEIGHT_8BIT_PJ = Fraction("0.18")
MAX_TABLE_BITS = 16

# name -> (sparse pJ/bit, dense pJ/bit)
_MOVE_COSTS = {
    "theoretical-min": (Fraction(0), Fraction(0)),
    "typical-neuromorphic": (Fraction(3), Fraction("0.25")),
    # one 64-bit DRAM word per spike; dense amortizes it over the word
    "worst-sparse": (Fraction(1300), Fraction(1300, 64)),
}
PRESET_NAMES = tuple(_MOVE_COSTS)


def multiplier_mac_table(e_acc=UNIT_OP_PJ, k_ref=16, ref_bits=(8, 8), max_bits=MAX_TABLE_BITS):
    """Placeholder E_MAC table: energy proportional to multiplier area ``a*w``.

    Scaled so that ``E_MAC(ref_bits) = k_ref * e_acc``. With the defaults,
    ``k = a*w/4``, e.g. 6 for a 3-bit by 8-bit MAC. These are not measured
    values; supply a calibrated table for quantitative work.
    """
    e_acc = as_fraction(e_acc)
    per_unit = as_fraction(k_ref) * e_acc / (ref_bits[0] * ref_bits[1])
    return {(a, w): per_unit * a * w for a in range(1, max_bits + 1) for w in range(1, max_bits + 1)}


def weight_energy_table(e_ref=WEIGHT_8BIT_PJ, ref_bits=8, fixed_fraction=Fraction(1, 2), max_bits=MAX_TABLE_BITS):
    """Per-access weight energy as a fixed part plus a part proportional to width.

    ``fixed_fraction`` is the share of ``e_ref`` spent regardless of width
    (decode, wordline); 0 gives purely linear scaling.
    """
    e_ref = as_fraction(e_ref)
    ff = as_fraction(fixed_fraction)
    return {b: e_ref * (ff + (1 - ff) * Fraction(b, ref_bits)) for b in range(1, max_bits + 1)}


def builtin_profiles(mac_table=None, weight_table=None) -> dict[str, HardwareProfile]:
    mac_table = multiplier_mac_table() if mac_table is None else mac_table
    weight_table = weight_energy_table() if weight_table is None else weight_table
    out = {}
    for name, (sparse, dense) in _MOVE_COSTS.items():
        out[name] = HardwareProfile(
            name=name,
            e_acc=UNIT_OP_PJ,
            e_cmp=UNIT_OP_PJ,
            e_sub=UNIT_OP_PJ,
            e_move_dense=dense,
            e_move_sparse=sparse,
            e_mac=dict(mac_table),
            e_weight=dict(weight_table),
        )
    return out


def profile_to_dict(hw: HardwareProfile) -> dict:
    return {
        "name": hw.name,
        "e_acc": to_decimal_str(hw.e_acc),
        "e_cmp": to_decimal_str(hw.e_cmp),
        "e_sub": to_decimal_str(hw.e_sub),
        "e_move_dense": to_decimal_str(hw.e_move_dense),
        "e_move_sparse": to_decimal_str(hw.e_move_sparse),
        "e_weight": [{"weight_bits": b, "pj": to_decimal_str(v)} for b, v in sorted(hw.e_weight.items())],
        "e_mac": [
            {"activation_bits": a, "weight_bits": w, "pj": to_decimal_str(v)}
            for (a, w), v in sorted(hw.e_mac.items())
        ],
    }


def _num(doc, key, where):
    if key not in doc:
        raise ConfigurationError(f"{where}: missing field {key!r}")
    try:
        return as_fraction(doc[key])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"{where}: field {key!r} is not a number: {doc[key]!r}") from exc


def profile_from_dict(doc: dict, source: str = "<profile>") -> HardwareProfile:
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{source}: profile must be a JSON object")
    scalars = {k: _num(doc, k, source) for k in ("e_acc", "e_cmp", "e_sub", "e_move_dense", "e_move_sparse")}
    e_weight = {}
    for rec in doc.get("e_weight", []):
        e_weight[int(rec["weight_bits"])] = _num(rec, "pj", f"{source} e_weight")
    e_mac = {}
    for rec in doc.get("e_mac", []):
        e_mac[(int(rec["activation_bits"]), int(rec["weight_bits"]))] = _num(rec, "pj", f"{source} e_mac")
    try:
        return HardwareProfile(name=str(doc.get("name", Path(source).stem)), e_mac=e_mac, e_weight=e_weight, **scalars)
    except ValueError as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc


def load_profile(path) -> HardwareProfile:
    path = Path(path)
    with path.open() as fh:
        try:
            doc = json.load(fh, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return profile_from_dict(doc, str(path))


def save_profile(hw: HardwareProfile, path) -> None:
    with Path(path).open("w") as fh:
        json.dump(profile_to_dict(hw), fh, indent=2)
        fh.write("\n")


def resolve_profile(name_or_path: str, profile_dir=None) -> HardwareProfile:
    """Look up a profile by file path, by name in the profile directory, or among the presets.

    A file ``<name>.json`` in ``profile_dir`` (default: ``$SNN_TWIN_PROFILE_DIR``)
    overrides the built-in of the same name.
    """
    p = Path(name_or_path)
    if p.suffix == ".json" or p.is_file():
        if not p.is_file():
            raise ConfigurationError(f"profile file {p} not found")
        return load_profile(p)
    profile_dir = profile_dir if profile_dir is not None else os.environ.get(PROFILE_DIR_ENV)
    if profile_dir:
        candidate = Path(profile_dir) / f"{name_or_path}.json"
        if candidate.is_file():
            return load_profile(candidate)
    presets = builtin_profiles()
    if name_or_path in presets:
        return presets[name_or_path]
    raise ConfigurationError(f"unknown hardware profile {name_or_path!r}; built-ins are {', '.join(PRESET_NAMES)}")
