"""JSON wire formats.

Instance:   {"agents": n, "items": m, "values": [[...], ...]}
Lottery:    {"support": [{"prob": "p/q", "bundles": [[...], ...]}, ...]}
Fractional: {"agents": n, "items": m, "x": [[...], ...]}

Rationals are written as strings ("9/2", "5"); integers are accepted on input.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .errors import InvalidInstance
from .model import (
    Allocation,
    FractionalAllocation,
    Instance,
    Lottery,
    as_fraction,
    new_instance,
)


def q(value: Fraction) -> str:
    return str(value)


def instance_to_json(inst: Instance) -> dict:
    return {
        "agents": inst.n,
        "items": inst.m,
        "values": [[_int_or_str(v) for v in row] for row in inst.values],
    }


def _int_or_str(v: Fraction):
    return v.numerator if v.denominator == 1 else str(v)


def instance_from_json(data: dict) -> Instance:
    try:
        values = data["values"]
    except (KeyError, TypeError) as exc:
        raise InvalidInstance("instance JSON needs a 'values' matrix") from exc
    inst = new_instance(values)
    if "agents" in data and data["agents"] != inst.n:
        raise InvalidInstance(f"'agents' says {data['agents']} but values has {inst.n} rows")
    if "items" in data and data["items"] != inst.m:
        raise InvalidInstance(f"'items' says {data['items']} but rows have {inst.m} entries")
    return inst


def allocation_to_json(alloc: Allocation) -> list[list[int]]:
    return [sorted(b) for b in alloc.bundles]


def lottery_to_json(lot: Lottery) -> dict:
    return {"support": [{"prob": q(p), "bundles": allocation_to_json(a)} for p, a in lot.support]}


def lottery_from_json(data: dict) -> Lottery:
    """Accepts a lottery, or a bare ``{"bundles": ...}`` allocation as a point mass."""
    if "support" not in data and "bundles" in data:
        return Lottery(((Fraction(1), Allocation.of(data["bundles"])),))
    try:
        entries = data["support"]
        return Lottery(tuple((as_fraction(e["prob"]), Allocation.of(e["bundles"])) for e in entries))
    except (KeyError, TypeError) as exc:
        raise InvalidInstance("lottery JSON needs 'support' entries with 'prob' and 'bundles'") from exc


def fractional_to_json(fa: FractionalAllocation) -> dict:
    return {"agents": fa.n, "items": fa.m, "x": [[q(v) for v in row] for row in fa.x]}


def fractional_from_json(data: dict) -> FractionalAllocation:
    try:
        return FractionalAllocation.of(data["x"])
    except (KeyError, TypeError) as exc:
        raise InvalidInstance("fractional allocation JSON needs an 'x' matrix") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
