"""Canonical JSON for networks, operating points and instances.

Reals are written as decimal strings with 17 significant digits, which
round-trips every double exactly; keys are sorted. Readers accept either
strings or JSON numbers. An unbounded limit or capacity is the string
``"unbounded"``.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .cnf import CnfInstance
from .network import Bus, Line, Network, NetworkError, OperatingPoint
from .reduction import ThroughputInstance

__all__ = [
    "JsonFormatError",
    "fmt_real",
    "parse_real",
    "dumps",
    "network_to_dict",
    "network_from_dict",
    "point_to_dict",
    "point_from_dict",
    "instance_to_dict",
    "instance_from_dict",
    "to_jsonable",
]

UNBOUNDED = "unbounded"


class JsonFormatError(ValueError):
    pass


def fmt_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise JsonFormatError(f"non-finite real {x!r}")
    return format(x, ".17g")


def parse_real(v: Any, what: str = "value") -> float:
    if isinstance(v, bool):
        raise JsonFormatError(f"{what}: expected a real, got {v!r}")
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise JsonFormatError(f"{what}: expected a real, got {v!r}") from None
    if not math.isfinite(x):
        raise JsonFormatError(f"{what}: non-finite real")
    return x


def _opt_real(x: float | None) -> str:
    return UNBOUNDED if x is None else fmt_real(x)


def _parse_opt_real(v: Any, what: str) -> float | None:
    return None if v == UNBOUNDED or v is None else parse_real(v, what)


def to_jsonable(obj: Any) -> Any:
    """Recursively replace floats by canonical decimal strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return fmt_real(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "value"):  # enums
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=1) + "\n"


def network_to_dict(net: Network) -> dict:
    return {
        "buses": [
            {"id": b.id, "injection": b.injection, "kind": b.kind.value, "capacity": _opt_real(b.capacity)}
            for b in net.buses
        ],
        "lines": [
            {
                "from": ln.from_bus,
                "to": ln.to_bus,
                "reactance": ln.reactance,
                "flow_limit": _opt_real(ln.flow_limit),
                "angle_limit": ln.angle_limit,
            }
            for ln in net.lines
        ],
    }


def network_from_dict(d: dict) -> Network:
    try:
        buses = [
            Bus(
                str(b["id"]),
                parse_real(b.get("injection", 0), f"bus {b['id']} injection"),
                b.get("kind", "internal"),
                _parse_opt_real(b.get("capacity"), f"bus {b['id']} capacity"),
            )
            for b in d["buses"]
        ]
        lines = [
            Line(
                str(ln["from"]),
                str(ln["to"]),
                parse_real(ln["reactance"], "reactance"),
                _parse_opt_real(ln.get("flow_limit"), "flow_limit"),
                parse_real(ln.get("angle_limit", math.pi / 2), "angle_limit"),
            )
            for ln in d["lines"]
        ]
        return Network(tuple(buses), tuple(lines))
    except (KeyError, TypeError) as exc:
        raise JsonFormatError(f"malformed network: {exc!r}") from None
    except NetworkError as exc:
        raise JsonFormatError(str(exc)) from None


def point_to_dict(pt: OperatingPoint) -> dict:
    d = {"angles": dict(pt.angles), "flows": dict(pt.flows)}
    if pt.injections:
        d["injections"] = dict(pt.injections)
    return d


def point_from_dict(d: dict) -> OperatingPoint:
    try:
        return OperatingPoint(
            {str(k): parse_real(v, f"angle {k}") for k, v in d["angles"].items()},
            {str(k): parse_real(v, f"flow {k}") for k, v in d["flows"].items()},
            {str(k): parse_real(v, f"injection {k}") for k, v in d.get("injections", {}).items()},
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise JsonFormatError(f"malformed operating point: {exc!r}") from None


def instance_to_dict(inst: ThroughputInstance) -> dict:
    d = network_to_dict(inst.network)
    d["generators"] = [{"bus": b, "capacity": cap} for b, cap in inst.generators]
    d["load"] = inst.load
    d["threshold"] = inst.threshold
    d["labels"] = dict(inst.labels)
    d["cnf"] = {"num_vars": inst.cnf.num_vars, "clauses": [list(c) for c in inst.cnf.clauses]}
    return d


def instance_from_dict(d: dict) -> ThroughputInstance:
    net = network_from_dict(d)
    try:
        cnf = CnfInstance(int(d["cnf"]["num_vars"]), tuple(tuple(int(x) for x in c) for c in d["cnf"]["clauses"]))
        generators = tuple((str(g["bus"]), parse_real(g["capacity"], "capacity")) for g in d["generators"])
        load = str(d["load"])
        net.bus(load)
        return ThroughputInstance(
            network=net,
            load=load,
            generators=generators,
            threshold=parse_real(d["threshold"], "threshold"),
            labels={str(k): str(v) for k, v in d["labels"].items()},
            cnf=cnf,
        )
    except (KeyError, TypeError) as exc:
        raise JsonFormatError(f"malformed instance: {exc!r}") from None
    except ValueError as exc:
        raise JsonFormatError(str(exc)) from None
