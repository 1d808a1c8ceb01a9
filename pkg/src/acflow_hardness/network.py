"""Lossless AC power-flow feasibility model.

A network is a directed graph of buses and lines. An operating point assigns
a phase angle to every bus and a real power flow to every line. The model
constraints are

    N f = b                               (flow conservation)
    sin(theta_i - theta_j) = x_ij f_ij    (lossless coupling)
    |theta_i - theta_j| <= angle_limit    (angle limits)

plus an optional flow limit per line. Flows are stored explicitly so that the
epsilon-relaxed coupling ``|sin(theta_i - theta_j) - x_ij f_ij| <= eps`` can be
checked on witnesses whose flows were not derived from their angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Mapping

__all__ = [
    "BusKind",
    "Bus",
    "Line",
    "Network",
    "OperatingPoint",
    "LimitViolation",
    "FeasibilityReport",
    "NetworkError",
    "flow_from_angles",
    "balance_vector",
    "residuals",
    "check_feasible",
    "throughput",
    "DEFAULT_LIMIT_SLACK",
]

HALF_PI = math.pi / 2

# Absorbs representation rounding when comparing against hard limits.
DEFAULT_LIMIT_SLACK = 1e-9


class NetworkError(ValueError):
    """Malformed network, operating point, or query."""


class BusKind(str, Enum):
    GENERATOR = "generator"
    LOAD = "load"
    INTERNAL = "internal"


@dataclass(frozen=True)
class Bus:
    """A network node.

    ``injection`` is the net generation b_i (positive = generation).
    ``capacity`` is the maximum injection of a generator; ``None`` means
    unbounded and is the only value allowed for non-generators.
    """

    id: str
    injection: float = 0.0
    kind: BusKind = BusKind.INTERNAL
    capacity: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BusKind(self.kind))
        if not self.id or "->" in self.id:
            raise NetworkError(f"invalid bus id {self.id!r}")
        if self.capacity is not None and self.capacity < 0:
            raise NetworkError(f"bus {self.id}: negative capacity")
        problem = injection_problem(self, self.injection)
        if problem:
            raise NetworkError(f"bus {self.id}: {problem}")


def injection_problem(bus: Bus, value: float, slack: float = 0.0) -> str | None:
    """Describe why ``value`` is not an admissible injection at ``bus``."""
    if bus.kind is BusKind.GENERATOR:
        if value < -slack:
            return f"generator injection {value!r} < 0"
        if bus.capacity is not None and value > bus.capacity + slack:
            return f"generator injection {value!r} exceeds capacity {bus.capacity!r}"
    elif bus.kind is BusKind.LOAD:
        if value > slack:
            return f"load injection {value!r} > 0"
    elif abs(value) > slack:
        return f"internal bus injection {value!r} != 0"
    return None


@dataclass(frozen=True)
class Line:
    """A directed line ``from_bus -> to_bus``.

    ``flow_limit=None`` marks an unbounded line; the angle limit still caps
    the flow at ``1 / reactance``.
    """

    from_bus: str
    to_bus: str
    reactance: float = 1.0
    flow_limit: float | None = None
    angle_limit: float = HALF_PI

    def __post_init__(self) -> None:
        if self.from_bus == self.to_bus:
            raise NetworkError(f"self-loop at bus {self.from_bus}")
        if not self.reactance > 0:
            raise NetworkError(f"line {self.id}: reactance must be positive")
        if self.flow_limit is not None and not self.flow_limit > 0:
            raise NetworkError(f"line {self.id}: flow limit must be positive")
        if not 0 < self.angle_limit <= HALF_PI:
            raise NetworkError(f"line {self.id}: angle limit must lie in (0, pi/2]")

    @property
    def id(self) -> str:
        return f"{self.from_bus}->{self.to_bus}"


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "lines", tuple(self.lines))
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise NetworkError("duplicate bus id")
        known = set(ids)
        seen = set()
        for line in self.lines:
            for end in (line.from_bus, line.to_bus):
                if end not in known:
                    raise NetworkError(f"line {line.id}: unknown bus {end}")
            if line.id in seen:
                raise NetworkError(f"duplicate line {line.id}")
            seen.add(line.id)

    @cached_property
    def bus_index(self) -> dict[str, Bus]:
        return {b.id: b for b in self.buses}

    @cached_property
    def line_index(self) -> dict[str, Line]:
        return {line.id: line for line in self.lines}

    @cached_property
    def incident(self) -> dict[str, tuple[list[Line], list[Line]]]:
        """Map bus id -> (outgoing lines, incoming lines)."""
        out: dict[str, tuple[list[Line], list[Line]]] = {b.id: ([], []) for b in self.buses}
        for line in self.lines:
            out[line.from_bus][0].append(line)
            out[line.to_bus][1].append(line)
        return out

    @property
    def total_injection(self) -> float:
        return math.fsum(b.injection for b in self.buses)

    def is_balanced(self, tol: float = 1e-12) -> bool:
        return abs(self.total_injection) <= tol

    def bus(self, bus_id: str) -> Bus:
        try:
            return self.bus_index[bus_id]
        except KeyError:
            raise NetworkError(f"unknown bus {bus_id!r}") from None

    def line(self, line_id: str) -> Line:
        try:
            return self.line_index[line_id]
        except KeyError:
            raise NetworkError(f"unknown line {line_id!r}") from None


@dataclass(frozen=True)
class OperatingPoint:
    """Angles per bus, flows per line id (``"from->to"``).

    ``injections`` optionally overrides the network's bus injections; witness
    points use it to carry generator dispatch and load withdrawal.
    """

    angles: Mapping[str, float]
    flows: Mapping[str, float]
    injections: Mapping[str, float] = field(default_factory=dict)

    def injection(self, bus: Bus) -> float:
        return self.injections.get(bus.id, bus.injection)

    def check_dimensions(self, net: Network) -> None:
        missing = [b.id for b in net.buses if b.id not in self.angles]
        if missing:
            raise NetworkError(f"missing angle for bus {missing[0]!r}")
        missing = [line.id for line in net.lines if line.id not in self.flows]
        if missing:
            raise NetworkError(f"missing flow for line {missing[0]!r}")
        extra = set(self.angles) - net.bus_index.keys()
        extra |= set(self.injections) - net.bus_index.keys()
        extra |= set(self.flows) - net.line_index.keys()
        if extra:
            raise NetworkError(f"operating point names unknown element {sorted(extra)[0]!r}")


@dataclass(frozen=True)
class LimitViolation:
    element: str
    kind: str  # "flow", "angle" or "injection"
    magnitude: float  # amount by which the limit is exceeded


@dataclass(frozen=True)
class FeasibilityReport:
    max_balance_residual: float
    max_coupling_residual: float
    limit_violations: tuple[LimitViolation, ...]
    verdict: bool
    epsilon: float
    slack: float
    worst_balance_bus: str | None = None
    worst_coupling_line: str | None = None

    def to_dict(self) -> dict:
        return {
            "max_balance_residual": self.max_balance_residual,
            "max_coupling_residual": self.max_coupling_residual,
            "limit_violations": [
                {"element": v.element, "kind": v.kind, "magnitude": v.magnitude}
                for v in self.limit_violations
            ],
            "verdict": self.verdict,
            "epsilon": self.epsilon,
            "slack": self.slack,
            "worst_balance_bus": self.worst_balance_bus,
            "worst_coupling_line": self.worst_coupling_line,
        }


def flow_from_angles(
    net: Network,
    angles: Mapping[str, float],
    injections: Mapping[str, float] | None = None,
) -> OperatingPoint:
    """Operating point whose flows satisfy the lossless coupling exactly."""
    for b in net.buses:
        if b.id not in angles:
            raise NetworkError(f"missing angle for bus {b.id!r}")
    flows = {
        line.id: math.sin(angles[line.from_bus] - angles[line.to_bus]) / line.reactance
        for line in net.lines
    }
    return OperatingPoint(dict(angles), flows, dict(injections or {}))


def balance_vector(net: Network, pt: OperatingPoint) -> dict[str, float]:
    """Signed ``(N f - b)_i``: net outflow minus injection at every bus."""
    pt.check_dimensions(net)
    out = {}
    for b in net.buses:
        outgoing, incoming = net.incident[b.id]
        terms = [pt.flows[line.id] for line in outgoing]
        terms += [-pt.flows[line.id] for line in incoming]
        terms.append(-pt.injection(b))
        out[b.id] = math.fsum(terms)
    return out


def _evaluate(net: Network, pt: OperatingPoint, epsilon: float, slack: float) -> FeasibilityReport:
    balance = balance_vector(net, pt)
    worst_bus, max_balance = None, 0.0
    for bus_id, r in balance.items():
        if abs(r) > max_balance:
            worst_bus, max_balance = bus_id, abs(r)

    worst_line, max_coupling = None, 0.0
    violations = []
    for line in net.lines:
        diff = pt.angles[line.from_bus] - pt.angles[line.to_bus]
        f = pt.flows[line.id]
        r = abs(math.sin(diff) - line.reactance * f)
        if r > max_coupling:
            worst_line, max_coupling = line.id, r
        if line.flow_limit is not None and abs(f) > line.flow_limit + slack:
            violations.append(LimitViolation(line.id, "flow", abs(f) - line.flow_limit))
        if abs(diff) > line.angle_limit + slack:
            violations.append(LimitViolation(line.id, "angle", abs(diff) - line.angle_limit))

    for b in net.buses:
        value = pt.injection(b)
        if injection_problem(b, value, slack):
            if b.kind is BusKind.GENERATOR and value > 0:
                excess = value - b.capacity
            else:
                excess = abs(value)
            violations.append(LimitViolation(b.id, "injection", excess))

    verdict = max_balance <= epsilon and max_coupling <= epsilon and not violations
    return FeasibilityReport(
        max_balance_residual=max_balance,
        max_coupling_residual=max_coupling,
        limit_violations=tuple(violations),
        verdict=verdict,
        epsilon=epsilon,
        slack=slack,
        worst_balance_bus=worst_bus,
        worst_coupling_line=worst_line,
    )


def residuals(net: Network, pt: OperatingPoint, slack: float = DEFAULT_LIMIT_SLACK) -> FeasibilityReport:
    """Exact-model residuals (epsilon = 0)."""
    return _evaluate(net, pt, 0.0, slack)


def check_feasible(
    net: Network,
    pt: OperatingPoint,
    epsilon: float,
    slack: float = DEFAULT_LIMIT_SLACK,
) -> FeasibilityReport:
    """Epsilon-feasibility of ``pt``.

    Balance and coupling residuals are compared against ``epsilon``; flow,
    angle and injection limits are hard and only relaxed by ``slack``.
    """
    if not epsilon >= 0:
        raise NetworkError("epsilon must be nonnegative")
    if not slack >= 0:
        raise NetworkError("slack must be nonnegative")
    return _evaluate(net, pt, float(epsilon), slack)


def throughput(net: Network, pt: OperatingPoint, sink: str) -> float:
    """Net flow delivered into ``sink``."""
    outgoing, incoming = net.incident.get(sink, (None, None))
    if outgoing is None:
        raise NetworkError(f"unknown sink {sink!r}")
    return math.fsum([pt.flows[line.id] for line in incoming] + [-pt.flows[line.id] for line in outgoing])
