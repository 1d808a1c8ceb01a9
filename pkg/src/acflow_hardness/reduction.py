"""Compile ONE-IN-THREE 3-SAT into THROUGHPUT on lossless AC networks.

Every variable x_j gets two B gadget copies (``v{j}.B`` for x_j and
``v{j}.Bbar`` for its negation) fed by generators ``s{j}``/``sbar{j}`` and
drained through ``t{j}``. Every clause i gets one B copy per literal slot
(``c{i}.p``, ``c{i}.q``, ``c{i}.r``) fed by its own generators and drained
through ``T{i}``. All drains meet at the single load ``D``. Coupler buses
``L{j}``/``R{j}`` (and ``Lbar{j}``/``Rbar{j}``) tie the bus-0 and bus-4 copies
of each literal's gadget to the matching clause slots through lines whose
flow limit keeps the coupled angles close, which forces equal modes.

A witness runs the gadget of every true literal in Mode II and every other
gadget in Mode I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .cnf import CnfInstance, literal_value, verify_one_in_three
from .gadget import (
    B_LINES,
    BState,
    ManifoldError,
    Mode,
    best_state,
    classify_mode,
    sweep_mode,
    throughput_b,
    zero_state,
)
from .network import (
    HALF_PI,
    Bus,
    BusKind,
    Line,
    Network,
    OperatingPoint,
    flow_from_angles,
    throughput,
)

__all__ = [
    "ReductionConstants",
    "REDUCTION_CONSTANTS",
    "ThroughputInstance",
    "DecodeReport",
    "EncodingError",
    "Coupling",
    "compile_instance",
    "couplings",
    "gadget_copies",
    "encode_witness",
    "decode_witness",
    "super_source_transform",
    "extend_witness_to_super_source",
    "alpha_separation",
    "expected_counts",
    "SLOTS",
]

SLOTS = ("p", "q", "r")
LOAD = "D"
SUPER_SOURCE = "G"


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionConstants:
    S: float = 0.1592
    H: float = 0.8864
    coupler_limit: float = 1 / 20
    coupler_reactance: float = 1.0
    d_line_reactance: float = 1 / 2
    mode_separation_bound: float = 0.201

    @property
    def variable_d_limit(self) -> float:
        return self.S + self.H

    @property
    def clause_d_limit(self) -> float:
        return 2 * self.S + self.H

    @property
    def variable_gen_capacity(self) -> float:
        return self.S + self.H

    @property
    def clause_gen_capacity(self) -> float:
        return 2 * self.S + self.H

    @property
    def coupler_angle_bound(self) -> float:
        """Largest angle gap between two buses joined through one coupler bus."""
        return 2 * math.asin(self.coupler_limit * self.coupler_reactance)

    def threshold(self, n: int, m: int) -> float:
        return n * self.variable_d_limit + m * self.clause_d_limit


REDUCTION_CONSTANTS = ReductionConstants()


@dataclass(frozen=True)
class ThroughputInstance:
    network: Network
    load: str
    generators: tuple[tuple[str, float], ...]
    threshold: float
    labels: Mapping[str, str]
    cnf: CnfInstance


@dataclass(frozen=True)
class Coupling:
    clause: int
    slot: str
    literal: int
    variable_copy: str
    clause_copy: str
    left: str
    right: str


@dataclass
class DecodeReport:
    assignment: dict[int, bool]
    per_variable_modes: dict[int, tuple[Mode, Mode]]
    per_clause_modes: dict[int, tuple[Mode, Mode, Mode]]
    d_line_loads: dict[str, tuple[float, float]]
    consistent: bool
    one_in_three_ok: bool
    infeasible_copies: list[str] = field(default_factory=list)
    coupler_checks: list[dict] = field(default_factory=list)
    demand: float = 0.0
    threshold: float = 0.0

    def to_dict(self) -> dict:
        return {
            "assignment": {str(j): v for j, v in sorted(self.assignment.items())},
            "per_variable_modes": {
                str(j): [m.value for m in pair] for j, pair in sorted(self.per_variable_modes.items())
            },
            "per_clause_modes": {
                str(i): [m.value for m in triple] for i, triple in sorted(self.per_clause_modes.items())
            },
            "d_line_loads": {k: {"flow": f, "limit": u} for k, (f, u) in sorted(self.d_line_loads.items())},
            "consistent": self.consistent,
            "one_in_three_ok": self.one_in_three_ok,
            "infeasible_copies": list(self.infeasible_copies),
            "coupler_checks": self.coupler_checks,
            "demand": self.demand,
            "threshold": self.threshold,
        }


def var_copy(j: int, negated: bool) -> str:
    return f"v{j}.Bbar" if negated else f"v{j}.B"


def clause_copy(i: int, slot: str) -> str:
    return f"c{i}.{slot}"


def gadget_copies(cnf: CnfInstance) -> list[str]:
    out = []
    for j in range(1, cnf.num_vars + 1):
        out += [var_copy(j, False), var_copy(j, True)]
    for i in range(1, cnf.num_clauses + 1):
        out += [clause_copy(i, slot) for slot in SLOTS]
    return out


def couplings(cnf: CnfInstance) -> Iterator[Coupling]:
    for i, clause in enumerate(cnf.clauses, 1):
        for slot, lit in zip(SLOTS, clause):
            j, neg = abs(lit), lit < 0
            bar = "bar" if neg else ""
            yield Coupling(i, slot, lit, var_copy(j, neg), clause_copy(i, slot), f"L{bar}{j}", f"R{bar}{j}")


def expected_counts(n: int, m: int) -> tuple[int, int]:
    """(bus count, line count) of a compiled instance."""
    return 17 * n + 19 * m + 1, 21 * n + 31 * m


def _add_gadget(prefix, role, buses, lines, labels):
    for k in range(5):
        bus_id = f"{prefix}.{k}"
        buses.append(Bus(bus_id))
        labels[bus_id] = f"{role}:{k}"
    for a, b, x, u in B_LINES:
        lines.append(Line(f"{prefix}.{a}", f"{prefix}.{b}", x, flow_limit=u))


def compile_instance(cnf: CnfInstance, constants: ReductionConstants = REDUCTION_CONSTANTS) -> ThroughputInstance:
    c = constants
    buses: list[Bus] = [Bus(LOAD, kind=BusKind.LOAD)]
    lines: list[Line] = []
    labels = {LOAD: "load"}
    generators = []

    def generator(bus_id, capacity, role):
        buses.append(Bus(bus_id, kind=BusKind.GENERATOR, capacity=capacity))
        labels[bus_id] = role
        generators.append((bus_id, capacity))

    def internal(bus_id, role):
        buses.append(Bus(bus_id))
        labels[bus_id] = role

    for j in range(1, cnf.num_vars + 1):
        t = f"t{j}"
        for neg in (False, True):
            bar = "bar" if neg else ""
            prefix = var_copy(j, neg)
            _add_gadget(prefix, f"var:{j}:B{bar}", buses, lines, labels)
            generator(f"s{bar}{j}", c.variable_gen_capacity, f"var:{j}:s{bar}")
            lines.append(Line(f"s{bar}{j}", f"{prefix}.0", 1.0))
        internal(t, f"var:{j}:t")
        for neg in (False, True):
            lines.append(Line(f"{var_copy(j, neg)}.4", t, 1.0))
        lines.append(Line(t, LOAD, c.d_line_reactance, flow_limit=c.variable_d_limit))
        for neg in (False, True):
            bar = "bar" if neg else ""
            left, right = f"L{bar}{j}", f"R{bar}{j}"
            internal(left, f"var:{j}:L{bar}")
            internal(right, f"var:{j}:R{bar}")
            prefix = var_copy(j, neg)
            lines.append(Line(f"{prefix}.0", left, c.coupler_reactance, flow_limit=c.coupler_limit))
            lines.append(Line(f"{prefix}.4", right, c.coupler_reactance, flow_limit=c.coupler_limit))

    for i, clause in enumerate(cnf.clauses, 1):
        hub = f"T{i}"
        for slot, lit in zip(SLOTS, clause):
            prefix = clause_copy(i, slot)
            _add_gadget(prefix, f"clause:{i}:{slot}:{lit}", buses, lines, labels)
            generator(f"{prefix}.s", c.clause_gen_capacity, f"clause:{i}:{slot}:s")
            lines.append(Line(f"{prefix}.s", f"{prefix}.0", 1.0))
            lines.append(Line(f"{prefix}.4", hub, 1.0))
        internal(hub, f"clause:{i}:T")
        lines.append(Line(hub, LOAD, c.d_line_reactance, flow_limit=c.clause_d_limit))

    for cp in couplings(cnf):
        lines.append(Line(cp.left, f"{cp.clause_copy}.0", c.coupler_reactance, flow_limit=c.coupler_limit))
        lines.append(Line(cp.right, f"{cp.clause_copy}.4", c.coupler_reactance, flow_limit=c.coupler_limit))

    net = Network(tuple(buses), tuple(lines))
    n_buses, n_lines = expected_counts(cnf.num_vars, cnf.num_clauses)
    if len(net.buses) != n_buses or len(net.lines) != n_lines:
        raise AssertionError("compiled instance has unexpected size")
    return ThroughputInstance(
        network=net,
        load=LOAD,
        generators=tuple(generators),
        threshold=c.threshold(cnf.num_vars, cnf.num_clauses),
        labels=labels,
        cnf=cnf,
    )


def _copy_modes(cnf: CnfInstance, a: Mapping[int, bool]) -> dict[str, Mode]:
    modes = {}
    for j in range(1, cnf.num_vars + 1):
        modes[var_copy(j, False)] = Mode.II if a[j] else Mode.I
        modes[var_copy(j, True)] = Mode.I if a[j] else Mode.II
    for cp in couplings(cnf):
        modes[cp.clause_copy] = Mode.II if literal_value(cp.literal, a) else Mode.I
    return modes


def encode_witness(
    inst: ThroughputInstance,
    a: Mapping[int, bool],
    *,
    saturate: bool = False,
    high: BState | None = None,
) -> OperatingPoint:
    """Operating point that runs each gadget in the mode dictated by ``a``.

    Mode II gadgets use ``high`` (default: the best-throughput Mode II
    manifold state); Mode I gadgets idle at the zero state, which is the only
    Mode I choice that lets every coupled pair share both boundary angles
    for arbitrary instances. Angles are chained back from ``D`` at angle 0.

    A drain line whose required flow exceeds ``1 / reactance`` cannot be
    represented; this raises EncodingError unless ``saturate`` is set, in
    which case the line angle is clamped to +-pi/2 and the point is returned
    (it will then fail the feasibility check).
    """
    cnf = inst.cnf
    net = inst.network
    missing = [j for j in range(1, cnf.num_vars + 1) if j not in a]
    if missing:
        raise EncodingError(f"assignment missing variable {missing[0]}")
    high = high if high is not None else best_state(Mode.II)
    states = {Mode.II: high, Mode.I: zero_state()}
    modes = _copy_modes(cnf, a)
    tau = {prefix: throughput_b(states[mode]) for prefix, mode in modes.items()}

    def asin_line(value: float, line_id: str) -> float:
        if abs(value) > 1:
            if not saturate:
                raise EncodingError(f"line {line_id}: required |x f| = {abs(value)!r} exceeds 1")
            return math.copysign(HALF_PI, value)
        return math.asin(value)

    angles = {LOAD: 0.0}

    def place_hub(hub: str, copies: list[str]):
        drain = net.line(f"{hub}->{LOAD}")
        flow = math.fsum(tau[p] for p in copies)
        angles[hub] = angles[LOAD] + asin_line(flow * drain.reactance, drain.id)
        for prefix in copies:
            s = states[modes[prefix]]
            base = angles[hub] + asin_line(tau[prefix], f"{prefix}.4->{hub}")
            for k, local in s.angles().items():
                angles[f"{prefix}.{k}"] = base + local

    for j in range(1, cnf.num_vars + 1):
        place_hub(f"t{j}", [var_copy(j, False), var_copy(j, True)])
        for neg in (False, True):
            bar = "bar" if neg else ""
            prefix = var_copy(j, neg)
            angles[f"s{bar}{j}"] = angles[f"{prefix}.0"] + asin_line(tau[prefix], f"s{bar}{j}->{prefix}.0")
            angles[f"L{bar}{j}"] = angles[f"{prefix}.0"]
            angles[f"R{bar}{j}"] = angles[f"{prefix}.4"]
    for i in range(1, cnf.num_clauses + 1):
        copies = [clause_copy(i, slot) for slot in SLOTS]
        place_hub(f"T{i}", copies)
        for prefix in copies:
            angles[f"{prefix}.s"] = angles[f"{prefix}.0"] + asin_line(tau[prefix], f"{prefix}.s->{prefix}.0")

    pt = flow_from_angles(net, angles)
    injections = {}
    for bus_id, _ in inst.generators:
        outgoing, incoming = net.incident[bus_id]
        injections[bus_id] = math.fsum([pt.flows[ln.id] for ln in outgoing] + [-pt.flows[ln.id] for ln in incoming])
    injections[inst.load] = -throughput(net, pt, inst.load)
    return OperatingPoint(pt.angles, pt.flows, injections)


def _copy_mode(pt: OperatingPoint, prefix: str) -> Mode:
    theta = pt.angles[f"{prefix}.3"] - pt.angles[f"{prefix}.4"]
    try:
        return classify_mode(theta)
    except ManifoldError:
        return Mode.INFEASIBLE


def decode_witness(
    inst: ThroughputInstance,
    pt: OperatingPoint,
    constants: ReductionConstants = REDUCTION_CONSTANTS,
) -> DecodeReport:
    """Read an assignment off an operating point: x_j is true iff v{j}.B is in Mode II."""
    cnf = inst.cnf
    net = inst.network
    pt.check_dimensions(net)
    modes = {prefix: _copy_mode(pt, prefix) for prefix in gadget_copies(cnf)}
    infeasible = [p for p, m in modes.items() if m is Mode.INFEASIBLE]

    per_var = {
        j: (modes[var_copy(j, False)], modes[var_copy(j, True)]) for j in range(1, cnf.num_vars + 1)
    }
    per_clause = {
        i: tuple(modes[clause_copy(i, slot)] for slot in SLOTS) for i in range(1, cnf.num_clauses + 1)
    }
    assignment = {j: pair[0] is Mode.II for j, pair in per_var.items()}

    bound = constants.coupler_angle_bound
    checks = []
    for cp in couplings(cnf):
        d0 = abs(pt.angles[f"{cp.variable_copy}.0"] - pt.angles[f"{cp.clause_copy}.0"])
        d4 = abs(pt.angles[f"{cp.variable_copy}.4"] - pt.angles[f"{cp.clause_copy}.4"])
        checks.append(
            {
                "clause": cp.clause,
                "slot": cp.slot,
                "literal": cp.literal,
                "bus0_gap": d0,
                "bus4_gap": d4,
                "bound": bound,
                "within_bound": d0 <= bound and d4 <= bound,
                "modes_agree": modes[cp.variable_copy] is modes[cp.clause_copy],
            }
        )

    loads = {}
    for line in net.lines:
        if line.to_bus == inst.load:
            loads[line.id] = (pt.flows[line.id], line.flow_limit)

    def exactly_one_high(group):
        return sum(m is Mode.II for m in group) == 1

    consistent = (
        not infeasible
        and all(exactly_one_high(p) for p in per_var.values())
        and all(exactly_one_high(t) for t in per_clause.values())
    )
    return DecodeReport(
        assignment=assignment,
        per_variable_modes=per_var,
        per_clause_modes=per_clause,
        d_line_loads=loads,
        consistent=consistent,
        one_in_three_ok=verify_one_in_three(cnf, assignment),
        infeasible_copies=infeasible,
        coupler_checks=checks,
        demand=throughput(net, pt, inst.load),
        threshold=inst.threshold,
    )


def super_source_transform(inst: ThroughputInstance) -> ThroughputInstance:
    """Merge all generators behind one new generator ``G``.

    Each former generator s becomes internal and is fed by a line G -> s of
    unit reactance whose flow limit equals the former capacity of s.
    """
    caps = dict(inst.generators)
    if SUPER_SOURCE in inst.network.bus_index:
        raise ValueError(f"bus {SUPER_SOURCE!r} already exists")
    total = math.fsum(caps.values())
    buses = [Bus(SUPER_SOURCE, kind=BusKind.GENERATOR, capacity=total)]
    for b in inst.network.buses:
        buses.append(Bus(b.id) if b.id in caps else b)
    lines = list(inst.network.lines)
    lines += [Line(SUPER_SOURCE, s, 1.0, flow_limit=cap) for s, cap in inst.generators]
    labels = dict(inst.labels)
    labels[SUPER_SOURCE] = "super-source"
    return ThroughputInstance(
        network=Network(tuple(buses), tuple(lines)),
        load=inst.load,
        generators=((SUPER_SOURCE, total),),
        threshold=inst.threshold,
        labels=labels,
        cnf=inst.cnf,
    )


def extend_witness_to_super_source(
    original: ThroughputInstance, transformed: ThroughputInstance, pt: OperatingPoint
) -> OperatingPoint:
    """Carry a witness of ``original`` over to its super-source transform.

    Former generator dispatch becomes flow on the G -> s lines. The angle at
    G is chained from the first generator; the remaining G lines generally
    violate the sine coupling, since former generators sit at different
    angles.
    """
    angles = dict(pt.angles)
    flows = dict(pt.flows)
    injections = {k: v for k, v in pt.injections.items() if k not in dict(original.generators)}
    dispatch = [(s, pt.injection(original.network.bus(s))) for s, _ in original.generators]
    if dispatch:
        s0, f0 = dispatch[0]
        angles[SUPER_SOURCE] = angles[s0] + math.asin(max(-1.0, min(1.0, f0)))
    else:
        angles[SUPER_SOURCE] = 0.0
    for s, f in dispatch:
        flows[f"{SUPER_SOURCE}->{s}"] = f
    injections[SUPER_SOURCE] = math.fsum(f for _, f in dispatch)
    out = OperatingPoint(angles, flows, injections)
    out.check_dimensions(transformed.network)
    return out


def alpha_separation(grid: int = 2001, constants: ReductionConstants = REDUCTION_CONSTANTS) -> dict:
    """Gap between the Mode I and Mode II ranges of the bus 0 to bus 4 angle.

    Coupled gadgets have bus-0 angles and bus-4 angles each within
    ``coupler_angle_bound`` of each other, so their internal angle spans differ by
    at most twice that; the modes are forced equal when the gap between the
    two ranges exceeds it.
    """
    alpha_I = [s.alpha for s in sweep_mode(Mode.I, grid)]
    alpha_II = [s.alpha for s in sweep_mode(Mode.II, grid)]
    coupled = 2 * constants.coupler_angle_bound
    max_I, min_II = max(alpha_I), min(alpha_II)
    return {
        "max_modeI_alpha": max_I,
        "min_modeII_alpha": min_II,
        "coupled_alpha_gap_bound": coupled,
        "separated": max_I + coupled < min_II,
    }
