"""The five-bus B gadget.

Bus 0 injects power, bus 4 withdraws it, buses 1-3 are transit buses.
With the angle at bus 4 fixed to zero, every operating point is described by
three numbers (theta, delta, alpha):

    bus 0: alpha    bus 1: 2 theta    bus 2: 2 theta - delta
    bus 3: theta    bus 4: 0

Conservation at buses 1 and 2 leaves a one-parameter family of solutions
indexed by delta. The reduced function ``delta_fn`` separates that family
into a low-throughput regime (Mode I) and a high-throughput regime (Mode II).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .network import (
    Bus,
    BusKind,
    Line,
    Network,
    OperatingPoint,
    flow_from_angles,
)

__all__ = [
    "STATED_DECIMALS",
    "BConstants",
    "B_CONSTANTS",
    "Mode",
    "BState",
    "ManifoldError",
    "delta_fn",
    "delta_deriv",
    "b_network",
    "conservation_residuals",
    "identity_check",
    "alpha_from_state",
    "reduced_residual",
    "solve_manifold",
    "classify_mode",
    "throughput_b",
    "b_operating_point",
    "sweep_mode",
    "mode_throughput_range",
    "best_state",
    "zero_state",
    "analyze_b",
]

HALF_PI = math.pi / 2

# Decimal literals quoted from the gadget analysis; exact certificates parse
# these strings with fractions.Fraction.
STATED_DECIMALS = {
    "delta_flow_limit": "0.005",  # limit on line (1,2)
    "delta_abs_bound": "0.0050001",  # |delta| bound implied by the limit
    "delta_big_bound": "0.02563",  # bound on |Delta(theta)|
    "modeI_hi": "0.1057",
    "modeII_lo": "0.578",
    "modeII_hi": "0.6952",
    "modeI_tp_sup": "0.1592",  # Mode I throughput is below this
    "modeI_tp_claimed": "0.1579",  # claimed attainable at theta=0.1057, delta=0
    "modeII_tp_lo": "0.77464",
    "modeII_tp_hi": "0.88671",
    "modeII_tp_claimed": "0.88648",  # claimed attainable at theta=0.6952, delta=0
    "theta0_approx": "0.6435",
    "theta1_approx": "0.3630",
}


@dataclass(frozen=True)
class BConstants:
    theta0: float = math.acos(4 / 5)
    theta1: float = math.acos(1 / 5 + math.sqrt(1 / 25 + 1 / 2))
    delta_flow_limit: float = float(STATED_DECIMALS["delta_flow_limit"])
    delta_abs_bound: float = float(STATED_DECIMALS["delta_abs_bound"])
    delta_big_bound: float = float(STATED_DECIMALS["delta_big_bound"])
    modeI_hi: float = float(STATED_DECIMALS["modeI_hi"])
    modeII_lo: float = float(STATED_DECIMALS["modeII_lo"])
    modeII_hi: float = float(STATED_DECIMALS["modeII_hi"])
    modeI_tp_sup: float = float(STATED_DECIMALS["modeI_tp_sup"])
    modeII_tp_lo: float = float(STATED_DECIMALS["modeII_tp_lo"])
    modeII_tp_hi: float = float(STATED_DECIMALS["modeII_tp_hi"])

    @property
    def delta_max(self) -> float:
        """Largest |delta| allowed by the line (1,2) flow limit."""
        return math.asin(self.delta_flow_limit)


B_CONSTANTS = BConstants()

# sin(asin(0.005)) may land one ulp above 0.005.
_SIN_DELTA_TOL = 1e-15
SCAN_POINTS = 4096
RESIDUAL_TOL = 1e-12


class ManifoldError(ValueError):
    pass


class Mode(str, Enum):
    I = "ModeI"  # noqa: E741
    II = "ModeII"
    INFEASIBLE = "Infeasible"

    def interval(self) -> tuple[float, float]:
        if self is Mode.I:
            return 0.0, B_CONSTANTS.modeI_hi
        if self is Mode.II:
            return B_CONSTANTS.modeII_lo, B_CONSTANTS.modeII_hi
        raise ManifoldError("Infeasible has no theta interval")


@dataclass(frozen=True)
class BState:
    """Free parameters of a B operating point (bus 4 at angle zero)."""

    theta: float
    delta: float
    alpha: float

    @property
    def eps1(self) -> float:
        phi = self.alpha - 2 * self.theta
        return math.sin(phi + self.delta) - math.sin(phi)

    @property
    def eps2(self) -> float:
        return math.sin(2 * self.theta - self.delta) - math.sin(2 * self.theta)

    def angles(self) -> dict[str, float]:
        t = self.theta
        return {"0": self.alpha, "1": 2 * t, "2": 2 * t - self.delta, "3": t, "4": 0.0}


def delta_fn(theta: float) -> float:
    return -math.sin(theta) + 0.625 * math.sin(2 * theta)


def delta_deriv(theta: float) -> float:
    return -math.cos(theta) + 1.25 * math.cos(2 * theta)


def b_network() -> Network:
    """The B gadget with zero injections; bus 0 generator, bus 4 load."""
    buses = [
        Bus("0", kind=BusKind.GENERATOR),
        Bus("1"),
        Bus("2"),
        Bus("3"),
        Bus("4", kind=BusKind.LOAD),
    ]
    lines = [
        Line("0", "1", 1.0),
        Line("0", "2", 2.5),
        Line("1", "2", 1.0, flow_limit=B_CONSTANTS.delta_flow_limit),
        Line("1", "3", 1.0),
        Line("3", "4", 1.0),
        Line("2", "4", 4.0),
    ]
    return Network(tuple(buses), tuple(lines))


# Line layout of b_network(), reused when the gadget is copied into larger networks.
B_LINES = tuple((ln.from_bus, ln.to_bus, ln.reactance, ln.flow_limit) for ln in b_network().lines)


def conservation_residuals(s: BState) -> tuple[float, float]:
    """Residuals of flow conservation at bus 1 and bus 2."""
    phi = s.alpha - 2 * s.theta
    sd = math.sin(s.delta)
    r1 = math.sin(phi) - sd - math.sin(s.theta)
    r2 = math.sin(phi + s.delta) / 2.5 + sd - 0.25 * math.sin(2 * s.theta - s.delta)
    return r1, r2


def identity_check(s: BState) -> float:
    """|Delta(theta) - 7/2 sin(delta) - eps1 + 5/8 eps2|.

    When bus 1 balances, this equals 5/2 times the bus 2 residual, so it
    vanishes exactly on the solution manifold.
    """
    return abs(delta_fn(s.theta) - 3.5 * math.sin(s.delta) - s.eps1 + 0.625 * s.eps2)


def alpha_from_state(theta: float, delta: float) -> float:
    """Angle at bus 0 that balances bus 1 (nonnegative flow on line (0,1))."""
    return 2 * theta + math.asin(math.sin(delta) + math.sin(theta))


def _admissible(theta, delta, phi):
    # Nonnegative flows into bus 1 and bus 2 from bus 0, and the angle caps
    # on lines (0,1), (0,2), (2,4) together with 2 theta <= pi/2.
    return (
        (theta >= 0)
        & (phi >= 0)
        & (phi + delta >= 0)
        & (phi <= HALF_PI)
        & (phi + delta <= HALF_PI)
        & (2 * theta - delta >= 0)
        & (2 * theta <= HALF_PI)
        & (2 * theta - delta <= HALF_PI)
    )


def reduced_residual(theta: float, delta: float) -> float:
    """Bus 2 residual with alpha eliminated; NaN outside the admissible region."""
    s = math.sin(delta) + math.sin(theta)
    if not 0.0 <= s <= 1.0:
        return math.nan
    phi = math.asin(s)
    if not _admissible(theta, delta, phi):
        return math.nan
    return math.sin(phi + delta) / 2.5 + math.sin(delta) - 0.25 * math.sin(2 * theta - delta)


def _reduced_residual_grid(theta: np.ndarray, delta: float) -> np.ndarray:
    s = math.sin(delta) + np.sin(theta)
    ok = (s >= 0) & (s <= 1)
    phi = np.arcsin(np.where(ok, s, 0.0))
    g = np.sin(phi + delta) / 2.5 + math.sin(delta) - 0.25 * np.sin(2 * theta - delta)
    ok &= _admissible(theta, delta, phi)
    return np.where(ok, g, np.nan)


def _bisect(f, a: float, b: float, fa: float) -> float:
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if math.isnan(fm):
            break
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    # both ends are within one ulp; return the one with smaller residual
    return a if abs(fa) <= abs(f(b)) else b


def solve_manifold(delta: float, mode: Mode) -> BState | None:
    """Solution of the conservation equations with the given delta and mode.

    Scans the mode's theta interval on a fixed grid, bisects the first sign
    change of the reduced residual, and returns None when there is none.
    """
    if abs(math.sin(delta)) > B_CONSTANTS.delta_flow_limit + _SIN_DELTA_TOL:
        raise ManifoldError(f"|sin(delta)| exceeds {B_CONSTANTS.delta_flow_limit}")
    mode = Mode(mode)
    lo, hi = mode.interval()
    grid = np.linspace(lo, hi, SCAN_POINTS)
    g = _reduced_residual_grid(grid, delta)

    root = None
    zeros = np.flatnonzero(g == 0.0)
    change = np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)
    first_zero = zeros[0] if zeros.size else None
    first_change = change[0] if change.size else None
    if first_zero is not None and (first_change is None or first_zero <= first_change):
        root = float(grid[first_zero])
    elif first_change is not None:
        i = int(first_change)
        root = _bisect(lambda t: reduced_residual(t, delta), float(grid[i]), float(grid[i + 1]), float(g[i]))
    if root is None:
        return None

    state = BState(root, delta, alpha_from_state(root, delta))
    if abs(conservation_residuals(state)[1]) > RESIDUAL_TOL:
        return None
    return state


def classify_mode(theta: float) -> Mode:
    if not 0.0 <= theta <= HALF_PI:
        raise ManifoldError(f"theta {theta!r} outside [0, pi/2]")
    if theta <= B_CONSTANTS.modeI_hi:
        return Mode.I
    if B_CONSTANTS.modeII_lo <= theta <= B_CONSTANTS.modeII_hi:
        return Mode.II
    return Mode.INFEASIBLE


def throughput_b(s: BState) -> float:
    return 0.25 * math.sin(2 * s.theta - s.delta) + math.sin(s.theta)


def b_operating_point(s: BState) -> OperatingPoint:
    """Operating point of b_network() for state ``s``.

    Injections are set to the implied dispatch: net outflow at bus 0 and net
    inflow (negated) at bus 4.
    """
    net = b_network()
    pt = flow_from_angles(net, s.angles())
    f = pt.flows
    injections = {
        "0": math.fsum([f["0->1"], f["0->2"]]),
        "4": -math.fsum([f["3->4"], f["2->4"]]),
    }
    return OperatingPoint(pt.angles, f, injections)


def zero_state() -> BState:
    return BState(0.0, 0.0, 0.0)


def delta_grid(grid: int) -> np.ndarray:
    if grid < 2:
        raise ManifoldError("grid must have at least 2 points")
    dmax = B_CONSTANTS.delta_max
    return np.linspace(-dmax, dmax, grid)


def sweep_mode(mode: Mode, grid: int) -> list[BState]:
    """Manifold states of ``mode`` over a uniform delta grid."""
    states = []
    for d in delta_grid(grid):
        s = solve_manifold(float(d), mode)
        if s is not None:
            states.append(s)
    return states


@lru_cache(maxsize=None)
def _sweep_cached(mode: Mode, grid: int) -> tuple[BState, ...]:
    return tuple(sweep_mode(mode, grid))


def mode_throughput_range(mode: Mode, grid: int) -> tuple[float, float]:
    states = _sweep_cached(Mode(mode), grid)
    if not states:
        raise ManifoldError(f"no {Mode(mode).value} states found")
    tps = [throughput_b(s) for s in states]
    return min(tps), max(tps)


def best_state(mode: Mode, grid: int = 2001) -> BState:
    """Highest-throughput manifold state of ``mode`` on the delta grid."""
    return max(_sweep_cached(Mode(mode), grid), key=throughput_b)


def analyze_b(delta_grid_points: int = 10001, sample: int = 101) -> dict:
    """Numerical report on the B gadget.

    Contains the mode throughput ranges, extremal states, a subsample of the
    manifold, and a comparison against the quoted bounds and attainability
    claims. ``sample`` caps how many states per mode are listed.
    """
    c = B_CONSTANTS
    report: dict = {"delta_grid": delta_grid_points, "constants": {
        "theta0": c.theta0, "theta1": c.theta1, "delta_max": c.delta_max,
    }}
    modes = {}
    for mode in (Mode.I, Mode.II):
        states = _sweep_cached(mode, delta_grid_points)
        tps = [throughput_b(s) for s in states]
        lo_i = int(np.argmin(tps))
        hi_i = int(np.argmax(tps))
        stride = max(1, len(states) // max(sample - 1, 1))
        listed = list(states[::stride])
        if listed[-1] is not states[-1]:
            listed.append(states[-1])
        modes[mode.value] = {
            "found": len(states),
            "throughput_min": tps[lo_i],
            "throughput_max": tps[hi_i],
            "argmin": _state_dict(states[lo_i]),
            "argmax": _state_dict(states[hi_i]),
            "theta_range": [min(s.theta for s in states), max(s.theta for s in states)],
            "alpha_range": [min(s.alpha for s in states), max(s.alpha for s in states)],
            "max_identity_residual": max(identity_check(s) for s in states),
            "states": [_state_dict(s) for s in listed],
        }
    report["modes"] = modes
    tI = modes["ModeI"]["throughput_max"]
    tII = modes["ModeII"]["throughput_max"]
    tII_lo = modes["ModeII"]["throughput_min"]

    def claim(text, value, measured, ok):
        return {"claim": text, "value": value, "measured": measured, "holds": bool(ok)}

    report["bounds"] = [
        claim("Mode I throughput < 0.1592", c.modeI_tp_sup, tI, tI < c.modeI_tp_sup),
        claim("Mode II throughput < 0.88671", c.modeII_tp_hi, tII, tII < c.modeII_tp_hi),
        claim("Mode II throughput >= 0.77464", c.modeII_tp_lo, tII_lo, tII_lo >= c.modeII_tp_lo),
    ]
    attain_tol = 1e-6
    flags = []
    for text, key, measured in (
        ("Mode I throughput > 0.1579 attainable", "modeI_tp_claimed", tI),
        ("Mode II throughput > 0.88648 attainable", "modeII_tp_claimed", tII),
    ):
        value = float(STATED_DECIMALS[key])
        flags.append(claim(text, value, measured, measured + attain_tol > value))
    for theta in (c.modeI_hi, c.modeII_hi):
        s = BState(theta, 0.0, alpha_from_state(theta, 0.0))
        r2 = conservation_residuals(s)[1]
        flags.append(
            {
                "claim": f"theta={theta}, delta=0 is a feasible operating point",
                "bus2_residual": r2,
                "throughput": throughput_b(s),
                "holds": abs(r2) <= RESIDUAL_TOL,
            }
        )
    report["attainability"] = flags
    report["unattained_claims"] = [f["claim"] for f in flags if not f["holds"]]
    from .reduction import REDUCTION_CONSTANTS as rc

    report["reduction_targets"] = {
        "variable_pair_max": tI + tII,
        "variable_pair_target": rc.variable_d_limit,
        "clause_triple_max": 2 * tI + tII,
        "clause_triple_target": rc.clause_d_limit,
    }
    return report


def _state_dict(s: BState) -> dict:
    return {
        "theta": s.theta,
        "delta": s.delta,
        "alpha": s.alpha,
        "eps1": s.eps1,
        "eps2": s.eps2,
        "throughput": throughput_b(s),
        "mode": classify_mode(s.theta).value,
    }
