"""Grid-plus-Lipschitz certificates for the B gadget constants.

A sign claim ``f > c`` on an interval is certified by evaluating ``f`` on a
grid with spacing at most ``h``: every point of the interval lies within
``h/2`` of a grid point, so ``min f(grid) - c > L h / 2`` implies the claim
whenever ``L`` bounds ``|f'|`` on the interval.

Lipschitz constants for Delta are computed per interval from the identity
``Delta'(theta) = 5/2 c^2 - c - 5/4`` with ``c = cos(theta)`` and are never
larger than the global bound 9/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction

import numpy as np

from .gadget import B_CONSTANTS, STATED_DECIMALS

__all__ = [
    "BoundCertificate",
    "DELTA_LIPSCHITZ",
    "DELTA_DERIV_LIPSCHITZ",
    "delta_lipschitz_on",
    "verify_bounds",
    "certificate_c5",
]

HALF_PI = math.pi / 2
DELTA_LIPSCHITZ = 9 / 4  # |Delta'| <= 1 + 5/4
DELTA_DERIV_LIPSCHITZ = 7 / 2  # |Delta''| <= 1 + 5/2
# Allowance for floating-point error in grid evaluations.
ROUNDING = 1e-13
MAX_GRID_STEP = 1e-4


@dataclass(frozen=True)
class BoundCertificate:
    claim: str
    regions: tuple[tuple[float, float], ...]
    grid_step: float
    lipschitz_constant: float
    margin: float
    holds: bool
    note: str = ""

    @property
    def required_margin(self) -> float:
        return self.lipschitz_constant * self.grid_step / 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["regions"] = [list(r) for r in self.regions]
        d["required_margin"] = self.required_margin
        return d


def _deriv_poly(c: float) -> float:
    return 2.5 * c * c - c - 1.25


def delta_lipschitz_on(lo: float, hi: float) -> float:
    """Upper bound on |Delta'| over [lo, hi] within [0, pi/2]."""
    if not 0 <= lo <= hi <= HALF_PI + 1e-15:
        raise ValueError("interval must lie in [0, pi/2]")
    c_lo, c_hi = math.cos(min(hi, HALF_PI)), math.cos(lo)
    candidates = [abs(_deriv_poly(c_lo)), abs(_deriv_poly(c_hi))]
    if c_lo <= 0.2 <= c_hi:  # vertex of the quadratic
        candidates.append(abs(_deriv_poly(0.2)))
    # cos endpoints carry rounding; pad before capping at the global bound
    return min(max(candidates) * (1 + 1e-9) + 1e-12, DELTA_LIPSCHITZ)


def _grid(lo: float, hi: float, h: float) -> np.ndarray:
    n = max(2, math.ceil((hi - lo) / h) + 1)
    return np.linspace(lo, hi, n)


def _delta(theta):
    return -np.sin(theta) + 0.625 * np.sin(2 * theta)


def _delta_deriv(theta):
    return -np.cos(theta) + 1.25 * np.cos(2 * theta)


def _sign_certificate(claim, pieces, h, lipschitz, note=""):
    """``pieces``: list of (lo, hi, f) where f(grid) must exceed L h / 2."""
    margin = math.inf
    for lo, hi, f in pieces:
        margin = min(margin, float(np.min(f(_grid(lo, hi, h)))))
    holds = margin > lipschitz * h / 2 + ROUNDING
    regions = tuple((lo, hi) for lo, hi, _ in pieces)
    return BoundCertificate(claim, regions, h, lipschitz, margin, holds, note)


def certificate_c1(h: float) -> BoundCertificate:
    theta0 = B_CONSTANTS.theta0
    g = 10 * h
    pieces = [
        (g, theta0 - g, _delta),
        (theta0 + g, HALF_PI, lambda t: -_delta(t)),
    ]
    lip = max(delta_lipschitz_on(g, theta0 - g), delta_lipschitz_on(theta0 + g, HALF_PI))
    return _sign_certificate(
        "C1: Delta > 0 on [g, theta0-g] and Delta < 0 on [theta0+g, pi/2]",
        pieces,
        h,
        lip,
        note=f"gap g = 10 * grid_step = {g!r}; Delta(0) = Delta(theta0) = 0 exactly",
    )


def certificate_c2(h: float) -> BoundCertificate:
    theta1 = B_CONSTANTS.theta1
    g = 10 * h
    pieces = [
        (0.0, theta1 - g, _delta_deriv),
        (theta1 + g, HALF_PI, lambda t: -_delta_deriv(t)),
    ]
    return _sign_certificate(
        "C2: Delta' > 0 on [0, theta1-g] and Delta' < 0 on [theta1+g, pi/2]",
        pieces,
        h,
        DELTA_DERIV_LIPSCHITZ,
        note=f"gap g = {g!r}; |Delta'(theta1)| = {abs(float(_delta_deriv(theta1))):.3e}",
    )


def certificate_c3(h: float) -> BoundCertificate:
    c = B_CONSTANTS
    bound = c.delta_big_bound

    def excess(t):
        return np.abs(_delta(t)) - bound

    pieces = [(c.modeI_hi, c.modeII_lo, excess), (c.modeII_hi, HALF_PI, excess)]
    lip = max(delta_lipschitz_on(c.modeI_hi, c.modeII_lo), delta_lipschitz_on(c.modeII_hi, HALF_PI))
    return _sign_certificate(
        "C3: |Delta(theta)| <= 0.02563 implies theta in [0, 0.1057] or [0.578, 0.6952]",
        pieces,
        h,
        lip,
        note="margin is min |Delta| - 0.02563 over the complement intervals",
    )


def certificate_c4(h: float, phi_step: float = 1e-3) -> BoundCertificate:
    dmax = B_CONSTANTS.delta_flow_limit
    deltas = _grid(-dmax, dmax, h)
    deltas = deltas[deltas != 0.0]
    phis = _grid(0.0, HALF_PI, phi_step)
    P, D = np.meshgrid(phis, deltas, indexing="ij")
    admissible = (P >= np.maximum(0, D)) & (P <= np.minimum(HALF_PI, HALF_PI + D))
    # sin(p) - sin(p - d) == 2 cos(p - d/2) sin(d/2), evaluated in the
    # product form to avoid cancellation for small d
    diff = 2 * np.cos(P - D / 2) * np.sin(D / 2)
    slack = np.abs(D) - np.abs(diff)
    margin = float(np.min(slack[admissible]))
    return BoundCertificate(
        "C4: |sin(phi) - sin(phi - delta)| <= |delta| on sampled admissible (phi, delta)",
        ((0.0, HALF_PI), (-dmax, dmax)),
        h,
        0.0,
        margin,
        margin > 0,
        note=f"sampled, phi step {phi_step!r}; delta = 0 excluded (equality)",
    )


def certificate_c5() -> BoundCertificate:
    """Exact rational check of the constant bounding |Delta(theta)|."""
    bound = Fraction(STATED_DECIMALS["delta_big_bound"])
    s = Fraction(STATED_DECIMALS["delta_flow_limit"])
    d = Fraction(STATED_DECIMALS["delta_abs_bound"])
    coeff = Fraction(7, 2) + 1 + Fraction(5, 8)
    # |sin delta|, |eps1|, |eps2| all at most 1/200
    chain = coeff * s
    # eps terms bounded by the looser |delta| < 0.0050001
    chain_loose = Fraction(7, 2) * s + (1 + Fraction(5, 8)) * d
    # asin(x) <= x + x^3 / (6 (1 - x^2)) since every series coefficient past
    # the first is at most 1/6
    asin_upper = s + s**3 / (6 * (1 - s**2))
    margins = [bound - chain, bound - chain_loose, d - asin_upper]
    margin = min(margins)
    return BoundCertificate(
        "C5: 41/8 * 1/200 = 41/1600 <= 0.02563 (and asin(0.005) < 0.0050001)",
        (),
        0.0,
        0.0,
        float(margin),
        margin > 0,
        note=f"41/8 * 1/200 = {chain}; loose chain = {chain_loose}; asin bound = {asin_upper}",
    )


def verify_bounds(grid_step: float = 1e-5) -> list[BoundCertificate]:
    if not 0 < grid_step <= MAX_GRID_STEP:
        raise ValueError(f"grid_step must lie in (0, {MAX_GRID_STEP}]")
    return [
        certificate_c1(grid_step),
        certificate_c2(grid_step),
        certificate_c3(grid_step),
        certificate_c4(grid_step),
        certificate_c5(),
    ]
