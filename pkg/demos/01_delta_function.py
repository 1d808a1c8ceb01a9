"""The one-variable function that splits the B gadget into two modes."""

import math

import numpy as np

from acflow_hardness.gadget import B_CONSTANTS, delta_deriv, delta_fn

# Delta(theta) = -sin(theta) + 5/8 sin(2 theta) vanishes at 0 and at acos(4/5)
theta0 = math.acos(4 / 5)
print("theta0          =", theta0, " Delta(theta0) =", delta_fn(theta0))

# its only interior critical point on [0, pi/2]
theta1 = math.acos(1 / 5 + math.sqrt(1 / 25 + 1 / 2))
print("theta1          =", theta1, " Delta'(theta1) =", delta_deriv(theta1))
print("Delta(theta1)   =", delta_fn(theta1), "(the hump between the two zeros)")

# the sublevel set |Delta| <= 0.02563 falls apart into two pieces
theta = np.linspace(0, math.pi / 2, 200001)
inside = np.abs(-np.sin(theta) + 0.625 * np.sin(2 * theta)) <= 0.02563
pieces = np.split(theta[inside], np.flatnonzero(np.diff(np.flatnonzero(inside)) > 1) + 1)
for p in pieces:
    print(f"piece [{p[0]:.5f}, {p[-1]:.5f}]")
print("mode intervals  :", 0.0, B_CONSTANTS.modeI_hi, "|", B_CONSTANTS.modeII_lo, B_CONSTANTS.modeII_hi)
