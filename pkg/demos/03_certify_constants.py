"""Grid-plus-Lipschitz certificates, and what happens on a coarser grid."""

from acflow_hardness.bounds import delta_lipschitz_on, verify_bounds

for cert in verify_bounds(1e-5):
    print(f"{cert.claim}\n    holds={cert.holds} margin={cert.margin:.3e} needed={cert.required_margin:.3e}")

# a local derivative bound is much tighter than the global 9/4 away from theta = 0
print("\nL on [0.1057, 0.578] =", delta_lipschitz_on(0.1057, 0.578))
print("L on [0, pi/2]       =", delta_lipschitz_on(0.0, 1.5707963267948966))

# with h = 1e-4 the margin near 0.1057 no longer covers L h / 2
c3 = verify_bounds(1e-4)[2]
print("\nh=1e-4:", c3.claim[:2], "holds =", c3.holds, f"margin {c3.margin:.3e} < {c3.required_margin:.3e}")
