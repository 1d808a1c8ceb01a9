"""Walk the exact solution family of the B gadget and look at both modes."""

from acflow_hardness.gadget import (
    B_CONSTANTS,
    Mode,
    b_network,
    b_operating_point,
    best_state,
    mode_throughput_range,
    solve_manifold,
    throughput_b,
)
from acflow_hardness.network import check_feasible

net = b_network()
for ln in net.lines:
    print(f"{ln.id:5s} x={ln.reactance:<4} limit={ln.flow_limit}")

# at delta = 0 the high mode sits exactly on theta0 and delivers 21/25
s = solve_manifold(0.0, Mode.II)
print("\ndelta=0, Mode II:", s, "throughput", throughput_b(s))

# line 1->2 carries sin(delta); its limit 0.005 bounds the whole family
for delta in (-B_CONSTANTS.delta_max, 0.0, B_CONSTANTS.delta_max):
    for mode in (Mode.I, Mode.II):
        s = solve_manifold(delta, mode)
        if s is None:
            print(f"delta={delta:+.6f} {mode.value:6s} no admissible solution")
            continue
        rep = check_feasible(net, b_operating_point(s), 1e-12)
        print(f"delta={delta:+.6f} {mode.value:6s} theta={s.theta:.6f} throughput={throughput_b(s):.6f} feasible={rep.verdict}")

# sweep the family; the two throughput ranges never overlap
for mode in (Mode.I, Mode.II):
    lo, hi = mode_throughput_range(mode, 2001)
    print(f"{mode.value}: throughput in [{lo:.6f}, {hi:.6f}], best state {best_state(mode)}")
