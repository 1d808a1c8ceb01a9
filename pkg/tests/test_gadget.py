import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acflow_hardness.gadget import (
    B_CONSTANTS,
    BState,
    ManifoldError,
    Mode,
    alpha_from_state,
    analyze_b,
    b_network,
    b_operating_point,
    best_state,
    classify_mode,
    conservation_residuals,
    delta_deriv,
    delta_fn,
    identity_check,
    mode_throughput_range,
    solve_manifold,
    sweep_mode,
    throughput_b,
)
from acflow_hardness.network import BusKind, check_feasible, residuals, throughput

THETA0 = B_CONSTANTS.theta0
THETA1 = B_CONSTANTS.theta1
DMAX = B_CONSTANTS.delta_max

# Roots of the reduced bus-2 equation computed with mpmath.findroot at 40
# digits, independent of the scan-and-bisect solver.
MP_ROOT_II_D004 = 0.599138049351256477268959071451484522149
MP_ROOT_I_D004 = 0.0833418397149112124364187976338189779731
MP_TP_II_MAX = 0.8807834842522172919380852339567514435877  # delta = -asin(0.005)
MP_TP_II_MIN = 0.7831090092959133949931493922795762191673  # delta = +asin(0.005)
MP_TP_I_MAX = 0.1559965753381022120405103136600864934096  # delta = +asin(0.005)


def manifold_state(theta, delta=0.0):
    return BState(theta, delta, alpha_from_state(theta, delta))


class TestConstants:
    def test_theta_values(self):
        assert 0.64 < THETA0 < 0.65
        assert 0.36 < THETA1 < 0.37
        assert round(THETA0, 4) == 0.6435
        assert round(THETA1, 4) == 0.3630

    def test_ordering(self):
        c = B_CONSTANTS
        assert c.modeI_hi < c.modeII_lo
        assert c.modeII_hi < math.pi / 4

    def test_delta_max_below_quoted_bound(self):
        assert DMAX < B_CONSTANTS.delta_abs_bound


class TestDelta:
    def test_zero(self):
        assert delta_fn(0.0) == 0.0

    def test_theta0_root(self):
        assert abs(delta_fn(THETA0)) < 1e-15

    def test_value_at_mode_i_edge(self):
        # mpmath: Delta(0.1057) = 0.025639798604774950586...
        assert delta_fn(0.1057) == pytest.approx(0.02563979860477495, abs=1e-16)
        assert delta_fn(0.1057) > B_CONSTANTS.delta_big_bound

    def test_deriv_theta1_root(self):
        assert abs(delta_deriv(THETA1)) < 1e-15

    def test_deriv_endpoints(self):
        assert delta_deriv(0.0) == pytest.approx(0.25, abs=1e-15)
        assert delta_deriv(math.pi / 2) == pytest.approx(-1.25, abs=1e-15)

    @pytest.mark.parametrize("theta", [0.05, 0.3, 0.6, 1.0, 1.4])
    def test_deriv_matches_central_difference(self, theta):
        h = 1e-6
        fd = (delta_fn(theta + h) - delta_fn(theta - h)) / (2 * h)
        assert delta_deriv(theta) == pytest.approx(fd, abs=1e-8)

    @pytest.mark.parametrize("theta", [0.0, 0.2, THETA1, 0.9, 1.5])
    def test_deriv_cosine_polynomial(self, theta):
        c = math.cos(theta)
        assert delta_deriv(theta) == pytest.approx(-c + 1.25 * (2 * c * c - 1), abs=1e-15)


class TestBNetwork:
    def test_structure(self):
        net = b_network()
        assert len(net.buses) == 5
        assert len(net.lines) == 6

    def test_line_parameters(self):
        net = b_network()
        x = {ln.id: ln.reactance for ln in net.lines}
        assert x == {"0->1": 1.0, "0->2": 2.5, "1->2": 1.0, "1->3": 1.0, "3->4": 1.0, "2->4": 4.0}
        assert net.line("1->2").flow_limit == 0.005
        assert all(ln.flow_limit is None for ln in net.lines if ln.id != "1->2")
        assert all(ln.angle_limit == math.pi / 2 for ln in net.lines)

    def test_bus_roles(self):
        net = b_network()
        assert net.bus("0").kind is BusKind.GENERATOR
        assert net.bus("4").kind is BusKind.LOAD
        assert {net.bus(k).kind for k in "123"} == {BusKind.INTERNAL}

    def test_theta0_point_residuals(self):
        rep = residuals(b_network(), b_operating_point(manifold_state(THETA0)))
        assert rep.max_balance_residual < 1e-10
        assert rep.max_coupling_residual < 1e-12


class TestConservation:
    def test_zero_state(self):
        assert conservation_residuals(BState(0, 0, 0)) == (0.0, 0.0)

    def test_theta0_state(self):
        s = BState(THETA0, 0.0, 2 * THETA0 + math.asin(3 / 5))
        r1, r2 = conservation_residuals(s)
        assert abs(r1) < 1e-15
        assert abs(r2) < 1e-15

    def test_theta1_state(self):
        r1, r2 = conservation_residuals(BState(THETA1, 0.0, 2 * THETA1))
        assert r1 == pytest.approx(-math.sin(THETA1), abs=1e-15)
        assert r2 == pytest.approx(-0.25 * math.sin(2 * THETA1), abs=1e-15)
        assert r1 != 0 and r2 != 0

    def test_residuals_match_network_balance(self):
        s = BState(0.4, 0.003, 1.3)
        r1, r2 = conservation_residuals(s)
        pt = b_operating_point(s)
        f = pt.flows
        assert r1 == pytest.approx(f["0->1"] - f["1->2"] - f["1->3"], abs=1e-15)
        assert r2 == pytest.approx(f["0->2"] + f["1->2"] - f["2->4"], abs=1e-15)


class TestIdentity:
    def test_theta0(self):
        assert identity_check(manifold_state(THETA0)) < 1e-12

    def test_theta_03_scaling(self):
        s = manifold_state(0.3)
        r1, r2 = conservation_residuals(s)
        assert abs(r1) < 1e-15
        assert identity_check(s) == pytest.approx(2.5 * abs(r2), abs=1e-15)
        assert identity_check(s) > 0.01

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 0.7), st.floats(-0.005, 0.005))
    def test_scaling_on_bus1_balanced_states(self, theta, delta):
        if not 0 <= math.sin(delta) + math.sin(theta) <= 1:
            return
        s = manifold_state(theta, delta)
        assert identity_check(s) == pytest.approx(2.5 * abs(conservation_residuals(s)[1]), abs=1e-14)


class TestSolveManifold:
    def test_delta_zero_mode_ii_is_theta0(self):
        s = solve_manifold(0.0, Mode.II)
        assert abs(s.theta - THETA0) < 1e-10
        assert abs(throughput_b(s) - 0.84) < 1e-12

    def test_delta_zero_mode_i_is_zero(self):
        s = solve_manifold(0.0, Mode.I)
        assert s.theta == 0.0
        assert throughput_b(s) == 0.0

    def test_positive_delta_mode_ii(self):
        s = solve_manifold(0.004, Mode.II)
        assert s.theta == pytest.approx(MP_ROOT_II_D004, abs=1e-12)
        assert s.theta < THETA0
        assert delta_fn(s.theta) > 0
        assert abs(conservation_residuals(s)[1]) <= 1e-12

    def test_positive_delta_mode_i(self):
        s = solve_manifold(0.004, Mode.I)
        assert s.theta == pytest.approx(MP_ROOT_I_D004, abs=1e-12)

    def test_negative_delta_has_no_mode_i_state(self):
        assert solve_manifold(-0.003, Mode.I) is None

    def test_delta_out_of_range(self):
        with pytest.raises(ManifoldError):
            solve_manifold(0.01, Mode.II)

    def test_endpoint_delta_accepted(self):
        assert solve_manifold(DMAX, Mode.II) is not None
        assert solve_manifold(-DMAX, Mode.II) is not None

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-DMAX, DMAX), st.sampled_from([Mode.I, Mode.II]))
    def test_manifold_invariants(self, delta, mode):
        s = solve_manifold(delta, mode)
        if s is None:
            return
        assert identity_check(s) <= 1e-12
        r1, r2 = conservation_residuals(s)
        assert abs(r1) <= 1e-12 and abs(r2) <= 1e-12
        assert abs(s.eps1) <= abs(s.delta) + 1e-15
        assert abs(s.eps2) <= abs(s.delta) + 1e-15
        assert classify_mode(s.theta) is mode
        net = b_network()
        assert throughput(net, b_operating_point(s), "4") == pytest.approx(throughput_b(s), abs=1e-12)


class TestClassify:
    @pytest.mark.parametrize(
        "theta,mode",
        [(0.05, Mode.I), (0.6435, Mode.II), (0.3, Mode.INFEASIBLE), (0.0, Mode.I), (0.1057, Mode.I),
         (0.578, Mode.II), (0.6952, Mode.II), (0.7, Mode.INFEASIBLE)],
    )
    def test_intervals(self, theta, mode):
        assert classify_mode(theta) is mode

    @pytest.mark.parametrize("theta", [-0.01, 1.6])
    def test_out_of_range(self, theta):
        with pytest.raises(ManifoldError):
            classify_mode(theta)


class TestThroughput:
    def test_zero(self):
        assert throughput_b(BState(0, 0, 0)) == 0.0

    def test_theta0_closed_form(self):
        # sin(theta0) = 3/5, sin(2 theta0) = 24/25
        assert throughput_b(BState(THETA0, 0, 0)) == pytest.approx(21 / 25, abs=1e-15)

    def test_claimed_point_value(self):
        assert throughput_b(BState(0.6952, 0, 0)) > 0.88648


class TestOperatingPoint:
    def test_zero_state(self):
        pt = b_operating_point(BState(0, 0, 0))
        assert all(v == 0 for v in pt.angles.values())
        assert all(v == 0 for v in pt.flows.values())

    def test_theta0_feasible(self):
        pt = b_operating_point(solve_manifold(0.0, Mode.II))
        assert pt.injections["0"] == pytest.approx(0.84, abs=1e-12)
        assert pt.injections["4"] == pytest.approx(-0.84, abs=1e-12)
        assert check_feasible(b_network(), pt, 1e-9).verdict

    def test_large_delta_violates_line_12(self):
        s = BState(0.6, 0.01, alpha_from_state(0.6, 0.01))
        rep = check_feasible(b_network(), b_operating_point(s), 1e-9)
        assert ("1->2", "flow") in [(v.element, v.kind) for v in rep.limit_violations]


class TestModeRanges:
    def test_mode_ii_range(self):
        lo, hi = mode_throughput_range(Mode.II, 201)
        assert hi == pytest.approx(MP_TP_II_MAX, abs=1e-12)
        assert lo == pytest.approx(MP_TP_II_MIN, abs=1e-12)
        assert lo <= 0.84 <= hi
        assert lo >= B_CONSTANTS.modeII_tp_lo
        assert hi < B_CONSTANTS.modeII_tp_hi

    def test_mode_i_range(self):
        lo, hi = mode_throughput_range(Mode.I, 201)
        assert lo == 0.0
        assert hi == pytest.approx(MP_TP_I_MAX, abs=1e-12)
        assert hi < B_CONSTANTS.modeI_tp_sup

    def test_grid_refinement_monotone(self):
        for mode in (Mode.I, Mode.II):
            coarse = mode_throughput_range(mode, 11)
            fine = mode_throughput_range(mode, 101)
            assert fine[0] <= coarse[0] + 1e-6
            assert fine[1] >= coarse[1] - 1e-6

    def test_grid_too_small(self):
        with pytest.raises(ManifoldError):
            sweep_mode(Mode.II, 1)

    def test_best_state_is_boundary(self):
        s = best_state(Mode.II, 201)
        assert s.delta == pytest.approx(-DMAX, abs=1e-15)


def test_analyze_b_report_flags_unattained_claims():
    rep = analyze_b(201)
    assert all(b["holds"] for b in rep["bounds"])
    assert len(rep["unattained_claims"]) == 4
    assert rep["modes"]["ModeII"]["max_identity_residual"] <= 1e-12
    targets = rep["reduction_targets"]
    assert targets["variable_pair_max"] < targets["variable_pair_target"]
