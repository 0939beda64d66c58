import math

import numpy as np
import pytest

from tpdicke.classical import (
    ClassicalState,
    ShellSampling,
    accessible_boundary,
    bloch_boundary,
    classical_jx,
    equations_of_motion,
    gradient,
    h_classical,
    integrate,
    occupancy_fraction,
    poincare_section,
    q_plus,
    sample_shell,
)
from tpdicke.errors import (
    BoundarySingularity,
    DomainViolation,
    EmptyShell,
    OutsideShell,
    SpectralCollapse,
)
from tpdicke.model import ModelParams

P = ModelParams(omega=1.0, omega0=2.0, gamma=0.3, two_j=30, n_max=200)


def random_interior_points(n, seed, q_scale=3.0):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        Q, Pv = rng.uniform(-2.0, 2.0, 2)
        if Q * Q + Pv * Pv < 3.9:
            q, p = rng.uniform(-q_scale, q_scale, 2)
            pts.append(ClassicalState(q, p, Q, Pv))
    return pts


class TestHamiltonian:
    def test_origin_is_ground_shell(self):
        assert h_classical(ClassicalState(0, 0, 0, 0), P) == pytest.approx(-2.0)

    def test_photon_only_point(self):
        assert h_classical(ClassicalState(2, 0, 0, 0), P) == pytest.approx(0.0)

    def test_decoupled_sum(self):
        p0 = ModelParams(omega=1.2, omega0=0.8, gamma=0.0, two_j=2, n_max=4)
        x = ClassicalState(0.5, -0.2, 0.9, 0.4)
        expect = 0.6 * (0.25 + 0.04) + 0.4 * (0.81 + 0.16) - 0.8
        assert h_classical(x, p0) == pytest.approx(expect)

    def test_domain_violation(self):
        with pytest.raises(DomainViolation):
            h_classical(ClassicalState(0, 0, 2.1, 0), P)


class TestGradient:
    def test_stationary_origin(self):
        assert gradient(ClassicalState(0, 0, 0, 0), P) == (0.0, 0.0, 0.0, 0.0)

    def test_decoupled_linear(self):
        p0 = ModelParams(omega=1.2, omega0=0.8, gamma=0.0, two_j=2, n_max=4)
        g = gradient(ClassicalState(0.5, -0.2, 0.9, 0.4), p0)
        np.testing.assert_allclose(
            g, (1.2 * 0.5, 1.2 * -0.2, 0.8 * 0.9, 0.8 * 0.4), atol=1e-14
        )

    def test_matches_central_differences(self):
        # oracle: central finite differences at step 1e-6
        step = 1e-6
        for x in random_interior_points(1000, seed=1):
            g = np.array(gradient(x, P))
            arr = x.as_array()
            fd = np.empty(4)
            for i in range(4):
                up, dn = arr.copy(), arr.copy()
                up[i] += step
                dn[i] -= step
                fd[i] = (
                    h_classical(ClassicalState(*up), P)
                    - h_classical(ClassicalState(*dn), P)
                ) / (2 * step)
            assert np.all(np.abs(g - fd) <= 1e-6 * np.maximum(1.0, np.abs(g)))

    def test_edge_singularity(self):
        r = 2.0 * (1.0 - 1e-12)
        with pytest.raises(BoundarySingularity):
            gradient(ClassicalState(0.1, 0.0, r, 0.0), P)


class TestEquationsOfMotion:
    def test_hamiltonian_structure(self):
        x = ClassicalState(0.4, -0.7, 0.3, 0.8)
        hq, hp, hQ, hP = gradient(x, P)
        assert equations_of_motion(x, P) == (hp, -hq, hP, -hQ)

    def test_fixed_point_at_origin(self):
        assert equations_of_motion(ClassicalState(0, 0, 0, 0), P) == (0, 0, 0, 0)

    def test_decoupled_rotations(self):
        p0 = ModelParams(omega=1.0, omega0=2.0, gamma=0.0, two_j=2, n_max=4)
        traj = integrate(ClassicalState(1.0, 0.0, 0.5, 0.0), t_max=20.0, params=p0)
        r_bos = np.hypot(traj.states[:, 0], traj.states[:, 1])
        r_atom = np.hypot(traj.states[:, 2], traj.states[:, 3])
        np.testing.assert_allclose(r_bos, 1.0, atol=1e-9)
        np.testing.assert_allclose(r_atom, 0.5, atol=1e-9)
        # bosonic period 2 pi / omega
        period_state = traj.sol(2.0 * np.pi)
        np.testing.assert_allclose(period_state, [1.0, 0.0, *traj.sol(0.0)[2:]], atol=1e-8)


class TestShellRoot:
    def test_hand_solved_root(self):
        assert q_plus(0.0, 0.0, 0.0, 0.0, P) == pytest.approx(2.0)

    def test_ground_shell_root_is_zero(self):
        assert q_plus(-2.0, 0.0, 0.0, 0.0, P) == pytest.approx(0.0)

    def test_round_trip(self):
        for x in random_interior_points(100, seed=2, q_scale=2.0):
            x = ClassicalState(abs(x.q), x.p, x.Q, x.P)
            eps = h_classical(x, P)
            q = q_plus(eps, x.p, x.Q, x.P, P)
            assert q == pytest.approx(x.q, abs=1e-12)
            assert h_classical(ClassicalState(q, x.p, x.Q, x.P), P) == pytest.approx(
                eps, abs=1e-12
            )

    def test_outside_shell(self):
        with pytest.raises(OutsideShell):
            q_plus(-1.9, 0.0, 1.5, 1.0, P)  # atomic term alone exceeds the shell

    def test_normal_phase_required(self):
        bad = ModelParams(omega=1.0, omega0=2.0, gamma=0.5, two_j=2, n_max=4)
        with pytest.raises(SpectralCollapse):
            q_plus(0.0, 0.0, 0.0, 0.0, bad)


class TestShellSampling:
    def test_ground_shell_survivor_at_origin(self):
        # only the disk center reaches the ground shell; odd grid contains it
        pts = sample_shell(-2.0, ShellSampling("grid", 5), P)
        assert len(pts) == 1
        assert pts[0].Q == pytest.approx(0.0) and pts[0].P == pytest.approx(0.0)
        assert pts[0].q == pytest.approx(0.0)

    def test_high_shell_accepts_whole_disk(self):
        # numerator positivity scan: at eps=10 every disk point has a root
        grid = sample_shell(10.0, ShellSampling("grid", 11), P)
        axis = np.linspace(-2, 2, 13)[1:-1]
        inside = sum(
            1 for Q in axis for Pv in axis if Q * Q + Pv * Pv < 4.0
        )
        assert len(grid) == inside

    def test_below_ground_is_empty(self):
        with pytest.raises(EmptyShell):
            sample_shell(-2.5, ShellSampling("random", 10), P, seed=0)

    def test_random_mode_deterministic(self):
        a = sample_shell(1.0, ShellSampling("random", 12), P, seed=7)
        b = sample_shell(1.0, ShellSampling("random", 12), P, seed=7)
        assert a == b
        assert all(x.p == 0.0 for x in a)

    def test_sampling_kind_validation(self):
        with pytest.raises(ValueError):
            ShellSampling("hex", 4)


class TestIntegration:
    def test_energy_drift_bound(self):
        for eps in (-1.0, 1.0):
            x0 = sample_shell(eps, ShellSampling("random", 1), P, seed=4)[0]
            traj = integrate(x0, t_max=1000.0, params=P)
            assert traj.energy_drift <= 1e-8 * max(1.0, abs(eps))

    def test_zero_splitting_conserves_jx(self):
        p0 = ModelParams(omega=1.0, omega0=0.0, gamma=0.3, two_j=2, n_max=4)
        x0 = ClassicalState(q_plus(1.0, 0.0, 0.7, 0.4, p0), 0.0, 0.7, 0.4)
        traj = integrate(x0, t_max=1000.0, params=p0)
        jx = np.array([classical_jx(Q, Pv) for Q, Pv in traj.states[:, 2:]])
        assert np.max(np.abs(jx - jx[0])) <= 1e-8

    def test_time_reversal(self):
        # h is even in both momenta, so flipping (p, P) reverses the flow
        x0 = sample_shell(-1.0, ShellSampling("random", 1), P, seed=6)[0]
        fwd = integrate(x0, t_max=200.0, params=P)
        end = fwd.states[-1]
        back = integrate(
            ClassicalState(end[0], -end[1], end[2], -end[3]), t_max=200.0, params=P
        )
        ret = back.states[-1] * np.array([1.0, -1.0, 1.0, -1.0])
        assert np.max(np.abs(ret - x0.as_array())) <= 1e-6

    def test_trajectory_stays_on_disk(self):
        x0 = sample_shell(5.0, ShellSampling("random", 1), P, seed=8)[0]
        traj = integrate(x0, t_max=50.0, params=P)
        r2 = np.sum(traj.states[:, 2:] ** 2, axis=1)
        assert np.all(r2 <= 4.0)


class TestPoincare:
    def test_decoupled_crossings_on_circle(self):
        # gamma=0: stroboscopic samples of the atomic rotation keep its radius
        p0 = ModelParams(omega=1.0, omega0=2.0, gamma=0.0, two_j=2, n_max=4)
        x0 = ClassicalState(1.3, 0.0, 0.8, 0.2)
        traj = integrate(x0, t_max=300.0, params=p0)
        section = poincare_section(traj, p0)
        assert len(section) > 40
        radii = np.hypot(section[:, 1], section[:, 2])
        np.testing.assert_allclose(radii, np.hypot(0.8, 0.2), atol=1e-8)

    def test_crossings_satisfy_surface(self):
        x0 = sample_shell(1.0, ShellSampling("random", 1), P, seed=9)[0]
        traj = integrate(x0, t_max=100.0, params=P)
        section = poincare_section(traj, P)
        assert len(section) > 5
        for t, _, _ in section:
            y = traj.sol(t)
            assert abs(y[1]) <= 1e-10
            assert y[0] > 0.0

    def test_includes_initial_condition(self):
        x0 = sample_shell(0.5, ShellSampling("random", 1), P, seed=10)[0]
        traj = integrate(x0, t_max=30.0, params=P)
        section = poincare_section(traj, P)
        assert section[0, 0] == 0.0
        np.testing.assert_allclose(section[0, 1:], [x0.Q, x0.P], atol=1e-12)


class TestBoundaries:
    def test_energy_constrained_radius(self):
        # at p=0 the reachable set is a disk of radius sqrt(2 (eps+omega0)/omega0)
        for eps, want in ((-1.0, 1.0), (0.0, np.sqrt(2.0)), (10.0, 2.0)):
            b = accessible_boundary(eps, P, n_theta=64)
            radii = np.hypot(b[:, 0], b[:, 1])
            np.testing.assert_allclose(radii, want, atol=1e-6)

    def test_bloch_edge(self):
        b = bloch_boundary(32)
        np.testing.assert_allclose(np.hypot(b[:, 0], b[:, 1]), 2.0, atol=1e-12)

    def test_occupancy_counts_cells_inside_circle(self):
        # a single point occupies exactly one cell
        one = occupancy_fraction(np.array([[0.01, 0.01]]), 1.0, 10)
        inside = sum(
            1
            for i in range(10)
            for k in range(10)
            if ((i + 0.5) / 5 - 1) ** 2 + ((k + 0.5) / 5 - 1) ** 2 < 1.0
        )
        assert one == pytest.approx(1.0 / inside)
        # dense covering occupies every cell
        g = np.linspace(-0.99, 0.99, 60)
        full = occupancy_fraction(
            np.array([(a, b) for a in g for b in g]), 1.0, 10
        )
        assert full == pytest.approx(1.0)
