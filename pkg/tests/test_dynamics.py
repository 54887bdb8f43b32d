import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import unitary_group

from triwave.action_space import (
    TriHamiltonian,
    build_hamiltonian,
    make_subspace,
    moment,
    normalize,
    occupations,
    three_level_hamiltonian,
)
from triwave.dynamics import (
    ClassicalState,
    classical_actions,
    classical_curvature,
    classical_threewave,
    coherent_packet,
    evolve_state,
    expm_tridiagonal,
    is_unitary,
    quantum_curvature,
    repeated_application,
    repeated_states,
    unitary_3level,
)

# dense expm of the three-level matrix at tau=0.1, theta=pi/2, s=2
U01_00 = 0.9900499001070715
U01_P1 = 0.019603186322219305
U01_P2 = 0.0001980089757585131


def random_state(rng, d):
    return normalize(rng.standard_normal(d) + 1j * rng.standard_normal(d))


class TestPropagators:
    def test_zero_time_is_identity(self):
        np.testing.assert_allclose(unitary_3level(0.0, 0.7, 5.0), np.eye(3), atol=1e-15)
        H = build_hamiltonian(make_subspace(4, 9), 0.3)
        np.testing.assert_allclose(expm_tridiagonal(H, 0.0), np.eye(5), atol=1e-14)

    def test_fig1c_target(self):
        U = unitary_3level(0.1, np.pi / 2, 2)
        assert U[0, 0] == pytest.approx(U01_00, abs=1e-14)
        assert abs(U[1, 0]) ** 2 == pytest.approx(U01_P1, abs=1e-14)
        assert abs(U[2, 0]) ** 2 == pytest.approx(U01_P2, abs=1e-14)
        assert U[0, 0] == pytest.approx((np.cos(np.sqrt(6) * 0.1) + 2) / 3, abs=1e-15)

    def test_rejects_small_s(self):
        with pytest.raises(ValueError):
            unitary_3level(0.1, 0.0, 1.5)

    def test_pauli_x_rotation(self):
        H = build_hamiltonian(make_subspace(1, 1), 0.0)
        tau = 0.77
        ref = np.array([[np.cos(tau), -1j * np.sin(tau)], [-1j * np.sin(tau), np.cos(tau)]])
        np.testing.assert_allclose(expm_tridiagonal(H, tau), ref, atol=1e-14)

    def test_closed_form_matches_tridiagonal(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            tau, theta, s = rng.uniform(0, 10), rng.uniform(0, 2 * np.pi), rng.uniform(2, 1e6)
            err = np.linalg.norm(unitary_3level(tau, theta, s) - expm_tridiagonal(three_level_hamiltonian(theta, s), tau))
            assert err <= 1e-10

    @pytest.mark.parametrize("s2, s3, theta", [(3, 3, 0.0), (5, 8, 1.1), (9, 40, -2.0)])
    def test_against_dense_expm(self, s2, s3, theta):
        H = build_hamiltonian(make_subspace(s2, s3), theta)
        np.testing.assert_allclose(expm_tridiagonal(H, 0.37), expm(-0.37j * H.dense()), atol=1e-11)

    def test_general_phases(self):
        H = TriHamiltonian(4, 0.0, np.array([1.0 * np.exp(0.3j), 2.0 * np.exp(-1.2j), 0.5j]))
        np.testing.assert_allclose(expm_tridiagonal(H, 1.3), expm(-1.3j * H.dense()), atol=1e-12)

    @settings(max_examples=50)
    @given(st.integers(1, 30), st.integers(0, 80), st.floats(0, 2 * np.pi), st.floats(-5, 5), st.floats(-5, 5))
    def test_unitary_and_semigroup(self, a, b, theta, t1, t2):
        H = build_hamiltonian(make_subspace(a, b), theta)
        U1, U2 = expm_tridiagonal(H, t1), expm_tridiagonal(H, t2)
        assert is_unitary(U1, 1e-10)
        scale = max(1.0, np.abs(H.super).max(initial=0.0) * (abs(t1) + abs(t2)))
        assert np.linalg.norm(U1 @ U2 - expm_tridiagonal(H, t1 + t2)) <= 1e-10 * scale


class TestStates:
    def test_identity_and_column(self):
        rng = np.random.default_rng(0)
        psi = random_state(rng, 3)
        np.testing.assert_allclose(evolve_state(np.eye(3), psi), psi)
        U = unitary_3level(0.1, np.pi / 2, 2)
        np.testing.assert_allclose(evolve_state(U, [1, 0, 0]), U[:, 0])

    def test_norm_preserved(self):
        rng = np.random.default_rng(1)
        for d in range(2, 9):
            U = unitary_group.rvs(d, random_state=d)
            assert np.linalg.norm(evolve_state(U, random_state(rng, d))) == pytest.approx(1.0, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evolve_state(np.eye(3), [1, 0])

    def test_repeated_zero(self):
        spec = make_subspace(2, 2)
        assert repeated_application(np.eye(3), [1, 0, 0], 0, spec).shape == (0, 3)

    def test_repeated_matches_single_shot(self):
        spec = make_subspace(2, 2)
        U = unitary_3level(0.2, np.pi / 2, 2)
        occ = repeated_application(U, [1, 0, 0], 150, spec)
        for N in (1, 7, 50, 150):
            psi = unitary_3level(0.2 * N, np.pi / 2, 2)[:, 0]
            np.testing.assert_allclose(occ[N - 1], occupations(spec, psi), atol=1e-9)
        np.testing.assert_allclose(occ[:, 0] + occ[:, 2], 2.0, atol=1e-10)
        np.testing.assert_allclose(occ[:, 0] + occ[:, 1], 2.0, atol=1e-10)

    def test_conservation_along_general_trajectory(self):
        spec = make_subspace(6, 11)
        H = build_hamiltonian(spec, 0.4)
        psi0 = random_state(np.random.default_rng(3), spec.D)
        for psi in repeated_states(expm_tridiagonal(H, 0.05), psi0, 200):
            n1, n2, n3 = occupations(spec, psi)
            assert abs(n1 + n3 - 6) < 1e-10 and abs(n1 + n2 - 11) < 1e-10


class TestClassical:
    def test_fixed_points(self):
        traj = classical_threewave(ClassicalState(0.8, 0.0, 0.0, 1.0), 1e-3, 500)
        np.testing.assert_array_equal(traj, np.tile(traj[0], (501, 1)))
        traj = classical_threewave(ClassicalState(0.8, 0.3j, 0.2, 0.0), 1e-3, 500)
        np.testing.assert_array_equal(traj, np.tile(traj[0], (501, 1)))

    def test_invariants(self):
        traj = classical_threewave(ClassicalState(1.0, 0.5, 0.2 + 0.1j, 0.7 + 0.3j), 1e-3, 20000)
        I = classical_actions(traj)
        for key in ("S2", "S3"):
            assert np.max(np.abs(I[key] / I[key][0] - 1)) < 1e-8

    def test_pump_depletion_and_recovery(self):
        dt, steps = 1e-3, 30000
        # g = -1 makes the pump feed the two daughter waves
        traj = classical_threewave(ClassicalState(1.0, 0.01, 0.01, -1.0), dt, steps)
        I1 = np.abs(traj[:, 0]) ** 2
        # |A1|^2 is driven close to zero and comes back near its start
        k_min = int(np.argmin(I1))
        assert I1[k_min] < 0.01
        assert I1[k_min:].max() > 0.99
        # halved-step self convergence
        fine = classical_threewave(ClassicalState(1.0, 0.01, 0.01, -1.0), dt / 2, 2 * steps)
        assert np.max(np.abs(fine[::2] - traj)) < 1e-8

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_raises(self):
        with pytest.raises(FloatingPointError):
            classical_threewave(ClassicalState(1e200, 1e200, 1e200, 1.0), 1.0, 5)

    def test_bad_dt(self):
        with pytest.raises(ValueError):
            classical_threewave(ClassicalState(1, 0, 0), 0.0, 3)

    def test_classical_curvature_matches_integrator(self):
        init = ClassicalState(1.2, 0.7 + 0.2j, 0.4 - 0.3j, 1.0)
        h = 1e-3
        traj = classical_threewave(init, h, 2)
        I1 = np.abs(traj[:, 0]) ** 2
        s2 = I1[0] + abs(init.A3) ** 2
        s3 = I1[0] + abs(init.A2) ** 2
        fd = (I1[2] - 2 * I1[1] + I1[0]) / h**2
        # forward stencil is O(h): compare against the value at the midpoint
        mid = classical_curvature(I1[1], s2, s3)
        assert fd == pytest.approx(mid, abs=1e-4)


class TestCurvature:
    def test_ground_basis_state(self):
        assert quantum_curvature(make_subspace(2, 2), [1, 0, 0]) == pytest.approx(-4.0)

    def test_one_dimensional(self):
        assert quantum_curvature(make_subspace(0, 7), [1.0]) == 0.0

    def test_classical_examples(self):
        assert classical_curvature(0.0, 3.0, 5.0) == 30.0
        assert classical_curvature(1.0, 1.0, 1.0) == 0.0

    @pytest.mark.parametrize("s2, s3, seed", [(2, 2, 0), (2, 5, 4), (3, 7, 1), (8, 8, 2), (5, 30, 3)])
    def test_finite_difference(self, s2, s3, seed):
        spec = make_subspace(s2, s3)
        psi = random_state(np.random.default_rng(seed), spec.D)
        H = build_hamiltonian(spec, 0.9)
        h = 1e-3
        n1 = [occupations(spec, expm_tridiagonal(H, t) @ psi)[0] for t in (-h, 0.0, h)]
        fd = (n1[0] - 2 * n1[1] + n1[2]) / h**2
        q = quantum_curvature(spec, psi)
        # stencil error scales with the fourth power of the spectral width
        assert abs(fd - q) <= 1e-4 * max(1.0, abs(q))

    def test_quantum_classical_difference(self):
        rng = np.random.default_rng(5)
        for s2, s3 in [(2, 2), (4, 9), (7, 7)]:
            spec = make_subspace(s2, s3)
            psi = random_state(rng, spec.D)
            n1 = moment(spec, psi, 1, 1)
            var = moment(spec, psi, 1, 2) - n1**2
            diff = quantum_curvature(spec, psi) - classical_curvature(n1, s2, s3)
            assert diff == pytest.approx(2 * (3 * var - n1), abs=1e-10)


def test_semiclassical_convergence():
    """Coherent packets follow the classical actions more closely as s grows."""
    devs = []
    for s in (4, 16, 64):
        spec = make_subspace(s, 2 * s)
        A = (np.sqrt(0.5 * s) * np.exp(0.7j), np.sqrt(1.5 * s), np.sqrt(0.5 * s))
        psi = coherent_packet(spec, *A)
        H = build_hamiltonian(spec, np.pi / 2)  # g = 1
        dt = 1e-3 / np.sqrt(s)
        steps = int(8 / np.sqrt(s) / dt)
        I1 = np.abs(classical_threewave(ClassicalState(*A, 1.0), dt, steps)[:, 0]) ** 2
        # one full exchange period lies inside the window
        assert I1.max() - I1[-1] > 0.2 * s or I1[-1] - I1.min() > 0.2 * s
        idx = np.arange(0, steps + 1, 50)
        n1 = np.array([occupations(spec, expm_tridiagonal(H, k * dt) @ psi)[0] for k in idx])
        devs.append(np.max(np.abs(n1 - I1[idx])) / s)
    assert devs[0] > devs[1] > devs[2]
