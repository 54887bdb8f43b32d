import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triwave.action_space import (
    basis_fock_state,
    build_hamiltonian,
    coupling_magnitudes,
    make_subspace,
    moment,
    normalize,
    occupations,
    three_level_hamiltonian,
)


def fock_space_block(s2, s3, g):
    """<basis_j| H |basis_k> / |g| from ladder operators on a truncated Fock space."""
    cut = s3 + 2
    a = np.diag(np.sqrt(np.arange(1, cut)), 1)
    eye = np.eye(cut)
    A1 = np.kron(np.kron(a, eye), eye)
    A2 = np.kron(np.kron(eye, a), eye)
    A3 = np.kron(np.kron(eye, eye), a)
    dag = lambda M: M.conj().T
    H = 1j * g * dag(A1) @ A2 @ A3 - 1j * np.conj(g) * A1 @ dag(A2) @ dag(A3)
    idx = [n1 * cut * cut + n2 * cut + n3 for n1, n2, n3 in (basis_fock_state(make_subspace(s2, s3), j) for j in range(s2 + 1))]
    return H[np.ix_(idx, idx)] / abs(g)


def states(dim):
    return st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=dim, max_size=dim).filter(
        lambda v: np.linalg.norm(v) > 1e-3
    )


class TestSubspace:
    @pytest.mark.parametrize(
        "args, expected",
        [((2, 2), (2, 2, 3, False)), ((0, 5), (0, 5, 1, False)), ((5, 2), (2, 5, 3, True))],
    )
    def test_make_subspace(self, args, expected):
        spec = make_subspace(*args)
        assert (spec.s2, spec.s3, spec.D, spec.swapped) == expected

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            make_subspace(-1, 3)

    @pytest.mark.parametrize(
        "s2, s3, j, expected",
        [(2, 7, 0, (2, 5, 0)), (2, 2, 2, (0, 2, 2)), (3, 7, 1, (2, 5, 1))],
    )
    def test_basis_fock_state(self, s2, s3, j, expected):
        assert basis_fock_state(make_subspace(s2, s3), j) == expected

    def test_basis_index_out_of_range(self):
        with pytest.raises(IndexError):
            basis_fock_state(make_subspace(2, 2), 3)


class TestHamiltonian:
    def test_three_level_at_s2(self):
        H = build_hamiltonian(make_subspace(2, 2), np.pi / 2)
        np.testing.assert_allclose(H.super, [1j * np.sqrt(2), 2j], atol=1e-15)

    def test_one_dimensional(self):
        H = build_hamiltonian(make_subspace(0, 7), 1.3)
        assert H.dense().shape == (1, 1) and H.dense()[0, 0] == 0

    def test_s33(self):
        H = build_hamiltonian(make_subspace(3, 3), 0.0)
        np.testing.assert_allclose(H.super, [np.sqrt(3), np.sqrt(8), 3.0], rtol=1e-15)

    @pytest.mark.parametrize("s2, s3, g", [(2, 2, -1j), (3, 3, 1.0), (2, 5, 0.3 + 0.4j), (4, 6, np.exp(2.1j))])
    def test_matches_fock_space_operator(self, s2, s3, g):
        theta = np.angle(1j * g)
        H = build_hamiltonian(make_subspace(s2, s3), theta).dense()
        np.testing.assert_allclose(H, fock_space_block(s2, s3, g), atol=1e-12)

    @given(st.integers(0, 40), st.integers(0, 60), st.floats(0, 2 * np.pi))
    def test_hermitian_tridiagonal_zero_diagonal(self, a, b, theta):
        H = build_hamiltonian(make_subspace(a, b), theta).dense()
        assert np.array_equal(H, H.conj().T)
        assert np.all(np.diag(H) == 0)
        assert np.all(np.triu(H, 2) == 0)

    @settings(max_examples=200)
    @given(st.integers(2, 10**6), st.floats(0, 2 * np.pi, exclude_max=True))
    def test_three_level_closed_form(self, s, theta):
        H = build_hamiltonian(make_subspace(2, s), theta).dense()
        e = np.exp(1j * theta)
        ref = np.array(
            [[0, e * np.sqrt(2 * (s - 1)), 0], [0, 0, e * np.sqrt(2 * s)], [0, 0, 0]], dtype=complex
        )
        ref = ref + ref.conj().T
        np.testing.assert_allclose(H, ref, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(three_level_hamiltonian(theta, s).dense(), ref, rtol=1e-12, atol=1e-12)

    def test_huge_s3_stays_finite(self):
        mags = coupling_magnitudes(make_subspace(5, 10**30))
        assert np.all(np.isfinite(mags))
        np.testing.assert_allclose(mags[0], np.sqrt(5.0 * 1e30), rtol=1e-12)


class TestObservables:
    def test_basis_states(self):
        assert occupations(make_subspace(2, 7), [1, 0, 0]) == (2, 5, 0)
        assert occupations(make_subspace(2, 5), [0, 0, 1]) == (0, 5, 2)

    def test_uniform(self):
        psi = np.ones(3) / np.sqrt(3)
        np.testing.assert_allclose(occupations(make_subspace(2, 2), psi), (1, 1, 1), rtol=1e-14)
        assert moment(make_subspace(2, 2), psi, 3, 2) == pytest.approx(5 / 3, rel=1e-14)

    def test_second_moment_basis(self):
        assert moment(make_subspace(2, 9), [1, 0, 0], 1, 2) == 4

    def test_bad_order_and_shape(self):
        spec = make_subspace(2, 2)
        with pytest.raises(ValueError):
            moment(spec, [1, 0, 0], 1, 0)
        with pytest.raises(ValueError):
            occupations(spec, [1, 0])

    @given(st.integers(0, 6), st.integers(0, 12), st.data())
    def test_conservation_and_first_moment(self, a, b, data):
        spec = make_subspace(a, b)
        psi = normalize(data.draw(states(spec.D)))
        n1, n2, n3 = occupations(spec, psi)
        assert n1 + n3 == pytest.approx(spec.s2, abs=1e-10)
        assert n1 + n2 == pytest.approx(spec.s3, abs=1e-10)
        for wave, n in zip((1, 2, 3), (n1, n2, n3)):
            assert moment(spec, psi, wave, 1) == pytest.approx(n, abs=1e-12)
