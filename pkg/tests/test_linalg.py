import numpy as np
import pytest

from gainregion.linalg import (
    DegenerateEigenspaceWarning,
    dominant_eigpair,
    dominant_eigvec,
    eig_hermitian,
    fix_phase,
    outer_product,
    projector_complement,
    projector_onto,
    rayleigh,
    weighted_combination,
)

from conftest import random_channels


def test_outer_product_basis_vector():
    assert np.allclose(outer_product([1, 0]), [[1, 0], [0, 0]])


def test_outer_product_phase_cancels_on_diagonal():
    assert np.allclose(outer_product([0, 1j]), [[0, 0], [0, 1]])


def test_outer_product_symmetric():
    h = np.array([1, 1]) / np.sqrt(2)
    assert np.allclose(outer_product(h), 0.5 * np.ones((2, 2)))


def test_outer_product_trace_and_rank(rng):
    h = random_channels(rng, 4, 1)[0]
    q = outer_product(h)
    assert np.isclose(np.trace(q).real, np.linalg.norm(h) ** 2)
    assert np.linalg.matrix_rank(q) == 1
    assert np.linalg.eigvalsh(q).min() >= -1e-12


def test_weighted_combination_single_channel():
    z = weighted_combination([[1, 0]], [1.0], [1])
    assert np.allclose(z, [[1, 0], [0, 0]])


def test_weighted_combination_orthogonal_channels():
    z = weighted_combination([[1, 0], [0, 1]], [0.5, 0.5], [1, -1])
    assert np.allclose(z, np.diag([0.5, -0.5]))


def test_weighted_combination_negative_definite(rng):
    # Two transmit antennas, all weight on two independent suppressed
    # channels: the combination must be negative definite.
    h2, h3 = random_channels(rng, 2, 2)
    z = weighted_combination([np.zeros(2), h2, h3], [0.0, 0.5, 0.5], [1, -1, -1])
    assert np.linalg.eigvalsh(z).max() < 0


def test_weighted_combination_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        weighted_combination([[1, 0]], [0.5, 0.5], [1, -1])


def test_eig_hermitian_diagonal():
    es = eig_hermitian(np.diag([2.0, -1.0]))
    assert np.allclose(es.values, [-1.0, 2.0])
    assert np.allclose(np.abs(es.vectors[:, 0]), [0, 1])
    assert np.allclose(np.abs(es.vectors[:, 1]), [1, 0])


def test_eig_hermitian_rank_one():
    h = np.array([1, 1]) / np.sqrt(2)
    es = eig_hermitian(outer_product(h))
    assert np.allclose(es.values, [0, 1], atol=1e-12)
    assert abs(np.vdot(es.vectors[:, 1], h)) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_eig_hermitian_reconstruction(rng):
    for _ in range(20):
        g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        z = (g + g.conj().T) / 2
        es = eig_hermitian(z)
        scale = 1.0 + np.abs(z).max()
        assert np.abs(es.reconstruct() - z).max() <= 1e-10 * scale
        assert np.all(np.diff(es.values) >= 0)
        gram = es.vectors.conj().T @ es.vectors
        assert np.abs(gram - np.eye(5)).max() <= 1e-10


def test_eig_hermitian_deterministic(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    z = (g + g.conj().T) / 2
    a = eig_hermitian(z)
    b = eig_hermitian(z.copy())
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.vectors, b.vectors)


def test_eig_hermitian_phase_convention(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    es = eig_hermitian((g + g.conj().T) / 2)
    for i in range(4):
        v = es.vectors[:, i]
        first = v[np.abs(v) > 1e-12 * np.abs(v).max()][0]
        assert first.imag == pytest.approx(0.0, abs=1e-12)
        assert first.real > 0


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_hermitian_rejects_empty():
    with pytest.raises(ValueError, match="zero-dimensional"):
        eig_hermitian(np.zeros((0, 0)))


def test_dominant_eigvec_simple():
    v = dominant_eigvec(np.diag([0.5, -0.5]), None)
    assert np.allclose(v, [1, 0])


def test_dominant_eigvec_span_tiebreak():
    # Top eigenvalue 0 with multiplicity 2; the span rule must select the
    # in-span null direction.
    h2 = np.array([0, 0, 1.0])
    z = -outer_product(h2)
    span = [np.array([1.0, 0, 0]), h2]
    v = dominant_eigvec(z, span)
    assert abs(np.vdot(v, [1, 0, 0])) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_dominant_eigvec_residual(rng):
    for _ in range(25):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        z = (g + g.conj().T) / 2
        mu, v = dominant_eigpair(z, random_channels(rng, 4, 3))
        assert np.linalg.norm(z @ v - mu * v) <= 1e-10 * (1 + abs(mu))
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_dominant_eigvec_scale_invariance(rng):
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    z = (g + g.conj().T) / 2
    span = random_channels(rng, 3, 3)
    v1 = dominant_eigvec(z, span)
    v2 = dominant_eigvec(7.5 * z, span)
    assert abs(np.vdot(v1, v2)) ** 2 >= 1.0 - 1e-10


def test_dominant_eigvec_trivial_intersection_warns():
    z = np.diag([0.0, 1.0, 1.0])
    with pytest.warns(DegenerateEigenspaceWarning):
        v = dominant_eigvec(z, [np.array([1.0, 0, 0])])
    # Still a valid top eigenvector.
    assert np.linalg.norm(z @ v - v) <= 1e-10


def test_rayleigh_bound(rng):
    # Supporting-hyperplane oracle: no unit vector beats the top eigenvalue.
    for _ in range(50):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        z = (g + g.conj().T) / 2
        mu_max = eig_hermitian(z).values[-1]
        u = random_channels(rng, 4, 1)[0]
        u = u / np.linalg.norm(u)
        assert rayleigh(z, u) <= mu_max + 1e-10


def test_weyl_top_eigenvalue_bound(rng):
    for _ in range(50):
        ga = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        gb = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        a = (ga + ga.conj().T) / 2
        b = (gb + gb.conj().T) / 2
        mu = lambda m: eig_hermitian(m).values[-1]
        assert mu(a + b) <= mu(a) + mu(b) + 1e-10


def test_projector_complement_single_column():
    p = projector_complement([np.array([1.0, 0.0])])
    assert np.allclose(p, np.diag([0.0, 1.0]))


def test_projector_complement_empty_is_identity():
    assert np.allclose(projector_complement([], dim=3), np.eye(3))


def test_projector_complement_identities(rng):
    a = np.column_stack(random_channels(rng, 5, 3))
    p = projector_complement([a[:, j] for j in range(3)])
    assert np.abs(p @ a).max() <= 1e-10
    assert np.abs(p @ p - p).max() <= 1e-10
    assert np.abs(p - p.conj().T).max() <= 1e-12


def test_projector_complement_rank_deficient_names_columns():
    h = np.array([1.0, 2.0, 0.0])
    with pytest.raises(ValueError, match=r"dependent columns: \[1\]"):
        projector_complement([h, 2 * h, np.array([0.0, 0.0, 1.0])])


def test_projector_onto_vs_complement(rng):
    cols = random_channels(rng, 4, 2)
    assert np.allclose(projector_onto(cols) + projector_complement(cols), np.eye(4))


def test_fix_phase_first_nonzero_positive():
    v = np.array([0.0, -2.0, 1.0 + 1.0j])
    w = fix_phase(v)
    assert w[1].real > 0 and abs(w[1].imag) < 1e-15
    assert np.allclose(np.abs(w), np.abs(v))
