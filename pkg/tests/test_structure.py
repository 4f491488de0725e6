import numpy as np
import pytest

from covest.errors import DimensionMismatch, NotToeplitz
from covest.experiment import sample_covariance, spectral_line_record
from covest.matops import frobenius
from covest.structure import (
    from_spanning_set,
    is_admissible,
    matrix_to_params,
    params_to_matrix,
    project_structure,
    toeplitz_structure,
)

from conftest import rand_sym


def test_toeplitz_structure_small():
    s1 = toeplitz_structure(1)
    assert s1.k == 1
    assert np.allclose(s1.basis[0], [[1.0]])

    s2 = toeplitz_structure(2)
    assert np.allclose(s2.basis[0], np.eye(2) / np.sqrt(2.0))
    assert np.allclose(s2.basis[1], np.array([[0, 1], [1, 0]]) / np.sqrt(2.0))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_basis_orthonormal(n):
    s = toeplitz_structure(n)
    gram = np.tensordot(s.basis, s.basis, axes=([1, 2], [1, 2]))
    assert np.max(np.abs(gram - np.eye(s.k))) <= 1e-12


def test_toeplitz_projection_fixed_point_roundtrip():
    rng = np.random.default_rng(0)
    s = toeplitz_structure(3)
    t = params_to_matrix(rng.standard_normal(3))
    assert frobenius(project_structure(t, s) - t) <= 1e-12 * max(frobenius(t), 1)


def test_projection_example_diagonal_averaging():
    s = toeplitz_structure(2)
    got = project_structure(np.array([[1.0, 2.0], [3.0, 4.0]]), s)
    assert np.allclose(got, np.array([[2.5, 2.5], [2.5, 2.5]]), atol=1e-12)


def test_projection_orthogonality_residual():
    rng = np.random.default_rng(1)
    for n in (2, 4, 7):
        s = toeplitz_structure(n)
        a = rand_sym(rng, n)
        resid = a - project_structure(a, s)
        for q in s.basis:
            assert abs(np.tensordot(resid, q, axes=2)) <= 1e-10


def test_projection_idempotent_contractive_matches_naive_averaging():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        s = toeplitz_structure(n)
        a = rand_sym(rng, n)
        p = project_structure(a, s)
        assert frobenius(project_structure(p, s) - p) <= 1e-11 * max(frobenius(p), 1)
        assert frobenius(p) <= frobenius(a) + 1e-12
        # naive per-diagonal averaging oracle
        r = np.zeros(n)
        for k in range(n):
            r[k] = np.mean([a[i, i + k] for i in range(n - k)])
        assert frobenius(p - params_to_matrix(r)) <= 1e-10 * max(frobenius(a), 1)


def test_params_matrix_examples_and_roundtrip():
    assert np.allclose(params_to_matrix([1.0, 0.0, 0.0]), np.eye(3))
    assert np.allclose(params_to_matrix([2.0, 1.0]), np.array([[2.0, 1.0], [1.0, 2.0]]))
    rng = np.random.default_rng(3)
    r = rng.standard_normal(6)
    assert np.allclose(matrix_to_params(params_to_matrix(r)), r, atol=1e-12)


def test_matrix_to_params_rejects_non_toeplitz():
    with pytest.raises(NotToeplitz):
        matrix_to_params(np.array([[1.0, 0.0], [0.0, 2.0]]))


def test_params_to_matrix_rejects_empty():
    with pytest.raises(DimensionMismatch):
        params_to_matrix(np.zeros(0))


def test_is_admissible_examples():
    got = is_admissible(np.eye(3))
    assert got.admissible
    assert got.toeplitz_defect == pytest.approx(0.0, abs=1e-12)
    assert got.min_eig == pytest.approx(1.0)

    got = is_admissible(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert not got.admissible
    assert got.min_eig == pytest.approx(-1.0)

    t_hat = sample_covariance(spectral_line_record(np.pi / 4))
    got = is_admissible(t_hat)
    assert got.toeplitz_defect > 1e-3
    assert not got.admissible


def test_generic_spanning_set_orthonormalized():
    rng = np.random.default_rng(4)
    mats = [rand_sym(rng, 3) for _ in range(4)]
    mats.append(mats[0] + mats[1])  # dependent direction gets dropped
    s = from_spanning_set(mats)
    assert s.k == 4
    gram = np.tensordot(s.basis, s.basis, axes=([1, 2], [1, 2]))
    assert np.max(np.abs(gram - np.eye(s.k))) <= 1e-10
    # projection onto the span leaves span members fixed
    member = 0.3 * mats[1] - 1.7 * mats[2]
    assert frobenius(s.project(member) - member) <= 1e-10 * max(frobenius(member), 1)
