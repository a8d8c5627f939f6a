"""Partial transposes, PPT checks, negativity measures."""

import numpy as np
import pytest

from sepvol import param, qmc, quantum


def test_block_partial_transpose_4x4():
    rho = np.arange(16, dtype=float).reshape(4, 4)
    expected = np.array([
        [0, 4, 2, 6],
        [1, 5, 3, 7],
        [8, 12, 10, 14],
        [9, 13, 11, 15],
    ], dtype=float)
    assert np.array_equal(quantum.block_partial_transpose(rho, 2), expected)


def test_block_partial_transpose_bad_block():
    with pytest.raises(ValueError):
        quantum.block_partial_transpose(np.eye(6), 4)


def _random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def test_partial_transpose_on_kronecker_products():
    """On A (x) B the block form transposes exactly the block-sized factor."""
    rng = np.random.default_rng(0)
    A, B = _random_complex(rng, 2), _random_complex(rng, 3)
    rho = np.kron(A, B)
    assert np.array_equal(quantum.block_partial_transpose(rho, 3), np.kron(A, B.T))
    assert np.array_equal(
        quantum.factor_partial_transpose(rho, (2, 3), {1}), np.kron(A, B.T))
    assert np.array_equal(
        quantum.factor_partial_transpose(rho, (2, 3), {0}), np.kron(A.T, B))
    assert np.array_equal(
        quantum.factor_partial_transpose(rho, (2, 3), {0, 1}), rho.T)


def test_factor_matches_block_form():
    rng = np.random.default_rng(1)
    rho = _random_complex(rng, 6)
    assert np.array_equal(
        quantum.block_partial_transpose(rho, 3),
        quantum.factor_partial_transpose(rho, (2, 3), {1}))
    assert np.array_equal(
        quantum.block_partial_transpose(rho, 2),
        quantum.factor_partial_transpose(rho, (3, 2), {1}))


def test_partial_transpose_is_an_involution():
    rng = np.random.default_rng(2)
    rho = _random_complex(rng, 6).reshape(1, 6, 6).repeat(8, axis=0)
    rho = rng.normal(size=(8, 6, 6)) + 1j * rng.normal(size=(8, 6, 6))
    for form in quantum.forms_for(6):
        pt = quantum.partial_transpose(rho, form)
        assert np.array_equal(quantum.partial_transpose(pt, form), rho)


def test_complementary_transposes_share_a_spectrum():
    rng = np.random.default_rng(3)
    M = _random_complex(rng, 6)
    rho = M @ M.conj().T
    a = np.linalg.eigvalsh(quantum.factor_partial_transpose(rho, (2, 3), {0}))
    b = np.linalg.eigvalsh(quantum.factor_partial_transpose(rho, (2, 3), {1}))
    assert np.abs(a - b).max() < 1e-10


def test_bell_state():
    bell = np.zeros((4, 4))
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    assert quantum.min_eigenvalue(quantum.partial_transpose(bell, 2)) == \
        pytest.approx(-0.5, abs=1e-12)
    assert quantum.negativity(bell, 2) == pytest.approx(0.5, abs=1e-12)
    assert quantum.log_negativity(bell, 2) == pytest.approx(np.log(2), abs=1e-12)
    assert not quantum.is_ppt(bell, 2)


def test_werner_states():
    """p |psi-><psi-| + (1-p) I/4; the partial transpose turns at p = 1/3."""
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    proj = np.outer(psi, psi)
    for p, eig in ((0.5, -1 / 8), (0.25, 1 / 16)):
        rho = p * proj + (1 - p) * np.eye(4) / 4
        assert quantum.min_eigenvalue(quantum.partial_transpose(rho, 2)) == \
            pytest.approx(eig, abs=1e-12)
    assert not quantum.is_ppt(0.5 * proj + 0.5 * np.eye(4) / 4, 2)
    assert quantum.is_ppt(0.25 * proj + 0.75 * np.eye(4) / 4, 2)
    assert quantum.negativity(0.25 * proj + 0.75 * np.eye(4) / 4, 2) == 0.0


def test_product_state_is_ppt():
    rho = np.kron(np.diag([0.7, 0.3]), np.diag([0.6, 0.4]))
    assert quantum.is_ppt(rho, 2)
    assert quantum.negativity(rho, 2) == 0.0


def test_forms_for():
    assert quantum.forms_for(4) == [2]
    assert quantum.forms_for(6) == [3, 2]
    f8 = quantum.forms_for(8)
    assert [f.dims for f in f8] == [(2, 2, 2)] * 3
    assert [f.transposed for f in f8] == [frozenset({0}), frozenset({1}), frozenset({2})]
    assert quantum.forms_for(9) == [quantum.FactorSplit((3, 3), frozenset({1}))]
    with pytest.raises(ValueError):
        quantum.forms_for(5)


def test_factor_split_validation():
    with pytest.raises(ValueError):
        quantum.FactorSplit((2, 3), frozenset())
    with pytest.raises(ValueError):
        quantum.FactorSplit((2, 3), frozenset({0, 1}))  # proper subset required
    with pytest.raises(ValueError):
        quantum.factor_partial_transpose(np.eye(6), (2, 2), {0})


def test_min_eigenvalue_requires_hermitian():
    with pytest.raises(ValueError):
        quantum.min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_batch_outputs():
    rng = np.random.default_rng(4)
    M = rng.normal(size=(5, 4, 4))
    rho = M @ np.swapaxes(M, 1, 2)
    rho /= np.trace(rho, axis1=1, axis2=2)[:, None, None]
    neg = quantum.negativity(rho, 2)
    assert neg.shape == (5,)
    assert isinstance(quantum.negativity(rho[0], 2), float)
    assert np.array_equal(quantum.log_negativity(rho, 2), np.log1p(2 * neg))
    assert quantum.is_ppt(rho, 2).shape == (5,)


def test_ppt_iff_zero_negativity_on_sampled_states():
    pts = qmc.points(qmc.ScrambleSpec(21), 35, 0, 2000)
    dec = param.decode_batch(pts, 6)
    rho = dec.rho[~dec.degenerate]
    for form in quantum.forms_for(6):
        ppt = quantum.is_ppt(rho, form)
        neg = quantum.negativity(rho, form)
        assert np.array_equal(ppt, neg == 0.0)
