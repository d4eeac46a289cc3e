"""Symmetric tensor algebra tests, including the explicit-symmetrization
oracle for the product."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as hst

from crofton import symtensor as st
from crofton.symtensor import SymTensor, ambient_metric, contract, \
    metric_tensor, sym_product, vector_power


def dense_from_sym(t: SymTensor) -> np.ndarray:
    """Full dense tensor, entry per index tuple (oracle representation)."""
    out = np.empty((t.dim,) * t.rank)
    look = st.index_lookup(t.dim, t.rank)
    for idx in itertools.product(range(t.dim), repeat=t.rank):
        m = [0] * t.dim
        for i in idx:
            m[i] += 1
        out[idx] = t.coeffs[look[tuple(m)]]
    return out


def sym_outer_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Symmetrized outer product by explicit permutation sum."""
    p, q = a.ndim, b.ndim
    full = np.multiply.outer(a, b)
    acc = np.zeros_like(full)
    for perm in itertools.permutations(range(p + q)):
        acc += np.transpose(full, perm)
    return acc / math.factorial(p + q)


def coeffs_strategy(dim, rank):
    n = st.num_coeffs(dim, rank)
    return hst.lists(hst.floats(-5, 5, allow_nan=False), min_size=n,
                     max_size=n)


def test_storage_size():
    for dim in (1, 2, 3, 4):
        for rank in range(5):
            assert st.num_coeffs(dim, rank) == math.comb(dim + rank - 1, rank)
            assert len(st.multi_indices(dim, rank)) == st.num_coeffs(dim, rank)


def test_scalar_product():
    a = SymTensor.scalar(3, 2.0)
    b = SymTensor.scalar(3, 3.0)
    assert sym_product(a, b).coeffs[0] == 6.0


def test_e1_sq_coeffs():
    e1 = np.array([1.0, 0.0])
    t = vector_power(e1, 2)
    look = st.index_lookup(2, 2)
    assert t.coeffs[look[(2, 0)]] == 1.0
    assert t.coeffs[look[(1, 1)]] == 0.0
    assert t.coeffs[look[(0, 2)]] == 0.0


def test_mixed_product_evaluation():
    e1, e2 = np.eye(2)
    t = sym_product(vector_power(e1, 1), vector_power(e2, 1))
    u = np.array([0.3, -1.2])
    v = np.array([0.7, 0.4])
    assert t(u, v) == pytest.approx((u[0] * v[1] + u[1] * v[0]) / 2)


def test_vector_power_basics():
    v = np.array([0.2, -0.5, 1.0])
    assert vector_power(v, 0).coeffs[0] == 1.0
    t = vector_power(np.array([1.0, 0.0]), 3)
    nz = np.nonzero(t.coeffs)[0]
    assert len(nz) == 1
    assert st.multi_indices(2, 3)[nz[0]] == (3, 0)
    u = np.array([0.4, -0.9])
    assert vector_power(np.array([1.0, 1.0]), 2).poly(u) == \
        pytest.approx((u[0] + u[1]) ** 2)


@settings(deadline=None, max_examples=30)
@given(hst.integers(2, 3), hst.integers(0, 3), hst.integers(0, 3),
       hst.randoms(use_true_random=False))
def test_product_matches_permutation_oracle(dim, p, q, rnd):
    rng = np.random.default_rng(rnd.randrange(2 ** 32))
    a_vecs = [rng.standard_normal(dim) for _ in range(p)]
    b_vecs = [rng.standard_normal(dim) for _ in range(q)]
    a = SymTensor.scalar(dim, 1.0)
    for v in a_vecs:
        a = sym_product(a, vector_power(v, 1))
    b = SymTensor.scalar(dim, 1.0)
    for v in b_vecs:
        b = sym_product(b, vector_power(v, 1))
    prod = sym_product(a, b)
    da = dense_from_sym(a) if p else np.array(a.coeffs[0])
    db = dense_from_sym(b) if q else np.array(b.coeffs[0])
    oracle = sym_outer_oracle(np.asarray(da), np.asarray(db))
    np.testing.assert_allclose(dense_from_sym(prod), oracle,
                               atol=1e-12, rtol=1e-10)


@settings(deadline=None, max_examples=25)
@given(hst.integers(2, 3), hst.randoms(use_true_random=False))
def test_contract_linearity(dim, rnd):
    rng = np.random.default_rng(rnd.randrange(2 ** 32))
    t = SymTensor(dim, 3, rng.standard_normal(st.num_coeffs(dim, 3)))
    s1 = SymTensor(dim, 2, rng.standard_normal(st.num_coeffs(dim, 2)))
    s2 = SymTensor(dim, 2, rng.standard_normal(st.num_coeffs(dim, 2)))
    a, b = rng.standard_normal(2)
    lhs = contract(t, a * s1 + b * s2)
    rhs = a * contract(t, s1) + b * contract(t, s2)
    assert lhs.allclose(rhs, atol=1e-10, rtol=1e-9)


def test_contract_examples():
    q = ambient_metric(3)
    e1 = np.eye(3)[0]
    assert contract(q, vector_power(e1, 1)).allclose(vector_power(e1, 1))
    assert contract(q, q).coeffs[0] == pytest.approx(3.0)
    v = np.array([0.6, 0.8, 0.0])
    assert contract(vector_power(v, 3), vector_power(v, 2)) \
        .allclose(vector_power(v, 1))
    # defining property: Contr(T, v1 . v2)(.) = T(v1, v2, .)
    rng = np.random.default_rng(5)
    t = SymTensor(3, 3, rng.standard_normal(10))
    v1, v2, w = rng.standard_normal((3, 3))
    s = sym_product(vector_power(v1, 1), vector_power(v2, 1))
    assert contract(t, s)(w) == pytest.approx(t(v1, v2, w))


def test_metric_tensor_frame_invariance():
    rng = np.random.default_rng(7)
    base = np.linalg.qr(rng.standard_normal((3, 3)))[0][:2]
    theta = 0.83
    rot = np.array([[math.cos(theta), -math.sin(theta)],
                    [math.sin(theta), math.cos(theta)]])
    other = rot @ base
    assert metric_tensor(base).allclose(metric_tensor(other), atol=1e-12)


def test_metric_tensor_examples():
    q3 = metric_tensor(np.eye(3))
    look = st.index_lookup(3, 2)
    assert q3.coeffs[look[(2, 0, 0)]] == 1.0
    assert q3.coeffs[look[(1, 1, 0)]] == 0.0
    q_line = metric_tensor(np.array([[1.0, 0.0, 0.0]]))
    assert np.nonzero(q_line.coeffs)[0].tolist() == [look[(2, 0, 0)]]
    s2 = math.sqrt(2.0)
    plus = np.array([1.0, 1.0, 0.0]) / s2
    minus = np.array([1.0, -1.0, 0.0]) / s2
    assert not metric_tensor(plus[None, :]).allclose(
        metric_tensor(minus[None, :]))
    both = metric_tensor(np.vstack([plus, minus]))
    assert both.allclose(metric_tensor(np.eye(3)[:2]))


def test_metric_contraction_identity():
    rng = np.random.default_rng(11)
    q = ambient_metric(4)
    u = rng.standard_normal(4)
    assert contract(q, vector_power(u, 1)).allclose(vector_power(u, 1))


def test_metric_splits_along_orthonormal_set():
    # Q = n^2 + sum_i a_i^2 for any orthonormal basis {n, a_1, .., a_{d-1}}
    rng = np.random.default_rng(13)
    frame = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    total = SymTensor.zero(3, 2)
    for row in frame:
        total = total + vector_power(row, 2)
    assert total.allclose(ambient_metric(3))


def test_rank_cap():
    with pytest.raises(ValueError):
        SymTensor.zero(2, st.MAX_RANK + 1)
    v = np.ones(2)
    with pytest.raises(ValueError):
        sym_product(vector_power(v, 5), vector_power(v, 4))


def test_non_orthonormal_frame_rejected():
    with pytest.raises(ValueError):
        metric_tensor(np.array([[1.0, 1.0]]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        sym_product(SymTensor.scalar(2, 1.0), SymTensor.scalar(3, 1.0))


def test_json_roundtrip():
    rng = np.random.default_rng(3)
    t = SymTensor(3, 2, rng.standard_normal(6))
    back = SymTensor.from_json(t.to_json())
    assert back.allclose(t, atol=0, rtol=0)
    # zeros omitted
    sparse = vector_power(np.array([1.0, 0.0]), 2)
    assert '"0,2"' not in sparse.to_json()


def test_transform_rotation_of_metric():
    rng = np.random.default_rng(17)
    rot = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    assert ambient_metric(3).transform(rot).allclose(ambient_metric(3))


def test_transform_matches_direct_evaluation():
    rng = np.random.default_rng(19)
    t = SymTensor(2, 3, rng.standard_normal(4))
    m = rng.standard_normal((3, 2))
    tt = t.transform(m)
    u1, u2, u3 = rng.standard_normal((3, 3))
    assert tt(u1, u2, u3) == pytest.approx(t(m.T @ u1, m.T @ u2, m.T @ u3))
