"""Exact scalar/vector/matrix kernel."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lpcckit.exact import (Mat, Scalar, Vec, identity, inner, kron_mat,
                           mat_mul, nullspace, outer, rank, reshape, tensor,
                           gram_schmidt, in_span, projector_onto, solve_linear)


def vec(*xs):
    return Vec(list(xs))


def test_scalar_field_ops():
    a = Scalar(Fraction(1, 2), 3)
    b = Scalar(2, Fraction(-1, 3))
    assert a + b - b == a
    assert (a * b) / b == a
    assert a.conj().conj() == a
    assert (a * a.conj()).im == 0
    with pytest.raises(ZeroDivisionError):
        a / Scalar(0)


def test_scalar_equality_is_exact():
    assert Scalar(Fraction(1, 3)) * Scalar(3) == Scalar(1)
    assert Scalar(Fraction(1, 3)) != Scalar(Fraction(33333, 100000))


def test_inner_first_s1_pair(s1):
    # the two weight-four states sharing the first local level are orthogonal
    v1 = s1.state("1")
    v2 = s1.state("2")
    assert inner(v1, v2) == Scalar(0)


def test_inner_norm_of_sign_vector():
    v = vec(1, -1, -1, -1)
    assert inner(v, v) == Scalar(4)


def test_inner_plus_minus():
    assert inner(vec(1, -1), vec(1, 1)) == Scalar(0)


def test_tensor_basis():
    t = tensor(vec(1, 0), vec(0, 1))
    assert t == vec(0, 1, 0, 0)


def test_tensor_signs():
    assert tensor(vec(1, 1), vec(1, -1)) == vec(1, -1, 1, -1)


def test_tensor_reproduces_family_center():
    from lpcckit.statesets import build_named_set
    m = 1
    center = tensor(vec(0, 1, 0), vec(1, -1), vec(0, 1, 0))
    fam = build_named_set("S1m", m=m)
    assert fam.state("c") == center


def test_rank_identity():
    assert rank(identity(3)) == 3


def test_reshape_product_rank_one():
    assert rank(reshape(tensor(vec(1, 0), vec(1, 0)), 2, 2)) == 1


def test_reshape_entangled_rank_two():
    assert rank(reshape(vec(1, 0, 0, 1), 2, 2)) == 2


def test_nullspace_exact():
    a = Mat([[1, 2, 3], [2, 4, 6]])
    basis = nullspace(a)
    assert len(basis) == 2
    for b in basis:
        assert all(x.is_zero() for x in
                   (inner(a.row(0).conj(), b), inner(a.row(1).conj(), b)))


def test_solve_linear():
    a = Mat([[1, 1], [1, -1]])
    x = solve_linear(a, vec(3, 1))
    assert x == vec(2, 1)
    assert solve_linear(Mat([[1, 1], [1, 1]]), vec(0, 1)) is None


small_scalars = st.builds(Scalar,
                          st.integers(min_value=-4, max_value=4),
                          st.integers(min_value=-4, max_value=4))


@settings(max_examples=60, deadline=None)
@given(st.lists(small_scalars, min_size=3, max_size=3),
       st.lists(small_scalars, min_size=3, max_size=3))
def test_inner_conjugate_symmetry(xs, ys):
    u, v = Vec(xs), Vec(ys)
    assert inner(u, v) == inner(v, u).conj()


@settings(max_examples=40, deadline=None)
@given(st.lists(small_scalars, min_size=2, max_size=2),
       st.lists(small_scalars, min_size=2, max_size=3),
       st.lists(small_scalars, min_size=2, max_size=2))
def test_tensor_associativity(a, b, c):
    u, v, w = Vec(a), Vec(b), Vec(c)
    assert tensor(tensor(u, v), w) == tensor(u, tensor(v, w))


def test_rank_conj_transpose_random():
    rng = random.Random(7)
    for _ in range(25):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = Mat([[Scalar(rng.randint(-3, 3), rng.randint(-3, 3))
                  for _ in range(cols)] for _ in range(rows)])
        assert rank(m) == rank(m.conj_transpose())


def test_rank_invariant_under_row_scaling():
    rng = random.Random(11)
    for _ in range(25):
        m_rows = [[Scalar(rng.randint(-3, 3)) for _ in range(3)]
                  for _ in range(3)]
        m = Mat(m_rows)
        c = Scalar(rng.choice([1, 2, -1, Fraction(1, 3)]))
        scaled = Mat([[c * x for x in m_rows[0]]] + m_rows[1:])
        assert rank(m) == rank(scaled)


def test_gram_schmidt_orthogonal_and_spanning():
    rng = random.Random(3)
    vecs = [Vec([Scalar(rng.randint(-3, 3)) for _ in range(4)])
            for _ in range(3)]
    basis = gram_schmidt(vecs)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            assert inner(basis[i], basis[j]).is_zero()
    for v in vecs:
        assert in_span(v, basis)


def test_projector_onto_is_idempotent_and_fixes_span():
    vs = [vec(1, 1, 0), vec(0, 1, 1)]
    p = projector_onto(vs, 3)
    assert mat_mul(p, p) == p
    assert p.is_hermitian()
    from lpcckit.exact import mat_vec
    for v in vs:
        assert mat_vec(p, v) == v


def test_kron_mat_matches_tensor():
    from lpcckit.exact import mat_vec
    a, b = vec(1, 2), vec(3, -1)
    big = kron_mat(outer(a, a), outer(b, b))
    got = mat_vec(big, tensor(a, b))
    assert got == tensor(a, b).scale(inner(a, a) * inner(b, b))
