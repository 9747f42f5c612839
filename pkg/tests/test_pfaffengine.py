import random
from fractions import Fraction

import pytest

from oracles import det_cofactor, kernel_oracle
from strategies import random_series
from doublegroth.coeffring import X, Context, Series
from doublegroth.genfun import gp_symmetrizer, gt_coeff, strict_partitions
from doublegroth.ggamma import has_cancellation, is_a_symmetric, is_s0_invariant, is_x_symmetric
from doublegroth.pfaffengine import (
    SkewMatrix,
    SubsetStats,
    binomial,
    gx_lambda,
    gx_terms,
    kernel_coeffs,
    pfaffian,
    pfaffian_size,
    required_num_b,
    subsets,
)
from doublegroth.weylcomb import KStrictPartition, enumerate_spk


def as_fractions(table):
    return {pq: Fraction(int(c.numerator), int(c.denominator)) for pq, c in table.entries.items()}


@pytest.mark.parametrize(
    "i,j,m,ci,cj",
    [(1, 2, 2, 0, 0), (1, 2, 4, 0, 0), (2, 3, 4, 0, 1), (1, 4, 4, 1, 1), (3, 4, 4, 0, 2)],
)
def test_kernel_matches_sympy(i, j, m, ci, cj):
    pmax, qmax = 3, 2
    want = {pq: c for pq, c in kernel_oracle(i, j, m, ci, cj, pmax, pmax + qmax).items() if pq[1] <= qmax}
    assert as_fractions(kernel_coeffs(i, j, m, ci, cj, pmax, qmax)) == want


def test_kernel_beta_zero_values():
    table = kernel_coeffs(1, 2, 2, 0, 0, 6, 6)
    expected = {(0, 0): 1, **{(p, -p): 2 * (-1) ** p for p in range(1, 7)}}
    assert table.beta_zero() == expected


def test_kernel_json_and_bounds():
    table = kernel_coeffs(1, 2, 2, 0, 0, 2, 1)
    data = table.to_json()
    assert data["Pmax"] == 2 and data["Qmax"] == 1
    assert all(row["p"] >= 0 and row["p"] + row["q"] >= 0 for row in data["entries"])
    assert kernel_coeffs(1, 2, 2, 0, 0, -1, 3).entries == {}
    with pytest.raises(ValueError):
        kernel_coeffs(2, 1, 2, 0, 0, 1, 1)


def test_generalized_binomial():
    assert binomial(5, 2) == 10
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3
    assert binomial(0, 0) == 1


# -- Pfaffians --------------------------------------------------------------------


def test_pfaffian_small():
    ctx = Context(3, 1)
    x1 = Series.var(ctx, X(1))
    assert pfaffian(SkewMatrix(ctx, 2, {(1, 2): x1})) == x1
    assert pfaffian(SkewMatrix(ctx, 0, {})) == Series.one(ctx)
    with pytest.raises(ValueError):
        pfaffian(SkewMatrix(ctx, 3, {}))
    c = lambda n: Series.const(ctx, n)  # noqa: E731
    up = {(1, 2): 1 + x1, (1, 3): c(2), (1, 4): x1, (2, 3): x1, (2, 4): c(3), (3, 4): c(1)}
    # a12 a34 - a13 a24 + a14 a23
    assert pfaffian(SkewMatrix(ctx, 4, up)) == (1 + x1) - 6 + x1 * x1


@pytest.mark.parametrize("size", [2, 4])
def test_pfaffian_squared_is_determinant(size):
    rng = random.Random(size)
    ctx = Context(4, 2, 0, 1)
    for _ in range(10):
        upper = {(i, j): random_series(rng, ctx, terms=3, min_deg=0) for i in range(1, size + 1) for j in range(i + 1, size + 1)}
        mat = SkewMatrix(ctx, size, upper)
        rows = [[mat.entry(i, j) for j in range(1, size + 1)] for i in range(1, size + 1)]
        pf = pfaffian(mat)
        assert pf * pf == det_cofactor(rows)


def test_subset_enumeration_and_stats():
    pairs = [(1, 3), (1, 2)]
    assert list(subsets(pairs)) == [[], [(1, 2)], [(1, 3)], [(1, 2), (1, 3)]]
    stats = SubsetStats.of([(1, 2), (1, 3)], 4)
    assert stats.a == (2, 0, 0, 0) and stats.c == (0, 1, 1, 0) and stats.d == (2, -1, -1, 0)


def test_sizes():
    lam = KStrictPartition(1, (2, 1))
    assert pfaffian_size(lam) == 2
    assert pfaffian_size(KStrictPartition(0, (3, 2, 1))) == 4
    assert required_num_b(KStrictPartition(0, (1,))) == 2


# -- GX ----------------------------------------------------------------------------


def test_empty_partition_is_one():
    ctx = Context(3, 2, 1, 1)
    assert gx_lambda(KStrictPartition(1, ()), "C", ctx) == Series.one(ctx)


def test_errors():
    lam = KStrictPartition(1, (2, 1))
    with pytest.raises(IndexError):
        gx_lambda(lam, "C", Context(3, 2, 0, 3))
    with pytest.raises(IndexError):
        gx_lambda(lam, "C", Context(3, 2, 1, 0))
    with pytest.raises(ValueError):
        gx_terms(lam, "D", Context(3, 2, 1, 3))


@pytest.mark.parametrize("typ", ["B", "C"])
def test_single_row(typ):
    for k in range(3):
        for lam1 in range(1, 5):
            lam = KStrictPartition(k, (lam1,))
            ctx = Context(4, 2, k, max(2, required_num_b(lam)))
            assert gx_lambda(lam, typ, ctx) == gt_coeff(lam1, lam1 - k - 1, k, typ, ctx)


def test_nonempty_d_set_is_exercised():
    lam = KStrictPartition(1, (2, 1))
    ctx = Context(4, 2, 1, required_num_b(lam))
    assert len(gx_terms(lam, "C", ctx)) == 2


@pytest.mark.parametrize("typ", ["B", "C"])
def test_bounds_are_sufficient(typ):
    for k in range(2):
        for lam in enumerate_spk(3, k):
            if lam.size > 4:
                continue
            ctx = Context(4, 2, k, max(3, required_num_b(lam)))
            plain = sum((pf for _, pf in gx_terms(lam, typ, ctx)), Series.zero(ctx))
            wide = sum((pf for _, pf in gx_terms(lam, typ, ctx, widen=1)), Series.zero(ctx))
            assert plain == wide, str(lam)


@pytest.mark.parametrize("typ", ["B", "C"])
def test_gx_in_invariant_ring(typ):
    for k in range(3):
        for lam in enumerate_spk(3, k):
            if lam.size > 3:
                continue
            ctx = Context(3, 3, k, max(3, required_num_b(lam)))
            f = gx_lambda(lam, typ, ctx)
            assert is_x_symmetric(f) and has_cancellation(f), str(lam)
            assert is_a_symmetric(f, k)
            if k:
                assert is_s0_invariant(f), str(lam)


def test_beta_zero_type_c_is_q_function():
    ctx = Context(4, 3)
    for parts in strict_partitions(4):
        if len(parts) > 3:
            continue
        lam = KStrictPartition(0, parts)
        wide = Context(4, 3, 0, required_num_b(lam))
        got = gx_lambda(lam, "C", wide).set_zero("ab").to_context(ctx)
        want = gp_symmetrizer(parts, 3, ctx).scale(2 ** len(parts))
        assert got.filter(lambda mono: mono.beta == 0) == want.filter(lambda mono: mono.beta == 0)
