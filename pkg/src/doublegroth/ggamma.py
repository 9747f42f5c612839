"""Membership tests for the ring GGamma and the W_(k)-invariance conditions."""

from __future__ import annotations

from .coeffring import A, X, Series, bar


def transposition_images(f: Series, family: str = "x", upto: int | None = None):
    """Yield (i, j, f with the i-th and j-th variables of ``family`` swapped)."""
    ctx = f.ctx
    var = {"x": X, "a": A}[family]
    count = {"x": ctx.num_x, "a": ctx.num_a}[family]
    if upto is not None:
        count = min(count, upto)
    for i in range(1, count + 1):
        for j in range(i + 1, count + 1):
            yield i, j, f.rename({var(i): var(j), var(j): var(i)})


def is_x_symmetric(f: Series) -> bool:
    return all(img == f for _, _, img in transposition_images(f, "x"))


def has_cancellation(f: Series) -> bool:
    """f(t, bar t, x_3, ...) == f(0, 0, x_3, ...), with t realized by x_1."""
    ctx = f.ctx
    if ctx.num_x < 2:
        return True
    x1 = Series.var(ctx, X(1))
    return f.substitute({X(2): bar(x1)}) == f.substitute({X(1): 0, X(2): 0})


def in_ggamma(f: Series) -> bool:
    return is_x_symmetric(f) and has_cancellation(f)


def is_a_symmetric(f: Series, k: int) -> bool:
    """Invariance under a_i <-> a_{i+1} for i < k."""
    ctx = f.ctx
    for i in range(1, min(k, ctx.num_a)):
        if f.rename({A(i): A(i + 1), A(i + 1): A(i)}) != f:
            return False
    return True


def s0_action(f: Series) -> Series:
    """(x_1, x_2, ...; a_1, ...) -> (a_1, x_1, x_2, ...; bar a_1, ...).

    The last x-slot is shifted out of the materialized window, so compare the
    result with f at x_numX = 0.
    """
    ctx = f.ctx
    if ctx.num_a < 1:
        raise ValueError("the s_0 action needs a_1")
    a1 = Series.var(ctx, A(1))
    mapping: dict = {X(1): a1, A(1): bar(a1)}
    for i in range(2, ctx.num_x + 1):
        mapping[X(i)] = Series.var(ctx, X(i - 1))
    return f.substitute(mapping)


def is_s0_invariant(f: Series) -> bool:
    """f must have been computed with one spare x-slot."""
    ctx = f.ctx
    return s0_action(f) == f.substitute({X(ctx.num_x): 0})
