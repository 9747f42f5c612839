"""One-row classes GT_m^(l), GT'_m^(l) and the GP symmetrizer.

The one-row classes are coefficients of a u-series.  Apart from the prefactor
1/(1 + beta/u) (and 1/(2 + beta/u) for type B with l >= 0) every factor is a
u-polynomial once truncated, because each power of u arrives paired with a
positive-degree variable.  We build that polynomial, then fold the prefactor
in exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from gmpy2 import mpq

from .coeffring import A, B, X, Context, Series


@dataclass(frozen=True)
class LaurentSeriesU:
    """Finitely supported map m -> coefficient of u^m."""

    ctx: Context
    coeffs: Mapping[int, Series] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, s in self.coeffs.items():
            if s.ctx != self.ctx:
                raise ValueError("all u-coefficients must share one context")
            if not s.is_zero():
                clean[m] = s
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, s: Series) -> "LaurentSeriesU":
        return cls(s.ctx, {0: s})

    @classmethod
    def linear(cls, c0: Series, c1: Series) -> "LaurentSeriesU":
        return cls(c0.ctx, {0: c0, 1: c1})

    @property
    def window(self) -> tuple[int, int] | None:
        if not self.coeffs:
            return None
        return min(self.coeffs), max(self.coeffs)

    def coeff(self, m: int) -> Series:
        return self.coeffs.get(m, Series.zero(self.ctx))

    def __mul__(self, other: "LaurentSeriesU") -> "LaurentSeriesU":
        out: dict[int, Series] = {}
        for m1, s1 in self.coeffs.items():
            for m2, s2 in other.coeffs.items():
                prod = s1 * s2
                if prod:
                    out[m1 + m2] = out[m1 + m2] + prod if m1 + m2 in out else prod
        return LaurentSeriesU(self.ctx, out)

    def __add__(self, other: "LaurentSeriesU") -> "LaurentSeriesU":
        out = dict(self.coeffs)
        for m, s in other.coeffs.items():
            out[m] = out[m] + s if m in out else s
        return LaurentSeriesU(self.ctx, out)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeriesU):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, tuple(sorted(self.coeffs))))


def _check_type(typ: str):
    if typ not in ("B", "C"):
        raise ValueError("type must be 'B' or 'C'")


def _one_over_one_minus(c: Series, ctx: Context) -> LaurentSeriesU:
    """sum_j u^j c^j; terminates because c has positive valuation."""
    coeffs = {}
    power = Series.one(ctx)
    for j in range(ctx.max_deg + 1):
        if power.is_zero():
            break
        coeffs[j] = power
        power = power * c
    return LaurentSeriesU(ctx, coeffs)


@lru_cache(maxsize=None)
def gt_factor_product(k: int, ell: int, ctx: Context) -> LaurentSeriesU:
    """All generating-function factors except the 1/(1+beta/u)-type prefactors.

    Uses 1/(1 + (u+beta) ybar) = (1 + beta y)/(1 - u y) for y in {x_i, b_i}.
    """
    if abs(ell) > ctx.num_b:
        raise IndexError(f"l={ell} needs b{abs(ell)} but numB={ctx.num_b}")
    if k > ctx.num_a:
        raise IndexError(f"k={k} needs a{k} but numA={ctx.num_a}")
    beta = Series.beta(ctx)
    one = Series.one(ctx)
    result = LaurentSeriesU.constant(one)
    for i in range(1, ctx.num_x + 1):
        x = Series.var(ctx, X(i))
        unit = one + beta * x
        result = result * LaurentSeriesU.linear(unit, x)
        result = result * LaurentSeriesU.constant(unit)
        result = result * _one_over_one_minus(x, ctx)
    for i in range(1, k + 1):
        a = Series.var(ctx, A(i))
        result = result * LaurentSeriesU.linear(one + beta * a, a)
    for i in range(1, abs(ell) + 1):
        b = Series.var(ctx, B(i))
        if ell > 0:
            result = result * LaurentSeriesU.linear(one + beta * b, b)
        else:
            result = result * LaurentSeriesU.constant(one + beta * b)
            result = result * _one_over_one_minus(b, ctx)
    return result


def prefactor_coeffs(typ: str, ell: int, ctx: Context, count: int) -> list[Series]:
    """Coefficients of u^0, u^-1, ..., u^-(count-1) in the prefactor."""
    _check_type(typ)
    minus_beta = -Series.beta(ctx)
    base = [minus_beta**j for j in range(count)]
    if typ == "C" or ell < 0:
        return base
    # 1/(2 + beta/u) = (1/2) sum_j (-beta/2)^j u^-j
    half = [(minus_beta**j).scale(mpq(1, 2 ** (j + 1))) for j in range(count)]
    return [sum((base[a] * half[j - a] for a in range(j + 1)), Series.zero(ctx)) for j in range(count)]


@lru_cache(maxsize=None)
def gt_coeff(m: int, ell: int, k: int, typ: str, ctx: Context) -> Series:
    """Coefficient of u^m: GT_m^(l) for type C, GT'_m^(l) for type B."""
    _check_type(typ)
    prod = gt_factor_product(k, ell, ctx)
    window = prod.window
    if window is None:
        return Series.zero(ctx)
    top = window[1]
    if m > top:
        return Series.zero(ctx)
    pre = prefactor_coeffs(typ, ell, ctx, top - m + 1)
    total = Series.zero(ctx)
    for t in range(max(m, 0), top + 1):
        piece = prod.coeff(t)
        if piece:
            total = total + pre[t - m] * piece
    return total


def gt_prime_from_gt(m: int, ell: int, k: int, ctx: Context) -> Series:
    """Type B one-row class assembled from type C ones: (1/2) sum_s (-beta/2)^s GT_{m+s}."""
    if ell < 0:
        raise ValueError("the half-sum formula applies only for l >= 0")
    minus_beta = -Series.beta(ctx)
    total = Series.zero(ctx)
    for s in range(max(0, ctx.max_deg - m + 1)):
        term = gt_coeff(m + s, ell, k, "C", ctx)
        if term:
            total = total + (minus_beta**s * term).scale(mpq(1, 2 ** (s + 1)))
    return total


def one_row_series(ell: int, k: int, typ: str, ctx: Context, lo: int, hi: int) -> LaurentSeriesU:
    return LaurentSeriesU(ctx, {m: gt_coeff(m, ell, k, typ, ctx) for m in range(lo, hi + 1)})


# -- GP symmetrizer ----------------------------------------------------------


class DivisionError(ArithmeticError):
    """An exact division left a nonzero remainder."""


def divide_by_difference(f: Series, i: int, j: int) -> Series:
    """Exact quotient f / (x_i - x_j); raises if f(x_i := x_j) != 0."""
    ctx = f.ctx
    xj = Series.var(ctx, X(j))
    if not f.substitute({X(i): xj}).is_zero():
        raise DivisionError(f"not divisible by x{i} - x{j}")
    si = 8 * ctx.position(X(i))
    sj = 8 * ctx.position(X(j))
    dshift = ctx.deg_shift
    out: dict[int, mpq] = {}
    for key, c in f.raw_terms.items():
        e = (key >> si) & 0xFF
        if not e:
            continue
        base = key - (e << si) - (1 << dshift)
        # (x_i^e - x_j^e)/(x_i - x_j) = sum_t x_i^t x_j^(e-1-t)
        for t in range(e):
            k2 = base + (t << si) + ((e - 1 - t) << sj)
            out[k2] = out.get(k2, 0) + c
    return Series(ctx, out)


def _strict_parts(lam) -> tuple[int, ...]:
    parts = tuple(getattr(lam, "parts", lam))
    if any(parts[i] <= parts[i + 1] for i in range(len(parts) - 1)) or any(p <= 0 for p in parts):
        raise ValueError(f"{parts} is not a strict partition")
    return parts


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        p = start
        while not seen[p]:
            seen[p] = True
            p = perm[p]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _gp_cached(parts: tuple[int, ...], n: int, ctx: Context) -> Series:
    r = len(parts)
    if r > n:
        return Series.zero(ctx)
    vandermonde_deg = n * (n - 1) // 2
    work = Context(max_deg=min(ctx.max_deg + vandermonde_deg, 120), num_x=n)
    xs = [Series.var(work, X(i)) for i in range(1, n + 1)]
    beta = Series.beta(work)
    one = Series.one(work)

    # x^lam * prod (x_i (+) x_j)(1 + beta x_j) over i <= r < ... ; the remaining
    # differences among i > r complete the common denominator to the Vandermonde.
    numer = one
    for i, p in enumerate(parts):
        numer = numer * xs[i] ** p
    for i in range(r):
        for j in range(i + 1, n):
            numer = numer * (xs[i] + xs[j] + beta * xs[i] * xs[j]) * (one + beta * xs[j])
    for i in range(r, n):
        for j in range(i + 1, n):
            numer = numer * (xs[i] - xs[j])

    total: dict[int, mpq] = {}
    for perm in itertools.permutations(range(n)):
        image = numer.rename({X(i + 1): X(perm[i] + 1) for i in range(n)})
        sign = _perm_sign(perm)
        for key, c in image.raw_terms.items():
            total[key] = total.get(key, 0) + sign * c
    alternating = Series(work, total)

    quotient = alternating
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            quotient = divide_by_difference(quotient, i, j)
    quotient = quotient.scale(mpq(1, math.factorial(n - r)))
    return quotient.to_context(ctx)


def gp_symmetrizer(lam, n: int, ctx: Context) -> Series:
    """GP_lam(x_1, ..., x_n) by exact symmetrization over S_n."""
    parts = _strict_parts(lam)
    if ctx.num_x < n:
        raise ValueError(f"GP in {n} variables needs numX >= {n}")
    if ctx.max_deg + n * (n - 1) // 2 > 120:
        raise ValueError("truncation degree too large for the symmetrizer")
    return _gp_cached(parts, n, ctx)


def strict_partitions(max_size: int, max_len: int | None = None) -> list[tuple[int, ...]]:
    """Strict partitions with |lam| <= max_size, ordered by size then reverse lex."""
    out = []

    def rec(prefix, remaining, top):
        out.append(tuple(prefix))
        if max_len is not None and len(prefix) >= max_len:
            return
        for p in range(min(top, remaining), 0, -1):
            prefix.append(p)
            rec(prefix, remaining - p, p - 1)
            prefix.pop()

    rec([], max_size, max_size)
    return sorted(out, key=lambda p: (sum(p), tuple(-x for x in p)))

