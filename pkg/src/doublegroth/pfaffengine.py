"""Pfaffian-sum construction of GX_lambda (GT_lambda for type C, GT'_lambda for type B)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Mapping

from gmpy2 import mpq

from .coeffring import Context, Series
from .genfun import gt_coeff
from .weylcomb import KStrictPartition, char_index, d_set


@dataclass(frozen=True)
class SubsetStats:
    I: frozenset
    a: tuple[int, ...]
    c: tuple[int, ...]
    d: tuple[int, ...]

    @classmethod
    def of(cls, pairs, m: int) -> "SubsetStats":
        a = [0] * m
        c = [0] * m
        for i, j in pairs:
            a[i - 1] += 1
            c[j - 1] += 1
        d = tuple(x - y for x, y in zip(a, c))
        return cls(frozenset(pairs), tuple(a), tuple(c), d)


def binomial(n: int, e: int) -> int:
    """Generalized binomial coefficient for any integer n and e >= 0."""
    num = 1
    for t in range(e):
        num *= n - t
    return num // factorial(e)


# Laurent polynomials in (t_i, t_j) are dicts {(p, q): coeff} with beta set to 1;
# F is homogeneous of degree 0 so the beta power of (p, q) is p + q.


def _lmul(f: dict, g: dict, pmax: int, qcap: int) -> dict:
    out: dict = {}
    for (p1, q1), c1 in f.items():
        for (p2, q2), c2 in g.items():
            p = p1 + p2
            q = q1 + q2
            if p > pmax or q > qcap:
                continue
            out[(p, q)] = out.get((p, q), 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class KernelTable:
    """Laurent coefficients f_pq = coeff * beta^(p+q) of the Pfaffian kernel."""

    entries: Mapping[tuple[int, int], mpq] = field(default_factory=dict)
    pmax: int = 0
    qmax: int = 0

    def beta_power(self, p: int, q: int) -> int:
        return p + q

    def get(self, p: int, q: int) -> mpq:
        return self.entries.get((p, q), mpq(0))

    def as_series(self, p: int, q: int, ctx: Context) -> Series:
        return Series.const(ctx, self.get(p, q), p + q)

    def beta_zero(self) -> dict:
        """The beta = 0 specialization: entries on the anti-diagonal p + q = 0."""
        return {pq: c for pq, c in self.entries.items() if pq[0] + pq[1] == 0}

    def to_json(self) -> dict:
        rows = [
            {"p": p, "q": q, "coeff": f"{c.numerator}/{c.denominator}", "beta": p + q}
            for (p, q), c in sorted(self.entries.items())
        ]
        return {"Pmax": self.pmax, "Qmax": self.qmax, "entries": rows}


@lru_cache(maxsize=None)
def kernel_coeffs(i: int, j: int, m: int, ci: int, cj: int, pmax: int, qmax: int) -> KernelTable:
    """Expand F_ij^I in ascending powers of t_i with t_j-exponents >= -p.

    F = (1+b t_i)^-(m-i-c_i-1) (1+b t_j)^-(m-j-c_j) (1 - ti_bar/tj_bar)/(1 - t_i/tj_bar),
    using 1/tj_bar = -(1/t_j + b) and ti_bar = -t_i/(1 + b t_i).
    """
    if not 1 <= i < j <= m:
        raise ValueError("need 1 <= i < j <= m")
    if pmax < 0:
        return KernelTable({}, pmax, qmax)
    qcap = qmax + pmax
    exp_i = -(m - i - ci - 1)
    exp_j = -(m - j - cj)
    pref_i = {(e, 0): binomial(exp_i, e) for e in range(pmax + 1) if binomial(exp_i, e)}
    pref_j = {(0, e): binomial(exp_j, e) for e in range(max(qcap, 0) + 1) if binomial(exp_j, e)}
    # 1/tj_bar + ... : (1/t_j + 1) as a Laurent polynomial
    inv_plus = {(0, -1): 1, (0, 0): 1}
    # numerator 1 - t_i (1/t_j + 1)/(1 + t_i)
    geo = {(e + 1, 0): (-1) ** e for e in range(pmax)}
    numer = _lmul(geo, inv_plus, pmax, qcap)
    numer = {k: -v for k, v in numer.items()}
    numer[(0, 0)] = numer.get((0, 0), 0) + 1
    # 1/(1 + t_i (1/t_j + 1)) = sum_d (-1)^d t_i^d (1/t_j + 1)^d
    denom_inv = {(0, 0): 1}
    power = {(0, 0): 1}
    for d in range(1, pmax + 1):
        power = _lmul(power, {(1, -1): -1, (1, 0): -1}, pmax, qcap)
        for key, v in power.items():
            denom_inv[key] = denom_inv.get(key, 0) + v
    out = _lmul(pref_i, pref_j, pmax, qcap)
    out = _lmul(out, numer, pmax, qcap)
    out = _lmul(out, denom_inv, pmax, qcap)
    entries = {pq: mpq(c) for pq, c in out.items() if c and pq[1] <= qmax}
    return KernelTable(entries, pmax, qmax)


@dataclass(frozen=True)
class SkewMatrix:
    """Even-sized skew-symmetric matrix given by its strict upper triangle (1-based)."""

    ctx: Context
    size: int
    upper: Mapping[tuple[int, int], Series] = field(default_factory=dict)

    def entry(self, i: int, j: int) -> Series:
        if i == j:
            return Series.zero(self.ctx)
        if i < j:
            return self.upper.get((i, j), Series.zero(self.ctx))
        return -self.upper.get((j, i), Series.zero(self.ctx))


def pfaffian(mat: SkewMatrix) -> Series:
    """Pfaffian by expansion along the first row of each minor."""
    if mat.size % 2:
        raise ValueError("the Pfaffian needs an even-sized matrix")
    memo: dict[tuple[int, ...], Series] = {}

    def pf(idx: tuple[int, ...]) -> Series:
        if not idx:
            return Series.one(mat.ctx)
        got = memo.get(idx)
        if got is not None:
            return got
        first = idx[0]
        total = Series.zero(mat.ctx)
        for pos in range(1, len(idx)):
            a = mat.entry(first, idx[pos])
            if a.is_zero():
                continue
            rest = idx[1:pos] + idx[pos + 1 :]
            term = a * pf(rest)
            total = total + term if pos % 2 == 1 else total - term
        memo[idx] = total
        return total

    return pf(tuple(range(1, mat.size + 1)))


def subsets(pairs: list[tuple[int, int]]):
    """All subsets of ``pairs`` in binary-counter order over the sorted list."""
    pairs = sorted(pairs)
    for mask in range(1 << len(pairs)):
        yield [pairs[b] for b in range(len(pairs)) if mask >> b & 1]


def pfaffian_size(lam: KStrictPartition) -> int:
    r = lam.length
    return r if r % 2 == 0 else r + 1


def required_num_b(lam: KStrictPartition) -> int:
    chi = char_index(lam, pfaffian_size(lam)).chi
    return max((abs(c) for c in chi), default=0)


def pfaffian_entry(
    lam: KStrictPartition,
    chi: tuple[int, ...],
    stats: SubsetStats,
    i: int,
    j: int,
    m: int,
    typ: str,
    ctx: Context,
    widen: int = 0,
) -> Series:
    """sum_{p>=0, p+q>=0} f_pq GX_{lam_i+d_i+p}^(chi_i) GX_{lam_j+d_j+q}^(chi_j)."""
    k = lam.k
    base_i = lam.part(i) + stats.d[i - 1]
    base_j = lam.part(j) + stats.d[j - 1]
    pmax = ctx.max_deg - base_i + widen
    qmax = ctx.max_deg - base_j + widen
    if pmax < 0:
        return Series.zero(ctx)
    table = kernel_coeffs(i, j, m, stats.c[i - 1], stats.c[j - 1], pmax, max(qmax, 0))
    by_p: dict[int, list] = {}
    for (p, q), c in table.entries.items():
        if q <= qmax:
            by_p.setdefault(p, []).append((q, c))
    total = Series.zero(ctx)
    for p, row in sorted(by_p.items()):
        left = gt_coeff(base_i + p, chi[i - 1], k, typ, ctx)
        if left.is_zero():
            continue
        inner = Series.zero(ctx)
        for q, c in row:
            right = gt_coeff(base_j + q, chi[j - 1], k, typ, ctx)
            if right:
                inner = inner + (Series.beta(ctx, p + q) * right).scale(c)
        if inner:
            total = total + left * inner
    return total


def gx_terms(lam: KStrictPartition, typ: str, ctx: Context, widen: int = 0) -> list[tuple[SubsetStats, Series]]:
    """Per-subset Pfaffians whose sum is GX_lambda."""
    if typ not in ("B", "C"):
        raise ValueError("type must be 'B' or 'C'")
    if lam.k > ctx.num_a:
        raise IndexError(f"k={lam.k} needs numA >= {lam.k}")
    need_b = required_num_b(lam)
    if need_b > ctx.num_b:
        raise IndexError(f"{lam} needs numB >= {need_b} (characteristic index reaches {need_b})")
    m = pfaffian_size(lam)
    chi = char_index(lam, m).chi
    out = []
    for subset in subsets(d_set(lam)):
        stats = SubsetStats.of(subset, m)
        upper = {}
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                upper[(i, j)] = pfaffian_entry(lam, chi, stats, i, j, m, typ, ctx, widen)
        out.append((stats, pfaffian(SkewMatrix(ctx, m, upper))))
    return out


@lru_cache(maxsize=None)
def gx_lambda(lam: KStrictPartition, typ: str, ctx: Context) -> Series:
    """GT_lambda (type C) or GT'_lambda (type B) truncated to ``ctx``."""
    total = Series.zero(ctx)
    for _, pf in gx_terms(lam, typ, ctx):
        total = total + pf
    return total
