"""Localization at torus-fixed points and the GKM divisibility check."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from gmpy2 import mpq

from .coeffring import A, B, X, Context, Series, bar, series_from_terms_json, series_terms_json, vanishing_residue
from .genfun import LaurentSeriesU
from .weylcomb import (
    KStrictPartition,
    SignedPermutation,
    enumerate_spk,
    grassmannian_blocks,
    partition_to_w,
    roots_up_to,
    weyl_act,
)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GROTH_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def signed_b(index: int, ctx: Context) -> Series:
    """b_index, with b_{-m} meaning bar(b_m)."""
    b = Series.var(ctx, B(abs(index)))
    return b if index > 0 else bar(b)


def phi_v(f: Series, v: SignedPermutation, ctx: Context | None = None) -> Series:
    """x_i -> b_{v(i)} if v(i) < 0 else 0;  a_i -> b_{-v(i)}."""
    ctx = ctx or f.ctx
    if f.ctx != ctx:
        raise ValueError("series and context disagree")
    need = max(v.support_size, ctx.num_a)
    if need > ctx.num_b:
        raise IndexError(f"localizing at {v} needs numB >= {need}")
    assignment: dict = {}
    for i in range(1, ctx.num_x + 1):
        vi = v(i)
        assignment[X(i)] = signed_b(vi, ctx) if vi < 0 else 0
    for i in range(1, ctx.num_a + 1):
        assignment[A(i)] = signed_b(-v(i), ctx)
    return f.substitute(assignment)


@dataclass(frozen=True)
class LocalizationTable:
    n: int
    k: int
    entries: Mapping[KStrictPartition, Series] = field(default_factory=dict)

    def __getitem__(self, mu: KStrictPartition) -> Series:
        return self.entries[mu]

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.values())

    def to_json(self) -> dict:
        ctx = next(iter(self.entries.values())).ctx if self.entries else None
        return {
            "n": self.n,
            "k": self.k,
            "context": ctx.to_json() if ctx else None,
            "entries": [
                {"partition": str(mu), "value": series_terms_json(val)}
                for mu, val in sorted(self.entries.items(), key=lambda kv: _order(kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LocalizationTable":
        ctx = Context.from_json(data["context"])
        k = int(data["k"])
        entries = {
            KStrictPartition.parse(row["partition"], k): series_from_terms_json(ctx, row["value"])
            for row in data["entries"]
        }
        return cls(int(data["n"]), k, entries)


def _order(mu: KStrictPartition):
    return (mu.size, tuple(-p for p in mu.parts))


def psi_n(f: Series, n: int, k: int) -> LocalizationTable:
    """Values of f at every fixed point of IG^k(n), with b_i = 0 for i > n."""
    ctx = f.ctx
    if ctx.num_b < n:
        raise IndexError(f"localizing to rank {n} needs numB >= {n}")
    high_b = {B(i): 0 for i in range(n + 1, ctx.num_b + 1)}
    spk = enumerate_spk(n, k)

    def localize(mu):
        return phi_v(f, partition_to_w(mu, n)).substitute(high_b)

    values = _pmap(localize, spk)
    return LocalizationTable(n, k, dict(zip(spk, values)))


@dataclass(frozen=True)
class Violation:
    mu: KStrictPartition
    root: str
    target: KStrictPartition
    residue: Series

    def to_json(self) -> dict:
        return {
            "partition": str(self.mu),
            "root": self.root,
            "reflected": str(self.target),
            "residue": series_terms_json(self.residue),
        }


@dataclass(frozen=True)
class GKMReport:
    n: int
    k: int
    typ: str
    edges_checked: int
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "type": self.typ,
            "edgesChecked": self.edges_checked,
            "violations": [v.to_json() for v in self.violations],
        }


def gkm_check(table: LocalizationTable, typ: str) -> GKMReport:
    """psi(s_alpha mu) - psi(mu) must be divisible by e(alpha) for every mu, alpha."""
    n, k = table.n, table.k
    spk = enumerate_spk(n, k)
    missing = [mu for mu in spk if mu not in table.entries]
    if missing:
        raise KeyError(f"table lacks entries for {', '.join(str(m) or '()' for m in missing)}")
    roots = roots_up_to(n, typ)
    edges = [(mu, alpha) for mu in spk for alpha in roots]

    def check(edge):
        mu, alpha = edge
        target = weyl_act(alpha.reflection(), mu, n)
        diff = table[target] - table[mu]
        if diff.is_zero():
            return None
        residue = vanishing_residue(diff, alpha.factor())
        if residue.is_zero():
            return None
        return Violation(mu, str(alpha), target, residue)

    found = tuple(v for v in _pmap(check, edges) if v is not None)
    return GKMReport(n, k, typ, len(edges), found)


def _expand_inverse_one_plus(c: LaurentSeriesU) -> LaurentSeriesU:
    """1/(1 + c) as sum_j (-c)^j for a u-polynomial c with positive-valuation coefficients."""
    ctx = c.ctx
    neg = LaurentSeriesU(ctx, {m: -s for m, s in c.coeffs.items()})
    result = LaurentSeriesU.constant(Series.one(ctx))
    term = LaurentSeriesU.constant(Series.one(ctx))
    for _ in range(ctx.max_deg):
        term = term * neg
        if not term.coeffs:
            break
        result = result + term
    return result


def _u_plus_beta_times(y: Series) -> LaurentSeriesU:
    """(u + beta) * y."""
    return LaurentSeriesU(y.ctx, {0: Series.beta(y.ctx) * y, 1: y})


def loc_product_formula(
    mu: KStrictPartition, ell: int, k: int, n: int, typ: str, ctx: Context, lo: int, hi: int
) -> LaurentSeriesU:
    """Closed-form localization of the one-row generating function at w_mu.

    Returns the u^m coefficients for lo <= m <= hi.
    """
    if mu.k != k:
        raise ValueError("partition and k disagree")
    if abs(ell) > n or n > ctx.num_b:
        raise IndexError("need |l| <= n <= numB")
    blocks = grassmannian_blocks(partition_to_w(mu, n), k, n)
    one = LaurentSeriesU.constant(Series.one(ctx))
    body = one
    for z in blocks.zeta:
        bz = Series.var(ctx, B(z))
        num = one + _u_plus_beta_times(bar(bz))
        body = body * num * _expand_inverse_one_plus(_u_plus_beta_times(bz))
    for v in blocks.v:
        body = body * (one + _u_plus_beta_times(bar(Series.var(ctx, B(v)))))
    for i in range(1, abs(ell) + 1):
        bi = Series.var(ctx, B(i))
        if ell > 0:
            body = body * (one + _u_plus_beta_times(bi))
        else:
            body = body * _expand_inverse_one_plus(_u_plus_beta_times(bar(bi)))

    # prefactor in u^{-1}: 1/(1+beta/u), times 1/(2+beta/u) for type B with l >= 0
    top = max(body.coeffs, default=0)
    count = top - lo + 1
    minus_beta = -Series.beta(ctx)
    pre = [minus_beta**j for j in range(count)]
    if typ == "B" and ell >= 0:
        half = [(minus_beta**j).scale(mpq(1, 2 ** (j + 1))) for j in range(count)]
        pre = [sum((pre[a] * half[j - a] for a in range(j + 1)), Series.zero(ctx)) for j in range(count)]
    elif typ not in ("B", "C"):
        raise ValueError("type must be 'B' or 'C'")
    out = {}
    for m in range(lo, hi + 1):
        total = Series.zero(ctx)
        for t, piece in body.coeffs.items():
            if t >= m:
                total = total + pre[t - m] * piece
        out[m] = total
    return LaurentSeriesU(ctx, out)


def support_triangularity(tables: Mapping[KStrictPartition, LocalizationTable]) -> list[str]:
    """Problems with the triangular shape of the Schubert-class tables.

    Ordering fixed points by length (= |mu|) refines Bruhat order, so the table
    of lambda must vanish at every mu != lambda with |mu| <= |lambda|, and its
    diagonal value must be nonzero whenever |lambda| fits in the truncation.
    """
    problems = []
    for lam, table in tables.items():
        for mu, val in table.entries.items():
            if mu != lam and mu.size <= lam.size and not val.is_zero():
                problems.append(f"GX_{lam} is nonzero at {mu}")
        diag = table.entries.get(lam)
        if diag is not None and diag.is_zero() and lam.size <= diag.ctx.max_deg:
            problems.append(f"GX_{lam} vanishes at its own fixed point")
    return problems
