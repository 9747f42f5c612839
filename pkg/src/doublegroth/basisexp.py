"""Expansion into the GP formal basis and into the k = 0 double family.

Both expansions run the same elimination.  Every basis element G_mu has a
lowest xab-degree component of degree |mu|, whose top x-degree part is
lead * P_mu(x) with leading monomial x^mu.  So the residual is scanned in the
order (lowest xab-degree, highest x-degree, lex-largest x-monomial); the
monomial found must be x^mu for a strict mu, and subtracting a multiple of G_mu
clears it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

from gmpy2 import mpq

from .coeffring import Context, Series, series_terms_json
from .genfun import gp_symmetrizer, strict_partitions
from .ggamma import has_cancellation, is_x_symmetric
from .pfaffengine import gx_lambda, required_num_b
from .weylcomb import KStrictPartition


class NotInSpan(ValueError):
    """The residual has a leading monomial that no basis element can cancel."""


@dataclass(frozen=True)
class ExpansionResult:
    basis: str
    ctx: Context
    coeffs: Mapping[tuple[int, ...], Series] = field(default_factory=dict)
    remainder: Series | None = None

    def reconstruct(self, basis_fn: Callable[[tuple[int, ...]], Series]) -> Series:
        total = Series.zero(self.ctx)
        for mu, c in self.coeffs.items():
            total = total + c * basis_fn(mu)
        return total + (self.remainder or Series.zero(self.ctx))

    def to_json(self) -> dict:
        order = sorted(self.coeffs, key=lambda p: (sum(p), tuple(-x for x in p)))
        return {
            "basis": self.basis,
            "coeffs": [
                {"partition": ",".join(map(str, mu)), "value": series_terms_json(self.coeffs[mu])}
                for mu in order
            ],
            "remainder": series_terms_json(self.remainder) if self.remainder is not None else [],
            "truncation": self.ctx.to_json(),
        }


def _x_exponent(ctx: Context, key: int) -> tuple[int, ...]:
    return tuple((key >> (8 * p)) & 0xFF for p in range(ctx.num_x))


def _x_split(f: Series):
    """Leading (-xab-degree, x-degree, x-exponent) among the terms of f."""
    ctx = f.ctx
    best = None
    for key in f.raw_terms:
        xexp = _x_exponent(ctx, key)
        cand = (-ctx.degree_of(key), sum(xexp), xexp)
        if best is None or cand > best:
            best = cand
    return best


def _x_coefficient(f: Series, deg: int, xexp: tuple[int, ...]) -> Series:
    """Sum of the terms of f with the given xab-degree and x-exponent, x stripped."""
    ctx = f.ctx
    xmask = (1 << (8 * ctx.num_x)) - 1
    xdeg = sum(xexp)
    out = {}
    for key, c in f.raw_terms.items():
        if ctx.degree_of(key) == deg and _x_exponent(ctx, key) == xexp:
            out[key - (key & xmask) - (xdeg << ctx.deg_shift)] = c
    return Series(ctx, out)


def _shape(xexp: tuple[int, ...]) -> tuple[int, ...] | None:
    parts = tuple(e for e in xexp if e)
    if list(xexp[: len(parts)]) != list(parts):
        return None
    if any(parts[i] <= parts[i + 1] for i in range(len(parts) - 1)):
        return None
    return parts


def _check_leading(g: Series, mu: tuple[int, ...], lead: int) -> None:
    top = _x_split(g)
    if top is None:
        raise AssertionError(f"basis element {mu} vanishes")
    neg_deg, _, xexp = top
    if -neg_deg != sum(mu) or _shape(xexp) != mu:
        raise AssertionError(f"basis element {mu} has unexpected leading monomial {xexp}")
    c = _x_coefficient(g, sum(mu), xexp)
    if c != Series.const(g.ctx, lead):
        raise AssertionError(f"basis element {mu} has leading coefficient other than {lead}")


def eliminate(
    f: Series,
    basis_fn: Callable[[tuple[int, ...]], Series],
    lead_fn: Callable[[tuple[int, ...]], int],
    basis: str,
) -> ExpansionResult:
    ctx = f.ctx
    residual = f
    coeffs: dict[tuple[int, ...], Series] = {}
    checked: set = set()
    while not residual.is_zero():
        neg_deg, _, xexp = _x_split(residual)
        mu = _shape(xexp)
        if mu is None:
            raise NotInSpan(f"not in the {basis} span at this truncation: leading x-exponent {xexp}")
        g = basis_fn(mu)
        lead = lead_fn(mu)
        if mu not in checked:
            _check_leading(g, mu, lead)
            checked.add(mu)
        c = _x_coefficient(residual, -neg_deg, xexp).scale(mpq(1, lead))
        coeffs[mu] = coeffs[mu] + c if mu in coeffs else c
        residual = residual - c * g
    coeffs = {mu: c for mu, c in coeffs.items() if not c.is_zero()}
    return ExpansionResult(basis, ctx, coeffs, residual)


def expand_in_gp(f: Series, ctx: Context | None = None) -> ExpansionResult:
    """Coefficients c_mu in the a, b, beta ring with f = sum c_mu GP_mu(x)."""
    ctx = ctx or f.ctx
    if f.ctx != ctx:
        raise ValueError("series and context disagree")
    if not is_x_symmetric(f):
        raise NotInSpan("input is not symmetric in x")
    if not has_cancellation(f):
        raise NotInSpan("input fails the cancellation property")
    n = ctx.num_x
    return eliminate(f, lambda mu: gp_symmetrizer(mu, n, ctx), lambda mu: 1, "GP")


def max_strict_length(size: int) -> int:
    r = 0
    while (r + 1) * (r + 2) // 2 <= size:
        r += 1
    return r


def gq_basis_context(lam: KStrictPartition, ctx: Context) -> Context:
    need = max([required_num_b(lam)] + [
        required_num_b(KStrictPartition(0, mu)) for mu in strict_partitions(ctx.max_deg) if mu
    ])
    return ctx.replace(num_b=max(ctx.num_b, need), num_a=max(ctx.num_a, lam.k))


@lru_cache(maxsize=None)
def _gq_element(mu: tuple[int, ...], ctx: Context) -> Series:
    small = ctx.replace(num_a=0)
    return gx_lambda(KStrictPartition(0, mu), "C", small).to_context(ctx)


def expand_gt_in_gq_basis(lam: KStrictPartition, ctx: Context) -> ExpansionResult:
    """Expand GT_lambda (type C) in the k = 0 double classes GT_mu(x|b).

    Needs numX large enough that no basis element needed at this truncation
    loses its leading monomial.
    """
    need_x = max_strict_length(ctx.max_deg)
    if ctx.num_x < need_x:
        raise ValueError(f"degree {ctx.max_deg} needs numX >= {need_x} for a faithful expansion")
    f = gx_lambda(lam, "C", ctx)
    if not is_x_symmetric(f):
        raise NotInSpan("input is not symmetric in x")
    return eliminate(f, lambda mu: _gq_element(mu, ctx), lambda mu: 2 ** len(mu), "GQ")


def is_integral(result: ExpansionResult) -> bool:
    return all(c.is_integral() for c in result.coeffs.values())
