"""Truncated graded power series over Q[beta] in the x, a, b alphabets.

A :class:`Series` is a finite sum of monomials ``c * beta^e * x^I a^J b^K``
taken modulo the ideal of monomials whose xab-degree exceeds
``Context.max_deg``.  Variables past the context caps are identically zero.
Beta has degree -1 and does not count toward the cutoff.

Monomials are packed into single Python ints so that multiplying two
monomials is one integer addition.  The layout, from the low bits up, is one
8-bit field per materialized variable, a 16-bit beta field, and the
xab-degree in the remaining high bits.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Union

from gmpy2 import mpq

_FIELD = 8
_FIELD_MASK = (1 << _FIELD) - 1
_BETA_BITS = 16
_BETA_MASK = (1 << _BETA_BITS) - 1
# exponents of a product of two truncated monomials stay below 2 * max_deg
MAX_SUPPORTED_DEGREE = _FIELD_MASK // 2

FAMILIES = ("x", "a", "b")

Scalar = Union[int, mpq, Fraction]
VarId = tuple[str, int]


def X(i: int) -> VarId:
    return ("x", i)


def A(i: int) -> VarId:
    return ("a", i)


def B(i: int) -> VarId:
    return ("b", i)


class ContextMismatch(ValueError):
    """Operands were built over different truncation contexts."""


class NotInvertible(ValueError):
    """A geometric-series inverse was requested for a unit-free argument."""


@dataclass(frozen=True)
class Context:
    """Truncation degree and the number of materialized variables per family."""

    max_deg: int
    num_x: int = 0
    num_a: int = 0
    num_b: int = 0

    def __post_init__(self):
        for name in ("max_deg", "num_x", "num_a", "num_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.max_deg > MAX_SUPPORTED_DEGREE:
            raise ValueError(f"max_deg above {MAX_SUPPORTED_DEGREE} is not supported")

    @property
    def nvars(self) -> int:
        return self.num_x + self.num_a + self.num_b

    @property
    def beta_shift(self) -> int:
        return _FIELD * self.nvars

    @property
    def deg_shift(self) -> int:
        return _FIELD * self.nvars + _BETA_BITS

    def cap(self, family: str) -> int:
        return {"x": self.num_x, "a": self.num_a, "b": self.num_b}[family]

    def position(self, var: VarId) -> int:
        family, i = var
        if family == "x":
            offset = 0
        elif family == "a":
            offset = self.num_x
        elif family == "b":
            offset = self.num_x + self.num_a
        else:
            raise ValueError(f"unknown variable family {family!r}")
        if not 1 <= i <= self.cap(family):
            raise IndexError(f"{family}{i} is not materialized in {self}")
        return offset + i - 1

    def variable_at(self, pos: int) -> VarId:
        if pos < self.num_x:
            return ("x", pos + 1)
        pos -= self.num_x
        if pos < self.num_a:
            return ("a", pos + 1)
        return ("b", pos - self.num_a + 1)

    def variables(self, family: str | None = None) -> list[VarId]:
        out = [self.variable_at(p) for p in range(self.nvars)]
        if family is not None:
            out = [v for v in out if v[0] == family]
        return out

    def has(self, var: VarId) -> bool:
        family, i = var
        return 1 <= i <= self.cap(family)

    def replace(self, **changes) -> "Context":
        fields = dict(max_deg=self.max_deg, num_x=self.num_x, num_a=self.num_a, num_b=self.num_b)
        fields.update(changes)
        return Context(**fields)

    # -- monomial packing ---------------------------------------------------

    def pack(self, beta: int, exps: Mapping[VarId, int]) -> int:
        deg = 0
        key = 0
        for var, e in exps.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e == 0:
                continue
            key += e << (_FIELD * self.position(var))
            deg += e
        if beta < 0 or beta > _BETA_MASK:
            raise ValueError(f"beta exponent {beta} out of range")
        return key + (beta << self.beta_shift) + (deg << self.deg_shift)

    def unpack(self, key: int) -> "Monomial":
        exps = {}
        for pos in range(self.nvars):
            e = (key >> (_FIELD * pos)) & _FIELD_MASK
            if e:
                exps[self.variable_at(pos)] = e
        beta = (key >> self.beta_shift) & _BETA_MASK
        return Monomial(beta, exps)

    def exponent_vector(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_FIELD * p)) & _FIELD_MASK for p in range(self.nvars))

    def degree_of(self, key: int) -> int:
        return key >> self.deg_shift

    def beta_of(self, key: int) -> int:
        return (key >> self.beta_shift) & _BETA_MASK

    def to_json(self) -> dict:
        return {"maxDeg": self.max_deg, "numX": self.num_x, "numA": self.num_a, "numB": self.num_b}

    @classmethod
    def from_json(cls, data: Mapping) -> "Context":
        return cls(int(data["maxDeg"]), int(data["numX"]), int(data["numA"]), int(data["numB"]))


class Monomial(NamedTuple):
    beta: int
    exps: dict

    @property
    def xab_degree(self) -> int:
        return sum(self.exps.values())

    @property
    def graded_degree(self) -> int:
        return self.xab_degree - self.beta

    def sort_key(self):
        order = {f: n for n, f in enumerate(FAMILIES)}
        ids = tuple(sorted(((order[f], i), e) for (f, i), e in self.exps.items()))
        return (self.xab_degree, self.beta, ids)


def as_rational(c) -> mpq:
    return mpq(c)


class Series:
    """An immutable element of the truncated ring attached to ``ctx``."""

    __slots__ = ("ctx", "_terms", "_buckets")

    def __init__(self, ctx: Context, terms: Mapping[int, mpq] | None = None, *, _clean=False):
        self.ctx = ctx
        if terms is None:
            terms = {}
        elif not _clean:
            limit = ctx.max_deg
            shift = ctx.deg_shift
            terms = {k: mpq(c) for k, c in terms.items() if c and (k >> shift) <= limit}
        self._terms = terms
        self._buckets = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ctx: Context) -> "Series":
        return cls(ctx, {}, _clean=True)

    @classmethod
    def one(cls, ctx: Context) -> "Series":
        return cls.const(ctx, 1)

    @classmethod
    def const(cls, ctx: Context, c: Scalar, beta: int = 0) -> "Series":
        c = as_rational(c)
        if not c:
            return cls.zero(ctx)
        return cls(ctx, {beta << ctx.beta_shift: c}, _clean=True)

    @classmethod
    def beta(cls, ctx: Context, power: int = 1) -> "Series":
        return cls.const(ctx, 1, power)

    @classmethod
    def var(cls, ctx: Context, var: VarId) -> "Series":
        """The variable ``var``; zero if it lies past the context cap."""
        if not ctx.has(var):
            return cls.zero(ctx)
        return cls(ctx, {ctx.pack(0, {var: 1}): mpq(1)})

    @classmethod
    def from_terms(cls, ctx: Context, terms: Iterable[tuple[Scalar, int, Mapping[VarId, int]]]) -> "Series":
        """Build from ``(coeff, beta_exp, {var: exp})`` triples, summing repeats.

        Terms mentioning variables past the context caps vanish.
        """
        out: dict[int, mpq] = {}
        for c, beta, exps in terms:
            if any(e and not ctx.has(v) for v, e in exps.items()):
                continue
            key = ctx.pack(beta, exps)
            out[key] = out.get(key, 0) + as_rational(c)
        return cls(ctx, out)

    # -- inspection ---------------------------------------------------------

    @property
    def raw_terms(self) -> Mapping[int, mpq]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> list[tuple[mpq, Monomial]]:
        """Terms decoded and sorted in canonical order."""
        decoded = [(c, self.ctx.unpack(k)) for k, c in self._terms.items()]
        decoded.sort(key=lambda cm: cm[1].sort_key())
        return decoded

    def valuation(self) -> int | None:
        """Smallest xab-degree present, or None for zero."""
        if not self._terms:
            return None
        shift = self.ctx.deg_shift
        return min(k >> shift for k in self._terms)

    def variables_used(self) -> set[VarId]:
        used = set()
        for k in self._terms:
            for pos, e in enumerate(self.ctx.exponent_vector(k)):
                if e:
                    used.add(self.ctx.variable_at(pos))
        return used

    def families_used(self) -> set[str]:
        return {f for f, _ in self.variables_used()}

    def graded_degrees(self) -> set[int]:
        ctx = self.ctx
        return {ctx.degree_of(k) - ctx.beta_of(k) for k in self._terms}

    def coefficient(self, beta: int, exps: Mapping[VarId, int]) -> mpq:
        return self._terms.get(self.ctx.pack(beta, exps), mpq(0))

    def filter(self, keep: Callable[[Monomial], bool]) -> "Series":
        ctx = self.ctx
        return Series(ctx, {k: c for k, c in self._terms.items() if keep(ctx.unpack(k))}, _clean=True)

    def homogeneous_part(self, degree: int) -> "Series":
        """Terms of graded degree ``degree`` (beta counted as -1)."""
        ctx = self.ctx
        return Series(
            ctx,
            {k: c for k, c in self._terms.items() if ctx.degree_of(k) - ctx.beta_of(k) == degree},
            _clean=True,
        )

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Series"):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} != {other.ctx}")

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            self._check(other)
            return other
        if isinstance(other, (int, type(mpq(0)))) or hasattr(other, "denominator"):
            return Series.const(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for k, c in small.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Series(self.ctx, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.ctx, {k: -c for k, c in self._terms.items()}, _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: Scalar) -> "Series":
        c = as_rational(c)
        if not c:
            return Series.zero(self.ctx)
        return Series(self.ctx, {k: v * c for k, v in self._terms.items()}, _clean=True)

    def _degree_buckets(self):
        if self._buckets is None:
            shift = self.ctx.deg_shift
            buckets: dict[int, list] = {}
            for k, c in self._terms.items():
                buckets.setdefault(k >> shift, []).append((k, c))
            self._buckets = sorted(buckets.items())
        return self._buckets

    def __mul__(self, other):
        if not isinstance(other, Series):
            if isinstance(other, int) or hasattr(other, "denominator"):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        if not self._terms or not other._terms:
            return Series.zero(self.ctx)
        limit = self.ctx.max_deg
        out: dict[int, mpq] = {}
        get = out.get
        right = other._degree_buckets()
        for d1, items1 in self._degree_buckets():
            room = limit - d1
            if room < 0:
                break
            for d2, items2 in right:
                if d2 > room:
                    break
                for k1, c1 in items1:
                    for k2, c2 in items2:
                        k = k1 + k2
                        out[k] = get(k, 0) + c1 * c2
        return Series(self.ctx, {k: c for k, c in out.items() if c}, _clean=True)

    def __rmul__(self, other):
        if isinstance(other, int) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "Series":
        if n < 0:
            raise ValueError("negative powers are not defined here; use invert_one_plus")
        result = Series.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Series):
            return self.ctx == other.ctx and self._terms == other._terms
        if isinstance(other, int) or hasattr(other, "denominator"):
            return self == Series.const(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, frozenset(self._terms.items())))

    # -- substitution -------------------------------------------------------

    def substitute(self, assignment: Mapping[VarId, "Series | int"]) -> "Series":
        """Evaluate with the given variables replaced.

        Images are Series over the same context, or the integer 0.
        Unassigned variables map to themselves.
        """
        ctx = self.ctx
        zeroed = []
        images = {}
        for var, img in assignment.items():
            if not ctx.has(var):
                continue
            pos = ctx.position(var)
            if isinstance(img, Series):
                self._check(img)
                if img.is_zero():
                    zeroed.append(pos)
                else:
                    images[pos] = img
            elif img == 0:
                zeroed.append(pos)
            else:
                raise TypeError("substitution images must be Series or 0")

        terms = self._terms
        if zeroed:
            masks = [_FIELD_MASK << (_FIELD * p) for p in zeroed]
            terms = {k: c for k, c in terms.items() if not any(k & m for m in masks)}
        if not images:
            return Series(ctx, terms, _clean=True)

        positions = sorted(images)
        dshift = ctx.deg_shift
        groups: dict[tuple[int, ...], dict[int, mpq]] = {}
        for k, c in terms.items():
            exps = []
            rest = k
            for p in positions:
                e = (k >> (_FIELD * p)) & _FIELD_MASK
                exps.append(e)
                if e:
                    rest -= (e << (_FIELD * p)) + (e << dshift)
            groups.setdefault(tuple(exps), {})[rest] = c

        powers: dict[tuple[int, int], Series] = {}

        def power(p, e):
            got = powers.get((p, e))
            if got is None:
                got = images[p] if e == 1 else power(p, e - 1) * images[p]
                powers[(p, e)] = got
            return got

        result: dict[int, mpq] = {}
        for exps, rest in groups.items():
            factor = None
            for p, e in zip(positions, exps):
                if e:
                    factor = power(p, e) if factor is None else factor * power(p, e)
            piece = Series(ctx, rest, _clean=True)
            if factor is not None:
                piece = piece * factor
            for k, c in piece._terms.items():
                s = result.get(k, 0) + c
                if s:
                    result[k] = s
                else:
                    result.pop(k, None)
        return Series(ctx, result, _clean=True)

    def set_zero(self, families: str = "ab") -> "Series":
        """Specialize every variable of the named families to 0."""
        ctx = self.ctx
        return self.substitute({v: 0 for f in families for v in ctx.variables(f)})

    def rename(self, mapping: Mapping[VarId, VarId]) -> "Series":
        """Relabel variables (e.g. permute x's).  Targets must be materialized."""
        ctx = self.ctx
        pos_map = {ctx.position(s): ctx.position(t) for s, t in mapping.items() if ctx.has(s)}
        if not pos_map:
            return self
        moved = sorted(pos_map)
        out: dict[int, mpq] = {}
        for k, c in self._terms.items():
            new = k
            for p in moved:
                e = (k >> (_FIELD * p)) & _FIELD_MASK
                if e:
                    new -= e << (_FIELD * p)
            for p in moved:
                e = (k >> (_FIELD * p)) & _FIELD_MASK
                if e:
                    new += e << (_FIELD * pos_map[p])
            out[new] = out.get(new, 0) + c
        return Series(ctx, out)

    def to_context(self, ctx: Context) -> "Series":
        """Re-express in another context.

        Terms with variables missing from ``ctx`` are dropped (those variables
        are zero there), as are terms above the new degree cap.
        """
        if ctx == self.ctx:
            return self
        src = self.ctx
        out: dict[int, mpq] = {}
        for k, c in self._terms.items():
            mono = src.unpack(k)
            if mono.xab_degree > ctx.max_deg:
                continue
            if not all(ctx.has(v) for v in mono.exps):
                continue
            out[ctx.pack(mono.beta, mono.exps)] = c
        return Series(ctx, out, _clean=True)

    # -- rendering --------------------------------------------------------

    def __str__(self) -> str:
        return render_text(self)

    def __repr__(self) -> str:
        return f"Series({render_text(self)!s})"

    def to_json(self) -> dict:
        return {"context": self.ctx.to_json(), "terms": series_terms_json(self)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Series":
        ctx = Context.from_json(data["context"])
        return series_from_terms_json(ctx, data["terms"])


# -- formal group law --------------------------------------------------------


def invert_one_plus(s: Series) -> Series:
    """Return 1/(1+s) as the terminating geometric series sum_j (-s)^j."""
    val = s.valuation()
    if val is None:
        return Series.one(s.ctx)
    if val == 0:
        raise NotInvertible("1+s is only inverted here when s has no degree-0 part")
    result = Series.one(s.ctx)
    term = Series.one(s.ctx)
    neg = -s
    for _ in range(s.ctx.max_deg):
        term = term * neg
        if term.is_zero():
            break
        result = result + term
    return result


def oplus(u: Series, v: Series) -> Series:
    return u + v + Series.beta(u.ctx) * u * v


def bar(u: Series) -> Series:
    """Formal inverse -u/(1+beta u)."""
    return -(u * invert_one_plus(Series.beta(u.ctx) * u))


def ominus(u: Series, v: Series) -> Series:
    """(u - v)/(1 + beta v), which equals u (+) bar(v)."""
    return (u - v) * invert_one_plus(Series.beta(v.ctx) * v)


def fgl_sum(items: Iterable[Series], ctx: Context) -> Series:
    total = Series.zero(ctx)
    for it in items:
        total = oplus(total, it)
    return total


# -- divisibility ------------------------------------------------------------


@dataclass(frozen=True)
class RootFactor:
    """A non-unit factor of a root weight: b_i, b_j - b_i or b_i (+) b_j."""

    kind: str  # "single" | "diff" | "sum"
    i: int
    j: int = 0

    def __post_init__(self):
        if self.kind not in ("single", "diff", "sum"):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind != "single" and not 1 <= self.i < self.j:
            raise ValueError("two-index factors need 1 <= i < j")

    def as_series(self, ctx: Context) -> Series:
        bi = Series.var(ctx, B(self.i))
        if self.kind == "single":
            return bi
        bj = Series.var(ctx, B(self.j))
        if self.kind == "diff":
            return bj - bi
        return oplus(bi, bj)

    def __str__(self):
        if self.kind == "single":
            return f"b{self.i}"
        if self.kind == "diff":
            return f"b{self.j}-b{self.i}"
        return f"b{self.i}(+)b{self.j}"


def vanishing_residue(f: Series, factor: RootFactor) -> Series:
    """Image of ``f`` under the substitution that kills ``factor``."""
    ctx = f.ctx
    if factor.kind == "single":
        return f.substitute({B(factor.i): 0})
    bi = Series.var(ctx, B(factor.i))
    if factor.kind == "diff":
        return f.substitute({B(factor.j): bi})
    return f.substitute({B(factor.j): bar(bi)})


def divisible_by_linear_factor(f: Series, factor: RootFactor) -> bool:
    if f.families_used() - {"b"}:
        raise ValueError("divisibility is only tested for series in the b variables")
    return vanishing_residue(f, factor).is_zero()


# -- text and JSON -----------------------------------------------------------


def _var_name(var: VarId) -> str:
    return f"{var[0]}{var[1]}"


def render_text(s: Series) -> str:
    if s.is_zero():
        return "0"
    pieces = []
    for c, mono in s.terms():
        factors = []
        if mono.beta:
            factors.append("B" if mono.beta == 1 else f"B^{mono.beta}")
        for var, e in sorted(mono.exps.items(), key=lambda ve: (FAMILIES.index(ve[0][0]), ve[0][1])):
            factors.append(_var_name(var) if e == 1 else f"{_var_name(var)}^{e}")
        if not factors:
            body = str(c)
        elif c == 1:
            body = "*".join(factors)
        elif c == -1:
            body = "-" + "*".join(factors)
        else:
            body = f"{c}*" + "*".join(factors)
        pieces.append(body)
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def series_terms_json(s: Series) -> list[dict]:
    rows = []
    for c, mono in s.terms():
        rows.append(
            {
                "coeff": f"{c.numerator}/{c.denominator}",
                "beta": mono.beta,
                "vars": {
                    _var_name(v): e
                    for v, e in sorted(mono.exps.items(), key=lambda ve: (FAMILIES.index(ve[0][0]), ve[0][1]))
                },
            }
        )
    return rows


_VAR_RE = re.compile(r"^([xab])(\d+)$")


def series_from_terms_json(ctx: Context, rows: Iterable[Mapping]) -> Series:
    triples = []
    for row in rows:
        exps = {}
        for name, e in row["vars"].items():
            m = _VAR_RE.match(name)
            if not m:
                raise ValueError(f"bad variable name {name!r}")
            exps[(m.group(1), int(m.group(2)))] = int(e)
        triples.append((mpq(row["coeff"]), int(row["beta"]), exps))
    return Series.from_terms(ctx, triples)


def dumps(s: Series) -> str:
    return json.dumps(s.to_json(), sort_keys=True)


def loads(text: str) -> Series:
    return Series.from_json(json.loads(text))


__all__ = [
    "A",
    "B",
    "X",
    "Context",
    "ContextMismatch",
    "Monomial",
    "NotInvertible",
    "RootFactor",
    "Series",
    "bar",
    "divisible_by_linear_factor",
    "fgl_sum",
    "invert_one_plus",
    "ominus",
    "oplus",
    "render_text",
    "vanishing_residue",
]
