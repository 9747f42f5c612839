"""Signed permutations, k-strict partitions and the bijection between them.

Signed permutations act on the nonzero integers with ``w(-i) == -w(i)`` and
are stored by their one-line window ``(w(1), ..., w(N))`` with trailing fixed
points trimmed.  Composition is ``(g * w)(i) == g(w(i))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

from .coeffring import B, Context, RootFactor, Series, ominus, oplus


class NotGrassmannian(ValueError):
    """The element is not a minimal-length coset representative."""


@dataclass(frozen=True)
class SignedPermutation:
    images: tuple[int, ...] = ()

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        n = len(imgs)
        if sorted(abs(v) for v in imgs) != list(range(1, n + 1)):
            raise ValueError(f"{imgs} is not a signed permutation window")
        while imgs and imgs[-1] == len(imgs):
            imgs = imgs[:-1]
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls) -> "SignedPermutation":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "SignedPermutation":
        text = text.strip()
        if not text:
            return cls.identity()
        return cls(tuple(int(t) for t in text.split(",")))

    def __call__(self, i: int) -> int:
        if i == 0:
            raise ValueError("signed permutations act on nonzero integers")
        a = abs(i)
        v = self.images[a - 1] if a <= len(self.images) else a
        return v if i > 0 else -v

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        n = max(self.support_size, other.support_size)
        return SignedPermutation(tuple(self(other(i)) for i in range(1, n + 1)))

    def inverse(self) -> "SignedPermutation":
        n = self.support_size
        out = [0] * n
        for i in range(1, n + 1):
            v = self(i)
            out[abs(v) - 1] = i if v > 0 else -i
        return SignedPermutation(tuple(out))

    @property
    def support_size(self) -> int:
        """Largest moved index (0 for the identity)."""
        return len(self.images)

    def window(self, n: int) -> tuple[int, ...]:
        if n < self.support_size:
            raise ValueError(f"{self} does not lie in W_{n}")
        return tuple(self(i) for i in range(1, n + 1))

    def in_w(self, n: int) -> bool:
        return self.support_size <= n

    def length(self) -> int:
        """Coxeter length: inversions of the window plus the sum of |negative entries|."""
        w = self.images
        inv = sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])
        return inv - sum(v for v in w if v < 0)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.images)


def simple_reflection(i: int) -> SignedPermutation:
    """s_0 negates 1; s_i swaps i and i+1."""
    if i == 0:
        return SignedPermutation((-1,))
    win = list(range(1, i + 2))
    win[i - 1], win[i] = win[i], win[i - 1]
    return SignedPermutation(tuple(win))


def signed_permutations(n: int):
    """Every element of W_n, as a generator."""
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            yield SignedPermutation(tuple(s * v for s, v in zip(signs, perm)))


@dataclass(frozen=True)
class KStrictPartition:
    k: int
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        for i in range(len(parts) - 1):
            if parts[i] < parts[i + 1]:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
            if parts[i] > self.k and parts[i] == parts[i + 1]:
                raise ValueError(f"{parts} is not {self.k}-strict: repeated part {parts[i]} > k")

    @classmethod
    def parse(cls, text: str, k: int) -> "KStrictPartition":
        text = text.strip()
        if not text or text == "0":
            return cls(k, ())
        return cls(k, tuple(int(t) for t in text.split(",")))

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def part(self, i: int) -> int:
        """lambda_i with 1-based index, zero past the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def in_spk(self, n: int) -> bool:
        return self.length <= n - self.k and (not self.parts or self.parts[0] <= n + self.k)

    def contains(self, other: "KStrictPartition") -> bool:
        return all(self.part(i) >= other.part(i) for i in range(1, other.length + 1))

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class CharIndex:
    chi: tuple[int, ...]
    gamma: tuple[int, ...]


def in_c_set(lam: KStrictPartition, i: int, j: int) -> bool:
    return lam.part(i) + lam.part(j) > 2 * lam.k + j - i


def char_index(lam: KStrictPartition, m: int | None = None) -> CharIndex:
    """Characteristic index chi_1..chi_m; parts past the length count as zero."""
    if m is None:
        m = lam.length
    if m < lam.length:
        raise ValueError("m must be at least the length of the partition")
    gamma = tuple(sum(1 for i in range(1, j) if in_c_set(lam, i, j)) for j in range(1, m + 1))
    chi = tuple(lam.part(j) - j + gamma[j - 1] - lam.k for j in range(1, m + 1))
    return CharIndex(chi, gamma)


def d_set(lam: KStrictPartition) -> list[tuple[int, int]]:
    r = lam.length
    chi = char_index(lam).chi
    return [(i, j) for i in range(1, r + 1) for j in range(i + 1, r + 1) if chi[i - 1] + chi[j - 1] < 0]


def _k_strict_parts(max_len: int, max_part: int, k: int):
    def rec(prefix, room):
        yield tuple(prefix)
        if room == 0:
            return
        top = prefix[-1] if prefix else max_part
        for p in range(top, 0, -1):
            if prefix and p == prefix[-1] and p > k:
                continue
            prefix.append(p)
            yield from rec(prefix, room - 1)
            prefix.pop()

    yield from rec([], max_len)


def canonical_order_key(lam: KStrictPartition):
    return (lam.size, tuple(-p for p in lam.parts))


def enumerate_spk(n: int, k: int) -> list[KStrictPartition]:
    """SP^k(n): k-strict partitions inside the (n-k) x (n+k) rectangle."""
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    found = {KStrictPartition(k, parts) for parts in _k_strict_parts(n - k, n + k, k)}
    return sorted(found, key=canonical_order_key)


def count_spk(n: int, k: int) -> int:
    return 2 ** (n - k) * comb(n, k)


@dataclass(frozen=True)
class GrassmannianBlocks:
    """One-line blocks (v_1..v_k | -zeta_1..-zeta_s | u_1, u_2, ...)."""

    v: tuple[int, ...]
    zeta: tuple[int, ...]
    u: tuple[int, ...]


def grassmannian_blocks(w: SignedPermutation, k: int, n: int | None = None) -> GrassmannianBlocks:
    if n is None:
        n = max(w.support_size, k)
    win = w.window(n)
    for p in range(k):
        if win[p] < 0:
            raise NotGrassmannian(f"position {p + 1} holds a negative entry inside the first {k} slots")
        if p and win[p] < win[p - 1]:
            raise NotGrassmannian(f"descent at position {p + 1} inside the first {k} slots")
    for p in range(k + 1, n):
        if win[p] < win[p - 1]:
            raise NotGrassmannian(f"descent at position {p + 1} after slot {k}")
    v = win[:k]
    rest = win[k:]
    zeta = tuple(-x for x in rest if x < 0)
    u = tuple(x for x in rest if x > 0)
    return GrassmannianBlocks(v, zeta, u)


def w_to_partition(w: SignedPermutation, k: int) -> KStrictPartition:
    blocks = grassmannian_blocks(w, k)
    nu = [sum(1 for vp in blocks.v if vp > ui) for ui in blocks.u]
    parts = [z + k for z in blocks.zeta] + nu
    return KStrictPartition(k, tuple(parts))


def partition_to_w(lam: KStrictPartition, n: int) -> SignedPermutation:
    """The k-Grassmannian element of W_n attached to ``lam``."""
    k = lam.k
    if not lam.in_spk(n):
        raise ValueError(f"{lam} is not in SP^{k}({n})")
    zeta = [p - k for p in lam.parts if p > k]
    nu = [p for p in lam.parts if p <= k]
    n_u = n - k - len(zeta)
    nu += [0] * (n_u - len(nu))
    # reading {1..n} minus zeta upward: k - nu_1 v's, then u_1, then nu_1 - nu_2 v's, ...
    labels = ["v"] * (k - (nu[0] if nu else 0))
    for i in range(n_u):
        labels.append("u")
        nxt = nu[i + 1] if i + 1 < n_u else 0
        labels += ["v"] * (nu[i] - nxt)
    free = [x for x in range(1, n + 1) if x not in zeta]
    v = [x for x, lab in zip(free, labels) if lab == "v"]
    u = [x for x, lab in zip(free, labels) if lab == "u"]
    window = tuple(v) + tuple(-z for z in zeta) + tuple(u)
    return SignedPermutation(window)


def min_coset_rep(w: SignedPermutation, k: int, n: int) -> SignedPermutation:
    win = w.window(n)
    head = sorted(abs(x) for x in win[:k])
    tail = sorted(win[k:])
    return SignedPermutation(tuple(head) + tuple(tail))


def weyl_act(g: SignedPermutation, lam: KStrictPartition, n: int) -> KStrictPartition:
    if not g.in_w(n):
        raise ValueError(f"{g} is not in W_{n}")
    rep = min_coset_rep(g * partition_to_w(lam, n), lam.k, n)
    out = w_to_partition(rep, lam.k)
    assert out.in_spk(n), "W_n must preserve SP^k(n)"
    return out


def is_k_grassmannian(w: SignedPermutation, k: int, n: int) -> bool:
    """Length criterion l(w s_i) > l(w) for every i != k below n."""
    base = w.length()
    return all((w * simple_reflection(i)).length() > base for i in range(n) if i != k)


# -- roots -------------------------------------------------------------------

ROOT_KINDS = ("short", "long", "diff", "sum")


@dataclass(frozen=True)
class Root:
    """eps_i (short), 2 eps_i (long), eps_j - eps_i (diff) or eps_j + eps_i (sum)."""

    kind: str
    i: int
    j: int = 0

    def __post_init__(self):
        if self.kind not in ROOT_KINDS:
            raise ValueError(f"unknown root kind {self.kind!r}")
        if self.kind in ("diff", "sum") and not 1 <= self.i < self.j:
            raise ValueError("two-index roots need 1 <= i < j")
        if self.kind in ("short", "long") and self.i < 1:
            raise ValueError("root index must be positive")

    @property
    def max_index(self) -> int:
        return max(self.i, self.j)

    def reflection(self) -> SignedPermutation:
        n = self.max_index
        win = list(range(1, n + 1))
        i, j = self.i, self.j
        if self.kind in ("short", "long"):
            win[i - 1] = -i
        elif self.kind == "diff":
            win[i - 1], win[j - 1] = j, i
        else:
            win[i - 1], win[j - 1] = -j, -i
        return SignedPermutation(tuple(win))

    def factor(self) -> RootFactor:
        """Non-unit part of e(alpha); 2 + beta b_i is a unit."""
        if self.kind in ("short", "long"):
            return RootFactor("single", self.i)
        return RootFactor(self.kind, self.i, self.j)

    def __str__(self):
        return {
            "short": f"e{self.i}",
            "long": f"2e{self.i}",
            "diff": f"e{self.j}-e{self.i}",
            "sum": f"e{self.j}+e{self.i}",
        }[self.kind]


def roots_up_to(n: int, typ: str) -> list[Root]:
    if typ not in ("B", "C"):
        raise ValueError("type must be 'B' or 'C'")
    single = "short" if typ == "B" else "long"
    roots = [Root(single, i) for i in range(1, n + 1)]
    for j in range(1, n + 1):
        for i in range(1, j):
            roots.append(Root("diff", i, j))
            roots.append(Root("sum", i, j))
    return roots


def e_of_root(alpha: Root, ctx: Context) -> Series:
    if alpha.max_index > ctx.num_b:
        raise IndexError(f"root {alpha} needs b{alpha.max_index} but numB={ctx.num_b}")
    bi = Series.var(ctx, B(alpha.i))
    if alpha.kind == "short":
        return bi
    if alpha.kind == "long":
        return oplus(bi, bi)
    bj = Series.var(ctx, B(alpha.j))
    if alpha.kind == "diff":
        return ominus(bj, bi)
    return oplus(bj, bi)
