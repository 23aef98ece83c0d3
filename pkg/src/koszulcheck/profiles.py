"""Colours, profiles, permutations and permutation-pair actions.

Colours are interned integer ids; a profile is a plain tuple of them.
Permutations are stored in one-line notation with 1-based images, and
compose as functions: ``compose(s, t)(i) == s(t(i))``.
"""
from __future__ import annotations

from itertools import permutations as _permutations
from typing import Iterable, Iterator, NamedTuple, Sequence

Colour = int
Profile = tuple  # tuple[Colour, ...]


class Permutation(tuple):
    """A bijection of {1..n} in one-line notation."""

    __slots__ = ()

    def __new__(cls, images: Iterable[int] = ()):
        obj = super().__new__(cls, images)
        if sorted(obj) != list(range(1, len(obj) + 1)):
            raise ValueError(f"not a permutation: {tuple(obj)}")
        return obj

    @classmethod
    def _trusted(cls, images: Iterable[int]) -> "Permutation":
        return tuple.__new__(cls, images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return _IDENTITY[n] if n < len(_IDENTITY) else cls._trusted(range(1, n + 1))

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        text = text.strip()
        if text in ("", "id", "()"):
            return cls(())
        if "," in text:
            return cls(int(x) for x in text.split(","))
        return cls(int(ch) for ch in text)

    @property
    def degree(self) -> int:
        return len(self)

    def __call__(self, i: int) -> int:
        return self[i - 1]

    def is_identity(self) -> bool:
        return all(v == k for k, v in enumerate(self, 1))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for k, v in enumerate(self, 1):
            inv[v - 1] = k
        return Permutation._trusted(inv)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __str__(self) -> str:
        if not self:
            return "id"
        if len(self) < 10:
            return "".join(map(str, self))
        return ",".join(map(str, self))

    def __repr__(self) -> str:
        return f"Permutation({str(self)})"


_IDENTITY = [Permutation._trusted(range(1, n + 1)) for n in range(16)]


def compose(s: Permutation, t: Permutation) -> Permutation:
    """(s o t)(i) = s(t(i))."""
    if len(s) != len(t):
        raise ValueError("degree mismatch")
    return Permutation._trusted(s[v - 1] for v in t)


def all_permutations(n: int) -> Iterator[Permutation]:
    for p in _permutations(range(1, n + 1)):
        yield Permutation._trusted(p)


def is_shuffle(s: Sequence[int], split: int) -> bool:
    """True when s is increasing on 1..split and on split+1..n."""
    return all(s[k] < s[k + 1] for k in range(split - 1)) and all(
        s[k] < s[k + 1] for k in range(split, len(s) - 1)
    )


class PermPair(NamedTuple):
    sigma: Permutation  # acts on outputs
    tau: Permutation  # acts on inputs

    @classmethod
    def identity(cls, n_out: int, n_in: int) -> "PermPair":
        return cls(Permutation.identity(n_out), Permutation.identity(n_in))

    def is_identity(self) -> bool:
        return self.sigma.is_identity() and self.tau.is_identity()

    def then(self, other: "PermPair") -> "PermPair":
        """The pair equal to relisting by self and afterwards by other."""
        return PermPair(compose(self.sigma, other.sigma), compose(self.tau, other.tau))

    def inverse(self) -> "PermPair":
        return PermPair(self.sigma.inverse(), self.tau.inverse())

    def __str__(self) -> str:
        return f"s={self.sigma};t={self.tau}"


class BiProfile(NamedTuple):
    out: Profile
    inp: Profile

    def __str__(self) -> str:
        return f"({','.join(map(str, self.out))}|{','.join(map(str, self.inp))})"


def compose_at(c: Sequence[Colour], i: int, d: Sequence[Colour]) -> Profile:
    if not 1 <= i <= len(c):
        raise IndexError(f"index {i} out of range for profile of length {len(c)}")
    return tuple(c[: i - 1]) + tuple(d) + tuple(c[i:])


def remove_at(c: Sequence[Colour], i: int) -> Profile:
    if not 1 <= i <= len(c):
        raise IndexError(f"index {i} out of range for profile of length {len(c)}")
    return tuple(c[: i - 1]) + tuple(c[i:])


def act_left(s: Sequence[int], c: Sequence) -> tuple:
    """(c_{s(1)}, ..., c_{s(n)})."""
    if len(s) != len(c):
        raise ValueError(f"length mismatch: permutation {len(s)}, profile {len(c)}")
    return tuple(c[v - 1] for v in s)


def act_right(c: Sequence, s: Permutation) -> tuple:
    """(c_{s^-1(1)}, ..., c_{s^-1(n)})."""
    if len(s) != len(c):
        raise ValueError(f"length mismatch: permutation {len(s)}, profile {len(c)}")
    out = [None] * len(c)
    for k, v in enumerate(s):
        out[v - 1] = c[k]
    return tuple(out)


def relist(pp: PermPair, outs: Sequence, ins: Sequence) -> tuple[tuple, tuple]:
    """Apply a permutation pair to a listing: position k takes entry sigma(k) / tau(k)."""
    return act_left(pp.sigma, outs), act_left(pp.tau, ins)


def relist_biprofile(bp: BiProfile, pp: PermPair) -> BiProfile:
    return BiProfile(*relist(pp, bp.out, bp.inp))


def solve_relisting(before: Sequence, after: Sequence) -> Permutation:
    """The permutation s with act_left(s, before) == after; entries must be distinct."""
    where = {x: k for k, x in enumerate(before, 1)}
    if len(where) != len(before) or len(after) != len(before):
        raise ValueError("listings are not comparable")
    try:
        return Permutation._trusted(where[x] for x in after)
    except KeyError as exc:
        raise ValueError(f"entry {exc} missing from listing") from None


def profile_key(c: Sequence[Colour]) -> tuple:
    return (len(c), tuple(c))


def biprofile_key(b: BiProfile) -> tuple:
    return (profile_key(b.out), profile_key(b.inp))


def _sign(a, b) -> int:
    return (a > b) - (a < b)


def cmp_profile(c: Sequence[Colour], d: Sequence[Colour]) -> int:
    """Degree-lexicographic comparison: -1, 0 or 1."""
    return _sign(profile_key(c), profile_key(d))


def cmp_biprofile(a: BiProfile, b: BiProfile) -> int:
    return _sign(biprofile_key(a), biprofile_key(b))
