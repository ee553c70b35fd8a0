"""Peeling i.i.d. marks off a uniform value, and putting them back.

A value ``u`` in ``[0, 1)`` is read as a base-α expansion: the first digit is
the index ``k`` of the ladder interval ``[l_k, l_{k+1})`` containing ``u``, and
the rest of the expansion is the renormalised remainder ``(u - l_k) / α_k``.
If ``u`` is uniform, the digits are i.i.d. with law α and the remainder is
again uniform and independent of them.

Both directions run on integers: with ``q`` the common denominator of α the
ladder is ``L_k / q`` and the weights are ``A_k / q``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import AlphabetMismatch
from .pointproc import as_rational


def check_unit(u) -> Fraction:
    """Validate a UnitValue: an exact rational in ``[0, 1)``."""
    u = as_rational(u)
    if not 0 <= u < 1:
        raise ValueError(f"unit value {u} is not in [0, 1)")
    return u


@dataclass(frozen=True)
class MarkDistribution:
    """Finite alphabet with positive rational probabilities."""

    alphabet: tuple
    probs: tuple
    _scale: int = field(init=False, repr=False, compare=False)
    _ladder: tuple = field(init=False, repr=False, compare=False)
    _weights: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        probs = tuple(as_rational(p) for p in self.probs)
        if len(alphabet) != len(probs) or not alphabet:
            raise ValueError("alphabet and probabilities must be non-empty and aligned")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet symbols must be distinct")
        if any(p <= 0 for p in probs):
            raise ValueError("every symbol needs positive probability")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        q = math.lcm(*(p.denominator for p in probs))
        weights = tuple(p.numerator * (q // p.denominator) for p in probs)
        ladder, acc = [], 0
        for a in weights:
            ladder.append(acc)
            acc += a
        setter = object.__setattr__
        setter(self, "alphabet", alphabet)
        setter(self, "probs", probs)
        setter(self, "_scale", q)
        setter(self, "_ladder", tuple(ladder))
        setter(self, "_weights", weights)
        setter(self, "_index", {s: i for i, s in enumerate(alphabet)})

    @classmethod
    def from_probs(cls, probs: Sequence) -> "MarkDistribution":
        """Alphabet ``"0", "1", ...`` with the given probabilities."""
        return cls(tuple(str(i) for i in range(len(probs))), tuple(probs))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[Hashable, object]]) -> "MarkDistribution":
        return cls(tuple(s for s, _ in pairs), tuple(p for _, p in pairs))

    @property
    def ladder(self) -> tuple[Fraction, ...]:
        """Cumulative sums ``l_0 = 0 < l_1 < ... < l_{|A|-1}``."""
        return tuple(Fraction(x, self._scale) for x in self._ladder)

    def __len__(self):
        return len(self.alphabet)

    def index_of(self, symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise AlphabetMismatch(f"mark {symbol!r} not in alphabet {self.alphabet}") from None

    # -- integer kernels --------------------------------------------------
    def extract_indices(self, num: int, den: int, k: int) -> tuple[int, int, list[int]]:
        """Peel ``k`` digits off ``num/den``; returns residual ``(num, den)`` unreduced."""
        q, L, A = self._scale, self._ladder, self._weights
        out = []
        for _ in range(k):
            idx = bisect_right(L, (q * num) // den) - 1
            num = q * num - L[idx] * den
            den = A[idx] * den
            out.append(idx)
        return num, den, out

    def inject_indices(self, num: int, den: int, idxs: Sequence[int]) -> tuple[int, int]:
        """Fold digit indices back into ``num/den``, last digit innermost."""
        q, L, A = self._scale, self._ladder, self._weights
        for idx in reversed(idxs):
            num, den = L[idx] * den + A[idx] * num, q * den
        return num, den


def digit_step(u, dist: MarkDistribution):
    """First digit of ``u`` and the renormalised remainder."""
    residual, marks = extract(u, 1, dist)
    return marks[0], residual


def extract(u, k: int, dist: MarkDistribution):
    """``k`` digits of ``u``, most significant first, and the remainder."""
    u = check_unit(u)
    if k < 0:
        raise ValueError("k must be non-negative")
    num, den, idxs = dist.extract_indices(u.numerator, u.denominator, k)
    return Fraction(num, den), [dist.alphabet[i] for i in idxs]


def inject(residual, marks: Sequence, dist: MarkDistribution) -> Fraction:
    """Inverse of :func:`extract`."""
    r = check_unit(residual)
    idxs = [dist.index_of(m) for m in marks]
    num, den = dist.inject_indices(r.numerator, r.denominator, idxs)
    return Fraction(num, den)
