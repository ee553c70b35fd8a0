"""Exact point configurations on finite windows of the real line.

Positions are rationals. A configuration stores them as integer numerators
over one shared denominator, which keeps comparisons and shifts cheap even
when the sampler runs at thousands of bits of precision. The public surface
speaks :class:`fractions.Fraction`.
"""

from __future__ import annotations

import hashlib
import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Iterator, Optional, Sequence

from scipy.special import pdtr, pdtrik

from .errors import DegenerateWindow, NotContained

Rational = Fraction | int | str


def as_rational(x: Any) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        # exact binary value; callers wanting decimals should pass strings
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def derive_seed(seed: int, *keys: Any) -> int:
    """A 64-bit seed for an independent substream keyed by ``keys``."""
    text = "|".join([str(seed), *map(str, keys)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass(frozen=True)
class Window:
    """Half-open interval ``[lo, hi)``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo >= self.hi:
            raise DegenerateWindow(f"window [{self.lo}, {self.hi}) is empty")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= as_rational(x) < self.hi

    def contains_window(self, other: "Window") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def shifted(self, t: Rational) -> "Window":
        t = as_rational(t)
        return Window(self.lo + t, self.hi + t)

    def __str__(self):
        return f"[{self.lo}, {self.hi})"


def _canonical(nums: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    g = den
    for n in nums:
        g = math.gcd(g, n)
        if g == 1:
            break
    if g == 1:
        return tuple(nums), den
    return tuple(n // g for n in nums), den // g


class PointConfiguration:
    """Finitely many distinct points of a window, in increasing order.

    ``PointConfiguration(window, points)`` accepts any rationals. Internally
    ``nums[i] / den`` is the i-th position over a shared denominator that
    need not be reduced; equality and hashing use the reduced form, so two
    configurations are equal exactly when their windows and points agree.
    """

    __slots__ = ("window", "nums", "den", "__dict__")

    def __init__(self, window: Window, points: Iterable[Rational] = ()):
        pts = sorted(as_rational(p) for p in points)
        den = math.lcm(*{p.denominator for p in pts}) if pts else 1
        nums = [p.numerator * (den // p.denominator) for p in pts]
        self._set(window, nums, den, check=True)

    @classmethod
    def from_scaled(cls, window: Window, nums: Sequence[int], den: int, *,
                    check: bool = True) -> "PointConfiguration":
        """Build from numerators over a common (not necessarily reduced) denominator."""
        self = cls.__new__(cls)
        self._set(window, nums, den, check=check)
        return self

    def _set(self, window, nums, den, check):
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.window = window
        self.nums = tuple(nums)
        self.den = den
        if check:
            self._validate()

    @cached_property
    def canonical(self) -> tuple[tuple[int, ...], int]:
        """``(nums, den)`` with the common factor removed."""
        return _canonical(self.nums, self.den)

    def _validate(self):
        nums = self.nums
        for a, b in zip(nums, nums[1:]):
            if a >= b:
                raise ValueError("points must be distinct and strictly increasing")
        if nums:
            w = self.window
            if nums[0] * w.lo.denominator < w.lo.numerator * self.den:
                raise NotContained(f"point {self.position(0)} left of {w}")
            if nums[-1] * w.hi.denominator >= w.hi.numerator * self.den:
                raise NotContained(f"point {self.position(-1)} not left of {w.hi}")

    # -- views -------------------------------------------------------------
    def position(self, i: int) -> Fraction:
        return Fraction(self.nums[i], self.den)

    @cached_property
    def points(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.nums)

    def as_floats(self) -> list[float]:
        den = self.den
        return [n / den for n in self.nums]

    def scaled_to(self, scale: int) -> list[int]:
        """Numerators over ``scale``, which must be a multiple of ``den``."""
        f, r = divmod(scale, self.den)
        if r:
            raise ValueError("scale is not a multiple of the denominator")
        if f == 1:
            return list(self.nums)
        return [n * f for n in self.nums]

    def threshold(self, x: Rational) -> int:
        """Smallest numerator ``n`` with ``n / den >= x``."""
        return ceil_fraction(as_rational(x) * self.den)

    def index_range(self, lo: Rational, hi: Rational, *,
                    lo_closed: bool = True, hi_closed: bool = False) -> tuple[int, int]:
        """Index slice ``(i, j)`` of the points between ``lo`` and ``hi``."""
        lo, hi = as_rational(lo) * self.den, as_rational(hi) * self.den
        if lo.denominator == 1:
            i = (bisect_left if lo_closed else bisect_right)(self.nums, lo.numerator)
        else:
            i = bisect_left(self.nums, ceil_fraction(lo))
        if hi.denominator == 1:
            j = (bisect_right if hi_closed else bisect_left)(self.nums, hi.numerator)
        else:
            j = bisect_left(self.nums, ceil_fraction(hi))
        return i, max(i, j)

    def count_between(self, lo, hi, **kw) -> int:
        i, j = self.index_range(lo, hi, **kw)
        return j - i

    def __len__(self):
        return len(self.nums)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.points)

    def __eq__(self, other):
        if not isinstance(other, PointConfiguration):
            return NotImplemented
        return self.window == other.window and self.canonical == other.canonical

    def __hash__(self):
        return hash((self.window, self.canonical))

    def __repr__(self):
        shown = ", ".join(str(p) for p in self.points[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"PointConfiguration({self.window}, [{shown}{more}], n={len(self)})"


@dataclass(frozen=True)
class MarkedConfiguration:
    """A configuration with one mark per point; ``None`` marks are unmarked points."""

    base: PointConfiguration
    marks: tuple

    def __post_init__(self):
        object.__setattr__(self, "marks", tuple(self.marks))
        if len(self.marks) != len(self.base):
            raise ValueError(f"{len(self.marks)} marks for {len(self.base)} points")

    @property
    def origin_index(self) -> Optional[int]:
        """Index of the largest non-positive point, or None if no such point."""
        i = bisect_right(self.base.nums, 0) - 1
        return i if i >= 0 else None

    @property
    def window(self) -> Window:
        return self.base.window

    def __len__(self):
        return len(self.marks)

    def items(self) -> list[tuple[Fraction, Any]]:
        return list(zip(self.base.points, self.marks))

    def between(self, lo: Rational, hi: Rational) -> list[tuple[Fraction, Any]]:
        """Marked points in the open interval ``(lo, hi)``."""
        i, j = self.base.index_range(lo, hi, lo_closed=False, hi_closed=False)
        return [(self.base.position(k), self.marks[k]) for k in range(i, j)]


# -- operations -------------------------------------------------------------

def translate(config: PointConfiguration, t: Rational) -> PointConfiguration:
    """Shift every point and both window ends by ``t``."""
    t = as_rational(t)
    den = math.lcm(config.den, t.denominator)
    f = den // config.den
    shift = t.numerator * (den // t.denominator)
    nums = [n * f + shift for n in config.nums]
    return PointConfiguration.from_scaled(config.window.shifted(t), nums, den, check=False)


def translate_marked(mc: MarkedConfiguration, t: Rational) -> MarkedConfiguration:
    """Shift a marked configuration; marks ride along with their points."""
    return MarkedConfiguration(translate(mc.base, t), mc.marks)


def restrict(config: PointConfiguration, interval: Window) -> PointConfiguration:
    """Keep the points in ``interval``, which becomes the new window."""
    if not config.window.contains_window(interval):
        raise NotContained(f"{interval} is not inside {config.window}")
    i, j = config.index_range(interval.lo, interval.hi)
    return PointConfiguration.from_scaled(interval, config.nums[i:j], config.den, check=False)


def _poisson_count(u: float, mean: float) -> int:
    """Smallest n with P(N <= n) >= u for N ~ Poisson(mean)."""
    if u <= 0.0:
        return 0
    n = max(0, int(pdtrik(u, mean)))
    while pdtr(n, mean) < u:
        n += 1
    while n > 0 and pdtr(n - 1, mean) >= u:
        n -= 1
    return n


def sample_poisson(rate: Rational, window: Window, seed: int,
                   precision: int = 64) -> PointConfiguration:
    """Homogeneous Poisson sample on ``window``.

    The count is drawn by inverting the Poisson CDF at a 53-bit dyadic
    uniform; positions are ``lo + length * k / 2**precision`` with ``k``
    uniform on ``precision`` bits, sorted. Output depends only on
    ``(rate, window, seed, precision)``.
    """
    rate = as_rational(rate)
    if rate <= 0:
        raise ValueError("rate must be positive")
    if precision < 32:
        raise ValueError("precision must be at least 32 bits")
    rng = random.Random(seed)
    count = _poisson_count(rng.getrandbits(53) * 2.0 ** -53, float(rate * window.length))
    while True:
        ks = sorted(rng.getrandbits(precision) for _ in range(count))
        if all(a < b for a, b in zip(ks, ks[1:])):
            break
    lo, width = window.lo, window.length
    a, b = lo.numerator, lo.denominator
    c, d = width.numerator, width.denominator
    base = a * d << precision
    step = b * c
    nums = [base + step * k for k in ks]
    return PointConfiguration.from_scaled(window, nums, (b * d) << precision, check=False)


def superpose(configs: Sequence[PointConfiguration], window: Window) -> PointConfiguration:
    """Union of configurations on disjoint windows that tile ``window``."""
    den = math.lcm(*(c.den for c in configs)) if configs else 1
    nums = sorted(n for c in configs for n in c.scaled_to(den))
    return PointConfiguration.from_scaled(window, nums, den)


def extend(config: PointConfiguration, window: Window, rate: Rational, seed: int,
           precision: int = 64) -> PointConfiguration:
    """Grow ``config`` to a larger ``window`` with fresh independent Poisson pieces.

    Each added piece is sampled from a substream keyed by ``seed`` and the
    piece's own endpoints, so repeated extension is reproducible and the
    result is a Poisson sample on the larger window whenever ``config`` is one.
    """
    if not window.contains_window(config.window):
        raise NotContained(f"{window} does not contain {config.window}")
    parts = [config]
    if window.lo < config.window.lo:
        w = Window(window.lo, config.window.lo)
        parts.append(sample_poisson(rate, w, derive_seed(seed, "extend", w.lo, w.hi), precision))
    if config.window.hi < window.hi:
        w = Window(config.window.hi, window.hi)
        parts.append(sample_poisson(rate, w, derive_seed(seed, "extend", w.lo, w.hi), precision))
    return superpose(parts, window)


def sample_blocks(rate: Rational, first: int, last: int, block: int, seed: int,
                  precision: int = 64, cache: Optional[dict] = None) -> PointConfiguration:
    """Poisson sample on ``[first * block, last * block)`` built from independent blocks.

    Block ``k`` covers ``[k * block, (k + 1) * block)`` and is drawn from a
    substream keyed by ``k``, so widening the range only adds blocks and never
    changes the ones already drawn. ``cache`` may hold blocks across calls.
    """
    if first >= last:
        raise DegenerateWindow(f"empty block range {first}..{last}")
    parts = []
    for k in range(first, last):
        piece = cache.get(k) if cache is not None else None
        if piece is None:
            w = Window(k * block, (k + 1) * block)
            piece = sample_poisson(rate, w, derive_seed(seed, "block", block, k), precision)
            if cache is not None:
                cache[k] = piece
        parts.append(piece)
    return superpose(parts, Window(first * block, last * block))


def refine_points(config: PointConfiguration, extra_bits: dict[int, int], spacing: Rational,
                  seed: int) -> PointConfiguration:
    """Append independent uniform low-order bits to selected points.

    Point ``i`` moves to ``x + spacing * l / 2**extra_bits[i]`` with ``l``
    uniform. When the points sit on a grid of the given spacing (as sampler
    output does) each point stays inside its grid cell, and a uniform grid
    point plus uniform low bits is uniform on the finer grid.
    """
    spacing = as_rational(spacing)
    moved = {}
    for i, bits in extra_bits.items():
        x = config.position(i)
        low = random.Random(derive_seed(seed, "refine", x)).getrandbits(bits)
        moved[i] = x + spacing * Fraction(low, 1 << bits)
    den = math.lcm(config.den, *(p.denominator for p in moved.values()))
    f = den // config.den
    nums = [n * f for n in config.nums] if f != 1 else list(config.nums)
    for i, p in moved.items():
        nums[i] = p.numerator * (den // p.denominator)
    return PointConfiguration.from_scaled(config.window, nums, den)
