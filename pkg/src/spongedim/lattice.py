"""Diagonal expansions of the torus and the scale levels they induce.

An expansion ``diag(m_1, ..., m_d)`` with ``m_1 >= ... >= m_d >= 2`` groups its
coordinates into ``s`` blocks of equal expansion rate ``n_1 > ... > n_s``.
Level ``i`` keeps the coordinates ``d_{i-1}+1 .. d`` (1-based), so ``tau_1``
is the identity and ``tau_s`` keeps only the slowest block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Sequence

from .errors import InvalidDigit, LevelOutOfRange, NonMonotone, TooSmall

Digit = tuple[int, ...]


@dataclass(frozen=True)
class LogRatio:
    """The real number ``log(num) / log(den)`` kept as an integer pair.

    ``num == 1`` encodes the value 0 (used for the ``n_0 = inf`` convention).
    """

    num: int
    den: int

    def __post_init__(self):
        if self.den < 2 or self.num < 1:
            raise ValueError(f"bad log-ratio log({self.num})/log({self.den})")

    @property
    def value(self) -> float:
        if self.num == 1:
            return 0.0
        return math.log(self.num) / math.log(self.den)

    def __float__(self):
        return self.value

    def floor_times(self, k: int) -> int:
        """Exact ``floor(k * log(num)/log(den)) = max{t : den**t <= num**k}``."""
        if k < 0:
            raise ValueError("k must be non-negative")
        if self.num == 1 or k == 0:
            return 0
        bound = self.num**k
        t = int(k * self.value)
        while t > 0 and self.den**t > bound:
            t -= 1
        while self.den ** (t + 1) <= bound:
            t += 1
        return t

    def as_fraction(self) -> Fraction | None:
        """The exact rational value when ``num`` and ``den`` are commensurable."""
        if self.num == 1:
            return Fraction(0)
        guess = Fraction(self.value).limit_denominator(10_000)
        p, q = guess.numerator, guess.denominator
        if p > 0 and self.num**q == self.den**p:
            return guess
        return None


@dataclass(frozen=True)
class ExpansionSpec:
    """The expanding map ``diag(m)`` together with its scale data.

    ``alpha[i-1]`` and ``theta[i]`` follow 1-based level numbering:
    ``alpha = (alpha_1, ..., alpha_s)`` with ``alpha_1 = 0`` and
    ``theta = (theta_0, ..., theta_s)`` with ``theta_0 = 0``, ``theta_s = 1``.
    """

    m: tuple[int, ...]
    n: tuple[int, ...] = field(init=False)
    d_bounds: tuple[int, ...] = field(init=False)
    alpha_ratios: tuple[LogRatio, ...] = field(init=False, repr=False)
    theta_ratios: tuple[LogRatio, ...] = field(init=False, repr=False)

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if not m:
            raise ValueError("expansion needs at least one coordinate")
        for j, v in enumerate(m):
            if v < 2:
                raise TooSmall(f"m[{j}] = {v} < 2")
        for j in range(1, len(m)):
            if m[j] > m[j - 1]:
                raise NonMonotone(f"m increases at position {j}: {m[j - 1]} < {m[j]}")
        n, bounds = [], [0]
        for value, grp in groupby(m):
            n.append(value)
            bounds.append(bounds[-1] + len(list(grp)))
        alpha = [LogRatio(1, n[0])]
        alpha += [LogRatio(n[i], n[i - 1]) for i in range(1, len(n))]
        theta = [LogRatio(1, n[-1])] + [LogRatio(n[-1], ni) for ni in n]
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", tuple(n))
        object.__setattr__(self, "d_bounds", tuple(bounds))
        object.__setattr__(self, "alpha_ratios", tuple(alpha))
        object.__setattr__(self, "theta_ratios", tuple(theta))

    @property
    def d(self) -> int:
        return len(self.m)

    @property
    def s(self) -> int:
        return len(self.n)

    @property
    def alpha(self) -> tuple[float, ...]:
        return tuple(r.value for r in self.alpha_ratios)

    @property
    def theta(self) -> tuple[float, ...]:
        return tuple(r.value for r in self.theta_ratios)

    def theta_floor(self, i: int, k: int) -> int:
        """``floor(theta_i * k)`` computed exactly, for ``0 <= i <= s``."""
        if not 0 <= i <= self.s:
            raise LevelOutOfRange(f"level {i} not in 0..{self.s}")
        return self.theta_ratios[i].floor_times(k)

    def level_slices(self, k: int) -> list[tuple[int, int]]:
        """Position ranges ``(floor(theta_{i-1} k), floor(theta_i k)]`` per level."""
        floors = [self.theta_floor(i, k) for i in range(self.s + 1)]
        return [(floors[i - 1], floors[i]) for i in range(1, self.s + 1)]

    def level_weight(self, i: int) -> float:
        """``1/log n_i - 1/log n_{i-1}`` with ``1/log n_0 = 0``."""
        self._check_level(i)
        prev = 0.0 if i == 1 else 1.0 / math.log(self.n[i - 2])
        return 1.0 / math.log(self.n[i - 1]) - prev

    def validate_digit(self, x: Sequence[int]) -> Digit:
        x = tuple(int(c) for c in x)
        if len(x) != self.d:
            raise InvalidDigit(f"digit {x} has {len(x)} coordinates, expected {self.d}")
        for j, (c, mj) in enumerate(zip(x, self.m)):
            if not 0 <= c < mj:
                raise InvalidDigit(f"digit {x}: coordinate {j} = {c} outside [0, {mj})")
        return x

    def _check_level(self, i: int):
        if not 1 <= i <= self.s:
            raise LevelOutOfRange(f"level {i} not in 1..{self.s}")

    def tau_digit(self, i: int, x: Sequence[int]) -> Digit:
        """Drop the first ``d_{i-1}`` coordinates of a full digit."""
        self._check_level(i)
        return tuple(x[self.d_bounds[i - 1]:])

    def pi_digit(self, i: int, y: Sequence[int]) -> Digit:
        """Single step projection from level ``i-1`` to level ``i``."""
        self._check_level(i)
        if i == 1:
            return tuple(y)
        return tuple(y[self.d_bounds[i - 1] - self.d_bounds[i - 2]:])

    def tau_word(self, i: int, word: Sequence[Sequence[int]]) -> tuple[Digit, ...]:
        return tuple(self.tau_digit(i, x) for x in word)

    def level_alphabet_size(self, i: int) -> int:
        self._check_level(i)
        return math.prod(self.m[self.d_bounds[i - 1]:])

    def to_dict(self) -> dict:
        return {
            "m": list(self.m),
            "s": self.s,
            "n": list(self.n),
            "d_bounds": list(self.d_bounds),
            "alpha": list(self.alpha),
            "theta": list(self.theta),
        }


def build_expansion(m: Sequence[int]) -> ExpansionSpec:
    return ExpansionSpec(tuple(m))
