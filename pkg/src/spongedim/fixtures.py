"""Worked instances used by the verification suites, scripts and tests."""

from __future__ import annotations

import numpy as np

from .lattice import ExpansionSpec, build_expansion
from .symbolic import SubshiftSpec


def sponge_d3() -> tuple[SubshiftSpec, ExpansionSpec]:
    """Three-scale sponge whose maximal entropy measure has full dimension
    although its Hausdorff and box dimensions differ."""
    digits = [(0, 0, 0), (0, 1, 0), (0, 2, 0), (0, 3, 0), (0, 0, 1), (1, 0, 1)]
    return SubshiftSpec.full(digits), build_expansion((64, 16, 8))


def sponge_d4() -> tuple[SubshiftSpec, ExpansionSpec]:
    """Four-scale sponge built from two digit blocks with unequal fibres."""
    left = [(a, 0, b, 0) for a in range(4) for b in range(2)]
    right = [(0, b, 0, 1) for b in range(8)]
    return SubshiftSpec.full(left + right), build_expansion((256, 16, 4, 2))


def no_repeat_sft() -> tuple[SubshiftSpec, ExpansionSpec]:
    """Six digits on ``diag(4, 3, 2)``, any digit may follow any other but itself."""
    digits = [(0, 0, 0), (0, 1, 0), (1, 1, 0), (0, 2, 1), (1, 2, 1), (2, 2, 1)]
    A = np.ones((6, 6), dtype=np.int64) - np.eye(6, dtype=np.int64)
    return SubshiftSpec.sft(digits, A), build_expansion((4, 3, 2))


def full_torus(m) -> tuple[SubshiftSpec, ExpansionSpec]:
    spec = build_expansion(m)
    grids = np.stack(np.meshgrid(*[np.arange(v) for v in spec.m], indexing="ij"), -1).reshape(-1, spec.d)
    return SubshiftSpec.full([tuple(int(c) for c in row) for row in grids]), spec


def random_sponge(rng: np.random.Generator, d_max: int = 4, m_max: int = 8, s: int | None = None,
                  max_digits: int = 24) -> tuple[SubshiftSpec, ExpansionSpec]:
    """A random digit set on a random non-increasing expansion.

    With ``s`` given, the expansion has exactly ``s`` distinct rates.
    """
    while True:
        d = int(rng.integers(max(1, s or 1), d_max + 1))
        m = sorted((int(v) for v in rng.integers(2, m_max + 1, size=d)), reverse=True)
        spec = build_expansion(m)
        if s is None or spec.s == s:
            break
    total = int(np.prod(spec.m))
    size = int(rng.integers(1, min(total, max_digits) + 1))
    flat = rng.choice(total, size=size, replace=False)
    digits = [tuple(int(c) for c in np.unravel_index(int(f), spec.m)) for f in sorted(flat)]
    return SubshiftSpec.full(digits), spec


def random_uniform_sponge(rng: np.random.Generator, d_max: int = 4, m_max: int = 8, s: int | None = None,
                          max_digits: int = 64) -> tuple[SubshiftSpec, ExpansionSpec]:
    """A random digit set with constant fibre counts at every level.

    Built from the slowest block outward: every digit kept at level ``i + 1``
    receives the same number of extensions in the block-``i`` coordinates.
    """
    while True:
        d = int(rng.integers(max(1, s or 1), d_max + 1))
        m = sorted((int(v) for v in rng.integers(2, m_max + 1, size=d)), reverse=True)
        spec = build_expansion(m)
        if s is None or spec.s == s:
            break
    b = spec.d_bounds
    blocks = [list(np.ndindex(*spec.m[b[i]:b[i + 1]])) for i in range(spec.s)]
    digits = [()]
    for i in reversed(range(spec.s)):
        choices = blocks[i]
        r = int(rng.integers(1, len(choices) + 1))
        if len(digits) * r > max_digits:
            r = max(1, max_digits // len(digits))
        nxt = []
        for y in digits:
            pick = rng.choice(len(choices), size=r, replace=False)
            nxt += [tuple(int(c) for c in choices[int(j)]) + y for j in sorted(pick)]
        digits = nxt
    return SubshiftSpec.full(digits), spec
