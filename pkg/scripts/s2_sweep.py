"""Random two-scale sponges: uniform fibres, measure match and equal dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spongedim import fixtures
from spongedim.dimensions import box_dimension, fiber_profile, hausdorff_dimension_sponge, mme_equals_full_dim

from _config import emit, parse


@dataclass
class SweepConfig:
    n: int = 1000
    seed: int = 7
    d_max: int = 4
    m_max: int = 8


def main(cfg: SweepConfig, as_json: bool):
    rng = np.random.default_rng(cfg.seed)
    tally = {}
    for t in range(cfg.n):
        make = fixtures.random_uniform_sponge if t % 2 else fixtures.random_sponge
        X, spec = make(rng, d_max=cfg.d_max, m_max=cfg.m_max, s=2)
        gap = box_dimension(X, spec) - hausdorff_dimension_sponge(X.digits, spec)
        key = (fiber_profile(X.digits, spec).uniform_fiber, mme_equals_full_dim(X.digits, spec).equal, gap < 1e-10)
        tally[key] = tally.get(key, 0) + 1
    rows = [{"uniform_fiber": a, "mme_full_dim": b, "dims_equal": c, "count": n}
            for (a, b, c), n in sorted(tally.items())]
    emit(rows, as_json)


if __name__ == "__main__":
    main(*parse(SweepConfig, __doc__))
