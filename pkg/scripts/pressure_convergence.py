"""Convergence of the weighted pressure on an SFT: raw averages against increments."""

from __future__ import annotations

import math
from dataclasses import dataclass

from spongedim import fixtures
from spongedim.dimensions import box_dimension, weighted_pressure

from _config import emit, parse


@dataclass
class PressureConfig:
    k_max: int = 12


def main(cfg: PressureConfig, as_json: bool):
    X, spec = fixtures.no_repeat_sft()
    res = weighted_pressure(X, spec, cfg.k_max)
    ln = math.log(spec.n[-1])
    rows = [{"k": k, "logZ/k": e, "increment": inc, "dim_from_avg": e / ln, "dim_from_inc": inc / ln}
            for k, e, inc in zip(res.ks, res.estimates, res.increments)]
    emit(rows, as_json)
    if not as_json:
        lo, hi = res.dim_estimate
        print(f"\ndim_H bracket [{lo:.10f}, {hi:.10f}]  dim_B {box_dimension(X, spec):.10f}")


if __name__ == "__main__":
    main(*parse(PressureConfig, __doc__))
