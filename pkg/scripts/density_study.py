"""Growth of Var(log Theta_k) with k on the three-scale sponge and a uniform control."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from spongedim import fixtures
from spongedim.cubes import density_diagnostic
from spongedim.dimensions import hausdorff_dimension_sponge, peres_gauge
from spongedim.measures import maximal_entropy_measure

from _config import emit, parse


@dataclass
class DensityConfig:
    ks: list = field(default_factory=lambda: [25, 50, 100, 200, 400])
    n_samples: int = 20_000
    seed: int = 0
    c_tilde: float = 0.01
    nu: bool = False


def main(cfg: DensityConfig, as_json: bool):
    rows = []
    cases = {"d3": fixtures.sponge_d3(), "torus": fixtures.full_torus((4, 2))}
    for name, (X, spec) in cases.items():
        gamma = hausdorff_dimension_sponge(X.digits, spec)
        gauge = peres_gauge(gamma, cfg.c_tilde) if cfg.nu else gamma
        mu = None if cfg.nu else maximal_entropy_measure(X)
        mode = "peres-nu" if cfg.nu else "mu"
        for k in cfg.ks:
            d = density_diagnostic(X, spec, mu, gauge, k, cfg.n_samples, cfg.seed, mode=mode)
            rows.append({
                "case": name, "k": k, "mean": d.sample_mean, "var": d.sample_var,
                "var/k": d.sample_var / k,
                "theory_var": d.theoretical_var if d.theoretical_var is not None else math.nan,
                "verdict": d.verdict,
            })
    emit(rows, as_json)


if __name__ == "__main__":
    main(*parse(DensityConfig, __doc__))
