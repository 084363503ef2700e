"""Approximate cubes, cube counts and cube masses, and the density diagnostic.

A ``k``-level approximate cube fixes the level-``i`` image of the digits in
positions ``floor(theta_{i-1} k) + 1 .. floor(theta_i k)``. Counting cubes is a
subset dynamic programme over the subshift graph with position-dependent
labels; cube masses are a forward recursion with the same labels.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dimensions import (
    GaugeFunction,
    level_marginals,
    nonuniform_levels,
    uniform_witness,
    weighted_log_integral,
)
from .errors import BudgetExceeded, NotInLanguage, SamplerFailure, UnsupportedMeasure, WordTooShort
from .lattice import Digit, ExpansionSpec
from .measures import HiddenFactor, ShiftMeasure, full_dim_marginal, shannon
from .symbolic import DEFAULT_BUDGET, SubshiftSpec, enumerate_language, level_labels

CHUNK = 10_000


def _word(X: SubshiftSpec | None, x) -> list[Digit]:
    out = []
    for c in x:
        if isinstance(c, (int, np.integer)):
            if X is None:
                raise ValueError("integer words need a subshift to resolve digits")
            out.append(X.digits[int(c)])
        else:
            out.append(tuple(int(v) for v in c))
    return out


def represent(spec: ExpansionSpec, x: Sequence, k: int) -> tuple[Fraction, ...]:
    """``R_k(x) = sum_{l <= k} Lambda^{-l} x_l`` with exact rational coordinates."""
    x = _word(None, x)
    if len(x) < k:
        raise WordTooShort(f"word of length {len(x)} shorter than {k}")
    out = []
    for j, mj in enumerate(spec.m):
        acc = 0
        for digit in x[:k]:
            acc = acc * mj + digit[j]
        out.append(Fraction(acc, mj**k))
    return tuple(out)


@dataclass(frozen=True)
class ApproxCube:
    level: int
    anchor: tuple[Fraction, ...]
    side: tuple[Fraction, ...]

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(a <= p < a + s for a, p, s in zip(self.anchor, point, self.side))


def approximate_cube(spec: ExpansionSpec, x: Sequence, k: int) -> ApproxCube:
    x = _word(None, x)
    if len(x) < k:
        raise WordTooShort(f"word of length {len(x)} shorter than {k}")
    anchor, side = [], []
    for i in range(1, spec.s + 1):
        t = spec.theta_floor(i, k)
        R = represent(spec, x, t)
        for j in range(spec.d_bounds[i - 1], spec.d_bounds[i]):
            anchor.append(R[j])
            side.append(Fraction(1, spec.n[i - 1] ** t))
    return ApproxCube(k, tuple(anchor), tuple(side))


def position_levels(spec: ExpansionSpec, k: int) -> np.ndarray:
    """Level (1-based) governing each position ``1..k``."""
    out = np.empty(k, dtype=np.int64)
    for i, (a, b) in enumerate(spec.level_slices(k), start=1):
        out[a:b] = i
    return out


def _label_table(X: SubshiftSpec, spec: ExpansionSpec) -> list[np.ndarray]:
    return [level_labels(X, spec, i)[1] for i in range(1, spec.s + 1)]


def count_cubes(X, spec: ExpansionSpec, k: int, method: str = "auto", budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of distinct ``k``-level approximate cubes meeting ``R(X)``.

    ``method`` is ``"dp"`` (subset recursion over the graph), ``"product"``
    (full shifts only), ``"brute"`` (distinct cubes over ``L_k``) or ``"auto"``.
    """
    if not isinstance(X, SubshiftSpec):
        X = SubshiftSpec.full(X)
    if k < 1:
        raise ValueError("k must be positive")
    if method == "auto":
        method = "product" if X.is_full else "dp"
    if method == "product":
        if not X.is_full:
            raise ValueError("the product formula holds for full shifts only")
        out = 1
        for i, (a, b) in enumerate(spec.level_slices(k), start=1):
            out *= len(level_labels(X, spec, i)[0]) ** (b - a)
        return out
    if method == "brute":
        cubes = {approximate_cube(spec, X.word_digits(w), k) for w in enumerate_language(X, k, budget)}
        return len(cubes)
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")

    labs = _label_table(X, spec)
    A = X.adjacency
    succ = [sum(1 << int(b) for b in np.flatnonzero(A[a])) for a in range(X.size)]
    groups = []
    for lab in labs:
        masks: dict[int, int] = {}
        for a, c in enumerate(lab):
            masks[int(c)] = masks.get(int(c), 0) | (1 << a)
        groups.append(list(masks.values()))
    lv = position_levels(spec, k)
    states: dict[int, int] = {}
    for mask in groups[lv[0] - 1]:
        states[mask] = states.get(mask, 0) + 1
    for j in range(1, k):
        nxt: dict[int, int] = {}
        for S, cnt in states.items():
            reach, T = 0, S
            while T:
                low = T & -T
                reach |= succ[low.bit_length() - 1]
                T ^= low
            for mask in groups[lv[j] - 1]:
                R = reach & mask
                if R:
                    nxt[R] = nxt.get(R, 0) + cnt
        states = nxt
        if len(states) > budget:
            raise BudgetExceeded(f"{len(states)} subset states exceed budget {budget}")
    return sum(states.values())


def _masks(X: SubshiftSpec, spec: ExpansionSpec, word: list[int], k: int) -> list[np.ndarray]:
    labs = _label_table(X, spec)
    lv = position_levels(spec, k)
    return [labs[lv[j] - 1] == labs[lv[j] - 1][word[j]] for j in range(k)]


def cube_measure(X, spec: ExpansionSpec, mu: ShiftMeasure, x: Sequence, k: int):
    """``R mu(Q_k(x))``; a Fraction when ``mu`` is exact."""
    if not isinstance(X, SubshiftSpec):
        X = SubshiftSpec.full(X)
    if isinstance(mu, HiddenFactor):
        raise UnsupportedMeasure("cube masses need a Bernoulli or Markov measure")
    word = list(x) if all(isinstance(c, (int, np.integer)) for c in x) else list(X.index_word(x))
    if len(word) < k:
        raise WordTooShort(f"word of length {len(word)} shorter than {k}")
    word = [int(c) for c in word[:k]]
    if not X.admits(word):
        raise NotInLanguage(f"word {X.word_digits(word)} is not admissible")
    masks = _masks(X, spec, word, k)
    exact = mu.is_exact
    if mu.transition is None:
        p = mu.marginal
        out = Fraction(1) if exact else 1.0
        for m in masks:
            out *= sum(p[a] for a in np.flatnonzero(m)) if exact else float(np.asarray(p, float)[m].sum())
        return out
    if exact:
        v = np.array([mu.marginal[a] if masks[0][a] else Fraction(0) for a in range(X.size)], dtype=object)
        for m in masks[1:]:
            v = v.dot(mu.transition)
            v = np.array([v[a] if m[a] else Fraction(0) for a in range(X.size)], dtype=object)
        return sum(v, Fraction(0))
    return math.exp(log_cube_measure(X, mu, word, k, spec))


def log_cube_measure(X: SubshiftSpec, mu: ShiftMeasure, word: Sequence[int], k: int, spec: ExpansionSpec) -> float:
    """``log R mu(Q_k(x))`` in floating point with per-step rescaling."""
    masks = _masks(X, spec, list(word), k)
    p = np.asarray(mu.marginal, dtype=float)
    if mu.transition is None:
        return math.fsum(math.log(p[m].sum()) for m in masks)
    P = np.asarray(mu.transition, dtype=float)
    v = p * masks[0]
    logs = []
    for m in masks[1:]:
        s = v.sum()
        logs.append(math.log(s))
        v = (v / s) @ P * m
    logs.append(math.log(v.sum()))
    return math.fsum(logs)


@dataclass
class BoxEstimate:
    slope: float
    ks: list[int]
    counts: list[int]
    residuals: list[float]


def empirical_box_dimension(X, spec: ExpansionSpec, k_range: Sequence[int], budget: int = DEFAULT_BUDGET) -> BoxEstimate:
    """Least-squares slope of ``log #Q_k`` against ``k log n_s``."""
    ks = list(k_range)
    if len(ks) < 2:
        raise ValueError("need at least two levels")
    counts = [count_cubes(X, spec, k, budget=budget) for k in ks]
    xs = np.array(ks, dtype=float) * math.log(spec.n[-1])
    ys = np.array([math.log(c) for c in counts])
    slope, icpt = np.polyfit(xs, ys, 1)
    return BoxEstimate(float(slope), ks, counts, (ys - (slope * xs + icpt)).tolist())


# ---------------------------------------------------------------- density diagnostic


@dataclass
class DensityDiagnostic:
    k: int
    n_samples: int
    L_k: float
    sample_mean: float
    sample_var: float
    theoretical_mean: float | None
    theoretical_var: float | None
    E_k: float | None
    verdict: str
    mode: str = "mu"
    closed_form_mean: float | None = None
    log_theta: np.ndarray | None = None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SPONGEDIM_THREADS", "1")))
    except ValueError:
        return 1


def _chunked(seed: int, n: int, work) -> np.ndarray:
    """Run ``work(rng, size)`` on fixed-size chunks with per-chunk Philox streams.

    Chunk boundaries depend only on ``n``, so results do not depend on the
    number of worker threads.
    """
    sizes = [min(CHUNK, n - a) for a in range(0, n, CHUNK)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(np.random.Generator(np.random.Philox(sq)), sz) for sq, sz in zip(seeds, sizes)]
    threads = _threads()
    if threads == 1:
        parts = [work(g, sz) for g, sz in jobs]
    else:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda job: work(*job), jobs))
    return np.concatenate(parts)


def _level_masses(p, lab: np.ndarray) -> list:
    """Level masses, summed in exact arithmetic when ``p`` holds Fractions."""
    if all(isinstance(v, Fraction) for v in p):
        out = [Fraction(0)] * (int(lab.max()) + 1)
        for a, c in enumerate(lab):
            out[c] += p[a]
        return out
    return np.bincount(lab, weights=np.asarray(p, dtype=float)).tolist()


def _level_log_tables(p, X: SubshiftSpec, spec: ExpansionSpec) -> np.ndarray:
    """``table[i-1, a] = log (tau_i p)(tau_i a)`` for every digit ``a``."""
    out = np.empty((spec.s, X.size))
    for i in range(1, spec.s + 1):
        _, lab = level_labels(X, spec, i)
        mass = np.array([float(v) for v in _level_masses(p, lab)])
        with np.errstate(divide="ignore"):
            out[i - 1] = np.log(mass[lab])
    return out


def _level_moments(p, X: SubshiftSpec, spec: ExpansionSpec) -> tuple[np.ndarray, np.ndarray]:
    mean, var = np.empty(spec.s), np.empty(spec.s)
    for i in range(1, spec.s + 1):
        _, lab = level_labels(X, spec, i)
        mass = np.array([float(v) for v in _level_masses(p, lab)])
        mass = mass[mass > 0]
        lm = np.log(mass)
        mean[i - 1] = float((mass * lm).sum())
        # shift by one value so equal logs give exactly zero variance
        dev = lm - lm[0]
        var[i - 1] = max(0.0, float((mass * dev**2).sum()) - float((mass * dev).sum()) ** 2)
    return mean, var


def _sample_bernoulli(p: np.ndarray, tables: np.ndarray, lv: np.ndarray, rng, size: int) -> np.ndarray:
    k = len(lv)
    x = rng.choice(len(p), size=(size, k), p=p)
    return tables[lv - 1, x].sum(axis=1)


def _sample_markov(pi, P, labs, lv, rng, size):
    n, k = len(pi), len(lv)
    cum = np.cumsum(P, axis=1)
    cum[:, -1] = 1.0
    x = np.searchsorted(np.cumsum(pi), rng.random(size), side="right").clip(max=n - 1)
    lab = labs[lv[0] - 1]
    v = pi * (lab[None, :] == lab[x][:, None])
    acc = np.zeros(size)
    for j in range(1, k):
        s = v.sum(axis=1)
        acc += np.log(s)
        v = (v / s[:, None]) @ P
        u = rng.random(size)
        x = (u[:, None] >= cum[x]).sum(axis=1).clip(max=n - 1)
        lab = labs[lv[j] - 1]
        v *= lab[None, :] == lab[x][:, None]
    return acc + np.log(v.sum(axis=1))


def _sample_nu(xi: np.ndarray, tables: np.ndarray, lv: np.ndarray, rng, size: int) -> np.ndarray:
    k = len(lv)
    out = np.zeros(size)
    cum = np.cumsum(xi, axis=1)
    cum[:, -1] = 1.0
    u = rng.random((size, k))
    for j in range(k):
        x = np.searchsorted(cum[j], u[:, j], side="right")
        out += tables[j, lv[j] - 1, x]
    return out


def density_diagnostic(
    X, spec: ExpansionSpec, mu: ShiftMeasure | None, gauge: GaugeFunction | float, k: int,
    n_samples: int, rng_seed: int = 0, mode: str = "mu", delta: float = 0.5, q=None,
    keep_samples: bool = False,
) -> DensityDiagnostic:
    """Sampled statistics of ``log Theta_k = log R mu(Q_k(x)) - log phi(n_s^{-k})``.

    ``gauge`` is a :class:`GaugeFunction` or a power exponent ``gamma``. In
    ``"peres-nu"`` mode the samples are drawn from the non-homogeneous product
    of ``(1 - delta/log j) p + (delta/log j) q`` with ``p`` the marginal of the
    measure of full dimension, and ``mu`` is ignored.
    """
    if not isinstance(X, SubshiftSpec):
        X = SubshiftSpec.full(X)
    if n_samples < 1 or k < 1:
        raise ValueError("need k >= 1 and n_samples >= 1")
    u = k * math.log(spec.n[-1])
    if isinstance(gauge, GaugeFunction):
        log_phi = gauge.log_value_at(u)
    else:
        log_phi = -float(gauge) * u
    L_k = k * math.log(X.size) + log_phi
    lv = position_levels(spec, k)

    closed = None
    if mode == "peres-nu":
        if not X.is_full:
            raise UnsupportedMeasure("the perturbed product measure is defined on full shifts")
        data = full_dim_marginal(X.digits, spec)
        p = data.marginal
        if q is None:
            levels = nonuniform_levels(X.digits, spec)
            q = uniform_witness(X.digits, spec, levels[0] if levels else 1)
        q = np.asarray(q, dtype=float)
        j = np.arange(1, k + 1, dtype=float)
        eps = np.zeros(k)
        eps[1:] = delta / np.log(j[1:])
        if (eps > 1).any():
            raise SamplerFailure(f"delta = {delta} makes a mixing weight exceed 1")
        xi = (1 - eps)[:, None] * p[None, :] + eps[:, None] * q[None, :]
        tables = np.stack([_level_log_tables(row, X, spec) for row in xi])
        mean_lr = 0.0
        for jj in range(k):
            lvl = lv[jj]
            _, lab = level_labels(X, spec, lvl)
            mean_lr -= shannon(np.bincount(lab, weights=xi[jj]))
        deltas = []
        for i in range(1, spec.s + 1):
            pi = level_marginals(p, data.digits, spec, i)
            qi = level_marginals(q, data.digits, spec, i)
            keys = list(pi)
            pv = np.array([pi[y] for y in keys])
            deltas.append(float(((pv - np.array([qi[y] for y in keys])) * np.log(pv)).sum()))
        # expected log mass up to O(1), shifted to the scale of log Theta
        closed = -k * math.log(data.Z) - delta * (weighted_log_integral(deltas, spec, k).value if k >= 3 else 0.0)
        closed -= log_phi
        samples = _chunked(rng_seed, n_samples, lambda g, sz: _sample_nu(xi, tables, lv, g, sz))
        th_mean, th_var = mean_lr - log_phi, None
        E_k = mean_lr + k * math.log(X.size)
    elif mode == "mu":
        if mu is None or isinstance(mu, HiddenFactor):
            raise UnsupportedMeasure("sampling needs a Bernoulli or Markov measure")
        p = np.asarray(mu.marginal, dtype=float)
        if mu.transition is None:
            tables = _level_log_tables(mu.marginal, mu.base, spec)
            m, v = _level_moments(mu.marginal, mu.base, spec)
            counts = np.bincount(lv, minlength=spec.s + 1)[1:]
            mean_lr = float((counts * m).sum())
            th_var = float((counts * v).sum())
            th_mean = mean_lr - log_phi
            E_k = mean_lr + k * math.log(X.size)
            samples = _chunked(rng_seed, n_samples, lambda g, sz: _sample_bernoulli(p, tables, lv, g, sz))
        else:
            labs = np.stack(_label_table(mu.base, spec))
            P = np.asarray(mu.transition, dtype=float)
            th_mean = th_var = E_k = None
            samples = _chunked(rng_seed, n_samples, lambda g, sz: _sample_markov(p, P, labs, lv, g, sz))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    if not np.isfinite(samples).all():
        raise SamplerFailure("a sampled cube has zero mass")
    log_theta = samples - log_phi
    # shifted data: identical samples give a variance of exactly zero
    var = float((log_theta - log_theta[0]).var(ddof=1)) if n_samples > 1 else 0.0
    ref = th_var if th_var is not None else var
    verdict = "LinearVarianceGrowth" if ref > 1e-9 * max(1, k) else "ConcentratedBounded"
    return DensityDiagnostic(
        k=k, n_samples=n_samples, L_k=L_k,
        sample_mean=float(log_theta.mean()), sample_var=var,
        theoretical_mean=th_mean, theoretical_var=th_var, E_k=E_k,
        verdict=verdict, mode=mode, closed_form_mean=closed,
        log_theta=log_theta if keep_samples else None,
    )


def dump_samples(path, diag: DensityDiagnostic) -> None:
    """One record per sample: ``seed_index, k, log_density``."""
    if diag.log_theta is None:
        raise ValueError("diagnostic was run without keep_samples")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed_index", "k", "log_density"])
        for idx, val in enumerate(diag.log_theta):
            w.writerow([idx, diag.k, repr(float(val))])
