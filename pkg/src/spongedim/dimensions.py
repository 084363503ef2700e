"""Dimension formulas, coincidence verdicts and the Hausdorff-measure classifier.

Sponges (full shifts on a digit set) are decided exactly from integer fibre
counts and the nested ``Z`` sums. Subshifts of finite type go through the
weighted pressure, whose Hausdorff estimate is a bracket, and through a
finite-depth comparison of projected measures.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import (
    DomainTooLarge,
    InternalInconsistency,
    QuadratureFailure,
    SupportViolation,
)
from .lattice import Digit, ExpansionSpec
from .measures import (
    DEFAULT_BRACKET_DEPTH,
    HiddenFactor,
    Interval,
    ShiftMeasure,
    full_dim_marginal,
    ly_dimension,
    maximal_entropy_measure,
    pushforward,
)
from .symbolic import (
    DEFAULT_BUDGET,
    SubshiftSpec,
    count_words,
    factor_automaton,
    fiber_table,
    level_labels,
    require_weak_spec,
    topological_entropy,
)

log = logging.getLogger(__name__)

LOG_TOL = 1e-10
CYLINDER_TOL = 1e-9
QUAD_EPSREL = 1e-10
PERES_GRID = tuple(np.logspace(3, 6, 13))


class VerdictA(str, enum.Enum):
    COINCIDE = "Coincide"
    DIFFER = "Differ"
    UNDETERMINED = "Undetermined"


class VerdictC(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNDETERMINED = "Undetermined"


class HausClass(str, enum.Enum):
    POSITIVE_FINITE = "PositiveFinite"
    INFINITE = "Infinite"
    ZERO_OR_INFINITE = "ZeroOrInfinite"
    UNDETERMINED = "Undetermined"


def _lower(x) -> float:
    return x.lower if isinstance(x, Interval) else float(x)


@dataclass
class DimensionReport:
    dim_box: float
    dim_haus: float | Interval
    ly_of_mme: float | Interval
    fiber_profile: list[list[int]] | None
    verdict_A: VerdictA
    verdict_C: VerdictC
    haus_measure_class: HausClass
    witnesses: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if _lower(self.dim_haus) > self.dim_box + 1e-9:
            raise InternalInconsistency(f"dim_H {self.dim_haus} exceeds dim_B {self.dim_box}")


# ---------------------------------------------------------------- dimensions


def _as_subshift(X) -> SubshiftSpec:
    return X if isinstance(X, SubshiftSpec) else SubshiftSpec.full(X)


def factor_entropies(X: SubshiftSpec, spec: ExpansionSpec) -> list[float]:
    """Topological entropies ``h(X_i)`` of every level factor."""
    out = []
    for i in range(1, spec.s + 1):
        if X.is_full:
            labels, _ = level_labels(X, spec, i)
            out.append(math.log(len(labels)))
        else:
            obj = X if i == 1 else factor_automaton(X, spec, i)
            out.append(topological_entropy(obj).h)
    return out


def box_dimension(X, spec: ExpansionSpec) -> float:
    X = _as_subshift(X)
    require_weak_spec(X)
    hs = factor_entropies(X, spec)
    return float(sum(spec.level_weight(i) * h for i, h in enumerate(hs, start=1)))


def hausdorff_dimension_sponge(D, spec: ExpansionSpec) -> float:
    return math.log(full_dim_marginal(D, spec).Z) / math.log(spec.n[-1])


@dataclass
class PressureResult:
    estimates: list[float]
    upper: float
    dim_estimate: Interval
    ks: list[int]
    increments: list[float] = field(default_factory=list)


def _group_logsumexp(keys: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.ravel()
    top = np.full(len(uniq), -np.inf)
    np.maximum.at(top, inv, values)
    acc = np.zeros(len(uniq))
    np.add.at(acc, inv, np.exp(values - top[inv]))
    return uniq, top + np.log(acc)


def log_partition(X: SubshiftSpec, spec: ExpansionSpec, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """``log Z(k)`` from the nested fibre recursion over ``L_k``."""
    if spec.s == 1:
        return math.log(count_words(X, k))
    alpha = spec.alpha
    labels2, lab2 = level_labels(X, spec, 2)
    words, counts = fiber_table(X, lab2, len(labels2), k, budget)
    logphi = np.log(np.asarray(counts, dtype=float))
    for i in range(3, spec.s + 1):
        labels_i, lab_i = level_labels(X, spec, i)
        # level-2 label -> level-i label, read off any representative digit
        to_i = np.empty(len(labels2), dtype=np.int64)
        to_i[lab2] = lab_i
        words, logphi = _group_logsumexp(to_i[words], alpha[i - 2] * logphi)
    return float(logsumexp(alpha[-1] * logphi))


def weighted_pressure(X, spec: ExpansionSpec, k_max: int, budget: int = DEFAULT_BUDGET) -> PressureResult:
    """Estimates ``log Z(k)/k`` for ``k = 1..k_max`` with a heuristic dimension bracket.

    ``upper`` is the running infimum of the estimates. The bracket is centred
    on the last increment ``log Z(k) - log Z(k-1)``, which cancels the bounded
    prefactor in ``Z(k)`` and so converges far faster than ``log Z(k)/k``; its
    half-width is the Cauchy gap of the last two increments. It is not a
    certified bound.
    """
    X = _as_subshift(X)
    require_weak_spec(X)
    if k_max < 1:
        raise ValueError("k_max must be positive")
    ks = list(range(1, k_max + 1))
    logz = [0.0] + [log_partition(X, spec, k, budget) for k in ks]
    est = [logz[k] / k for k in ks]
    inc = [logz[k] - logz[k - 1] for k in ks]
    upper = min(est)
    gap = abs(inc[-1] - inc[-2]) if len(inc) > 1 else 0.0
    ln = math.log(spec.n[-1])
    hi = min(inc[-1] + gap, upper)
    lo = min(inc[-1] - gap, hi)
    return PressureResult(est, upper, Interval(lo / ln, hi / ln), ks, inc)


# ---------------------------------------------------------------- sponges


@dataclass
class FiberProfile:
    digits: tuple[Digit, ...]
    levels: list[list[int]]
    uniform_fiber: bool

    def level(self, i: int) -> list[int]:
        return self.levels[i - 1]


def fiber_profile(D, spec: ExpansionSpec) -> FiberProfile:
    """``f_i(x) = #{y in D_{i-1} : pi_i(y) = tau_i(x)}`` for every level and digit."""
    data = full_dim_marginal(D, spec)
    levels = [[1] * len(data.digits)]
    for i in range(2, spec.s + 1):
        sizes: dict[Digit, int] = {}
        for y in data.level_digits[i - 2]:
            z = spec.pi_digit(i, y)
            sizes[z] = sizes.get(z, 0) + 1
        levels.append([sizes[spec.tau_digit(i, x)] for x in data.digits])
    uniform = all(len(set(f)) == 1 for f in levels)
    return FiberProfile(data.digits, levels, uniform)


@dataclass
class MatchEvidence:
    equal: bool
    log_products: list[float]
    partial_log_products: list[list[float]]
    product_form: list[float] | None = None


def _spread(v) -> float:
    v = np.asarray(v, dtype=float)
    return float(v.max() - v.min())


def mme_equals_full_dim(D, spec: ExpansionSpec) -> MatchEvidence:
    """Whether the uniform Bernoulli measure is the measure of full dimension."""
    data = full_dim_marginal(D, spec)
    partial = np.log(data.partial_products(spec))
    logs = partial[:, -1]
    equal = _spread(logs) <= LOG_TOL
    ev = MatchEvidence(equal, logs.tolist(), partial.tolist())
    if spec.s <= 3:
        prof = fiber_profile(D, spec)
        th = spec.theta
        form = np.zeros(len(data.digits))
        for i in (2, 3):
            if i <= spec.s:
                form += (th[i - 1] - 1) * np.log(prof.level(i))
        ev.product_form = form.tolist()
        if (_spread(form) <= LOG_TOL) != equal:
            raise InternalInconsistency("Z-product and fibre product tests disagree")
    return ev


def level_marginals(p: np.ndarray, digits: Sequence[Digit], spec: ExpansionSpec, i: int) -> dict[Digit, Any]:
    out: dict[Digit, Any] = {}
    for x, px in zip(digits, p):
        y = spec.tau_digit(i, x)
        out[y] = out.get(y, 0) + px
    return out


def delta_divergence(p, q, support=None) -> float:
    """``sum (p - q) log p`` with ``0 log 0 = 0``; ``q`` must vanish where ``p`` does."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if support is not None:
        idx = np.asarray(list(support))
        p, q = p[idx], q[idx]
    if p.shape != q.shape:
        raise ValueError("p and q live on different index sets")
    zero = p <= 0
    if (q[zero] > 0).any():
        raise SupportViolation("q charges a point where p vanishes")
    live = ~zero
    lp = np.log(p[live])
    if _spread(lp) <= LOG_TOL and abs(p[live].sum() - q[live].sum()) <= 1e-12:
        # constant log p: the sum is log p times sum(p - q) = 0
        return 0.0
    return float(((p[live] - q[live]) * lp).sum())


def _level_deltas(D, spec: ExpansionSpec, q) -> list[float]:
    data = full_dim_marginal(D, spec)
    q = np.asarray(q, dtype=float)
    if q.shape != data.marginal.shape:
        raise ValueError("q has the wrong length")
    if (q < 0).any() or abs(q.sum() - 1) > 1e-12:
        raise ValueError("q is not a probability vector")
    out = []
    for i in range(1, spec.s + 1):
        pi = level_marginals(data.marginal, data.digits, spec, i)
        qi = level_marginals(q, data.digits, spec, i)
        keys = list(pi)
        out.append(delta_divergence([pi[y] for y in keys], [qi[y] for y in keys]))
    return out


def sum_delta_residual(D, spec: ExpansionSpec, q) -> float:
    """``sum_i (theta_i - theta_{i-1}) Delta(tau_i p || tau_i q)``, which should vanish."""
    th = spec.theta
    deltas = _level_deltas(D, spec, q)
    return float(sum((th[i] - th[i - 1]) * deltas[i - 1] for i in range(1, spec.s + 1)))


def _is_uniform(v) -> bool:
    v = np.log(np.asarray(list(v), dtype=float))
    return _spread(v) <= LOG_TOL


def nonuniform_levels(D, spec: ExpansionSpec) -> list[int]:
    data = full_dim_marginal(D, spec)
    return [
        i for i in range(1, spec.s + 1)
        if not _is_uniform(level_marginals(data.marginal, data.digits, spec, i).values())
    ]


def uniform_witness(D, spec: ExpansionSpec, i: int) -> np.ndarray:
    """A vector ``q`` on ``D`` whose image at level ``i`` is uniform."""
    data = full_dim_marginal(D, spec)
    sizes: dict[Digit, int] = {}
    for x in data.digits:
        y = spec.tau_digit(i, x)
        sizes[y] = sizes.get(y, 0) + 1
    return np.array([1.0 / (len(sizes) * sizes[spec.tau_digit(i, x)]) for x in data.digits])


@dataclass
class ClassifierResult:
    haus_class: HausClass
    nonuniform: list[int]
    witness_q: list[float] | None = None
    deltas: list[float] | None = None
    peres_constant: float | None = None


def infinite_hausdorff_classifier(D, spec: ExpansionSpec, grid: Sequence[float] = PERES_GRID) -> ClassifierResult:
    levels = nonuniform_levels(D, spec)
    N = len(levels)
    if N == 1:
        raise InternalInconsistency(f"exactly one non-uniform level ({levels[0]})")
    if N == 0 or N > 2:
        # without uniform fibres the dimensions differ, and then no gauge
        # gives a positive finite measure on a sponge
        uniform = fiber_profile(D, spec).uniform_fiber
        if N == 0 and uniform:
            return ClassifierResult(HausClass.POSITIVE_FINITE, levels)
        cls = HausClass.UNDETERMINED if uniform else HausClass.ZERO_OR_INFINITE
        return ClassifierResult(cls, levels)
    q = uniform_witness(D, spec, levels[0])
    deltas = _level_deltas(D, spec, q)
    c = peres_constant(deltas, spec, grid)
    cls = HausClass.INFINITE if c > 0 else HausClass.UNDETERMINED
    return ClassifierResult(cls, levels, q.tolist(), deltas, c)


# ---------------------------------------------------------------- Peres condition


def log_integral(a: float, b: float) -> float:
    """``int_a^b dt / log t`` by adaptive quadrature, ``1 < a <= b``."""
    if a <= 1:
        raise ValueError("lower endpoint must exceed 1")
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(lambda t: 1.0 / math.log(t), a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=500)
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(f"quadrature on [{a}, {b}]: {exc}") from exc
    if err > 10 * QUAD_EPSREL * abs(val):
        raise QuadratureFailure(f"quadrature error {err:.3g} too large on [{a}, {b}]")
    return val


@dataclass
class PeresTerms:
    value: float
    terms: list[float]
    clamped: list[int]


def weighted_log_integral(deltas: Sequence[float], spec: ExpansionSpec, k: float) -> PeresTerms:
    """``sum_i Delta_i int_{theta_{i-1} k}^{theta_i k} dt/log t``.

    Lower endpoints below 2 are raised to 2; levels where that happens with a
    nonzero coefficient are listed in ``clamped``.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    th = spec.theta
    terms, clamped = [], []
    for i in range(1, spec.s + 1):
        d = deltas[i - 1]
        if d == 0:
            terms.append(0.0)
            continue
        a, b = th[i - 1] * k, th[i] * k
        if a < 2:
            a = 2.0
            clamped.append(i)
        terms.append(d * log_integral(a, b) if b > a else 0.0)
    if clamped:
        log.info("lower endpoint clamped to 2 at levels %s", clamped)
    return PeresTerms(float(sum(terms)), terms, clamped)


def peres_condition_lhs(p, q, spec: ExpansionSpec, k: float, digits: Sequence[Digit] | None = None) -> float:
    """Left side of the Peres condition for vectors ``p, q`` on ``digits``.

    ``p`` and ``q`` may also be mappings from digits to probabilities.
    """
    if isinstance(p, Mapping):
        digits = list(p)
        p = [p[x] for x in digits]
        q = [q.get(x, 0.0) for x in digits] if isinstance(q, Mapping) else q
    if digits is None:
        raise ValueError("digits are needed to project p and q")
    digits = [tuple(x) for x in digits]
    deltas = []
    for i in range(1, spec.s + 1):
        pi = level_marginals(np.asarray(p, dtype=float), digits, spec, i)
        qi = level_marginals(np.asarray(q, dtype=float), digits, spec, i)
        keys = list(pi)
        deltas.append(delta_divergence([pi[y] for y in keys], [qi[y] for y in keys]))
    return weighted_log_integral(deltas, spec, k).value


def peres_constant(deltas: Sequence[float], spec: ExpansionSpec, grid: Sequence[float] = PERES_GRID) -> float:
    """``min_k LHS(k) (log k)^2 / k`` over a grid of ``k``."""
    vals = [weighted_log_integral(deltas, spec, k).value * math.log(k) ** 2 / k for k in grid]
    return float(min(vals))


# ---------------------------------------------------------------- gauge


R_MAX = math.exp(-math.e)


@dataclass(frozen=True)
class GaugeFunction:
    """``r^gamma exp(c |log r| / (log |log r|)^2)`` on ``(0, r_max)``.

    ``u0`` bounds the domain where the gauge is increasing, ``r <= e^{-u0}``;
    it is kept in log scale because ``e^{-u0}`` may underflow.
    """

    gamma: float
    c_tilde: float
    r_max: float = R_MAX
    u0: float = math.e

    @property
    def r0(self) -> float:
        return math.exp(-self.u0)

    def log_value_at(self, u: float) -> float:
        """``log phi(e^{-u})``; use this when ``r`` underflows."""
        L = math.log(u)
        return -self.gamma * u + self.c_tilde * u / L**2

    def log_value(self, r: float) -> float:
        if not 0 < r < self.r_max:
            raise DomainTooLarge(f"r = {r} outside (0, {self.r_max:.6g})")
        return self.log_value_at(-math.log(r))

    def __call__(self, r: float) -> float:
        return math.exp(self.log_value(r))

    def log_ratio_at_level(self, k: int, n_s: int) -> float:
        """``log(phi(r) / r^gamma)`` at ``r = n_s^{-k}``."""
        u = k * math.log(n_s)
        return self.c_tilde * u / math.log(u) ** 2


def peres_gauge(gamma: float, c_tilde: float, grid_size: int = 400) -> GaugeFunction:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if not c_tilde > 0:
        raise ValueError("c_tilde must be positive")
    # d/du log phi(e^{-u}) = -gamma + c g(log u) with g(L) = 1/L^2 - 2/L^3 <= 1/27
    u0 = math.e
    if c_tilde / 27 >= gamma:
        L = brentq(lambda L: c_tilde * (1 / L**2 - 2 / L**3) - gamma, 3.0, 1e6)
        u0 = math.exp(L) * 1.001
    g = GaugeFunction(gamma, c_tilde, R_MAX, u0)
    u = np.logspace(math.log10(u0), math.log10(u0) + 6, grid_size)
    vals = np.array([g.log_value_at(x) for x in u])
    if (np.diff(vals) >= 0).any():
        raise InternalInconsistency("gauge is not increasing on its declared domain")
    return g


# ---------------------------------------------------------------- coincidence


def _cylinder(mu, word: Sequence[Digit]) -> float:
    if isinstance(mu, HiddenFactor):
        index = {x: a for a, x in enumerate(mu.labels)}
    else:
        index = {x: a for a, x in enumerate(mu.base.digits)}
    if any(x not in index for x in word):
        return 0.0
    return float(mu.cylinder([index[x] for x in word]))


@dataclass
class ConditionB:
    verdict: VerdictA
    witness: dict | None
    depth: int


def condition_b(X: SubshiftSpec, spec: ExpansionSpec, depth: int, budget: int = DEFAULT_BUDGET) -> ConditionB:
    """Compare ``tau_i`` of the maximal entropy measure with the maximal entropy measure of ``X_i``."""
    mu = maximal_entropy_measure(X)
    markov_all = True
    for i in range(2, spec.s + 1):
        img = pushforward(mu, spec, i)
        target = maximal_entropy_measure(factor_automaton(X, spec, i, minimise=False))
        labels, lab = level_labels(X, spec, i)
        markov_all &= isinstance(img, ShiftMeasure) and isinstance(target, ShiftMeasure)
        for k in range(1, depth + 1):
            words, _ = fiber_table(X, lab, len(labels), k, budget)
            for w in words:
                wd = [labels[c] for c in w]
                a, b = _cylinder(img, wd), _cylinder(target, wd)
                if abs(a - b) > CYLINDER_TOL:
                    return ConditionB(VerdictA.DIFFER, {
                        "level": i, "depth": k, "word": [list(x) for x in wd],
                        "projected": a, "factor_mme": b,
                    }, k)
    # one-step Markov laws agreeing on all 2-cylinders are equal
    if markov_all and depth >= 2:
        return ConditionB(VerdictA.COINCIDE, None, depth)
    return ConditionB(VerdictA.UNDETERMINED, None, depth)


def fiber_ratio_trajectory(X: SubshiftSpec, spec: ExpansionSpec, depth: int, budget: int = DEFAULT_BUDGET) -> list[list[float]]:
    """``max / min`` of ``#tau_i^{-1}(I)`` over ``I in L_k(X_i)``, per level and ``k``."""
    out = []
    for i in range(1, spec.s + 1):
        labels, lab = level_labels(X, spec, i)
        row = []
        for k in range(1, depth + 1):
            _, counts = fiber_table(X, lab, len(labels), k, budget)
            counts = np.asarray(counts, dtype=float)
            row.append(float(counts.max() / counts.min()))
        out.append(row)
    return out


def _sponge_report(X: SubshiftSpec, spec: ExpansionSpec) -> DimensionReport:
    D = X.digits
    prof = fiber_profile(D, spec)
    match = mme_equals_full_dim(D, spec)
    clf = infinite_hausdorff_classifier(D, spec)
    va = VerdictA.COINCIDE if prof.uniform_fiber else VerdictA.DIFFER
    vc = VerdictC.HOLDS if match.equal else VerdictC.FAILS
    if spec.s <= 2 and (va is VerdictA.COINCIDE) != (vc is VerdictC.HOLDS):
        raise InternalInconsistency("fibre uniformity and measure coincidence disagree with s <= 2")
    cls = clf.haus_class
    if va is VerdictA.COINCIDE:
        cls = HausClass.POSITIVE_FINITE
    data = full_dim_marginal(D, spec)
    witnesses = {
        "nonuniform_levels": clf.nonuniform,
        "log_products": match.log_products,
        "full_dim_marginal": data.marginal.tolist(),
        "Z": data.Z,
    }
    if clf.witness_q is not None:
        witnesses.update(q=clf.witness_q, deltas=clf.deltas, peres_constant=clf.peres_constant)
    mu = maximal_entropy_measure(X)
    return DimensionReport(
        dim_box=box_dimension(X, spec),
        dim_haus=hausdorff_dimension_sponge(D, spec),
        ly_of_mme=ly_dimension(mu, spec),
        fiber_profile=prof.levels,
        verdict_A=va,
        verdict_C=vc,
        haus_measure_class=cls,
        witnesses=witnesses,
    )


def coincidence_report(
    X, spec: ExpansionSpec, depth: int = 3, k_max: int = 8,
    budget: int = DEFAULT_BUDGET, bracket_depth: int = DEFAULT_BRACKET_DEPTH,
) -> DimensionReport:
    X = _as_subshift(X)
    for x in X.digits:
        spec.validate_digit(x)
    require_weak_spec(X)
    if X.is_full:
        return _sponge_report(X, spec)

    dim_box = box_dimension(X, spec)
    press = weighted_pressure(X, spec, k_max, budget)
    mu = maximal_entropy_measure(X)
    ly = ly_dimension(mu, spec, bracket_depth)
    cb = condition_b(X, spec, depth, budget) if spec.s > 1 else ConditionB(VerdictA.COINCIDE, None, 0)
    va = cb.verdict
    if va is VerdictA.COINCIDE:
        vc, cls = VerdictC.HOLDS, HausClass.POSITIVE_FINITE
    elif va is VerdictA.DIFFER and spec.s <= 2:
        vc, cls = VerdictC.FAILS, HausClass.ZERO_OR_INFINITE
    else:
        vc, cls = VerdictC.UNDETERMINED, HausClass.UNDETERMINED
    dim_haus = dim_box if va is VerdictA.COINCIDE else press.dim_estimate
    if isinstance(dim_haus, Interval) and dim_haus.upper > dim_box:
        dim_haus = Interval(min(dim_haus.lower, dim_box), dim_box)
    witnesses = {
        "condition_b": cb.witness,
        "condition_b_depth": cb.depth,
        "fiber_ratios": fiber_ratio_trajectory(X, spec, depth, budget),
        "pressure_estimates": press.estimates,
    }
    return DimensionReport(dim_box, dim_haus, ly, None, va, vc, cls, witnesses)
