"""Shift-invariant measures on digit subshifts and their factor images.

Every measure exposes a *linear representation* ``(init, {label: M})`` with
``mu([w]) = init @ M[w_1] @ ... @ M[w_k] @ 1``. Bernoulli and Markov measures
are stored directly; images under a non-lumpable factor map, and maximal
entropy measures of sofic factors, are kept as :class:`HiddenFactor`.

Probability arrays may hold :class:`fractions.Fraction` (dtype ``object``);
every operation that can stay exact does so.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceeded, NotCertified, NotErgodic, SupportViolation
from .lattice import Digit, ExpansionSpec
from .perron import exact_perron, is_irreducible, perron, strong_components
from .symbolic import (
    DEFAULT_BUDGET,
    SoficAutomaton,
    SubshiftSpec,
    level_labels,
    require_weak_spec,
)

log = logging.getLogger(__name__)

PROB_TOL = 1e-12
LUMP_TOL = 1e-12
DEFAULT_BRACKET_DEPTH = 10


class Interval(NamedTuple):
    lower: float
    upper: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


def _is_exact(a) -> bool:
    return np.asarray(a).dtype == object


def _as_float(a) -> np.ndarray:
    return np.asarray(a, dtype=float)


def _xlogx(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def shannon(p) -> float:
    return float(-_xlogx(p).sum())


@dataclass(eq=False)
class ShiftMeasure:
    """Bernoulli (``transition is None``) or Markov measure on ``base``."""

    base: SubshiftSpec
    marginal: np.ndarray
    transition: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.marginal)
        if p.shape != (self.base.size,):
            raise ValueError(f"vector of length {p.shape} for {self.base.size} digits")
        pf = _as_float(p)
        if (pf < 0).any() or abs(pf.sum() - 1) > PROB_TOL:
            raise ValueError("not a probability vector")
        if self.transition is None:
            A = self.base.adjacency
            live = pf > 0
            if not A[np.ix_(live, live)].all():
                raise SupportViolation("Bernoulli measure charges a forbidden transition")
            return
        P = np.asarray(self.transition)
        Pf = _as_float(P)
        if P.shape != (self.base.size,) * 2:
            raise ValueError("transition has wrong shape")
        if (Pf < 0).any() or np.abs(Pf.sum(axis=1) - 1).max() > PROB_TOL:
            raise ValueError("transition rows must be probability vectors")
        if np.abs(pf @ Pf - pf).max() > PROB_TOL:
            raise ValueError("marginal is not stationary for the transition")
        if ((Pf > 0) & (self.base.adjacency == 0)).any():
            raise SupportViolation("transition charges a move forbidden by the subshift")

    @classmethod
    def bernoulli(cls, base: SubshiftSpec, p: Sequence) -> "ShiftMeasure":
        return cls(base, _vector(p))

    @classmethod
    def markov(cls, base: SubshiftSpec, stationary: Sequence, transition) -> "ShiftMeasure":
        return cls(base, _vector(stationary), _matrix(transition))

    @property
    def kind(self) -> str:
        return "bernoulli" if self.transition is None else "markov"

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.marginal) and (self.transition is None or _is_exact(self.transition))

    @property
    def stationary(self) -> np.ndarray:
        return self.marginal

    def linear_representation(self) -> tuple[np.ndarray, dict[int, np.ndarray]]:
        n = self.base.size
        if self.transition is None:
            return np.ones(1), {a: np.array([[float(self.marginal[a])]]) for a in range(n)}
        P = _as_float(self.transition)
        mats = {}
        for a in range(n):
            M = np.zeros((n, n))
            M[a] = P[a]
            mats[a] = M
        return _as_float(self.marginal), mats

    def cylinder(self, word: Sequence[int]):
        """``mu([word])``; a Fraction when the measure is exact."""
        if not word:
            return 1
        if self.transition is None:
            out = 1 if self.is_exact else 1.0
            for a in word:
                out = out * self.marginal[a]
            return out
        out = self.marginal[word[0]]
        for a, b in zip(word, word[1:]):
            out = out * self.transition[a, b]
        return out

    def support(self) -> np.ndarray:
        return np.flatnonzero(_as_float(self.marginal) > 0)

    def is_ergodic(self) -> bool:
        if self.transition is None:
            return True
        sup = self.support()
        P = _as_float(self.transition)[np.ix_(sup, sup)]
        return is_irreducible(P > 0)


def _vector(p) -> np.ndarray:
    if any(isinstance(v, Fraction) for v in p):
        return np.array([Fraction(v) for v in p], dtype=object)
    return np.asarray(p, dtype=float)


def _matrix(P) -> np.ndarray:
    rows = [list(r) for r in P]
    if any(isinstance(v, Fraction) for r in rows for v in r):
        return np.array([[Fraction(v) for v in r] for r in rows], dtype=object)
    return np.asarray(rows, dtype=float)


@dataclass
class EntropyBracket:
    lower: float
    upper: float
    depth: int

    def as_interval(self) -> Interval:
        return Interval(self.lower, self.upper)


@dataclass(eq=False)
class HiddenFactor:
    """A measure on label sequences given by a linear representation.

    ``hidden[c]`` is the matrix for label ``c``; ``init`` is the law of the
    hidden state at time 1. Conditioning on that state gives the lower
    entropy bound.
    """

    labels: list[Digit]
    init: np.ndarray
    hidden: dict[int, np.ndarray]

    def linear_representation(self):
        return self.init, self.hidden

    def cylinder(self, word: Sequence[int]) -> float:
        v = self.init
        for c in word:
            v = v @ self.hidden[c]
        return float(v.sum())

    def block_entropies(self, depth: int, budget: int = DEFAULT_BUDGET) -> tuple[list[float], list[float]]:
        """``H_k`` and ``H(S_1, Y_1..Y_k)`` for ``k = 0..depth`` (may stop early on budget)."""
        init = _as_float(self.init)
        H = [0.0]
        J = [shannon(init)]
        ones = np.ones(len(init))
        B = np.vstack([self.hidden[c] @ ones for c in sorted(self.hidden)])
        for k in range(1, depth + 1):
            if k > 1:
                if len(B) * len(self.hidden) > budget:
                    log.warning("entropy bracket stopped at depth %d: block count exceeds budget", k - 1)
                    break
                B = np.vstack([B @ self.hidden[c].T for c in sorted(self.hidden)])
            prob = B @ init
            keep = prob > 0
            B = B[keep]
            H.append(shannon(prob[keep]))
            J.append(shannon((B * init).ravel()))
        return H, J

    def entropy_bracket(self, depth: int = DEFAULT_BRACKET_DEPTH, budget: int = DEFAULT_BUDGET) -> EntropyBracket:
        H, J = self.block_entropies(depth, budget)
        k = len(H) - 1
        if k < 1:
            raise BudgetExceeded("no complete block level fits in the budget")
        upper = H[k] - H[k - 1]
        lower = max(0.0, J[k] - J[k - 1])
        return EntropyBracket(min(lower, upper), upper, k)


def measure_entropy(mu: ShiftMeasure | HiddenFactor, depth: int = DEFAULT_BRACKET_DEPTH):
    """Entropy of a Bernoulli/Markov measure; an :class:`EntropyBracket` for hidden factors."""
    if isinstance(mu, HiddenFactor):
        return mu.entropy_bracket(depth)
    p = _as_float(mu.marginal)
    if mu.transition is None:
        return shannon(p)
    P = _as_float(mu.transition)
    return float(-(p[:, None] * _xlogx(P)).sum())


def maximal_entropy_measure(X: SubshiftSpec | SoficAutomaton):
    """Uniform Bernoulli on a full shift, Parry measure on an irreducible SFT,
    and the projected Parry measure of the dominant component of an automaton."""
    if isinstance(X, SoficAutomaton):
        return _automaton_mme(X)
    if X.is_full:
        return ShiftMeasure.bernoulli(X, [Fraction(1, X.size)] * X.size)
    require_weak_spec(X)
    A = X.adjacency
    pd = perron(A)
    exact = exact_perron(A, pd)
    if exact is not None:
        lam, r, l = exact
        n = X.size
        P = [[Fraction(int(A[a, b])) * r[b] / (lam * r[a]) for b in range(n)] for a in range(n)]
        w = [l[a] * r[a] for a in range(n)]
        tot = sum(w)
        return ShiftMeasure.markov(X, [x / tot for x in w], P)
    lam, r, l = pd.eigenvalue, pd.right, pd.left
    P = A * r[None, :] / (lam * r[:, None])
    P = P / P.sum(axis=1, keepdims=True)
    pi = l * r / (l * r).sum()
    return ShiftMeasure.markov(X, pi, P)


def _automaton_mme(aut: SoficAutomaton):
    adj = aut.adjacency()
    best, best_lam = None, -1.0
    for comp in strong_components(adj):
        sub = adj[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        lam = perron(sub).eigenvalue
        if lam > best_lam + 1e-12:
            best, best_lam = comp, lam
    if best is None:
        raise NotCertified("automaton has no recurrent component")
    pos = {q: j for j, q in enumerate(best)}
    pd = perron(adj[np.ix_(best, best)])
    r, l, lam = pd.right, pd.left, pd.eigenvalue
    pi = l * r / (l * r).sum()
    n = len(best)
    mats = {c: np.zeros((n, n)) for c in range(len(aut.labels))}
    incoming: dict[int, set[int]] = {}
    for (q, c), t in aut.transitions.items():
        if q in pos and t in pos:
            mats[c][pos[q], pos[t]] += r[pos[t]] / (lam * r[pos[q]])
            incoming.setdefault(pos[t], set()).add(c)
    used = sorted({c for c in mats if mats[c].any()})
    if n == 1:
        # single recurrent state: i.i.d. labels, uniform over the loops
        base = SubshiftSpec.full([aut.labels[c] for c in used])
        return ShiftMeasure.bernoulli(base, [Fraction(1, len(used))] * len(used))
    state_label = {u: next(iter(cs)) for u, cs in incoming.items() if len(cs) == 1}
    if len(state_label) == n and len(set(state_label.values())) == n:
        # each state is entered by a single label: the label process is Markov
        order = sorted(range(n), key=lambda u: state_label[u])
        P = sum(mats.values())
        P = P[np.ix_(order, order)]
        support = (P > 0).astype(int)
        base = SubshiftSpec.sft([aut.labels[state_label[u]] for u in order], support)
        return ShiftMeasure.markov(base, pi[order], P / P.sum(axis=1, keepdims=True))
    return HiddenFactor(list(aut.labels), pi, mats)


def pushforward(mu: ShiftMeasure, spec: ExpansionSpec, i: int, tol: float = LUMP_TOL):
    """Image of ``mu`` under ``tau_i``.

    Bernoulli images are exact Bernoulli measures; a Markov image is Markov
    when the level partition is strongly lumpable and a :class:`HiddenFactor`
    otherwise.
    """
    labels, lab = level_labels(mu.base, spec, i)
    L = len(labels)
    exact = mu.is_exact
    zero = Fraction(0) if exact else 0.0
    q = np.array([zero] * L, dtype=object if exact else float)
    for a in range(mu.base.size):
        q[lab[a]] = q[lab[a]] + mu.marginal[a]
    if mu.transition is None:
        return ShiftMeasure.bernoulli(SubshiftSpec.full(labels), list(q))

    P = mu.transition
    n = mu.base.size
    sup = set(mu.support().tolist())
    rows = np.empty((n, L), dtype=object if exact else float)
    for a in range(n):
        for c in range(L):
            rows[a, c] = sum((P[a, b] for b in range(n) if lab[b] == c), zero)
    lumped = np.empty((L, L), dtype=rows.dtype)
    ok = True
    for c in range(L):
        members = [a for a in range(n) if lab[a] == c and a in sup]
        if not members:
            ok = False
            break
        ref = rows[members[0]]
        for a in members[1:]:
            diff = rows[a] - ref
            if exact:
                if any(x != 0 for x in diff):
                    ok = False
            elif np.abs(_as_float(diff)).max() > tol:
                ok = False
        lumped[c] = ref
    if ok:
        support = (_as_float(lumped) > 0).astype(int)
        base = SubshiftSpec(tuple(labels), support)
        return ShiftMeasure(base, q, lumped)
    Pf = _as_float(P)
    hidden = {}
    for c in range(L):
        M = Pf.copy()
        M[lab != c] = 0.0
        hidden[c] = M
    return HiddenFactor(labels, _as_float(mu.marginal), hidden)


def ly_dimension(mu: ShiftMeasure, spec: ExpansionSpec, depth: int = DEFAULT_BRACKET_DEPTH):
    """``sum_i (1/log n_i - 1/log n_{i-1}) h(tau_i mu)``; an :class:`Interval`
    when some factor entropy is only bracketed."""
    if not mu.is_ergodic():
        raise NotErgodic("Markov measure has reducible support")
    lo = hi = 0.0
    exact = True
    for i in range(1, spec.s + 1):
        h = measure_entropy(pushforward(mu, spec, i), depth)
        w = spec.level_weight(i)
        if isinstance(h, EntropyBracket):
            exact = False
            lo += w * h.lower
            hi += w * h.upper
        else:
            lo += w * h
            hi += w * h
    return lo if exact else Interval(lo, hi)


@dataclass
class FullDimData:
    digits: tuple[Digit, ...]
    level_digits: list[list[Digit]]
    z_levels: list[dict[Digit, float]]
    Z: float
    marginal: np.ndarray

    def products(self, spec: ExpansionSpec) -> np.ndarray:
        """``prod_i Z^(i)(tau_i x)^(alpha_i - 1)`` per digit."""
        return self.partial_products(spec)[:, -1]

    def partial_products(self, spec: ExpansionSpec) -> np.ndarray:
        """Cumulative log-free products over levels ``1..i`` (column ``i-1``)."""
        out = np.ones((len(self.digits), spec.s))
        for a, x in enumerate(self.digits):
            acc = 1.0
            for i in range(1, spec.s + 1):
                acc *= self.z_levels[i - 1][spec.tau_digit(i, x)] ** (spec.alpha[i - 1] - 1)
                out[a, i - 1] = acc
        return out


def _digit_list(D) -> tuple[Digit, ...]:
    if isinstance(D, SubshiftSpec):
        return D.digits
    return SubshiftSpec.full(D).digits


def full_dim_marginal(D, spec: ExpansionSpec) -> FullDimData:
    """Nested fibre sums and the Bernoulli marginal of the measure of full dimension."""
    digits = tuple(spec.validate_digit(x) for x in _digit_list(D))
    alpha = spec.alpha
    level_digits: list[list[Digit]] = []
    for i in range(1, spec.s + 1):
        seen: dict[Digit, None] = {}
        for x in digits:
            seen.setdefault(spec.tau_digit(i, x), None)
        level_digits.append(list(seen))
    z_levels: list[dict[Digit, float]] = [{x: 1.0 for x in level_digits[0]}]
    for i in range(2, spec.s + 1):
        z: dict[Digit, float] = {x: 0.0 for x in level_digits[i - 1]}
        for y in level_digits[i - 2]:
            z[spec.pi_digit(i, y)] += z_levels[i - 2][y] ** alpha[i - 2]
        z_levels.append(z)
    Z = sum(v ** alpha[-1] for v in z_levels[-1].values())
    p = np.array([
        math.prod(z_levels[i - 1][spec.tau_digit(i, x)] ** (alpha[i - 1] - 1) for i in range(1, spec.s + 1))
        for x in digits
    ]) / Z
    return FullDimData(digits, level_digits, z_levels, Z, p)
