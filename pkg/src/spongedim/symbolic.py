"""Subshifts over a digit set: full shifts, SFTs and their sofic factors.

Words are tuples of digit *indices* into ``SubshiftSpec.digits`` (or into the
level alphabet for factor automata); use :meth:`SubshiftSpec.word_digits` to
turn them back into coordinate tuples.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, NotCertified
from .lattice import Digit, ExpansionSpec
from .perron import DEFAULT_MAX_ITER, DEFAULT_TOL, spectral_radius

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class SubshiftSpec:
    """A digit set ``D`` with either no constraint (full shift) or a 0/1
    transition matrix (row = current digit, column = next digit)."""

    digits: tuple[Digit, ...]
    transition: np.ndarray | None = None
    pruned: tuple[Digit, ...] = ()

    @classmethod
    def full(cls, digits: Sequence[Sequence[int]]) -> "SubshiftSpec":
        ds = _dedupe(digits)
        return cls(ds, None)

    @classmethod
    def sft(cls, digits: Sequence[Sequence[int]], transition) -> "SubshiftSpec":
        """Build an SFT, iteratively removing digits with an empty row or column."""
        ds = tuple(tuple(int(c) for c in x) for x in digits)
        if len(set(ds)) != len(ds):
            raise ValueError("digits must be distinct")
        A = np.array(transition, dtype=np.int64)
        if A.shape != (len(ds), len(ds)):
            raise ValueError(f"transition must be {len(ds)}x{len(ds)}, got {A.shape}")
        if not np.isin(A, (0, 1)).all():
            raise ValueError("transition entries must be 0 or 1")
        keep = list(range(len(ds)))
        while keep:
            sub = A[np.ix_(keep, keep)]
            good = (sub.sum(axis=1) > 0) & (sub.sum(axis=0) > 0)
            if good.all():
                break
            keep = [v for v, g in zip(keep, good) if g]
        if not keep:
            raise ValueError("transition matrix admits no infinite sequence")
        removed = tuple(ds[v] for v in range(len(ds)) if v not in keep)
        if removed:
            log.warning("pruned stranded digits %s", removed)
        return cls(tuple(ds[v] for v in keep), A[np.ix_(keep, keep)], removed)

    @property
    def is_full(self) -> bool:
        return self.transition is None or bool((self.transition == 1).all())

    @property
    def size(self) -> int:
        return len(self.digits)

    @property
    def adjacency(self) -> np.ndarray:
        if self.transition is None:
            return np.ones((self.size, self.size), dtype=np.int64)
        return self.transition

    def word_digits(self, word: Sequence[int]) -> tuple[Digit, ...]:
        return tuple(self.digits[a] for a in word)

    def index_word(self, digits: Sequence[Sequence[int]]) -> tuple[int, ...]:
        lookup = {x: a for a, x in enumerate(self.digits)}
        return tuple(lookup[tuple(x)] for x in digits)

    def admits(self, word: Sequence[int]) -> bool:
        A = self.adjacency
        return all(A[a, b] for a, b in zip(word, word[1:]))

    def __repr__(self):
        kind = "full" if self.transition is None else "sft"
        return f"SubshiftSpec({kind}, {len(self.digits)} digits)"


def _dedupe(digits) -> tuple[Digit, ...]:
    seen, out = set(), []
    for x in digits:
        x = tuple(int(c) for c in x)
        if x not in seen:
            seen.add(x)
            out.append(x)
    if not out:
        raise ValueError("digit set must be nonempty")
    return tuple(out)


def level_labels(X: SubshiftSpec, spec: ExpansionSpec, i: int) -> tuple[list[Digit], np.ndarray]:
    """Level-``i`` alphabet ``tau_i(D)`` in order of first appearance, and the
    index of ``tau_i(x)`` for every digit ``x``."""
    alphabet: list[Digit] = []
    pos: dict[Digit, int] = {}
    idx = np.empty(X.size, dtype=np.int64)
    for a, x in enumerate(X.digits):
        y = spec.tau_digit(i, x)
        if y not in pos:
            pos[y] = len(alphabet)
            alphabet.append(y)
        idx[a] = pos[y]
    return alphabet, idx


def enumerate_language(X: SubshiftSpec, k: int, budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    """All admissible words of length ``k`` in lexicographic index order."""
    if k < 1:
        raise ValueError("k must be positive")
    total = count_words(X, k)
    if total > budget:
        raise BudgetExceeded(f"{total} words of length {k} exceed budget {budget}")
    A = X.adjacency
    succ = [np.flatnonzero(A[a]).tolist() for a in range(X.size)]
    words = [(a,) for a in range(X.size)]
    for _ in range(k - 1):
        words = [w + (b,) for w in words for b in succ[w[-1]]]
    return words


def weak_spec_gap(X: SubshiftSpec) -> int | None:
    """Gap length certifying weak specification, or None when not certified.

    Full shifts need no gap. An irreducible SFT is certified with
    ``p = max_{a,b} dist(a, b) - 1`` where ``dist`` counts edges.
    """
    if X.is_full:
        return 0
    A = X.adjacency
    n = X.size
    succ = [np.flatnonzero(A[a]).tolist() for a in range(n)]
    worst = 0
    for a in range(n):
        dist = [math.inf] * n
        queue = deque()
        for b in succ[a]:
            if dist[b] == math.inf:
                dist[b] = 1
                queue.append(b)
        while queue:
            u = queue.popleft()
            for v in succ[u]:
                if dist[v] == math.inf:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        if math.inf in dist:
            return None
        worst = max(worst, max(dist))
    return worst - 1


def require_weak_spec(X: SubshiftSpec) -> int:
    p = weak_spec_gap(X)
    if p is None:
        raise NotCertified("transition graph is reducible; weak specification not certified")
    return p


@dataclass
class SoficAutomaton:
    """Deterministic presentation of the level-``i`` factor ``tau_i(X)``.

    State 0 is the initial state. ``subsets[q]`` records one subset of digit
    indices that the state stands for (``None`` for the initial state).
    """

    level: int
    labels: list[Digit]
    transitions: dict[tuple[int, int], int]
    subsets: list[frozenset | None]
    initial: int = 0

    @property
    def n_states(self) -> int:
        return len(self.subsets)

    def step(self, q: int, c: int) -> int | None:
        return self.transitions.get((q, c))

    def accepts(self, word: Sequence[int]) -> bool:
        q = self.initial
        for c in word:
            q = self.step(q, c)
            if q is None:
                return False
        return True

    def adjacency(self) -> np.ndarray:
        M = np.zeros((self.n_states, self.n_states), dtype=np.int64)
        for (q, _), r in self.transitions.items():
            M[q, r] += 1
        return M

    def label_matrices(self) -> dict[int, np.ndarray]:
        out = {c: np.zeros((self.n_states, self.n_states)) for c in range(len(self.labels))}
        for (q, c), r in self.transitions.items():
            out[c][q, r] = 1.0
        return out

    def loop_labels(self) -> set[Digit]:
        return {self.labels[c] for (q, c), r in self.transitions.items() if q == r}


def factor_automaton(X: SubshiftSpec, spec: ExpansionSpec, i: int, minimise: bool = True) -> SoficAutomaton:
    """Subset construction on the label-projected graph, then minimisation.

    With ``minimise=False`` every non-initial state is a set of digits sharing
    one label, which makes the label process a function of the state.
    """
    labels, lab = level_labels(X, spec, i)
    A = X.adjacency.astype(bool)
    n_lab = len(labels)
    members = [frozenset(np.flatnonzero(lab == c).tolist()) for c in range(n_lab)]

    states: list[frozenset | None] = [None]
    index: dict[frozenset, int] = {}
    trans: dict[tuple[int, int], int] = {}
    queue = deque([0])
    while queue:
        q = queue.popleft()
        S = states[q]
        if S is None:
            reach = frozenset(range(X.size))
        else:
            reach = frozenset(np.flatnonzero(A[sorted(S)].any(axis=0)).tolist())
        for c in range(n_lab):
            T = reach & members[c]
            if not T:
                continue
            if T not in index:
                index[T] = len(states)
                states.append(T)
                queue.append(index[T])
            trans[(q, c)] = index[T]
    aut = SoficAutomaton(i, labels, trans, states)
    return _minimise(aut) if minimise else aut


def _minimise(aut: SoficAutomaton) -> SoficAutomaton:
    n, n_lab = aut.n_states, len(aut.labels)
    block = [0] * n
    while True:
        sig = {}
        new = []
        for q in range(n):
            key = (block[q],) + tuple(
                block[aut.transitions[(q, c)]] if (q, c) in aut.transitions else -1 for c in range(n_lab)
            )
            new.append(sig.setdefault(key, len(sig)))
        if len(sig) == len(set(block)):
            break
        block = new
    # renumber so the initial state's block comes first, others by first appearance
    order: dict[int, int] = {}
    for q in [aut.initial] + list(range(n)):
        order.setdefault(block[q], len(order))
    subsets: list = [None] * len(order)
    for q in range(n):
        b = order[block[q]]
        if subsets[b] is None and q != aut.initial:
            subsets[b] = aut.subsets[q]
    subsets[0] = None
    trans = {(order[block[q]], c): order[block[r]] for (q, c), r in aut.transitions.items()}
    return SoficAutomaton(aut.level, aut.labels, trans, subsets)


def count_words(obj: SubshiftSpec | SoficAutomaton, k: int) -> int:
    """Exact ``#L_k`` by transfer-matrix powering in Python integers."""
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(obj, SoficAutomaton):
        M = obj.adjacency().astype(object)
        v = np.zeros(obj.n_states, dtype=object)
        v[obj.initial] = 1
        steps = k
    else:
        M = obj.adjacency.astype(object)
        v = np.ones(obj.size, dtype=object)
        steps = k - 1
    for _ in range(steps):
        v = v.dot(M)
    return int(sum(v))


@dataclass
class EntropyResult:
    h: float
    eigenvalue: float
    growth: list[float] = field(default_factory=list)

    def __float__(self):
        return self.h


def topological_entropy(
    obj: SubshiftSpec | SoficAutomaton,
    tol: float = DEFAULT_TOL,
    probe_depth: int = 12,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EntropyResult:
    """``log`` of the Perron root, plus ``log #L_k / k`` for ``k <= probe_depth``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = obj.adjacency() if isinstance(obj, SoficAutomaton) else obj.adjacency
    lam = spectral_radius(M, tol, max_iter)
    growth = [math.log(count_words(obj, k)) / k for k in range(1, probe_depth + 1)]
    return EntropyResult(math.log(lam) if lam > 0 else 0.0, lam, growth)


def fiber_table(
    X: SubshiftSpec, lab: np.ndarray, n_labels: int, k: int, budget: int = DEFAULT_BUDGET
) -> tuple[np.ndarray, np.ndarray]:
    """Every label word of length ``k`` realised by ``X`` with its preimage count.

    Returns ``(words, counts)``: ``words`` is an ``N x k`` array of label indices
    in lexicographic order and ``counts[w] = #{I in L_k(X) : lab(I) = w}``.
    """
    dtype = np.int64 if X.size ** k < 2**62 else object
    A = X.adjacency.astype(dtype)
    masks = [(lab == c).astype(dtype) for c in range(n_labels)]
    words = np.arange(n_labels, dtype=np.int64).reshape(-1, 1)
    vecs = np.stack(masks)
    for _ in range(k - 1):
        nxt = vecs @ A
        new_words, new_vecs = [], []
        for c in range(n_labels):
            v = nxt * masks[c]
            alive = v.any(axis=1)
            if alive.any():
                w = words[alive]
                new_words.append(np.hstack([w, np.full((len(w), 1), c)]))
                new_vecs.append(v[alive])
        words = np.vstack(new_words)
        vecs = np.vstack(new_vecs)
        order = np.lexsort(words.T[::-1])
        words, vecs = words[order], vecs[order]
        if len(words) > budget:
            raise BudgetExceeded(f"{len(words)} label words exceed budget {budget}")
    return words, vecs.sum(axis=1)
