import math
from fractions import Fraction

import numpy as np
import pytest

from spongedim import fixtures
from spongedim.errors import NotCertified, NotErgodic, SupportViolation
from spongedim.lattice import build_expansion
from spongedim.measures import (
    EntropyBracket,
    HiddenFactor,
    Interval,
    ShiftMeasure,
    full_dim_marginal,
    ly_dimension,
    maximal_entropy_measure,
    measure_entropy,
    pushforward,
    shannon,
)
from spongedim.symbolic import SubshiftSpec, enumerate_language, factor_automaton, topological_entropy

F = Fraction


def test_full_shift_mme(d3):
    mu = maximal_entropy_measure(d3[0])
    assert mu.transition is None and list(mu.marginal) == [F(1, 6)] * 6
    assert measure_entropy(mu) == pytest.approx(math.log(6), abs=1e-14)


def test_parry_no_repeat(no_repeat):
    X, _ = no_repeat
    mu = maximal_entropy_measure(X)
    assert mu.is_exact
    assert list(mu.marginal) == [F(1, 6)] * 6
    A = X.adjacency
    assert all(mu.transition[a, b] == F(int(A[a, b]), 5) for a in range(6) for b in range(6))
    assert measure_entropy(mu) == pytest.approx(math.log(5), abs=1e-13)


def test_golden_mean_parry():
    X = SubshiftSpec.sft([(0,), (1,)], [[1, 1], [1, 0]])
    mu = maximal_entropy_measure(X)
    phi = (1 + math.sqrt(5)) / 2
    want = [phi**2 / (1 + phi**2), 1 / (1 + phi**2)]
    assert np.asarray(mu.marginal, dtype=float) == pytest.approx(want, abs=1e-12)
    assert measure_entropy(mu) == pytest.approx(math.log(phi), abs=1e-12)
    # cross-check against a dense eigen-solver
    w, v = np.linalg.eig(X.adjacency.T.astype(float))
    l = np.abs(v[:, np.argmax(w.real)].real)
    assert float(mu.marginal[0]) == pytest.approx(l[0] ** 2 / (l**2).sum(), abs=1e-12)


def test_reducible_has_no_parry():
    X = SubshiftSpec.sft([(0,), (1,)], [[1, 1], [0, 1]])
    with pytest.raises(NotCertified):
        maximal_entropy_measure(X)


def test_point_mass_entropy(d3):
    mu = ShiftMeasure.bernoulli(d3[0], [1, 0, 0, 0, 0, 0])
    assert measure_entropy(mu) == 0.0


def test_measure_validation(no_repeat):
    X, _ = no_repeat
    with pytest.raises(ValueError):
        ShiftMeasure.bernoulli(X, [0.5, 0.6, 0, 0, 0, 0])
    with pytest.raises(SupportViolation):
        ShiftMeasure.bernoulli(X, [0.5, 0.5, 0, 0, 0, 0])
    with pytest.raises(SupportViolation):
        ShiftMeasure.markov(X, [F(1, 6)] * 6, np.full((6, 6), F(1, 6), dtype=object))


def test_d3_pushforwards(d3):
    X, spec = d3
    mu = maximal_entropy_measure(X)
    assert list(pushforward(mu, spec, 2).marginal) == [F(1, 6)] * 4 + [F(1, 3)]
    assert list(pushforward(mu, spec, 3).marginal) == [F(2, 3), F(1, 3)]
    assert list(pushforward(mu, spec, 1).marginal) == [F(1, 6)] * 6


def test_no_repeat_lumping(no_repeat):
    X, spec = no_repeat
    img = pushforward(maximal_entropy_measure(X), spec, 2)
    assert isinstance(img, ShiftMeasure)
    assert list(img.marginal) == [F(1, 6), F(1, 3), F(1, 2)]
    want = [[F(0), F(2, 5), F(3, 5)], [F(1, 5), F(1, 5), F(3, 5)], [F(1, 5), F(2, 5), F(2, 5)]]
    assert [list(r) for r in img.transition] == want


def test_non_lumpable_gives_hidden_factor():
    spec = build_expansion((4, 2))
    X = SubshiftSpec.full([(0, 0), (1, 0), (2, 1)])
    P = np.array([[0.2, 0.5, 0.3], [0.5, 0.1, 0.4], [0.3, 0.3, 0.4]])
    w, v = np.linalg.eig(P.T)
    pi = np.abs(v[:, np.argmin(np.abs(w - 1))].real)
    mu = ShiftMeasure.markov(X, pi / pi.sum(), P)
    img = pushforward(mu, spec, 2)
    assert isinstance(img, HiddenFactor)
    # cylinders of the image are sums of source cylinders
    for word in [(0,), (0, 1), (1, 0, 0)]:
        src = sum(mu.cylinder(w) for w in enumerate_language(X, len(word))
                  if all(spec.tau_digit(2, X.digits[a]) == img.labels[c] for a, c in zip(w, word)))
        assert img.cylinder(word) == pytest.approx(float(src), abs=1e-14)
    br = measure_entropy(img)
    assert isinstance(br, EntropyBracket) and br.lower <= br.upper
    # a factor cannot carry more entropy than its source
    assert br.lower <= measure_entropy(mu) + 1e-12


def test_bracket_tightens():
    spec = build_expansion((4, 2))
    X = SubshiftSpec.full([(0, 0), (1, 0), (2, 1)])
    P = np.array([[0.2, 0.5, 0.3], [0.5, 0.1, 0.4], [0.3, 0.3, 0.4]])
    w, v = np.linalg.eig(P.T)
    pi = np.abs(v[:, np.argmin(np.abs(w - 1))].real)
    img = pushforward(ShiftMeasure.markov(X, pi / pi.sum(), P), spec, 2)
    uppers, widths = [], []
    for k in (2, 4, 6, 8):
        b = img.entropy_bracket(k)
        uppers.append(b.upper)
        widths.append(b.upper - b.lower)
    assert all(a >= b - 1e-12 for a, b in zip(uppers, uppers[1:]))
    assert widths[-1] < 1e-3


def test_factor_mme_of_no_repeat(no_repeat):
    X, spec = no_repeat
    aut = factor_automaton(X, spec, 2, minimise=False)
    nu = maximal_entropy_measure(aut)
    assert isinstance(nu, ShiftMeasure)
    assert measure_entropy(nu) == pytest.approx(math.log(1 + math.sqrt(3)), abs=1e-10)
    assert measure_entropy(nu) == pytest.approx(topological_entropy(aut).h, abs=1e-10)


def test_ly_examples(d3):
    X, spec = d3
    mu = maximal_entropy_measure(X)
    assert ly_dimension(mu, spec) == pytest.approx(math.log(18) / (6 * math.log(2)), abs=1e-12)
    delta = ShiftMeasure.bernoulli(X, [1, 0, 0, 0, 0, 0])
    assert ly_dimension(delta, spec) == 0.0
    spec1 = build_expansion((3, 3))
    X1 = SubshiftSpec.full([(0, 0), (1, 2), (2, 1)])
    p = [0.5, 0.3, 0.2]
    assert ly_dimension(ShiftMeasure.bernoulli(X1, p), spec1) == pytest.approx(shannon(p) / math.log(3), abs=1e-14)


def test_ly_not_ergodic():
    X = SubshiftSpec.full([(0,), (1,)])
    mu = ShiftMeasure.markov(X, [0.5, 0.5], np.eye(2))
    with pytest.raises(NotErgodic):
        ly_dimension(mu, build_expansion((2,)))


def test_z_recursion_d3(d3):
    X, spec = d3
    data = full_dim_marginal(X.digits, spec)
    assert sorted(data.z_levels[1].values()) == [1, 1, 1, 1, 2]
    assert data.z_levels[2][(0,)] == pytest.approx(4, abs=1e-12)
    assert data.z_levels[2][(1,)] == pytest.approx(2 ** (2 / 3), abs=1e-12)
    assert data.Z == pytest.approx(3 * math.sqrt(2), abs=1e-12)
    assert data.marginal == pytest.approx([1 / 6] * 6, abs=1e-12)


def test_z_recursion_d4(d4):
    X, spec = d4
    data = full_dim_marginal(X.digits, spec)
    assert set(np.round(list(data.z_levels[1].values()), 12)) == {1.0, 4.0}
    assert set(np.round(list(data.z_levels[2].values()), 12)) == {2.0, 8.0}
    assert list(data.z_levels[3].values()) == pytest.approx([2 * math.sqrt(2)] * 2, abs=1e-12)
    assert data.marginal.sum() == pytest.approx(1, abs=1e-12)


def test_full_alphabet_marginal():
    X, spec = fixtures.full_torus((4, 2, 2))
    data = full_dim_marginal(X.digits, spec)
    assert data.marginal == pytest.approx([1 / 16] * 16, abs=1e-14)
    assert math.log(data.Z) / math.log(spec.n[-1]) == pytest.approx(3, abs=1e-12)


def test_interval_helpers():
    iv = Interval(1.0, 2.0)
    assert iv.mid == 1.5 and iv.contains(2.0) and not iv.contains(2.1)


def test_parry_gibbs_bound():
    X = SubshiftSpec.sft([(0,), (1,), (2,)], [[0, 1, 1], [1, 1, 1], [1, 1, 1]])
    mu = maximal_entropy_measure(X)
    ratios = []
    for k in range(1, 9):
        vals = [float(mu.cylinder(w)) for w in enumerate_language(X, k)]
        ratios.append(max(vals) / min(vals))
    assert max(ratios) < 4
