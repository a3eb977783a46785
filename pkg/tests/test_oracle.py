import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from haarint.integrator import MomentSpec, integrate_direct
from haarint.optimizer import pair_class_counts
from haarint.oracle import (
    brute_force_class_counts,
    gram_inverse_weingarten,
    gram_matrix,
    haar_sample,
    matmul,
    monte_carlo_moment,
    numeric_gram_inverse,
    pseudo_inverse,
    reconstruct_rational,
)
from haarint.ratfunc import ONE, d
from haarint.weingarten import ResourceLimitError, build_table


@pytest.mark.parametrize("group,n,dim", [
    (g, n, dim)
    for g in ("U", "O", "Sp")
    for n in (1, 2, 3)
    for dim in (2, 3, 4)
])
def test_closed_gram_pattern_matches_contraction(group, n, dim):
    symbolic = gram_matrix(group, n)
    numeric = gram_matrix(group, n, dim)
    assert symbolic.reps == numeric.reps
    for row_s, row_n in zip(symbolic.entries, numeric.entries):
        assert [f(dim) for f in row_s] == row_n


def test_gram_entries_examples():
    g = gram_matrix("O", 2, 3)
    # identity against itself: d^2; identity against {13}{24}: d
    assert g.entries[0][0] == 9 and g.entries[0][1] == 3
    u = gram_matrix("U", 2)
    assert u.entries[0][0] == d * d and u.entries[0][1] == d
    sp = gram_matrix("Sp", 1, 2)
    assert sp.entries == [[4]]


def test_gram_budget():
    with pytest.raises(ResourceLimitError):
        gram_matrix("O", 3, 4, budget=100)


def test_pseudo_inverse_laws_on_singular_matrix():
    a = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    p = pseudo_inverse(a)
    a_frac = [[Fraction(x) for x in row] for row in a]
    assert matmul(matmul(a_frac, p), a_frac) == a_frac
    assert matmul(matmul(p, a_frac), p) == p
    ap = matmul(a_frac, p)
    pa = matmul(p, a_frac)
    assert all(ap[i][j] == ap[j][i] and pa[i][j] == pa[j][i] for i in range(3) for j in range(3))


def test_reconstruct_rational():
    target = (d + 1) / (d * (d - 1) * (d + 2))
    points = [(x, target(x)) for x in range(3, 12)]
    assert reconstruct_rational(points, 2, 4) == target


@pytest.mark.parametrize("group", ["U", "O", "Sp"])
@pytest.mark.parametrize("n", [1, 2])
def test_gram_inverse_matches_spectral(group, n):
    assert gram_inverse_weingarten(group, n).values == build_table(group, n).values
    for dim in (1, 2, 3):
        assert numeric_gram_inverse(group, n, dim) == {
            lam: v.constant_value() for lam, v in build_table(group, n, dim).values.items()
        }


def test_brute_force_class_counts_examples():
    assert brute_force_class_counts((1,) * 6, (1, 1, 2, 2, 3, 3)).row() == [8, 6, 1]
    assert brute_force_class_counts((1, 1, 2, 2), (1, 2, 1, 2)).row() == [1, 0]
    with pytest.raises(ValueError):
        brute_force_class_counts((1, 1), (1, 1, 2, 2))
    with pytest.raises(ResourceLimitError):
        brute_force_class_counts((1,) * 8, (1,) * 8, budget=10)


def test_brute_force_agrees_with_reduction():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(1, 4)
        sides = []
        for _ in range(2):
            values = [v for _ in range(n) for v in [rng.randint(1, 3)] * 2]
            rng.shuffle(values)
            sides.append(values)
        assert brute_force_class_counts(*sides).counts == pair_class_counts(*sides).counts


@pytest.mark.parametrize("group,dim", [("U", 3), ("O", 4), ("Sp", 2)])
def test_samples_lie_in_the_group(group, dim):
    g = haar_sample(group, dim, 50, np.random.default_rng(1))
    size = g.shape[-1]
    eye = np.eye(size)
    gh = np.swapaxes(g.conj(), 1, 2)
    assert np.allclose(g @ gh, eye)
    if group == "O":
        assert np.isrealobj(g)
    if group == "Sp":
        J = np.block([[np.zeros((dim, dim)), -np.eye(dim)], [np.eye(dim), np.zeros((dim, dim))]])
        assert np.allclose(np.swapaxes(g, 1, 2) @ J @ g, J)


def test_sampling_is_reproducible():
    a = haar_sample("U", 3, 5, np.random.default_rng(11))
    b = haar_sample("U", 3, 5, np.random.default_rng(11))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("spec,dim", [
    (MomentSpec("U", (1, 2), (1, 2), (1, 2), (2, 1)), 3),
    (MomentSpec("O", (1, 1, 2, 2), (1, 2, 1, 2)), 3),
    (MomentSpec("O", (1, 1, 1, 1), (1, 1, 1, 1)), 2),
    (MomentSpec("Sp", (1, -1, 1, -1), (1, -1, -1, 1)), 2),
    (MomentSpec("Sp", (2, -2), (-1, 1)), 2),
])
def test_monte_carlo_agrees_with_exact(spec, dim):
    exact = float(integrate_direct(spec, dim).constant_value())
    mean, se = monte_carlo_moment(spec, dim, samples=40_000, seed=5)
    assert abs(mean - exact) <= 4 * se + 1e-12


def test_monte_carlo_rejects_large_index():
    with pytest.raises(ValueError):
        monte_carlo_moment(MomentSpec("O", (3, 3), (1, 1)), 2, samples=10)


def test_symbolic_gram_inverse_truly_inverts():
    g = gram_matrix("O", 2)
    table = build_table("O", 2)
    W = [[table[g.types[i][j]] for j in range(3)] for i in range(3)]
    prod = matmul(g.entries, W)
    zero = ONE - ONE
    assert prod == [[ONE if i == j else zero for j in range(3)] for i in range(3)]
    assert Counter(len(t) for row in g.types for t in row) == Counter({2: 3, 1: 6})
