import threading
from fractions import Fraction
from math import factorial

import pytest

from haarint.combinatorics import dominance_leq, partitions_of, z_of
from haarint.oracle import spherical_group_sum
from haarint.ratfunc import RationalFunction, d
from haarint.symfun import (
    Memo,
    character,
    character_table,
    dimension,
    hook_product,
    jack_in_powersums,
    load_tables,
    principal_specialization,
    read_table,
    schur_at_one,
    spherical_table,
    spherical_value,
    write_tables,
)

HALF = Fraction(1, 2)


def test_character_examples():
    assert character((2,), (2,)) == 1
    assert character((1, 1), (2,)) == -1
    assert character((2, 1), (1, 1, 1)) == 2
    assert character((2, 2), (2, 2)) == 2
    with pytest.raises(ValueError):
        character((2,), (1, 1, 1))


def test_character_22_on_22_by_explicit_class_sum():
    # χ_(2,2) = χ_(2,2) on S_4 via the induced-character identity
    # χ_(2,2) = h_(2,2) - h_(3,1): permutation characters on 2-subsets minus 1-subsets
    from itertools import combinations

    def fixed_points(perm, k):
        return sum(1 for s in combinations(range(4), k) if {perm[x] for x in s} == set(s))

    perm = (1, 0, 3, 2)  # (12)(34)
    h22 = fixed_points(perm, 2)
    h31 = fixed_points(perm, 1)
    assert h22 - h31 == character((2, 2), (2, 2))


@pytest.mark.parametrize("n", range(1, 7))
def test_first_orthogonality(n):
    table = character_table(n)
    parts = partitions_of(n)
    for lam in parts:
        assert table(lam, (1,) * n) == factorial(n) // hook_product(lam)
        for nu in parts:
            s = sum(Fraction(factorial(n), z_of(mu)) * table(lam, mu) * table(nu, mu) for mu in parts)
            assert s == (factorial(n) if lam == nu else 0)


def test_hook_product():
    assert hook_product((5,)) == 120
    assert hook_product((2, 1)) == 3
    assert hook_product((2, 2)) == 12
    assert dimension((2, 1)) == 2


def test_principal_specialization_examples():
    assert principal_specialization((1,), 2) == d
    assert principal_specialization((2,), 2) == d * (d + 2)
    assert principal_specialization((1, 1), 2) == d * (d - 1)
    assert principal_specialization((2,), 2, 3) == RationalFunction.constant(15)


def test_schur_at_one_examples():
    assert schur_at_one((1,)) == d
    assert schur_at_one((2,)) == d * (d + 1) / 2
    assert schur_at_one((1, 1)) == d * (d - 1) / 2


@pytest.mark.parametrize("n", range(1, 7))
def test_specialization_alpha_one_is_hook_times_schur(n):
    for lam in partitions_of(n):
        assert principal_specialization(lam, 1) == hook_product(lam) * schur_at_one(lam)


def test_jack_small_cases():
    assert dict(jack_in_powersums((1,), 2).coeffs) == {(1,): 1}
    # J-form p_1^2 + α p_2, scaled to be monic on m_(2)
    p2 = jack_in_powersums((2,), 2)
    assert p2[(1, 1)] / p2[(2,)] == Fraction(1, 2)
    assert p2.to_monomial()[(2,)] == 1


@pytest.mark.parametrize("alpha", [1, 2, HALF])
@pytest.mark.parametrize("n", range(1, 6))
def test_jack_orthogonal_and_triangular(n, alpha):
    parts = partitions_of(n)
    for lam in parts:
        P = jack_in_powersums(lam, alpha)
        mono = P.to_monomial()
        assert mono[lam] == 1
        assert all(dominance_leq(mu, lam) for mu, c in mono.items() if c)
        for mu in parts:
            if mu != lam:
                assert P.inner(jack_in_powersums(mu, alpha), alpha) == 0


@pytest.mark.parametrize("alpha", [2, HALF])
@pytest.mark.parametrize("n", range(1, 6))
def test_spherical_identity_normalization(n, alpha):
    for lam in partitions_of(n):
        assert spherical_value(lam, (1,) * n, alpha) == 1


def test_spherical_examples():
    assert spherical_value((1, 1), (2,), 2) == Fraction(-1, 2)
    assert spherical_value((2,), (2,), 2) == 1


@pytest.mark.parametrize("alpha", [2, HALF])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_spherical_matches_group_sum(n, alpha):
    for lam in partitions_of(n):
        for rho in partitions_of(n):
            assert spherical_value(lam, rho, alpha) == spherical_group_sum(lam, rho, alpha)


def test_table_round_trip(tmp_path):
    character_table(4)
    spherical_table(3, 2)
    spherical_table(3, HALF)
    paths = write_tables(tmp_path)
    assert paths
    for path in paths:
        table = read_table(path)
        if hasattr(table, "alpha"):
            assert table == spherical_table(table.n, table.alpha)
        else:
            assert table == character_table(table.n)
    (tmp_path / "junk.txt").write_text("not a table\n")
    assert load_tables(tmp_path) == len(paths)


def test_memo_builds_once_under_concurrency():
    memo = Memo()
    calls = []
    barrier = threading.Barrier(8)

    def build():
        calls.append(1)
        return object()

    results = []

    def worker():
        barrier.wait()
        results.append(memo.get("k", build))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(calls) == 1 and memo.builds == 1
    assert all(r is results[0] for r in results)
