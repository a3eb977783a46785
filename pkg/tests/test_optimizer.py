import random
from collections import Counter, defaultdict
from math import factorial, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarint import optimizer
from haarint.combinatorics import double_factorial, partitions_of
from haarint.integrator import MomentSpec, Trace, direct_type_counts, integrate_direct
from haarint.optimizer import (
    LRUMemo,
    NotApplicable,
    canonical_multigraph,
    coset_class_closed_form,
    coset_class_sizes,
    dispatch,
    graph_key,
    independent_blocks_counts,
    independent_blocks_integral,
    list_class_counts,
    normalize,
    one_row_integral,
    orthogonal_list_reduction,
    pair_class_counts,
    parabolic_character_sums,
    unitary_list_reduction,
    unitary_parabolic_counts,
)
from haarint.ratfunc import ZERO, d
from random_specs import random_spec

# ---------------------------------------------------------- normalize


def test_normalize_orthogonal_example():
    norm = normalize(MomentSpec("O", (3, 3, 1, 1, 1, 1), (1, 2, 1, 2, 3, 3)))
    assert norm.spec.I == (1, 1, 1, 1, 2, 2)
    assert norm.spec.J == (1, 2, 3, 3, 1, 2)
    assert norm.lam == (4, 2)
    assert norm.blocks == ((1, 2, 3, 3), (1, 2))
    assert norm.mus == ((2, 1, 1), (1, 1))
    assert not norm.swapped


def test_normalize_swaps_when_J_dominates():
    # λ = (1,1,1,1) against μ = (4): exchanging I and J gives a longer prefix
    norm = normalize(MomentSpec("O", (1, 2, 3, 4), (1, 1, 1, 1)))
    assert norm.swapped
    assert norm.spec.I == (1, 1, 1, 1) and norm.spec.J == (1, 2, 3, 4)


def test_normalize_unitary_relabels_both_sides():
    norm = normalize(MomentSpec("U", (5, 7, 7), (2, 2, 9), (7, 5, 7), (9, 2, 2)))
    assert norm.spec.I == (1, 1, 2)
    assert sorted(norm.spec.Ip) == [1, 1, 2]
    assert set(norm.spec.J) == {1, 2}


def test_normalize_symplectic_only_sorts():
    spec = MomentSpec("Sp", (2, -1, 1, -2), (1, -1, 1, -1))
    norm = normalize(spec)
    assert norm.spec.I == (-2, -1, 1, 2)
    assert sorted(zip(norm.spec.I, norm.spec.J)) == sorted(zip(spec.I, spec.J))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["U", "O", "Sp"]), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_normalize_idempotent_and_value_preserving(group, n, seed):
    spec = random_spec(random.Random(seed), group, n, 3)
    once = normalize(spec)
    assert normalize(once.spec).spec == once.spec
    assert integrate_direct(once.spec) == integrate_direct(spec)


# ------------------------------------------------- unitary reduction


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_unitary_reduction_sums_to_original(n, seed):
    spec = random_spec(random.Random(seed), "U", n, 2)
    leaves = unitary_list_reduction(spec)
    assert len(leaves) == prod(factorial(c) for c in Counter(spec.I).values())
    for leaf in leaves:
        assert len(set(leaf.I)) == n
    total = sum((integrate_direct(leaf) for leaf in leaves), ZERO)
    assert total == integrate_direct(spec)


def test_unitary_reduction_leaf_count():
    spec = MomentSpec("U", (1, 1, 1, 2), (1, 2, 3, 4), (1, 2, 1, 1), (4, 3, 2, 1))
    assert len(unitary_list_reduction(spec)) == 6


# ------------------------------------------------------- graph keys


def test_canonical_multigraph_is_isomorphism_invariant():
    a = canonical_multigraph([(1, 2), (2, 3), (3, 3)], directed=False)
    b = canonical_multigraph([(7, 7), (5, 7), (9, 5)], directed=False)
    assert a == b
    assert a == canonical_multigraph([(1, 2), (2, 3), (1, 1)], directed=False)
    assert a != canonical_multigraph([(1, 2), (2, 3), (2, 2)], directed=False)
    assert canonical_multigraph([(1, 2)], True) != canonical_multigraph([(1, 1)], True)
    assert canonical_multigraph([(1, 2), (2, 1)], True) != canonical_multigraph([(1, 2), (1, 2)], True)


def test_graph_key_examples():
    std = (1, 1, 2, 2, 3, 3)
    k1 = graph_key(MomentSpec("O", (1, 1, 1, 2, 2, 2), std))
    k2 = graph_key(MomentSpec("O", (2, 2, 2, 1, 1, 1), std))
    k3 = graph_key(MomentSpec("O", (1, 2, 1, 2, 1, 2), std))
    assert k1 == k2 != k3
    with pytest.raises(ValueError):
        graph_key(MomentSpec("O", (1, 1, 2, 2), (1, 2, 1, 2)))
    with pytest.raises(ValueError):
        graph_key(MomentSpec("Sp", (1, -1), (1, -1)))


def test_unitary_key_distinguishes_conjugate_arrangements():
    # same multiplicity data on every side, different integrals
    a = MomentSpec("U", (1, 2, 3), (1, 1, 2), (1, 2, 3), (1, 2, 1))
    b = MomentSpec("U", (1, 2, 3), (1, 1, 2), (1, 2, 3), (1, 1, 2))
    assert graph_key(a) != graph_key(b)
    assert integrate_direct(a) != integrate_direct(b)


def test_equal_keys_give_equal_integrals():
    rng = random.Random(7)
    by_key = defaultdict(set)
    for _ in range(300):
        n = rng.randint(1, 3)
        values = [rng.randint(1, 3) for _ in range(2 * n)]
        spec = MomentSpec("O", values, [k // 2 + 1 for k in range(2 * n)])
        if any(c % 2 for c in Counter(values).values()):
            continue
        by_key[graph_key(spec)].add(integrate_direct(spec))
    for _ in range(300):
        n = rng.randint(1, 3)
        I = list(range(1, n + 1))
        J = [rng.randint(1, 3) for _ in range(n)]
        Jp = list(J)
        rng.shuffle(Jp)
        spec = MomentSpec("U", I, J, I, Jp)
        by_key[graph_key(spec)].add(integrate_direct(spec))
    assert len(by_key) > 10
    assert all(len(values) == 1 for values in by_key.values())


def test_lru_memo():
    memo = LRUMemo(2)
    calls = Counter()

    def make(k):
        def f():
            calls[k] += 1
            return k * 10
        return f

    trace = Trace()
    assert memo.get(1, make(1), trace) == 10
    assert memo.get(1, make(1), trace) == 10
    memo.get(2, make(2))
    memo.get(3, make(3))
    assert len(memo) == 2
    memo.get(1, make(1))
    assert calls[1] == 2 and trace.cache_hits == 1 and trace.cache_misses == 1


# ------------------------------------------------------ class sizes


def test_coset_class_sizes_small():
    assert coset_class_sizes(1).row() == [1]
    assert coset_class_sizes(2).row() == [2, 1]
    assert coset_class_sizes(3).row() == [8, 6, 1]
    assert coset_class_sizes(4).row() == [48, 32, 12, 12, 1]
    assert coset_class_sizes(5)[(5,)] == 384
    with pytest.raises(ValueError):
        coset_class_sizes(0)


@pytest.mark.parametrize("n", range(1, 9))
def test_coset_class_closed_form_and_total(n):
    sizes = coset_class_sizes(n)
    for lam in partitions_of(n):
        assert sizes[lam] == coset_class_closed_form(lam)
    assert sizes.total() == double_factorial(2 * n - 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_coset_class_sizes_match_direct_count(n):
    counts = direct_type_counts(MomentSpec("O", (1,) * (2 * n), [k // 2 + 1 for k in range(2 * n)]))
    assert dict(counts) == {k: v for k, v in coset_class_sizes(n).counts.items() if v}


# --------------------------------------------------------- one row


def test_one_row_integral():
    assert one_row_integral((1, 1, 1, 1)) == 3 / (d * (d + 2))
    assert one_row_integral((1, 1, 2, 2)) == 1 / (d * (d + 2))
    assert one_row_integral((1, 1, 2)) == ZERO
    assert one_row_integral((1, 2, 1, 3)) == ZERO
    for J in [(1, 1, 1, 1, 2, 2), (1, 2, 1, 2, 3, 3), (1, 1, 1, 1, 1, 1, 2, 2)]:
        spec = MomentSpec("O", (1,) * len(J), J)
        assert one_row_integral(J) == integrate_direct(spec)
    with pytest.raises(ValueError):
        one_row_integral((1, 1), n=2)


# -------------------------------------------------- independent blocks


def test_independent_blocks():
    spec = MomentSpec("O", (1, 1, 1, 1, 2, 2), (3, 3, 4, 4, 5, 5))
    assert independent_blocks_integral(spec) == integrate_direct(spec)
    spec = MomentSpec("O", (1, 1, 1, 1, 2, 2, 2, 2), (1, 1, 1, 1, 2, 2, 3, 3))
    assert independent_blocks_integral(spec) == integrate_direct(spec)
    assert independent_blocks_integral(MomentSpec("O", (1, 1, 2, 2), (1, 2, 3, 3))) == ZERO
    with pytest.raises(NotApplicable):
        independent_blocks_counts(MomentSpec("O", (1, 1, 2, 2), (1, 2, 1, 2)))
    with pytest.raises(NotApplicable):
        independent_blocks_counts(MomentSpec("U", (1,), (1,), (1,), (1,)))


# ----------------------------------------------------- list reduction


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_orthogonal_reduction_matches_direct(n, seed):
    spec = random_spec(random.Random(seed), "O", n, 3)
    reps = orthogonal_list_reduction(spec)
    expected_total = prod(double_factorial(c - 1) for c in Counter(spec.J).values())
    assert sum(r.multiplicity for r in reps) == expected_total
    assert +Counter(pair_class_counts(spec.I, spec.J).counts) == +direct_type_counts(spec)


def test_worked_example_reduces_to_one_list():
    I = (1, 1, 1, 1, 1, 1, 2, 2)
    J = (1, 1, 1, 1, 1, 2, 1, 2)
    reps = orthogonal_list_reduction(MomentSpec("O", I, J))
    assert len(reps) == 1
    assert reps[0].multiplicity == 15
    assert reps[0].I == (1, 1, 1, 1, 1, 2, 1, 2)


def test_list_class_counts():
    assert list_class_counts((1,) * 10).row() == coset_class_sizes(5).row()
    assert list_class_counts((1, 2, 1, 2)).row() == [1, 0]
    assert list_class_counts((1, 2, 3, 4)).total() == 0
    with pytest.raises(ValueError):
        list_class_counts((1, 1, 1))


# --------------------------------------------------------- parabolic


def test_parabolic_character_sums_examples():
    # S_2 x S_2 acting on γ = identity: all of S_2 each twice
    counts = parabolic_character_sums((1, 1), (1, 1), (1, 2))
    assert counts == Counter({(1, 1): 2, (2,): 2})
    # trivial stabilizers: just γ
    assert parabolic_character_sums((1, 2, 3), (1, 2, 3), (2, 3, 1)) == Counter({(3,): 1})


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_parabolic_counts_match_direct(n, seed):
    spec = random_spec(random.Random(seed), "U", n, 2)
    assert +unitary_parabolic_counts(spec) == +direct_type_counts(spec)


def test_dispatch_strategies(monkeypatch):
    cases = [
        (MomentSpec("O", (1, 2), (1, 1)), "zero"),
        (MomentSpec("O", (1, 1, 1, 1), (1, 1, 2, 2)), "one_row"),
        (MomentSpec("O", (1, 1, 1, 1, 2, 2), (3, 3, 4, 4, 5, 5)), "independent_blocks"),
        (MomentSpec("O", (1, 1, 2, 2), (1, 2, 1, 2)), "orthogonal_reduction"),
        (MomentSpec("U", (1, 1), (1, 2), (1, 1), (2, 1)), "unitary_reduction"),
        (MomentSpec("Sp", (1, -1), (1, -1)), "direct"),
    ]
    for spec, strategy in cases:
        trace = Trace()
        value = dispatch(spec, trace=trace)
        assert trace.strategy == strategy, spec
        assert value == integrate_direct(spec)
    monkeypatch.setattr(optimizer.config, "parabolic_threshold", 1)
    spec = MomentSpec("U", (1, 1, 2), (1, 2, 2), (1, 2, 1), (2, 1, 2))
    trace = Trace()
    assert dispatch(spec, trace=trace) == integrate_direct(spec)
    assert trace.strategy == "parabolic"


def test_dispatch_uses_memo():
    spec = MomentSpec("O", (1, 1, 2, 2, 3, 3), (1, 2, 1, 3, 2, 3))
    dispatch(spec, trace=Trace())
    trace = Trace()
    dispatch(MomentSpec("O", (4, 4, 2, 2, 3, 3), (1, 2, 1, 3, 2, 3)), trace=trace)
    assert trace.cache_hits >= 1 and trace.cache_misses == 0


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["U", "O", "Sp"]), st.integers(1, 4), st.integers(0, 10 ** 6), st.sampled_from([0, 1, 3, -1]))
def test_dispatch_equals_direct(group, n, seed, shift):
    dim = max(1, n + shift)
    spec = random_spec(random.Random(seed), group, n, min(dim, 3))
    assert dispatch(spec, dim) == integrate_direct(spec, dim)
    assert dispatch(spec) == integrate_direct(spec)


def test_per_value_classes_of_reduction_example():
    from haarint.optimizer import _classes_for_value

    # J value 1 sits under I labels (1,1,2,2,2,3); J value 2 under (1,1,2,3)
    assert _classes_for_value((1, 1, 2, 2, 2, 3)) == {
        ((1, 1), (2, 2), (2, 3)): 3,
        ((1, 2), (1, 2), (2, 3)): 6,
        ((1, 2), (1, 3), (2, 2)): 6,
    }
    assert _classes_for_value((1, 1, 2, 3)) == {((1, 1), (2, 3)): 1, ((1, 2), (1, 3)): 2}


@pytest.mark.parametrize("J0,J1", [
    ((1, 1, 2), (7, 4, 7)),
    ((1, 1, 2, 2), (3, 5, 5, 3)),
    ((1, 1, 1, 2), (2, 9, 9, 9)),
    ((1, 2, 3, 3), (4, 4, 1, 2)),
])
def test_mirrored_moments_depend_only_on_column_multiplicities(J0, J1):
    # distinct rows, conjugated side equal to the plain side
    n = len(J0)
    I = tuple(range(1, n + 1))
    a = MomentSpec("U", I, J0, I, J0)
    b = MomentSpec("U", I, J1, I, J1)
    assert graph_key(a) == graph_key(b)
    assert integrate_direct(a) == integrate_direct(b)
