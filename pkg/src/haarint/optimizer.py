"""Faster evaluation of moments: normalization, list reductions, memo keys.

Every strategy here produces the same signed counts ``{type: count}`` that
the direct double sum would, so the result is ``Σ count(λ) W(λ)`` against
the same Weingarten table.  Counts do not depend on ``d``; they are memoized
under a canonical graph key of the reduced index lists.

Strategies tried by :func:`dispatch` in order:

``zero``                structural vanishing, no table is requested
``one_row``             O with one side constant
``independent_blocks``  O whose J-blocks use pairwise disjoint values
``parabolic``           U with a large stabilizer product
``unitary_reduction``   U list reduction, memo on directed multigraphs
``orthogonal_reduction`` O list reduction, memo on loopy multigraphs
``direct``              everything else (Sp)
"""
from __future__ import annotations

import itertools
import threading
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Hashable, Iterable, Mapping, Sequence

from .combinatorics import (
    Partition,
    cycle_type,
    double_factorial,
    matching_coset_type,
    matchings_of,
    multiplicity_partition,
    partitions_of,
    young_predecessors,
    z_of,
)
from .integrator import (
    MomentSpec,
    StabilizerCosets,
    Trace,
    _guard,
    check_indices,
    contract,
    direct_type_counts,
    request_table,
    structural_zero,
)
from .ratfunc import ONE, ZERO, RationalFunction
from .symfun import character_table, dimension, hook_product, principal_specialization
from .weingarten import DEFAULT_MAX_N, build_table, normalize_dim


@dataclass
class OptimizerConfig:
    """Tunable knobs.

    ``parabolic_threshold``: use double-coset enumeration for U once
    ``|S_I|·|S_J|`` exceeds this many pairs.
    ``memo_capacity``: entries kept by the class-count LRU memo.
    """

    parabolic_threshold: int = 20000
    memo_capacity: int = 4096


config = OptimizerConfig()


class NotApplicable(Exception):
    """A specialized formula does not apply to the given moment."""


# ---------------------------------------------------------------- memo


class LRUMemo:
    """Bounded get-or-compute cache; each key is computed at most once at a time."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self._key_locks: dict = {}
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable, compute, trace: Trace | None = None):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                if trace is not None:
                    trace.cache_hits += 1
                return self._data[key]
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            with self._lock:
                if key in self._data:
                    self.hits += 1
                    if trace is not None:
                        trace.cache_hits += 1
                    return self._data[key]
            value = compute()
            with self._lock:
                self.misses += 1
                if trace is not None:
                    trace.cache_misses += 1
                self._data[key] = value
                self._data.move_to_end(key)
                while len(self._data) > max(self.capacity, 1):
                    self._data.popitem(last=False)
                self._key_locks.pop(key, None)
            return value

    def __len__(self):
        return len(self._data)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0


memo = LRUMemo(config.memo_capacity)


# ------------------------------------------------------- normalization


def _relabel(values: Sequence) -> dict:
    """Map values to 1, 2, ... by decreasing multiplicity, then first occurrence."""
    counts = Counter(values)
    first = {}
    for k, v in enumerate(values):
        first.setdefault(v, k)
    order = sorted(counts, key=lambda v: (-counts[v], first[v]))
    return {v: r + 1 for r, v in enumerate(order)}


def _sorted_pairs(rows: Sequence, cols: Sequence) -> tuple[tuple, tuple]:
    pairs = sorted(zip(rows, cols))
    return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)


def _blocks(I: Sequence, J: Sequence) -> list[tuple]:
    out: dict = {}
    for i, j in zip(I, J):
        out.setdefault(i, []).append(j)
    return [tuple(out[k]) for k in sorted(out)]


@dataclass(frozen=True)
class NormalizedMoment:
    """Canonical form of a moment with the same integral.

    ``lam`` is the multiplicity partition of ``I``; ``blocks[k]`` is the part
    of ``J`` sitting under the ``k``-th value of ``I`` and ``mus[k]`` its
    multiplicity partition.  ``swapped`` records an O-side I/J exchange.
    """

    spec: MomentSpec
    lam: Partition
    blocks: tuple
    mus: tuple
    swapped: bool = False


def _prefix_key(lam: Partition, mu: Partition) -> tuple:
    k = 0
    while k < max(len(lam), len(mu)):
        a = lam[k] if k < len(lam) else 0
        b = mu[k] if k < len(mu) else 0
        if a < b:
            break
        k += 1
    return (k, tuple(lam))


def _normalize_pair(I: Sequence, J: Sequence) -> tuple[tuple, tuple]:
    rel = _relabel(I)
    I, J = _sorted_pairs([rel[x] for x in I], J)
    rel = _relabel(J)
    return _sorted_pairs(I, [rel[x] for x in J])


def normalize(spec: MomentSpec) -> NormalizedMoment:
    """Relabel values and reorder factors without changing the integral.

    ``I`` is relabeled to ``(1^{λ_1}, 2^{λ_2}, ...)``; factors are sorted
    by ``(i, j)``; ``J`` is relabeled by multiplicity then first occurrence.
    For ``U`` the conjugated lists use the same relabelings.  For ``O`` the
    roles of ``I`` and ``J`` are exchanged when that makes the prefix on
    which ``λ_i >= μ_i`` strictly longer, ties going to the lexicographically
    larger ``λ``.  ``Sp`` factors are only sorted (the alphabet ``±k`` is
    not freely relabelable).
    """
    swapped = False
    if spec.group == "Sp":
        I, J = _sorted_pairs(spec.I, spec.J)
        out = MomentSpec("Sp", I, J)
    elif spec.group == "O":
        I, J = _normalize_pair(spec.I, spec.J)
        if I:
            here = _prefix_key(multiplicity_partition(I), multiplicity_partition(J))
            there = _prefix_key(multiplicity_partition(J), multiplicity_partition(I))
            if there > here:
                I, J = _normalize_pair(J, I)
                swapped = True
        out = MomentSpec("O", I, J)
    else:
        rel_i = _relabel(spec.I)
        known = set(rel_i)
        extra = [v for v in dict.fromkeys(spec.Ip) if v not in known]
        for k, v in enumerate(extra):
            rel_i[v] = len(known) + k + 1
        I, J = _sorted_pairs([rel_i[x] for x in spec.I], spec.J)
        Ip, Jp = _sorted_pairs([rel_i[x] for x in spec.Ip], spec.Jp)
        rel_j = _relabel(J)
        known = set(rel_j)
        extra = [v for v in dict.fromkeys(Jp) if v not in known]
        for k, v in enumerate(extra):
            rel_j[v] = len(known) + k + 1
        I, J = _sorted_pairs(I, [rel_j[x] for x in J])
        Ip, Jp = _sorted_pairs(Ip, [rel_j[x] for x in Jp])
        out = MomentSpec("U", I, J, Ip, Jp)
    blocks = tuple(_blocks(out.I, out.J))
    return NormalizedMoment(
        out,
        multiplicity_partition(out.I),
        blocks,
        tuple(multiplicity_partition(b) for b in blocks),
        swapped,
    )


# ----------------------------------------------------- canonical graphs


def _components(vertices, edges) -> list[tuple[list, list]]:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    groups: dict = {}
    for v in vertices:
        groups.setdefault(find(v), ([], []))[0].append(v)
    for e in edges:
        groups[find(e[0])][1].append(e)
    return list(groups.values())


def _refine(vertices, edges, directed: bool) -> dict:
    """Color refinement; returns vertex -> canonical color index."""
    color = {v: 0 for v in vertices}
    while True:
        sig = {}
        for v in vertices:
            out_n = sorted(color[b] for a, b in edges if a == v)
            in_n = sorted(color[a] for a, b in edges if b == v)
            loops = sum(1 for a, b in edges if a == b == v)
            if directed:
                sig[v] = (color[v], loops, tuple(out_n), tuple(in_n))
            else:
                sig[v] = (color[v], loops, tuple(sorted(out_n + in_n)))
        ranks = {s: r for r, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in vertices}
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new


def _canonical_component(vertices, edges, directed: bool) -> tuple:
    color = _refine(vertices, edges, directed)
    cells = [sorted(v for v in vertices if color[v] == c) for c in sorted(set(color.values()))]
    best = None
    for choice in itertools.product(*(itertools.permutations(cell) for cell in cells)):
        label = {}
        for v in itertools.chain.from_iterable(choice):
            label[v] = len(label)
        if directed:
            image = tuple(sorted((label[a], label[b]) for a, b in edges))
        else:
            image = tuple(sorted(tuple(sorted((label[a], label[b]))) for a, b in edges))
        if best is None or image < best:
            best = image
    return (len(vertices), best)


def canonical_multigraph(edges: Iterable[tuple], directed: bool) -> tuple:
    """Isomorphism-invariant key of a multigraph given by its edge list."""
    edges = [tuple(e) for e in edges]
    vertices = sorted({x for e in edges for x in e})
    comps = [_canonical_component(vs, es, directed) for vs, es in _components(vertices, edges)]
    return tuple(sorted(comps))


def _is_standard_pairs(J: Sequence) -> bool:
    if len(J) % 2:
        return False
    firsts = [J[2 * k] for k in range(len(J) // 2)]
    return all(J[2 * k] == J[2 * k + 1] for k in range(len(J) // 2)) and len(set(firsts)) == len(firsts)


def _aligned_unitary(spec: MomentSpec) -> tuple[tuple, tuple]:
    """For distinct ``I``: reorder conjugated factors so ``I' = I``; return ``(J, J'_aligned)``."""
    where = {v: p for p, v in enumerate(spec.Ip)}
    return spec.J, tuple(spec.Jp[where[v]] for v in spec.I)


def graph_key(spec) -> tuple:
    """Memo key of a reduced moment.

    ``U`` (``I`` all distinct): directed multigraph on the ``J`` values with
    one edge ``j'_k -> j_k`` per aligned factor pair.  ``O`` (``J`` made of
    distinct consecutive pairs): multigraph on the ``I`` values with one
    edge per pair block ``(i_{2k-1}, i_{2k})``, loops allowed.
    """
    if isinstance(spec, NormalizedMoment):
        spec = spec.spec
    if spec.group == "U":
        if len(set(spec.I)) != len(spec.I) or set(spec.I) != set(spec.Ip):
            raise ValueError("unitary graph key needs distinct I with I' a rearrangement of I")
        J, Jp = _aligned_unitary(spec)
        return ("U", len(J), canonical_multigraph(zip(Jp, J), directed=True))
    if spec.group == "O":
        if not _is_standard_pairs(spec.J):
            raise ValueError("orthogonal graph key needs J reduced to distinct consecutive pairs")
        I = spec.I
        edges = [(I[2 * k], I[2 * k + 1]) for k in range(len(I) // 2)]
        return ("O", len(I) // 2, canonical_multigraph(edges, directed=False))
    raise ValueError("graph keys are defined for U and O only")


def _spec_from_key(key: tuple) -> MomentSpec:
    group, n, comps = key
    edges = []
    offset = 0
    for size, comp_edges in comps:
        edges.extend((a + offset + 1, b + offset + 1) for a, b in comp_edges)
        offset += size
    if group == "U":
        Jp = [a for a, _ in edges]
        J = [b for _, b in edges]
        I = list(range(1, n + 1))
        return MomentSpec("U", I, J, I, Jp)
    I = [x for e in edges for x in e]
    J = [k // 2 + 1 for k in range(2 * n)]
    return MomentSpec("O", I, J)


def counts_for_key(key: tuple, trace: Trace | None = None) -> Counter:
    """Type counts of the canonical representative of ``key`` (memoized)."""
    return memo.get(key, lambda: direct_type_counts(_spec_from_key(key)), trace)


# ------------------------------------------------ coset class counting


@dataclass(frozen=True)
class CosetClassCounts:
    """Number of pairings per coset type of ``n``."""

    n: int
    counts: Mapping[Partition, int] = field(default_factory=dict)

    def __getitem__(self, lam) -> int:
        return self.counts.get(Partition(lam), 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def row(self) -> list[int]:
        """Values in the order of :func:`partitions_of` (``(n)`` first)."""
        return [self[lam] for lam in partitions_of(self.n)]


@lru_cache(maxsize=None)
def _coset_class(lam: Partition) -> int:
    if not lam:
        return 1
    return sum(w * _coset_class(mu) for mu, w in young_predecessors(lam))


def coset_class_sizes(n: int) -> CosetClassCounts:
    """``C(λ)``: matchings of ``2n`` points of coset type ``λ`` against a fixed one.

    Computed by the weighted Young-lattice recursion.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return CosetClassCounts(n, {lam: _coset_class(lam) for lam in partitions_of(n)})


def coset_class_closed_form(lam) -> Fraction:
    """``|H_n| / (2^{ℓ(λ)} z_λ)`` with ``|H_n| = 2^n n!``."""
    lam = Partition(lam)
    n = lam.weight
    return Fraction(2 ** n * factorial(n), 2 ** len(lam) * z_of(lam))


def list_class_counts(I: Sequence, trace: Trace | None = None) -> CosetClassCounts:
    """``C_I(λ)``: matchings fixing ``I`` by coset type against ``(1,1,2,2,...)``."""
    I = tuple(I)
    if len(I) % 2:
        raise ValueError("list length must be even")
    n = len(I) // 2
    spec = MomentSpec("O", I, [k // 2 + 1 for k in range(2 * n)])
    if structural_zero(spec):
        return CosetClassCounts(n, {})
    return CosetClassCounts(n, dict(counts_for_key(graph_key(spec), trace)))


def pair_class_counts(I: Sequence, J: Sequence, trace: Trace | None = None) -> CosetClassCounts:
    """``C_{I,J}(λ)`` assembled from the orthogonal list reduction."""
    spec = MomentSpec("O", I, J)
    total: Counter = Counter()
    if not structural_zero(spec):
        for rep in orthogonal_list_reduction(spec):
            for lam, c in list_class_counts(rep.I, trace).counts.items():
                total[lam] += rep.multiplicity * c
    return CosetClassCounts(len(I) // 2, dict(total))


# --------------------------------------------------- closed-form paths


def _matching_count(values: Sequence) -> int:
    """``Π (m_v - 1)!!``; zero when a value occurs an odd number of times."""
    out = 1
    for c in Counter(values).values():
        if c % 2:
            return 0
        out *= double_factorial(c - 1)
    return out


def one_row_counts(J: Sequence) -> Counter:
    J = tuple(J)
    prefactor = _matching_count(J)
    if not prefactor:
        return Counter()
    base = coset_class_sizes(len(J) // 2)
    return Counter({lam: prefactor * c for lam, c in base.counts.items()})


def one_row_integral(J: Sequence, n: int | None = None, d=None) -> RationalFunction:
    """``∫ g_{1 j_1} ... g_{1 j_2n} dO = Π(μ_i - 1)!! Σ_λ C(λ) W^O(λ)``."""
    J = tuple(J)
    if n is not None and len(J) != 2 * n:
        raise ValueError("J must have length 2n")
    if not J:
        return ONE
    if len(J) % 2:
        return ZERO
    counts = one_row_counts(J)
    if not counts:
        return ZERO
    return contract(counts, build_table("O", len(J) // 2, d))


def _convolve(parts: Sequence[CosetClassCounts]) -> Counter:
    acc: Counter = Counter({Partition(()): 1})
    for table in parts:
        nxt: Counter = Counter()
        for lam, a in acc.items():
            for mu, b in table.counts.items():
                nxt[Partition(sorted(lam + mu, reverse=True))] += a * b
        acc = nxt
    return acc


def independent_blocks_counts(spec: MomentSpec) -> Counter:
    """Counts for O moments whose J-blocks have pairwise disjoint value sets."""
    if spec.group != "O":
        raise NotApplicable("independent blocks apply to O only")
    blocks = _blocks(spec.I, spec.J)
    seen: set = set()
    for b in blocks:
        values = set(b)
        if values & seen:
            raise NotApplicable("J-blocks share a value")
        seen |= values
    prefactor = 1
    tables = []
    for b in blocks:
        c = _matching_count(b)
        if not c or len(b) % 2:
            return Counter()
        prefactor *= c
        tables.append(coset_class_sizes(len(b) // 2))
    return Counter({lam: prefactor * c for lam, c in _convolve(tables).items()})


def independent_blocks_integral(spec: MomentSpec, d=None) -> RationalFunction:
    """``Π_{i,j} (m_ij - 1)!! Σ Π_i C(λ_i) W^O(λ_1 ∪ ... ∪ λ_ℓ)``.

    Raises :class:`NotApplicable` when two J-blocks share a value.
    """
    counts = independent_blocks_counts(spec)
    if not counts:
        return ZERO
    return contract(counts, build_table("O", spec.n, d))


# --------------------------------------------------- list reductions


def unitary_list_reduction(spec: MomentSpec) -> list[MomentSpec]:
    """Split a U moment into moments whose ``I`` has distinct values.

    The first repeated value ``x`` of ``I`` at position ``k`` is matched in
    turn with each position ``p`` of ``I'`` carrying ``x``; both slots get a
    fresh value.  The integrals of the returned moments sum to the original.
    """
    if spec.group != "U":
        raise ValueError("unitary list reduction needs a U moment")
    if Counter(spec.I) != Counter(spec.Ip) or len(spec.I) != len(spec.Ip):
        return []
    out = []

    def go(I: list, Ip: list):
        seen: dict = {}
        for k, v in enumerate(I):
            if v in seen:
                break
            seen[v] = k
        else:
            out.append(MomentSpec("U", I, spec.J, Ip, spec.Jp))
            return
        k = seen[I[k]]
        fresh = max(I + Ip) + 1
        for p, v in enumerate(Ip):
            if v == I[k]:
                go(I[:k] + [fresh] + I[k + 1:], Ip[:p] + [fresh] + Ip[p + 1:])

    go(list(spec.I), list(spec.Ip))
    return out


@dataclass(frozen=True)
class ReducedList:
    """Representative ``I_σ`` (against ``J = (1,1,2,2,...)``) with class size."""

    I: tuple
    multiplicity: int
    pairs: tuple  # sorted label pairs of I_σ


def _pair_multiplicity(labels: Sequence, pairs: Sequence[tuple]) -> int:
    """Number of matchings of ``labels`` whose label-pair multiset is ``pairs``."""
    num = prod(factorial(c) for c in Counter(labels).values())
    den = 1
    for (a, b), e in Counter(pairs).items():
        den *= factorial(e) * (2 ** e if a == b else 1)
    return num // den


def _classes_for_value(labels: Sequence) -> dict:
    out = {}
    for m in matchings_of(range(len(labels))):
        key = tuple(sorted(tuple(sorted((labels[a], labels[b]))) for a, b in m))
        if key not in out:
            out[key] = _pair_multiplicity(labels, key)
    return out


def orthogonal_list_reduction(spec: MomentSpec) -> list[ReducedList]:
    """Group the matchings fixing ``J`` by the I-label pairs they join.

    Each class becomes one list ``I_σ`` with ``J`` reduced to
    ``(1,1,2,2,...,n,n)``; ``C_{I,J}(λ) = Σ m_σ C_{I_σ}(λ)``.
    """
    if spec.group != "O":
        raise ValueError("orthogonal list reduction needs an O moment")
    positions: dict = {}
    for k, j in enumerate(spec.J):
        positions.setdefault(j, []).append(k)
    per_value = []
    for j in sorted(positions):
        labels = [spec.I[k] for k in positions[j]]
        if len(labels) % 2:
            return []
        per_value.append(_classes_for_value(labels))
    merged: Counter = Counter()
    for combo in itertools.product(*(cls.items() for cls in per_value)):
        pairs = tuple(sorted(p for key, _ in combo for p in key))
        merged[pairs] += prod(m for _, m in combo)
    out = []
    for pairs in sorted(merged):
        I = tuple(x for p in pairs for x in p)
        out.append(ReducedList(I, merged[pairs], pairs))
    return out


# --------------------------------------------------- parabolic sums


def _stabilizer_order(labels: Sequence) -> int:
    return prod(factorial(c) for c in Counter(labels).values())


def parabolic_character_sums(row_labels: Sequence, col_labels: Sequence, gamma: Sequence[int]) -> Counter:
    """Cycle-type counts over ``{h γ h' : h ∈ S_row, h' ∈ S_col}``.

    ``S_row`` (``S_col``) permutes positions with equal ``row_labels``
    (``col_labels``); ``gamma`` is 1-based one-line and ``(hγh')(k) =
    h(γ(h'(k)))``.  Each element of the double coset arises ``Π N_pq!``
    times, ``N`` being its contingency table, so the enumeration runs over
    the double coset only.
    """
    n = len(gamma)
    g = [x - 1 for x in gamma]
    row = list(row_labels)
    col = list(col_labels)
    quota: Counter = Counter((row[g[k]], col[k]) for k in range(n))
    weight = prod(factorial(c) for c in quota.values())
    counts: Counter = Counter()
    image = [0] * n
    used = [False] * n

    def go(k: int):
        if k == n:
            counts[cycle_type([x + 1 for x in image])] += weight
            return
        q = col[k]
        for x in range(n):
            if not used[x] and quota[(row[x], q)] > 0:
                used[x] = True
                quota[(row[x], q)] -= 1
                image[k] = x
                go(k + 1)
                quota[(row[x], q)] += 1
                used[x] = False

    go(0)
    return counts


def character_route_integral(counts: Mapping[Partition, int], n: int, d=None) -> RationalFunction:
    """``Σ_λ χ_λ(1)^2/(n!^2 s_λ(1^d)) Σ_μ counts(μ) χ_λ(μ)`` (ℓ(λ) ≤ d if numeric)."""
    d = normalize_dim(d)
    chars = character_table(n)
    total = ZERO
    for lam in partitions_of(n):
        if d is not None and len(lam) > d:
            continue
        inner = sum(c * chars(lam, mu) for mu, c in counts.items())
        if not inner:
            continue
        spec = principal_specialization(lam, 1, d)
        coeff = RationalFunction.constant(Fraction(dimension(lam) ** 2 * hook_product(lam), factorial(n) ** 2))
        total = total + coeff * inner / spec
    return total


def _unitary_gamma(spec: MomentSpec) -> tuple[list[int], list]:
    """``γ = t_0 s_0^{-1}`` and the conjugated column labels ``J' ∘ γ``."""
    s0 = StabilizerCosets("U", spec.I, spec.Ip).base
    t0 = StabilizerCosets("U", spec.J, spec.Jp).base
    inv = [0] * len(s0)
    for k, x in enumerate(s0):
        inv[x] = k
    gamma = [t0[inv[k]] for k in range(len(s0))]
    return [x + 1 for x in gamma], [spec.Jp[x] for x in gamma]


def unitary_parabolic_counts(spec: MomentSpec) -> Counter:
    gamma, cols = _unitary_gamma(spec)
    return parabolic_character_sums(spec.Ip, cols, gamma)


# ------------------------------------------------------------ dispatch


def _unitary_counts(norm: NormalizedMoment, trace: Trace | None) -> tuple[str, Counter]:
    spec = norm.spec
    pairs = _stabilizer_order(spec.I) * _stabilizer_order(spec.J)
    if pairs > config.parabolic_threshold:
        return "parabolic", unitary_parabolic_counts(spec)
    total: Counter = Counter()
    leaves = unitary_list_reduction(spec)
    for leaf in leaves:
        key = graph_key(leaf)
        for lam, c in counts_for_key(key, trace).items():
            total[lam] += c
    if trace is not None:
        trace.note(f"unitary reduction: {len(leaves)} leaves", 1)
    return "unitary_reduction", total


def _orthogonal_counts(norm: NormalizedMoment, trace: Trace | None) -> tuple[str, Counter]:
    spec = norm.spec
    if len(set(spec.I)) == 1:
        return "one_row", one_row_counts(spec.J)
    try:
        counts = independent_blocks_counts(spec)
        return "independent_blocks", counts
    except NotApplicable:
        pass
    total: Counter = Counter()
    reps = orthogonal_list_reduction(spec)
    for rep in reps:
        for lam, c in counts_for_key(graph_key(MomentSpec("O", rep.I, _std(len(rep.I)))), trace).items():
            total[lam] += rep.multiplicity * c
        if trace is not None:
            trace.note(f"I_sigma={list(rep.I)} m={rep.multiplicity}", 2)
    if trace is not None:
        trace.note(f"orthogonal reduction: {len(reps)} classes", 1)
    return "orthogonal_reduction", total


def _std(size: int) -> list[int]:
    return [k // 2 + 1 for k in range(size)]


def dispatch(spec: MomentSpec, d=None, *, trace: Trace | None = None, max_n: int = DEFAULT_MAX_N) -> RationalFunction:
    """Evaluate one moment with the cheapest applicable strategy."""
    check_indices(spec, d)
    reason = structural_zero(spec)
    if reason:
        if trace is not None:
            trace.strategy = trace.strategy or "zero"
            trace.note(f"zero: {reason} [{spec.describe()}]")
        return ZERO
    if spec.n == 0:
        return ONE
    _guard(spec, max_n)
    norm = normalize(spec)
    if trace is not None:
        trace.note(f"normalized: {norm.spec.describe()}" + (" (I and J exchanged)" if norm.swapped else ""))
    if spec.group == "U":
        strategy, counts = _unitary_counts(norm, trace)
    elif spec.group == "O":
        strategy, counts = _orthogonal_counts(norm, trace)
    else:
        strategy, counts = "direct", direct_type_counts(norm.spec)
    if trace is not None:
        trace.strategy = trace.strategy or strategy
        shown = ", ".join(f"{lam}:{c}" for lam, c in sorted(counts.items(), reverse=True))
        trace.note(f"{strategy}: counts {{{shown}}}", 1)
    counts = {lam: c for lam, c in counts.items() if c}
    if not counts:
        return ZERO
    return contract(counts, request_table(spec.group, spec.n, d, trace, max_n))
