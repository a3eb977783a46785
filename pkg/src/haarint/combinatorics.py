"""Partitions, permutations, pair partitions and the type maps between them.

Conventions used throughout the package:

* Permutations are stored in one-line form with 1-based images, so
  ``Permutation((2, 3, 1))`` sends 1 -> 2, 2 -> 3, 3 -> 1.
* Composition applies the right factor first: ``(s * t)(k) == s(t(k))``.
* Partitions are dense (no trailing zeros); the empty partition ``()`` is a
  valid value of weight 0.
* ``partitions_of`` lists partitions in reverse lexicographic order, e.g.
  ``(5), (4,1), (3,2), (3,1,1), (2,2,1), (2,1,1,1), (1,1,1,1,1)``.
"""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import permutations, product
from math import factorial, prod
from typing import Iterable, Iterator, Sequence


class Partition(tuple):
    """An integer partition: a weakly decreasing tuple of positive ints."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        if parts and parts[-1] < 1:
            raise ValueError(f"parts must be positive: {parts}")
        return super().__new__(cls, parts)

    @classmethod
    def from_multiset(cls, values: Iterable[int]) -> "Partition":
        return cls(sorted(values, reverse=True))

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self))

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def doubled(self) -> "Partition":
        """``2λ = (2λ_1, 2λ_2, ...)``."""
        return Partition(2 * p for p in self)

    def repeated(self) -> "Partition":
        """``λ∪λ = (λ_1, λ_1, λ_2, λ_2, ...)``."""
        return Partition(p for p in self for _ in range(2))

    def boxes(self) -> Iterator[tuple[int, int]]:
        """Yield the 1-based (row, column) coordinates of the Young diagram."""
        for i, part in enumerate(self, start=1):
            for j in range(1, part + 1):
                yield i, j

    def __repr__(self) -> str:
        return "(" + ",".join(map(str, self)) + ")"


def as_partition(lam: Iterable[int]) -> Partition:
    return lam if isinstance(lam, Partition) else Partition(lam)


def conjugate(lam: Sequence[int]) -> Partition:
    lam = as_partition(lam)
    if not lam:
        return Partition()
    return Partition(sum(1 for p in lam if p > j) for j in range(lam[0]))


def z_of(lam: Sequence[int]) -> int:
    """Order of the centralizer of a permutation of cycle type ``lam``."""
    return prod(i ** m * factorial(m) for i, m in Counter(lam).items())


def dominance_leq(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """True iff ``mu <= lam`` in dominance order."""
    if sum(mu) != sum(lam):
        raise ValueError(f"weight mismatch: |{tuple(mu)}| != |{tuple(lam)}|")
    s_mu = s_lam = 0
    for k in range(max(len(mu), len(lam))):
        s_mu += mu[k] if k < len(mu) else 0
        s_lam += lam[k] if k < len(lam) else 0
        if s_mu > s_lam:
            return False
    return True


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        out.extend((first,) + rest for rest in _partitions(n - first, first))
    return tuple(out)


def partitions_of(n: int, max_length: int | None = None) -> list[Partition]:
    """All partitions of ``n`` in reverse lexicographic order.

    ``n == 0`` yields the single empty partition.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    return [
        Partition(p)
        for p in _partitions(n, n)
        if max_length is None or len(p) <= max_length
    ]


def remove_box(lam: Sequence[int], row: int) -> Partition:
    parts = list(lam)
    parts[row] -= 1
    if parts[row] == 0:
        parts.pop(row)
    return Partition(parts)


def young_predecessors(lam: Sequence[int]) -> list[tuple[Partition, int]]:
    """Partitions one box below ``lam`` with their weighted-lattice edge labels.

    The label of ``mu -> lam`` is ``2 * p * m_p(mu)`` where ``p`` is the
    length of the row of ``mu`` that grew, and 1 when a new row was started.
    """
    lam = as_partition(lam)
    out = []
    for r in range(len(lam)):
        if r + 1 < len(lam) and lam[r + 1] == lam[r]:
            continue  # not a removable corner
        mu = remove_box(lam, r)
        grown = lam[r] - 1
        weight = 1 if grown == 0 else 2 * grown * mu.count(grown)
        out.append((mu, weight))
    return out


def young_successors(mu: Sequence[int]) -> list[tuple[Partition, int]]:
    """Partitions one box above ``mu`` with their edge labels."""
    mu = as_partition(mu)
    out = []
    for r in range(len(mu) + 1):
        if r > 0 and mu[r - 1] == (mu[r] if r < len(mu) else 0):
            continue
        parts = list(mu) + [0]
        parts[r] += 1
        lam = Partition(p for p in parts if p)
        grown = parts[r] - 1
        weight = 1 if grown == 0 else 2 * grown * mu.count(grown)
        out.append((lam, weight))
    return out


class Permutation(tuple):
    """Bijection of ``{1..m}`` in one-line form."""

    def __new__(cls, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation in one-line form: {images}")
        return super().__new__(cls, images)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(range(1, m + 1))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], m: int) -> "Permutation":
        images = list(range(1, m + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a - 1] = b
        return cls(images)

    @property
    def size(self) -> int:
        return len(self)

    def __call__(self, k: int) -> int:
        return self[k - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if len(self) != len(other):
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(self[other[k] - 1] for k in range(len(other)))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for k, image in enumerate(self, start=1):
            inv[image - 1] = k
        return Permutation(inv)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * len(self)
        out = []
        for start in range(1, len(self) + 1):
            if seen[start - 1]:
                continue
            cyc = []
            k = start
            while not seen[k - 1]:
                seen[k - 1] = True
                cyc.append(k)
                k = self[k - 1]
            out.append(tuple(cyc))
        return out

    def sign(self) -> int:
        return permutation_sign(self)

    def __repr__(self) -> str:
        return f"Permutation({tuple(self)})"


def cycle_lengths(images: Sequence[int]) -> list[int]:
    """Cycle lengths of a one-line permutation with 1-based images."""
    m = len(images)
    seen = bytearray(m)
    out = []
    for start in range(m):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = 1
            k = images[k] - 1
            length += 1
        out.append(length)
    return out


def cycle_type(sigma: Sequence[int]) -> Partition:
    return Partition(sorted(cycle_lengths(sigma), reverse=True))


def permutation_sign(sigma: Sequence[int]) -> int:
    return -1 if (len(sigma) - len(cycle_lengths(sigma))) % 2 else 1


def coset_type(sigma: Sequence[int]) -> Partition:
    """Coset type of ``sigma`` in S_2n with respect to the hyperoctahedral group.

    Vertices 1..2n carry red edges ``(2i-1, 2i)`` and blue edges
    ``(sigma(2i-1), sigma(2i))``; a component on 2k vertices gives part k.
    """
    m = len(sigma)
    if m % 2:
        raise ValueError("coset type needs a permutation of even degree")
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for i in range(0, m, 2):
        union(i, i + 1)
        union(sigma[i] - 1, sigma[i + 1] - 1)
    sizes = Counter(find(x) for x in range(m))
    for size in sizes.values():
        assert size % 2 == 0, "components of the red/blue graph have even size"
    return Partition(sorted((s // 2 for s in sizes.values()), reverse=True))


class PairPartition(tuple):
    """A perfect matching of ``{1..2n}`` stored as sorted pairs ``(a_i, b_i)``.

    Canonical order: ``a_i < b_i`` and ``a_1 < a_2 < ... < a_n``.
    """

    def __new__(cls, pairs: Iterable[Sequence[int]]):
        pairs = sorted(tuple(sorted(map(int, p))) for p in pairs)
        flat = sorted(x for p in pairs for x in p)
        if any(len(p) != 2 for p in pairs) or flat != list(range(1, len(flat) + 1)):
            raise ValueError(f"not a pair partition of {{1..2n}}: {pairs}")
        return super().__new__(cls, pairs)

    @classmethod
    def standard(cls, n: int) -> "PairPartition":
        return cls((2 * i + 1, 2 * i + 2) for i in range(n))

    @property
    def n(self) -> int:
        return len(self)

    def to_permutation(self) -> Permutation:
        return matching_to_permutation(self)

    def partner_map(self) -> list[int]:
        """0-based array ``partner[x]`` for positions ``x`` in 0..2n-1."""
        partner = [0] * (2 * len(self))
        for a, b in self:
            partner[a - 1] = b - 1
            partner[b - 1] = a - 1
        return partner


def _matchings(items: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k, other in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in _matchings(remaining):
            yield ((first, other),) + tail


def matchings_of(items: Iterable[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    """All perfect matchings of the sorted ``items``, lexicographically."""
    items = tuple(sorted(items))
    if len(items) % 2:
        return iter(())
    return _matchings(items)


def enumerate_matchings(n: int) -> list[PairPartition]:
    """All (2n-1)!! matchings of {1..2n}, lexicographic in one-line form."""
    return [PairPartition(m) for m in _matchings(tuple(range(1, 2 * n + 1)))]


def matching_to_permutation(m: Sequence[Sequence[int]]) -> Permutation:
    return Permutation(x for pair in PairPartition(m) for x in pair)


def double_factorial(k: int) -> int:
    """``k!!`` with the conventions ``0!! = (-1)!! = 1``."""
    return prod(range(k, 0, -2)) if k > 0 else 1


def matching_coset_type(partner_a: Sequence[int], partner_b: Sequence[int]) -> Partition:
    """Coset type of ``s^{-1} t`` for matchings s, t given as 0-based partner arrays.

    This is half the component sizes of the union graph of both matchings.
    """
    m = len(partner_a)
    seen = bytearray(m)
    parts = []
    for start in range(m):
        if seen[start]:
            continue
        size = 0
        x = start
        while True:
            seen[x] = 1
            y = partner_a[x]
            seen[y] = 1
            size += 1
            x = partner_b[y]
            if x == start:
                break
        parts.append(size)
    parts.sort(reverse=True)
    return Partition(parts)


def hyperoctahedral_group(n: int) -> Iterator[Permutation]:
    """Centralizer of ``(1 2)(3 4)...(2n-1 2n)`` in S_2n, all ``2^n n!`` elements."""
    for block_perm in permutations(range(n)):
        for flips in product((False, True), repeat=n):
            images = [0] * (2 * n)
            for i, target in enumerate(block_perm):
                lo, hi = 2 * target + 1, 2 * target + 2
                if flips[i]:
                    lo, hi = hi, lo
                images[2 * i], images[2 * i + 1] = lo, hi
            yield Permutation(images)


def permutations_of(m: int) -> Iterator[Permutation]:
    for p in permutations(range(1, m + 1)):
        yield Permutation(p)


def multiplicity_partition(values: Iterable) -> Partition:
    """Sorted multiplicities of the entries of a list."""
    return Partition(sorted(Counter(values).values(), reverse=True))
