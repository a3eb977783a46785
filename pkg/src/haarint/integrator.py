"""Haar moments of monomials in matrix entries, by the Weingarten double sum.

External model of a monomial:

* ``U``: ``g[i_1,j_1]...g[i_n,j_n] * conj(g[i'_1,j'_1])...conj(g[i'_m,j'_m])``
  given as separate lists ``I, J, Ip, Jp``.
* ``O``: ``g[i_1,j_1]...g[i_2n,j_2n]`` given as ``I, J``.
* ``Sp``: the same for ``Sp(2d)`` with indices in ``±1..±d``.  Index ``k``
  labels row/column ``k`` and ``-k`` labels row/column ``d + k`` of the
  standard embedding ``[[A, -conj(B)], [B, conj(A)]]``.

Unitary pairings are bijections ``σ`` with ``i_k = i'_{σ(k)}`` (1-based
one-line permutations).  Orthogonal and symplectic pairings are perfect
matchings of the positions.  For a matching ``{a < b}`` the symplectic
``δ`` requires ``i_a = -i_b`` and contributes ``-1`` when ``i_a < 0``; each
matching additionally carries the sign of its one-line permutation
``a_1 b_1 a_2 b_2 ...`` (see :mod:`haarint.weingarten`).

Symbolic ``d`` (``None``) means the result is valid for every ``d >= n``.
A numeric ``d`` uses the truncated (pseudo-inverse) Weingarten table.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .combinatorics import (
    Partition,
    cycle_type,
    double_factorial,
    matching_coset_type,
    matchings_of,
    permutation_sign,
)
from .parsing import Entry, parse_expression
from .ratfunc import ONE, ZERO, RationalFunction
from .weingarten import (
    DEFAULT_MAX_N,
    ResourceLimitError,
    WeingartenTable,
    build_table,
    normalize_dim,
    normalize_group,
)


@dataclass(frozen=True)
class MomentSpec:
    """One monomial: group tag plus its index lists."""

    group: str
    I: tuple
    J: tuple
    Ip: tuple = ()
    Jp: tuple = ()

    def __post_init__(self):
        group = normalize_group(self.group)
        object.__setattr__(self, "group", group)
        for name in ("I", "J", "Ip", "Jp"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        if len(self.I) != len(self.J) or len(self.Ip) != len(self.Jp):
            raise ValueError("row and column index lists must have equal length")
        entries = self.I + self.J + self.Ip + self.Jp
        if group == "Sp":
            if any(x == 0 for x in entries):
                raise ValueError("symplectic indices must be nonzero (alphabet ±1..±d)")
        elif any(x < 1 for x in entries):
            raise ValueError(f"{group} indices must be positive")
        if group != "U" and self.Ip:
            raise ValueError(f"conjugated entries are only allowed for U, not {group}")

    @classmethod
    def from_entries(cls, group: str, entries: Iterable[Entry]) -> "MomentSpec":
        entries = list(entries)
        plain = [e for e in entries if not e.conj]
        conj = [e for e in entries if e.conj]
        return cls(
            group,
            [e.i for e in plain],
            [e.j for e in plain],
            [e.i for e in conj],
            [e.j for e in conj],
        )

    @property
    def degree(self) -> int:
        return len(self.I) + len(self.Ip)

    @property
    def n(self) -> int:
        """Size of the Weingarten argument (0 when the moment is trivially 1)."""
        return len(self.I) if self.group == "U" else len(self.I) // 2

    def max_index(self) -> int:
        return max((abs(x) for x in self.I + self.J + self.Ip + self.Jp), default=0)

    def describe(self) -> str:
        out = f"{self.group} I={list(self.I)} J={list(self.J)}"
        if self.group == "U":
            out += f" I'={list(self.Ip)} J'={list(self.Jp)}"
        return out


@dataclass
class Trace:
    """Record of how an integral was evaluated.

    ``tables`` lists every Weingarten table requested as
    ``(group, n, dim)``; ``steps`` holds indented free-text lines.
    """

    strategy: str | None = None
    tables: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    cache_hits: int = 0
    cache_misses: int = 0

    def note(self, text: str, depth: int = 0) -> None:
        self.steps.append("  " * depth + text)

    def render(self) -> str:
        lines = [f"strategy: {self.strategy or 'none'}"]
        for group, n, dim in self.tables:
            lines.append(f"table: {group} n={n} d={'d' if dim is None else dim}")
        lines.append(f"memo: {self.cache_hits} hits, {self.cache_misses} misses")
        lines.extend(self.steps)
        return "\n".join(lines)


def check_indices(spec: MomentSpec, d) -> None:
    """Reject indices outside the alphabet of a numeric dimension."""
    d = normalize_dim(d)
    if d is not None and spec.max_index() > d:
        raise ValueError(f"index {spec.max_index()} out of range for d = {d}")


def structural_zero(spec: MomentSpec) -> str | None:
    """Reason the integral vanishes for combinatorial reasons, else None."""
    if spec.group == "U":
        if len(spec.I) != len(spec.Ip):
            return "unequal numbers of plain and conjugated entries"
        if Counter(spec.I) != Counter(spec.Ip) or Counter(spec.J) != Counter(spec.Jp):
            return "value multisets of plain and conjugated indices differ"
        return None
    if len(spec.I) % 2:
        return "odd degree"
    for side in (spec.I, spec.J):
        counts = Counter(side)
        if spec.group == "O":
            if any(c % 2 for c in counts.values()):
                return "a value occurs an odd number of times"
        elif any(counts[v] != counts[-v] for v in counts):
            return "values v and -v occur unequally often"
    return None


def delta(I: Sequence, sigma, group: str) -> int:
    """``δ_I(σ)`` for a matching ``σ`` of the positions of ``I``.

    For ``U`` the list is interleaved ``(i_1, i'_1, i_2, i'_2, ...)`` and each
    pair must join a plain (odd) position to a conjugated (even) one.
    """
    group = normalize_group(group)
    sign = 1
    for a, b in sigma:
        a, b = min(a, b), max(a, b)
        x, y = I[a - 1], I[b - 1]
        if group == "Sp":
            if x != -y:
                return 0
            if x < 0:
                sign = -sign
        else:
            if x != y:
                return 0
            if group == "U" and (a - b) % 2 == 0:
                return 0
    return sign


def _positions(values: Sequence) -> dict:
    out: dict = {}
    for k, v in enumerate(values):
        out.setdefault(v, []).append(k)
    return out


def _matching_sign(partner: Sequence[int]) -> int:
    line = []
    for a, b in enumerate(partner):
        if a < b:
            line.extend((a, b))
    return permutation_sign([x + 1 for x in line])


class StabilizerCosets:
    """All pairings with nonzero ``δ`` for one index list.

    Iteration yields 0-based structures: for ``U`` a tuple ``s`` with
    ``I[k] = Ip[s[k]]``; for ``O``/``Sp`` a partner map (``partner[a] = b``).
    :meth:`signed` pairs each element with its total sign (``δ`` times the
    matching sign for ``Sp``, else 1).
    """

    def __init__(self, group: str, I: Sequence, Ip: Sequence | None = None):
        self.group = normalize_group(group)
        self.I = tuple(I)
        self.Ip = tuple(Ip) if Ip is not None else None
        if self.group == "U" and self.Ip is None:
            raise ValueError("unitary stabilizer cosets need both I and I'")

    def __len__(self) -> int:
        counts = Counter(self.I)
        total = 1
        if self.group == "U":
            if counts != Counter(self.Ip):
                return 0
            for c in counts.values():
                total *= _factorial(c)
        elif self.group == "O":
            for c in counts.values():
                if c % 2:
                    return 0
                total *= double_factorial(c - 1)
        else:
            for v, c in counts.items():
                if counts[-v] != c:
                    return 0
                if v > 0:
                    total *= _factorial(c)
        return total

    def __iter__(self) -> Iterator[tuple]:
        if self.group == "U":
            yield from self._unitary()
        elif self.group == "O":
            yield from self._orthogonal()
        else:
            yield from self._symplectic()

    def signed(self) -> Iterator[tuple[tuple, int]]:
        for s in self:
            if self.group == "Sp":
                yield s, delta(self.I, _partner_pairs(s), "Sp") * _matching_sign(s)
            else:
                yield s, 1

    @property
    def base(self):
        """First element of the enumeration (``σ_I``), or None if empty."""
        return next(iter(self), None)

    def _unitary(self):
        pos, posp = _positions(self.I), _positions(self.Ip)
        if {v: len(p) for v, p in pos.items()} != {v: len(p) for v, p in posp.items()}:
            return
        values = sorted(pos)
        choices = [list(itertools.permutations(posp[v])) for v in values]
        n = len(self.I)
        for combo in itertools.product(*choices):
            s = [0] * n
            for v, targets in zip(values, combo):
                for src, dst in zip(pos[v], targets):
                    s[src] = dst
            yield tuple(s)

    def _orthogonal(self):
        pos = _positions(self.I)
        if any(len(p) % 2 for p in pos.values()):
            return
        blocks = [list(matchings_of(p)) for p in pos.values()]
        yield from _assemble(blocks, len(self.I))

    def _symplectic(self):
        pos = _positions(self.I)
        blocks = []
        for v, p in pos.items():
            if v < 0:
                continue
            q = pos.get(-v, [])
            if len(q) != len(p):
                return
            blocks.append([tuple(zip(p, perm)) for perm in itertools.permutations(q)])
        if any(-v not in pos for v in pos if v < 0):
            return
        yield from _assemble(blocks, len(self.I))


def _assemble(blocks, size):
    for combo in itertools.product(*blocks):
        partner = [0] * size
        for pairs in combo:
            for a, b in pairs:
                partner[a], partner[b] = b, a
        yield tuple(partner)


def _partner_pairs(partner: Sequence[int]) -> list[tuple[int, int]]:
    return [(a + 1, b + 1) for a, b in enumerate(partner) if a < b]


def _factorial(k: int) -> int:
    out = 1
    for x in range(2, k + 1):
        out *= x
    return out


def stabilizer_cosets(I: Sequence, group: str, Ip: Sequence | None = None) -> StabilizerCosets:
    return StabilizerCosets(group, I, Ip)


def _unitary_type(s: Sequence[int], t: Sequence[int]) -> Partition:
    # σ⁻¹τ and τσ⁻¹ are conjugate, so either gives the class
    inv = [0] * len(s)
    for k, x in enumerate(s):
        inv[x] = k
    return cycle_type([inv[x] + 1 for x in t])


def direct_type_counts(spec: MomentSpec) -> Counter:
    """Signed number of pairing pairs ``(σ, τ)`` per cycle/coset type."""
    counts: Counter = Counter()
    if structural_zero(spec):
        return counts
    if spec.group == "U":
        left = list(StabilizerCosets("U", spec.I, spec.Ip))
        right = list(StabilizerCosets("U", spec.J, spec.Jp))
        for s in left:
            for t in right:
                counts[_unitary_type(s, t)] += 1
        return counts
    left = list(StabilizerCosets(spec.group, spec.I).signed())
    right = list(StabilizerCosets(spec.group, spec.J).signed())
    for s, sign_s in left:
        for t, sign_t in right:
            counts[matching_coset_type(s, t)] += sign_s * sign_t
    return Counter({k: v for k, v in counts.items() if v})


def request_table(group: str, n: int, d, trace: Trace | None = None, max_n: int = DEFAULT_MAX_N) -> WeingartenTable:
    if trace is not None:
        trace.tables.append((group, n, normalize_dim(d)))
    return build_table(group, n, d, max_n=max_n)


def contract(counts: Mapping[Partition, int], table: WeingartenTable) -> RationalFunction:
    """``Σ_λ counts[λ] W(λ)``."""
    total = ZERO
    for lam, c in counts.items():
        if c:
            total = total + c * table[lam]
    return total


def _guard(spec: MomentSpec, max_n: int) -> None:
    if spec.n > max_n:
        raise ResourceLimitError(f"moment of size n = {spec.n} exceeds max_n = {max_n}")


def integrate_direct(spec: MomentSpec, d=None, trace: Trace | None = None, max_n: int = DEFAULT_MAX_N) -> RationalFunction:
    """Plain double sum over both stabilizer cosets."""
    check_indices(spec, d)
    reason = structural_zero(spec)
    if reason:
        if trace is not None:
            trace.strategy = trace.strategy or "zero"
            trace.note(f"zero: {reason}")
        return ZERO
    if spec.n == 0:
        return ONE
    _guard(spec, max_n)
    if trace is not None:
        trace.strategy = trace.strategy or "direct"
    counts = direct_type_counts(spec)
    return contract(counts, request_table(spec.group, spec.n, d, trace, max_n))


def integrate_monomial(spec: MomentSpec, d=None, *, trace: Trace | None = None, optimize: bool = True,
                       max_n: int = DEFAULT_MAX_N) -> RationalFunction:
    """Haar integral of one monomial, as a reduced rational function of d."""
    if not optimize:
        return integrate_direct(spec, d, trace, max_n)
    from .optimizer import dispatch

    return dispatch(spec, d, trace=trace, max_n=max_n)


def integrate_polynomial(expr, group: str, d=None, *, trace: Trace | None = None, optimize: bool = True,
                         max_n: int = DEFAULT_MAX_N) -> RationalFunction:
    """Integral of a polynomial given as text or ``{monomial: coefficient}``."""
    group = normalize_group(group)
    if isinstance(expr, str):
        expr = parse_expression(expr)
    total = ZERO
    for monomial, coeff in expr.items():
        spec = MomentSpec.from_entries(group, monomial)
        value = integrate_monomial(spec, d, trace=trace, optimize=optimize, max_n=max_n)
        total = total + RationalFunction.constant(coeff) * value
    return total
