"""Weingarten functions of U(d), O(d) and Sp(2d) as exact rational functions.

``d`` is either ``None``/``"d"`` (symbolic, valid for ``d >= n``) or a
positive integer.  For an integer ``d < n`` the spectral sums keep only
partitions with at most ``d`` rows, which yields the pseudo-inverse of the
Gram matrix.

Symplectic convention.  ``weingarten_symplectic(ρ, d)`` is the sign-free
value ``w(ρ)``: the full Weingarten kernel on matchings ``s, t`` is
``sgn(s) sgn(t) w(coset_type(s^{-1} t))`` with ``sgn`` the sign of the
one-line permutation ``a_1 b_1 a_2 b_2 ...``.  The Jack polynomial in the
denominator is taken in ``d`` variables with an extra factor ``2^n``::

    w(ρ) = (2^n n!/(2n)!) Σ_λ χ_{λ∪λ}(1) ω̃_λ(ρ) / (2^n J_λ^{(1/2)}(1^d))

which is what inverting the symplectic Gram matrix produces.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Mapping

from .combinatorics import Partition, as_partition, partitions_of
from .ratfunc import RationalFunction
from .symfun import (
    Memo,
    character_table,
    dimension,
    hook_product,
    principal_specialization,
    spherical_table,
)

GROUPS = ("U", "O", "Sp")
DEFAULT_MAX_N = 8


class ResourceLimitError(RuntimeError):
    """Raised when a request exceeds a configured size bound."""


def normalize_group(group: str) -> str:
    key = str(group).strip().lower()
    for g in GROUPS:
        if key == g.lower():
            return g
    raise ValueError(f"unknown group {group!r}; expected one of {GROUPS}")


def normalize_dim(d) -> int | None:
    """``None`` for symbolic dimension, else a positive int."""
    if d is None or (isinstance(d, str) and d.strip().lower() == "d"):
        return None
    value = int(d)
    if value < 1:
        raise ValueError(f"dimension must be positive, got {d!r}")
    return value


def _spec(lam: Partition, alpha, d: int | None):
    """Principal specialization as a Fraction (numeric d) or RationalFunction."""
    if d is None:
        return principal_specialization(lam, alpha)
    return principal_specialization(lam, alpha, d).constant_value()


def _admissible(lam: Partition, d: int | None) -> bool:
    return d is None or len(lam) <= d


def _unitary_values(n: int, d: int | None) -> dict[Partition, object]:
    chars = character_table(n)
    parts = partitions_of(n)
    scale = Fraction(1, factorial(n) ** 2)
    out = {mu: 0 for mu in parts}
    for lam in parts:
        if not _admissible(lam, d):
            continue
        dim = dimension(lam)
        # χ(1)^2 / s_λ(1^d) = χ(1)^2 H(λ) / J^{(1)}_λ(1^d)
        weight = scale * dim * dim * hook_product(lam) / _spec(lam, 1, d)
        for mu in parts:
            out[mu] = out[mu] + weight * chars(lam, mu)
    return out


def _coset_values(n: int, d: int | None, alpha: Fraction) -> dict[Partition, object]:
    sph = spherical_table(n, alpha)
    parts = partitions_of(n)
    prefactor = Fraction(2 ** n * factorial(n), factorial(2 * n))
    out = {rho: 0 for rho in parts}
    for lam in parts:
        if not _admissible(lam, d):
            continue
        if alpha == 2:
            weight = prefactor * dimension(lam.doubled()) / _spec(lam, alpha, d)
        else:
            weight = prefactor * dimension(lam.repeated()) / (2 ** n * _spec(lam, alpha, d))
        for rho in parts:
            value = sph(lam, rho)
            if value:
                out[rho] = out[rho] + weight * value
    return out


@dataclass(frozen=True)
class WeingartenTable:
    """All Weingarten values for one (group, n, dimension)."""

    group: str
    n: int
    dim: int | None
    values: Mapping[Partition, RationalFunction]

    def __getitem__(self, lam) -> RationalFunction:
        return self.values[as_partition(lam)]

    def contributing(self) -> list[Partition]:
        """Partitions λ whose terms enter the spectral sum at this dimension."""
        return [lam for lam in partitions_of(self.n) if _admissible(lam, self.dim)]

    def to_text(self) -> str:
        """Serialize as::

            <group> <n> <dim or d>
            <partition> : <numerator coeffs> / <denominator coeffs>

        Coefficient lists are ascending in ``d`` and space separated.
        """
        lines = [f"{self.group} {self.n} {'d' if self.dim is None else self.dim}"]
        for lam in partitions_of(self.n):
            f = self.values[lam]
            num = " ".join(map(str, f.num)) or "0"
            den = " ".join(map(str, f.den))
            lines.append(f"{','.join(map(str, lam))} : {num} / {den}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WeingartenTable":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        group, n, dim = lines[0].split()
        values = {}
        for ln in lines[1:]:
            lam, _, rest = ln.partition(":")
            num, _, den = rest.partition("/")
            values[Partition(int(x) for x in lam.split(","))] = RationalFunction(
                [int(x) for x in num.split()], [int(x) for x in den.split()]
            )
        return cls(normalize_group(group), int(n), normalize_dim(dim), values)


def _compute_table(group: str, n: int, d: int | None) -> WeingartenTable:
    if group == "U":
        raw = _unitary_values(n, d)
    elif group == "O":
        raw = _coset_values(n, d, Fraction(2))
    else:
        raw = _coset_values(n, d, Fraction(1, 2))
    values = {lam: RationalFunction.coerce(v) for lam, v in raw.items()}
    return WeingartenTable(group, n, d, values)


_tables = Memo()


def build_table(group: str, n: int, d=None, *, max_n: int = DEFAULT_MAX_N) -> WeingartenTable:
    """Cached Weingarten table for ``group`` in degree ``n``."""
    group = normalize_group(group)
    d = normalize_dim(d)
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > max_n:
        raise ResourceLimitError(f"n = {n} exceeds the configured bound max_n = {max_n}")
    return _tables.get((group, n, d), lambda: _compute_table(group, n, d))


def table_builds() -> int:
    """Number of distinct tables constructed so far in this process."""
    return _tables.builds


def cached_tables() -> list[WeingartenTable]:
    return [table for _, table in _tables.items()]


def seed_table(table: WeingartenTable) -> None:
    """Insert an externally loaded table into the cache."""
    _tables.put((table.group, table.n, table.dim), table)


def _single(group: str, lam, d) -> RationalFunction:
    lam = as_partition(lam)
    return build_table(group, lam.weight, d, max_n=max(DEFAULT_MAX_N, lam.weight))[lam]


def weingarten_unitary(mu, d=None) -> RationalFunction:
    """``Wg^U`` on permutations of cycle type ``mu``."""
    return _single("U", mu, d)


def weingarten_orthogonal(rho, d=None) -> RationalFunction:
    """``Wg^O`` on matchings pairs of coset type ``rho``."""
    return _single("O", rho, d)


def weingarten_symplectic(rho, d=None) -> RationalFunction:
    """Sign-free ``Wg^Sp`` for ``Sp(2d)`` on coset type ``rho``."""
    return _single("Sp", rho, d)


def weingarten(group: str, lam, d=None) -> RationalFunction:
    return _single(normalize_group(group), lam, d)


def _table_path(directory: Path, table: WeingartenTable) -> Path:
    dim = "d" if table.dim is None else str(table.dim)
    return directory / f"weingarten_{table.group}_n{table.n}_{dim}.wg"


def save_tables(directory) -> list[Path]:
    """Write every cached table to ``directory`` in the text format."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for table in cached_tables():
        path = _table_path(directory, table)
        path.write_text(table.to_text())
        written.append(path)
    return written


def load_saved_tables(directory) -> int:
    """Seed the cache from ``*.wg`` files; unreadable files are skipped."""
    directory = Path(directory)
    if not directory.is_dir():
        return 0
    count = 0
    for path in sorted(directory.glob("weingarten_*.wg")):
        try:
            table = WeingartenTable.from_text(path.read_text())
        except (ValueError, IndexError, ZeroDivisionError):
            continue
        seed_table(table)
        count += 1
    return count
