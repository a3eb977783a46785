"""Symmetric-group characters, Jack polynomials and spherical functions.

Everything here is exact (ints and Fractions).  Jack polynomials are
computed in the power-sum basis by Gram-Schmidt against a linear extension
of dominance order, normalized to be monic in the monomial ``m_λ`` (the
``P`` normalization).  Spherical values are normalized to 1 on the identity
coset, so the Jack normalization never leaks downstream.

Symplectic sign convention: a twisted spherical function ``ω'`` satisfies
``ω'(k g k') = sgn(k) sgn(k') ω'(g)`` for ``k, k'`` in the hyperoctahedral
group, so ``sgn(g) ω'(g)`` depends only on the coset type of ``g``.  That
sign-free value is what :func:`spherical_value` returns for ``alpha=1/2``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from pathlib import Path
from typing import Callable, Hashable, Mapping

from .combinatorics import Partition, as_partition, partitions_of, z_of
from .ratfunc import RationalFunction

TABLE_FORMAT_VERSION = 1


class Memo:
    """Thread-safe get-or-build cache with exactly-once construction per key."""

    def __init__(self):
        self._values: dict = {}
        self._locks: dict = {}
        self._guard = threading.Lock()
        self.builds = 0

    def get(self, key: Hashable, build: Callable[[], object]):
        try:
            return self._values[key]
        except KeyError:
            pass
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._values:
                self._values[key] = build()
                self.builds += 1
        return self._values[key]

    def __contains__(self, key) -> bool:
        return key in self._values

    def put(self, key, value) -> None:
        with self._guard:
            self._values.setdefault(key, value)

    def items(self):
        return list(self._values.items())

    def clear(self) -> None:
        with self._guard:
            self._values.clear()
            self._locks.clear()


def _as_alpha(alpha) -> Fraction:
    return Fraction(alpha)


# ---------------------------------------------------------------- characters

def _beta_set(lam: tuple[int, ...]) -> tuple[int, ...]:
    ell = len(lam)
    return tuple(p + ell - 1 - i for i, p in enumerate(lam))


def _from_beta(beta) -> tuple[int, ...]:
    beta = sorted(beta, reverse=True)
    ell = len(beta)
    return tuple(p for p in (b - (ell - 1 - i) for i, b in enumerate(beta)) if p > 0)


@lru_cache(maxsize=None)
def _mn(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not lam else 0
    r, rest = mu[0], mu[1:]
    beta = _beta_set(lam)
    occupied = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in occupied:
            continue
        height = sum(1 for c in beta if target < c < b)
        new = _from_beta([target if c == b else c for c in beta])
        total += (-1) ** height * _mn(new, rest)
    return total


def character(lam, mu) -> int:
    """Irreducible character ``χ_λ`` on the class of cycle type ``μ``."""
    lam, mu = as_partition(lam), as_partition(mu)
    if lam.weight != mu.weight:
        raise ValueError(f"weight mismatch: {lam} vs {mu}")
    return _mn(tuple(lam), tuple(mu))


def hook_product(lam) -> int:
    lam = as_partition(lam)
    conj = lam.conjugate()
    return prod(lam[i - 1] - j + conj[j - 1] - i + 1 for i, j in lam.boxes())


def dimension(lam) -> int:
    """``χ_λ(1) = n! / H(λ)``."""
    lam = as_partition(lam)
    return factorial(lam.weight) // hook_product(lam)


@dataclass(frozen=True)
class CharacterTable:
    n: int
    values: Mapping[tuple[Partition, Partition], int]

    def __call__(self, lam, mu) -> int:
        return self.values[as_partition(lam), as_partition(mu)]

    @property
    def partitions(self) -> list[Partition]:
        return partitions_of(self.n)


_char_tables = Memo()


def character_table(n: int) -> CharacterTable:
    def build():
        parts = partitions_of(n)
        return CharacterTable(n, {(a, b): character(a, b) for a in parts for b in parts})

    return _char_tables.get(n, build)


# ---------------------------------------------------- principal specialization

def principal_specialization(lam, alpha, m=None) -> RationalFunction:
    """``J_λ^{(α)}(1^m) = Π_{(i,j)∈λ} (m + α(j-1) - (i-1))``.

    ``m=None`` (or ``"d"``) keeps the number of variables symbolic.
    """
    lam = as_partition(lam)
    alpha = _as_alpha(alpha)
    if m is None or m == "d":
        out = RationalFunction.constant(1)
        for i, j in lam.boxes():
            out = out * RationalFunction.from_poly((alpha * (j - 1) - (i - 1), 1))
        return out
    value = prod((Fraction(m) + alpha * (j - 1) - (i - 1) for i, j in lam.boxes()), start=Fraction(1))
    return RationalFunction.constant(value)


def schur_at_one(lam, d=None) -> RationalFunction:
    """``s_λ(1^d)``."""
    return principal_specialization(lam, 1, d) / hook_product(lam)


# ------------------------------------------------------------ power sums

@dataclass(frozen=True)
class PowerSumExpansion:
    """``Σ_ρ c_ρ p_ρ`` over partitions ``ρ`` of a fixed degree."""

    degree: int
    coeffs: Mapping[Partition, Fraction] = field(default_factory=dict)

    def __getitem__(self, rho) -> Fraction:
        return self.coeffs.get(as_partition(rho), Fraction(0))

    def inner(self, other: "PowerSumExpansion", alpha) -> Fraction:
        """``<p_λ, p_μ>_α = α^{ℓ(λ)} z_λ δ_{λμ}`` extended bilinearly."""
        alpha = _as_alpha(alpha)
        return sum(
            (c * other[rho] * alpha ** len(rho) * z_of(rho) for rho, c in self.coeffs.items()),
            Fraction(0),
        )

    def __add__(self, other: "PowerSumExpansion") -> "PowerSumExpansion":
        keys = set(self.coeffs) | set(other.coeffs)
        return PowerSumExpansion(self.degree, _nonzero({k: self[k] + other[k] for k in keys}))

    def scale(self, c) -> "PowerSumExpansion":
        c = Fraction(c)
        return PowerSumExpansion(self.degree, _nonzero({k: c * v for k, v in self.coeffs.items()}))

    def evaluate(self, power_sum: Callable[[int], object]):
        """Substitute ``p_k -> power_sum(k)``."""
        return sum(c * prod((power_sum(k) for k in rho), start=1) for rho, c in self.coeffs.items())

    def to_monomial(self) -> dict[Partition, Fraction]:
        """Coefficients in the monomial basis."""
        trans = _p_to_m(self.degree)
        out: dict[Partition, Fraction] = {}
        for rho, c in self.coeffs.items():
            for lam, a in trans[rho].items():
                out[lam] = out.get(lam, Fraction(0)) + c * a
        return _nonzero(out)


def _nonzero(coeffs: dict) -> dict:
    return {k: v for k, v in coeffs.items() if v != 0}


def _count_fillings(mu: tuple[int, ...], lam: tuple[int, ...]) -> int:
    """Coefficient of ``x^λ`` in ``p_μ``: ways to drop parts of μ into rows of λ."""

    @lru_cache(maxsize=None)
    def go(k: int, remaining: tuple[int, ...]) -> int:
        if k == len(mu):
            return 1 if not any(remaining) else 0
        total = 0
        for r, room in enumerate(remaining):
            if room >= mu[k]:
                total += go(k + 1, remaining[:r] + (room - mu[k],) + remaining[r + 1:])
        return total

    return go(0, tuple(lam))


@lru_cache(maxsize=None)
def _p_to_m(n: int) -> dict[Partition, dict[Partition, Fraction]]:
    parts = partitions_of(n)
    return {
        mu: _nonzero({lam: Fraction(_count_fillings(mu, lam)) for lam in parts})
        for mu in parts
    }


@lru_cache(maxsize=None)
def _m_to_p(n: int) -> dict[Partition, dict[Partition, Fraction]]:
    """Inverse transition: ``m_λ = Σ_ρ c_ρ p_ρ``.  Exact, via sympy's QQ matrices."""
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    parts = partitions_of(n)
    trans = _p_to_m(n)
    rows = [[QQ(trans[mu].get(lam, 0)) for lam in parts] for mu in parts]
    inv = DomainMatrix(rows, (len(parts), len(parts)), QQ).inv().to_Matrix()
    # rows of inv indexed by λ (monomial), columns by μ (power sum)
    return {
        lam: _nonzero({mu: Fraction(int(inv[a, b].p), int(inv[a, b].q)) for b, mu in enumerate(parts)})
        for a, lam in enumerate(parts)
    }


def monomial_in_powersums(lam) -> PowerSumExpansion:
    lam = as_partition(lam)
    return PowerSumExpansion(lam.weight, _m_to_p(lam.weight)[lam])


_jack_tables = Memo()


def _build_jacks(n: int, alpha: Fraction) -> dict[Partition, PowerSumExpansion]:
    increasing = list(reversed(partitions_of(n)))  # lex order refines dominance
    done: list[tuple[PowerSumExpansion, Fraction]] = []
    out = {}
    for lam in increasing:
        vec = monomial_in_powersums(lam)
        for prev, norm in done:
            vec = vec + prev.scale(-vec.inner(prev, alpha) / norm)
        done.append((vec, vec.inner(vec, alpha)))
        out[lam] = vec
    return out


def jack_in_powersums(lam, alpha) -> PowerSumExpansion:
    """Jack polynomial ``P_λ^{(α)}`` (monic in ``m_λ``) in the power-sum basis."""
    lam = as_partition(lam)
    alpha = _as_alpha(alpha)
    table = _jack_tables.get((lam.weight, alpha), lambda: _build_jacks(lam.weight, alpha))
    return table[lam]


# ------------------------------------------------------- spherical functions

@dataclass(frozen=True)
class SphericalTable:
    n: int
    alpha: Fraction
    values: Mapping[tuple[Partition, Partition], Fraction]

    def __call__(self, lam, rho) -> Fraction:
        return self.values[as_partition(lam), as_partition(rho)]


def _spherical_weight(rho: Partition, alpha: Fraction) -> Fraction:
    # zonal: ω_λ(ρ) ∝ 2^{ℓ(ρ)} z_ρ [p_ρ]P_λ.  Twisted, sign-free (see module
    # docstring): ω̃_λ(ρ) ∝ (-1)^{n-ℓ(ρ)} z_ρ [p_ρ]P_λ^{(1/2)}.
    if alpha == 2:
        return Fraction(2) ** len(rho) * z_of(rho)
    if alpha == Fraction(1, 2):
        return (-1) ** (rho.weight - len(rho)) * Fraction(z_of(rho))
    raise ValueError(f"spherical functions are only defined here for alpha in (2, 1/2), got {alpha}")


def _build_spherical(n: int, alpha: Fraction) -> SphericalTable:
    parts = partitions_of(n)
    ones = Partition([1] * n)
    values = {}
    for lam in parts:
        jack = jack_in_powersums(lam, alpha)
        raw = {rho: jack[rho] * _spherical_weight(rho, alpha) for rho in parts}
        base = raw[ones]
        for rho in parts:
            values[lam, rho] = raw[rho] / base
    return SphericalTable(n, alpha, values)


_spherical_tables = Memo()


def spherical_table(n: int, alpha) -> SphericalTable:
    alpha = _as_alpha(alpha)
    return _spherical_tables.get((n, alpha), lambda: _build_spherical(n, alpha))


def spherical_value(lam, rho, alpha) -> Fraction:
    """Zonal (``alpha=2``) or sign-free twisted (``alpha=1/2``) spherical value.

    Normalized so the value on the identity coset ``(1^n)`` is 1.
    """
    lam, rho = as_partition(lam), as_partition(rho)
    if lam.weight != rho.weight:
        raise ValueError(f"weight mismatch: {lam} vs {rho}")
    return spherical_table(lam.weight, alpha)(lam, rho)


# ---------------------------------------------------------- on-disk tables

def _fmt_part(p) -> str:
    return ",".join(map(str, p)) or "0"


def _parse_part(s: str) -> Partition:
    s = s.strip()
    return Partition(()) if s in ("", "0") else Partition(int(x) for x in s.split(","))


def write_tables(directory) -> list[Path]:
    """Dump every character and spherical table built so far.

    Format (one file per table, UTF-8 text)::

        haarint-table v1
        kind spherical          # or: character
        n 3
        alpha 2                 # spherical only
        3 ; 2,1 ; -1/2          # λ ; μ ; value
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for n, table in _char_tables.items():
        path = directory / f"character_n{n}.txt"
        lines = [f"haarint-table v{TABLE_FORMAT_VERSION}", "kind character", f"n {n}"]
        lines += [f"{_fmt_part(a)} ; {_fmt_part(b)} ; {v}" for (a, b), v in table.values.items()]
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    for (n, alpha), table in _spherical_tables.items():
        tag = str(alpha).replace("/", "over")
        path = directory / f"spherical_n{n}_alpha{tag}.txt"
        lines = [f"haarint-table v{TABLE_FORMAT_VERSION}", "kind spherical", f"n {n}", f"alpha {alpha}"]
        lines += [f"{_fmt_part(a)} ; {_fmt_part(b)} ; {v}" for (a, b), v in table.values.items()]
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written


def read_table(path):
    """Parse one table file; returns a CharacterTable or SphericalTable."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if lines[0] != f"haarint-table v{TABLE_FORMAT_VERSION}":
        raise ValueError(f"{path}: unsupported table header {lines[0]!r}")
    header = {}
    body = []
    for ln in lines[1:]:
        if ";" in ln:
            body.append(ln)
        else:
            key, _, val = ln.partition(" ")
            header[key] = val
    entries = {}
    for ln in body:
        a, b, v = (s.strip() for s in ln.split(";"))
        entries[_parse_part(a), _parse_part(b)] = Fraction(v)
    n = int(header["n"])
    if header["kind"] == "character":
        return CharacterTable(n, {k: int(v) for k, v in entries.items()})
    if header["kind"] == "spherical":
        return SphericalTable(n, Fraction(header["alpha"]), entries)
    raise ValueError(f"{path}: unknown table kind {header['kind']!r}")


def load_tables(directory) -> int:
    """Seed the in-memory caches from ``directory``; returns tables loaded."""
    directory = Path(directory)
    if not directory.is_dir():
        return 0
    count = 0
    for path in sorted(directory.glob("*.txt")):
        try:
            table = read_table(path)
        except (ValueError, KeyError, IndexError):
            continue
        if isinstance(table, CharacterTable):
            _char_tables.put(table.n, table)
        elif isinstance(table, SphericalTable):
            _spherical_tables.put((table.n, table.alpha), table)
        else:
            continue
        count += 1
    return count
