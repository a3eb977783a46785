"""Independent checks: Gram matrices by brute-force contraction, exact
(pseudo-)inversion, exhaustive class counts and Monte Carlo Haar sampling.

Nothing here calls the spectral Weingarten formulas or the optimizer; the
point is to have a second route to every number.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .combinatorics import (
    Partition,
    coset_type,
    cycle_type,
    enumerate_matchings,
    hyperoctahedral_group,
    matching_coset_type,
    partitions_of,
    permutations_of,
)
from .ratfunc import RationalFunction
from .symfun import character
from .weingarten import ResourceLimitError, WeingartenTable, normalize_dim, normalize_group

GRAM_BUDGET = 2_000_000
CLASS_COUNT_BUDGET = 2_000_000
SPHERICAL_MAX_N = 4


# ------------------------------------------------------------ Gram matrices


@dataclass(frozen=True)
class GramMatrix:
    """``Φ`` indexed by ``reps`` (permutations for U, matchings for O/Sp).

    ``signs`` holds the matching sign of each representative for Sp (all 1
    otherwise) and ``types`` the cycle/coset type of each pair.
    """

    group: str
    n: int
    dim: int | None
    reps: list
    entries: list
    signs: list
    types: list


def _representatives(group: str, n: int):
    if group == "U":
        reps = list(permutations_of(n))
        partners = reps
        signs = [1] * len(reps)
    else:
        reps = list(enumerate_matchings(n))
        partners = [m.partner_map() for m in reps]
        signs = [m.to_permutation().sign() if group == "Sp" else 1 for m in reps]
    return reps, partners, signs


def _type(group: str, a, b) -> Partition:
    if group == "U":
        return cycle_type(a.inverse() * b)
    return matching_coset_type(a, b)


def _delta_vector(group: str, index: Sequence, partners: list) -> list[int]:
    out = []
    if group == "U":
        n = len(index) // 2
        plain, conj = index[:n], index[n:]
        for s in partners:
            out.append(int(all(plain[k] == conj[s(k + 1) - 1] for k in range(n))))
        return out
    for p in partners:
        value = 1
        for a, b in enumerate(p):
            if a > b:
                continue
            x, y = index[a], index[b]
            if group == "O":
                if x != y:
                    value = 0
                    break
            else:
                if x != -y:
                    value = 0
                    break
                if x < 0:
                    value = -value
        out.append(value)
    return out


def gram_matrix(group: str, n: int, d=None, *, budget: int = GRAM_BUDGET) -> GramMatrix:
    """``Φ(σ, τ) = Σ_I δ_I(σ) δ_I(τ)``.

    Numeric ``d`` sums over every index list (``d^{2n}`` for U/O, ``(2d)^{2n}``
    for Sp).  Symbolic ``d`` uses the closed pattern ``d^{#cycles}`` (U),
    ``d^{ℓ(ρ)}`` (O) or ``sgn sgn (-1)^n (-2d)^{ℓ(ρ)}`` (Sp), which the
    numeric contraction confirms in the test suite.
    """
    group = normalize_group(group)
    d = normalize_dim(d)
    reps, partners, signs = _representatives(group, n)
    size = len(reps)
    types = [[_type(group, partners[i], partners[j]) for j in range(size)] for i in range(size)]
    if d is None:
        x = RationalFunction.symbol()
        entries = []
        for i in range(size):
            row = []
            for j in range(size):
                ell = len(types[i][j])
                if group == "Sp":
                    row.append(signs[i] * signs[j] * (-1) ** n * (-2 * x) ** ell)
                else:
                    row.append(x ** ell)
            entries.append(row)
        return GramMatrix(group, n, None, reps, entries, signs, types)
    alphabet = list(range(1, d + 1))
    if group == "Sp":
        alphabet += [-v for v in alphabet]
    if len(alphabet) ** (2 * n) > budget:
        raise ResourceLimitError(f"Gram contraction needs {len(alphabet) ** (2 * n)} lists (budget {budget})")
    entries = [[0] * size for _ in range(size)]
    for index in itertools.product(alphabet, repeat=2 * n):
        vec = _delta_vector(group, index, partners)
        nz = [(k, v) for k, v in enumerate(vec) if v]
        for i, vi in nz:
            for j, vj in nz:
                entries[i][j] += vi * vj
    return GramMatrix(group, n, d, reps, entries, signs, types)


# -------------------------------------------------------- exact inversion


def _to_domain(rows) -> DomainMatrix:
    return DomainMatrix([[QQ(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in row] for row in rows],
                        (len(rows), len(rows[0])), QQ)


def _from_domain(m: DomainMatrix) -> list[list[Fraction]]:
    return [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in m.to_list()]


def pseudo_inverse(rows) -> list[list[Fraction]]:
    """Exact Moore–Penrose inverse via a full-rank factorization ``A = F G``."""
    A = _to_domain(rows)
    rref, pivots = A.rref()
    r = len(pivots)
    if r == 0:
        return [[Fraction(0)] * len(rows) for _ in rows[0]]
    F = A.extract(list(range(A.shape[0])), list(pivots))
    G = rref.extract(list(range(r)), list(range(A.shape[1])))
    Ft, Gt = F.transpose(), G.transpose()
    out = Gt * (G * Gt).inv() * (Ft * F).inv() * Ft
    return _from_domain(out)


def matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), 0 * a[0][0]) for j in range(len(b[0]))]
            for i in range(len(a))]


def _read_table(group: str, n: int, d, gram: GramMatrix, inverse) -> dict:
    """Weingarten values from the inverse, checking they depend only on type."""
    values: dict = {}
    for i in range(len(gram.reps)):
        for j in range(len(gram.reps)):
            lam = gram.types[i][j]
            v = inverse[i][j] * gram.signs[i] * gram.signs[j]
            if lam in values and values[lam] != v:
                raise AssertionError(f"inverse is not a class function at {lam}")
            values[lam] = v
    return values


def numeric_gram_inverse(group: str, n: int, d: int, *, budget: int = GRAM_BUDGET) -> dict:
    """``{type: Fraction}`` from the exact pseudo-inverse of the contracted Φ."""
    gram = gram_matrix(group, n, d, budget=budget)
    return _read_table(gram.group, n, d, gram, pseudo_inverse(gram.entries))


def _symbolic_gram_numeric(group: str, n: int, d: int) -> dict:
    """Invert the closed-pattern Φ at a numeric ``d`` (used for interpolation)."""
    gram = gram_matrix(group, n, None)
    rows = [[e(d) for e in row] for row in gram.entries]
    return _read_table(gram.group, n, d, gram, pseudo_inverse(rows))


def reconstruct_rational(points: Sequence[tuple[int, Fraction]], num_degree: int, den_degree: int) -> RationalFunction:
    """Exact ``p/q`` with ``deg p <= num_degree``, ``deg q <= den_degree`` through ``points``.

    Needs more than ``num_degree + den_degree + 1`` points; the surplus is
    used as a consistency check.
    """
    rows = []
    for x, y in points:
        x, y = Fraction(x), Fraction(y)
        rows.append([x ** k for k in range(num_degree + 1)] + [-y * x ** k for k in range(den_degree + 1)])
    kernel = _to_domain(rows).nullspace()
    basis = _from_domain(kernel)
    if not basis:
        raise ValueError("no rational function of the given degrees fits the data")
    vec = basis[0]
    f = RationalFunction.from_poly(vec[: num_degree + 1]) / RationalFunction.from_poly(vec[num_degree + 1:])
    for x, y in points:
        if f(x) != y:
            raise ValueError("rational reconstruction is inconsistent with the data")
    return f


def gram_inverse_weingarten(group: str, n: int, d=None, *, budget: int = GRAM_BUDGET) -> WeingartenTable:
    """Weingarten table obtained by inverting Φ exactly.

    Numeric ``d``: pseudo-inverse of the brute-force contracted Φ.
    Symbolic ``d``: invert the closed-pattern Φ at ``3n + 3`` integers
    ``d > n`` and reconstruct each value with degree bounds ``(n, 2n)``.
    """
    group = normalize_group(group)
    d = normalize_dim(d)
    if d is not None:
        raw = numeric_gram_inverse(group, n, d, budget=budget)
        return WeingartenTable(group, n, d, {lam: RationalFunction.constant(v) for lam, v in raw.items()})
    samples = [n + 1 + k for k in range(3 * n + 3)]
    evaluated = {x: _symbolic_gram_numeric(group, n, x) for x in samples}
    values = {}
    for lam in partitions_of(n):
        values[lam] = reconstruct_rational([(x, evaluated[x][lam]) for x in samples], n, 2 * n)
    return WeingartenTable(group, n, None, values)


def inverse_laws(group: str, n: int, d=None, table: WeingartenTable | None = None) -> dict:
    """Check ``ΦWΦ = Φ``, ``WΦW = W`` and (symbolic or d >= n) ``ΦW = 1``.

    ``W`` is assembled from ``table`` (default: the spectral one).
    """
    from .weingarten import build_table

    group = normalize_group(group)
    d = normalize_dim(d)
    table = table or build_table(group, n, d)
    gram = gram_matrix(group, n, d)
    size = len(gram.reps)
    W = [[table[gram.types[i][j]] * (gram.signs[i] * gram.signs[j]) for j in range(size)] for i in range(size)]
    if d is not None:
        W = [[w.constant_value() for w in row] for row in W]
    phi = gram.entries
    PW = matmul(phi, W)
    one = RationalFunction.constant(1) if d is None else Fraction(1)
    zero = one - one
    identity = [[one if i == j else zero for j in range(size)] for i in range(size)]
    return {
        "phi_w_phi": matmul(PW, phi) == phi,
        "w_phi_w": matmul(matmul(W, phi), W) == W,
        "identity": PW == identity,
        "symmetric": all(PW[i][j] == PW[j][i] for i in range(size) for j in range(size)),
    }


# ----------------------------------------------------- exhaustive counting


def brute_force_class_counts(I: Sequence, J: Sequence, *, budget: int = CLASS_COUNT_BUDGET):
    """``C_{I,J}(λ)`` by scanning all matchings for each side and every pair."""
    from .optimizer import CosetClassCounts

    I, J = tuple(I), tuple(J)
    if len(I) != len(J) or len(I) % 2:
        raise ValueError("I and J must have the same even length")
    n = len(I) // 2
    matchings = [m.partner_map() for m in enumerate_matchings(n)] if n else []

    def fixes(values, p):
        return all(values[a] == values[b] for a, b in enumerate(p))

    left = [p for p in matchings if fixes(I, p)]
    right = [p for p in matchings if fixes(J, p)]
    if len(left) * len(right) > budget:
        raise ResourceLimitError(f"{len(left) * len(right)} pairs exceed the budget {budget}")
    counts: Counter = Counter()
    for a in left:
        for b in right:
            counts[matching_coset_type(a, b)] += 1
    return CosetClassCounts(n, dict(counts))


def spherical_group_sum(lam, rho, alpha, *, max_n: int = SPHERICAL_MAX_N) -> Fraction:
    """Spherical value by averaging a character over the hyperoctahedral group.

    ``α = 2``: ``(1/|H|) Σ_h χ_{2λ}(gh)``.  ``α = 1/2``: ``sgn(g) (1/|H|)
    Σ_h sgn(h) χ_{λ∪λ}(gh)`` (the sign-free twisted convention).  ``g`` is
    any matching of coset type ``ρ``.
    """
    lam, rho = Partition(lam), Partition(rho)
    n = lam.weight
    if n > max_n:
        raise ResourceLimitError(f"group sum over H_{n} exceeds max_n = {max_n}")
    alpha = Fraction(alpha)
    label = lam.doubled() if alpha == 2 else lam.repeated()
    g = next(m.to_permutation() for m in enumerate_matchings(n) if coset_type(m.to_permutation()) == rho)
    total = 0
    for h in hyperoctahedral_group(n):
        phi = 1 if alpha == 2 else h.sign()
        total += phi * character(label, cycle_type(g * h))
    value = Fraction(total, 2 ** n * _fact(n))
    return value if alpha == 2 else value * g.sign()


def _fact(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# --------------------------------------------------------- Monte Carlo


def haar_sample(group: str, d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` Haar-random matrices (U(d), O(d) or Sp(2d) in the
    ``[[A, -conj(B)], [B, conj(A)]]`` embedding)."""
    group = normalize_group(group)
    if group == "O":
        z = rng.standard_normal((size, d, d))
        q, r = np.linalg.qr(z)
        return q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    if group == "U":
        z = (rng.standard_normal((size, d, d)) + 1j * rng.standard_normal((size, d, d))) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r, axis1=1, axis2=2)
        return q * (diag / np.abs(diag))[:, None, :]
    m = 2 * d
    out = np.zeros((size, m, m), dtype=complex)
    for k in range(d):
        u = rng.standard_normal((size, m)) + 1j * rng.standard_normal((size, m))
        for j in range(k):
            for col in (out[:, :, j], out[:, :, d + j]):
                u = u - col * np.einsum("si,si->s", col.conj(), u)[:, None]
        u = u / np.linalg.norm(u, axis=1)[:, None]
        out[:, :, k] = u
        # w = J conj(u) with J = [[0, -1], [1, 0]]
        out[:, :d, d + k] = -u[:, d:].conj()
        out[:, d:, d + k] = u[:, :d].conj()
    return out


def _row(group: str, k: int, d: int) -> int:
    if group == "Sp":
        return k - 1 if k > 0 else d - k - 1
    return k - 1


def monte_carlo_moment(spec, d: int, samples: int = 100_000, seed: int = 0, batch: int = 20_000) -> tuple[float, float]:
    """Estimate and standard error of one moment at dimension ``d``.

    Uses numpy's PCG64 generator seeded with ``seed``.
    """
    d = int(d)
    if spec.max_index() > d:
        raise ValueError(f"index {spec.max_index()} out of range for d = {d}")
    rng = np.random.default_rng(seed)
    plain = [(_row(spec.group, i, d), _row(spec.group, j, d)) for i, j in zip(spec.I, spec.J)]
    conj = [(_row(spec.group, i, d), _row(spec.group, j, d)) for i, j in zip(spec.Ip, spec.Jp)]
    values = []
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        g = haar_sample(spec.group, d, size, rng)
        acc = np.ones(size, dtype=complex)
        for a, b in plain:
            acc = acc * g[:, a, b]
        for a, b in conj:
            acc = acc * g[:, a, b].conj()
        values.append(acc.real)
        done += size
    values = np.concatenate(values)
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(len(values)))
