"""Exact linear algebra over prime fields F_p.

Scalars are plain Python integers reduced to [0, p); vectors are tuples of
residues and matrices are sequences of row tuples.  All routines are pure
functions, deterministic (first-nonzero pivoting, standard vectors tried in
index order) and exact.

`FieldSpec` records the modulus together with the ambient game dimension and
enforces p > n, so every factorial up to n! is invertible, and p < 2**31.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_PRIME = 2**31

Vector = tuple[int, ...]


class PrimeSearchError(RuntimeError):
    """No prime satisfying the constraints within the search bound."""


class RootOrderError(ValueError):
    """Requested multiplicative order does not divide p - 1."""


class DependentVectorsError(ValueError):
    """Input vectors expected to be independent are not."""


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x < 4:
        return True
    if x % 2 == 0:
        return False
    d = 3
    while d * d <= x:
        if x % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Prime field F_p hosting a dimension-n game."""

    p: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p <= self.n:
            raise ValueError(f"need p > n, got p={self.p}, n={self.n}")
        if self.p >= MAX_PRIME:
            raise ValueError(f"p must be below 2**31, got {self.p}")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.p)


def find_game_prime(
    n: int,
    root_orders: Iterable[int] = (),
    avoid_divisors: Iterable[int] = (),
    search_bound: int = 1_000_000,
) -> FieldSpec:
    """Smallest prime p > n with p = 1 (mod m) for every required root order
    m and p not dividing any entry of avoid_divisors.

    Raises PrimeSearchError if no such prime is found below search_bound
    (cannot happen for sane inputs; the bound exists to fail loudly).
    """
    orders = sorted(set(int(m) for m in root_orders))
    avoid = [abs(int(d)) for d in avoid_divisors]
    if any(m < 1 for m in orders):
        raise ValueError("root orders must be positive")
    if any(d == 0 for d in avoid):
        raise ValueError("avoid_divisors entries must be nonzero")
    p = n + 1
    while p < search_bound:
        if (
            is_prime(p)
            and all((p - 1) % m == 0 for m in orders)
            and all(d % p != 0 for d in avoid)
        ):
            return FieldSpec(p=p, n=n)
        p += 1
    raise PrimeSearchError(
        f"no admissible prime below {search_bound} for n={n}, "
        f"orders={orders}, avoid={avoid}"
    )


def _prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def root_of_unity(field: FieldSpec, m: int) -> int:
    """Smallest element of F_p with multiplicative order exactly m."""
    p = field.p
    if m < 1:
        raise ValueError("order must be positive")
    if (p - 1) % m != 0:
        raise RootOrderError(f"order {m} unavailable: {m} does not divide {p - 1}")
    if m == 1:
        return 1
    qs = _prime_factors(m)
    for z in range(2, p):
        if pow(z, m, p) == 1 and all(pow(z, m // q, p) != 1 for q in qs):
            return z
    raise RootOrderError(f"no element of order {m} in F_{p}")  # unreachable


# ---------------------------------------------------------------------------
# elimination primitives


def det(rows: Sequence[Sequence[int]], p: int) -> int:
    """Exact determinant mod p by Gaussian elimination."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant requires a square matrix")
    m = [[x % p for x in r] for r in rows]
    sign = 1
    d = 1
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c]), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        v = m[c][c]
        d = d * v % p
        inv = pow(v, -1, p)
        for r in range(c + 1, n):
            f = m[r][c] * inv % p
            if f:
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[c])]
    return d * sign % p


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant requires a square matrix")
    if n == 0:
        return 1
    m = [list(map(int, r)) for r in rows]
    sign = 1
    prev = 1
    for c in range(n - 1):
        pivot = next((r for r in range(c, n) if m[r][c]), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]) // prev
            m[r][c] = 0
        prev = m[c][c]
    return sign * m[n - 1][n - 1]


def rref(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F_p.

    Returns (reduced rows, pivot column indices); zero rows are dropped.
    """
    m = [[x % p for x in r] for r in rows]
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [a * inv % p for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence[int]], p: int) -> int:
    if not rows:
        return 0
    return len(rref(rows, p)[0])


def is_basis(vectors: Sequence[Sequence[int]], p: int) -> bool:
    n = len(vectors)
    return n > 0 and all(len(v) == n for v in vectors) and det(vectors, p) != 0


def nullspace(rows: Sequence[Sequence[int]], p: int, cols: int | None = None) -> list[Vector]:
    """Basis of {x : M x = 0} for M given by rows; deterministic ordering."""
    if cols is None:
        if not rows:
            raise ValueError("column count needed for an empty matrix")
        cols = len(rows[0])
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(cols)) for j in range(cols)]
    red, pivots = rref(rows, p)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [0] * cols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-red[i][f]) % p
        basis.append(tuple(v))
    return basis


def span_contains(reduced: list[list[int]], pivots: list[int], v: Sequence[int], p: int) -> bool:
    """Membership test against a precomputed rref basis of the span."""
    w = [x % p for x in v]
    for row, c in zip(reduced, pivots):
        if w[c]:
            f = w[c]
            w = [(a - f * b) % p for a, b in zip(w, row)]
    return not any(w)


# ---------------------------------------------------------------------------
# subspace operations


def annihilator(space: Sequence[Sequence[int]], n: int, p: int) -> list[Vector]:
    """Basis of the functionals vanishing on the given space."""
    if not space:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    return nullspace(space, p, cols=n)


def intersection_basis(
    spaces: Sequence[Sequence[Sequence[int]]], n: int, p: int
) -> list[Vector]:
    """Basis of the intersection of the given subspaces of F_p^n.

    Each space is a list of independent spanning vectors (an empty list is
    the zero space).  Computed as the kernel of the stacked annihilators of
    all the spaces.  Returns [] for the zero space.
    """
    if not spaces:
        raise ValueError("need at least one space")
    validated = []
    for basis in spaces:
        basis = [tuple(x % p for x in v) for v in basis]
        if any(len(v) != n for v in basis):
            raise ValueError("vector dimension mismatch")
        if rank(basis, p) != len(basis):
            raise DependentVectorsError("input basis is not independent")
        validated.append(basis)
    if len(validated) == 1:
        return list(validated[0])
    stacked: list[Vector] = []
    for basis in validated:
        stacked.extend(annihilator(basis, n, p))
    if not stacked:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    return nullspace(stacked, p, cols=n)


def extend_to_basis(vectors: Sequence[Sequence[int]], n: int, p: int) -> list[Vector]:
    """Complete independent vectors to an ordered basis of F_p^n.

    The inputs come first, in order; the remaining slots are filled greedily
    by standard basis vectors in increasing index order.
    """
    chosen = [tuple(x % p for x in v) for v in vectors]
    if any(len(v) != n for v in chosen):
        raise ValueError("vector dimension mismatch")
    if rank(chosen, p) != len(chosen):
        raise DependentVectorsError("input vectors are dependent")
    for i in range(n):
        if len(chosen) == n:
            break
        e = tuple(1 if j == i else 0 for j in range(n))
        if rank(chosen + [e], p) == len(chosen) + 1:
            chosen.append(e)
    return chosen


def standard_basis(n: int) -> list[Vector]:
    return [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
