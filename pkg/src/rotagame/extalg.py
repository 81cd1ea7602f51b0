"""Grade-k exterior-algebra elements in sorted-subset coordinates.

A KVector holds the coefficients of a grade-k element of the k-th exterior
power of K^n in the basis {e_S : S a sorted k-subset of [n]}, keyed by the
subset's n-bit mask (bit b = symbol b+1).  Coefficients live either in Z
(modulus None) or in F_p.  Explicit zeros are never stored.

Sign convention: `wedge` appends the new vector in the last slot, so the
coefficient picked up when symbol x joins subset S is (-1)**|{s in S : s > x}|,
the cost of moving x from the end into sorted position.  The certificate
module's contraction-identity test pins this convention globally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .gf import det, det_int

MAX_DIMENSION = 16


def mask_of(symbols: Iterable[int]) -> int:
    """Bitmask of a set of 1-based symbols."""
    m = 0
    for s in symbols:
        m |= 1 << (s - 1)
    return m


def symbols_of(mask: int) -> list[int]:
    """Sorted 1-based symbols of a bitmask."""
    out = []
    s = 1
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return out


def append_sign(mask: int, x: int) -> int:
    """Sign of moving e_x from the appended last slot into sorted position
    within the subset `mask` (which must not contain x)."""
    return -1 if (mask >> (x + 1)).bit_count() & 1 else 1


@dataclass(frozen=True)
class KVector:
    """Grade-k element of the k-th exterior power in subset coordinates."""

    n: int
    k: int
    coords: dict[int, int] = field(default_factory=dict)
    modulus: int | None = None

    def __post_init__(self):
        if not 0 <= self.k <= self.n <= MAX_DIMENSION:
            raise ValueError(f"need 0 <= k <= n <= {MAX_DIMENSION}")
        p = self.modulus
        cleaned = {}
        for mask, c in self.coords.items():
            if mask.bit_count() != self.k or mask >> self.n:
                raise ValueError(f"mask {mask:b} is not a {self.k}-subset of [{self.n}]")
            c = c % p if p else c
            if c:
                cleaned[mask] = c
        object.__setattr__(self, "coords", cleaned)

    def __getitem__(self, mask: int) -> int:
        return self.coords.get(mask, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other: "KVector") -> "KVector":
        if (self.n, self.k, self.modulus) != (other.n, other.k, other.modulus):
            raise ValueError("incompatible grades or moduli")
        coords = dict(self.coords)
        for m, c in other.coords.items():
            coords[m] = coords.get(m, 0) + c
        return KVector(self.n, self.k, coords, self.modulus)

    def scale(self, a: int) -> "KVector":
        return KVector(self.n, self.k, {m: a * c for m, c in self.coords.items()}, self.modulus)

    __rmul__ = scale

    def to_payload(self) -> dict:
        """JSON-ready form: subsets as sorted 1-based symbol lists."""
        return {
            "n": self.n,
            "k": self.k,
            "modulus": self.modulus or 0,
            "coords": [[symbols_of(m), c] for m, c in sorted(self.coords.items())],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "KVector":
        return cls(
            n=payload["n"],
            k=payload["k"],
            coords={mask_of(s): int(c) for s, c in payload["coords"]},
            modulus=payload.get("modulus") or None,
        )


def unit(n: int, modulus: int | None = None) -> KVector:
    """The grade-0 scalar 1."""
    return KVector(n, 0, {0: 1}, modulus)


def wedge(w: KVector, u: Sequence[int]) -> KVector:
    """w wedged with a vector appended in the last slot; grade k -> k+1."""
    n = w.n
    if len(u) != n:
        raise ValueError(f"vector of dimension {len(u)} in ambient dimension {n}")
    if w.k >= n:
        raise ValueError(f"grade overflow: cannot wedge at grade {w.k} in dimension {n}")
    p = w.modulus
    entries = [(x, u[x] % p if p else u[x]) for x in range(n)]
    out: dict[int, int] = {}
    for mask, c in w.coords.items():
        for x, ux in entries:
            if not ux or (mask >> x) & 1:
                continue
            term = c * ux
            if (mask >> (x + 1)).bit_count() & 1:
                term = -term
            key = mask | (1 << x)
            out[key] = out.get(key, 0) + term
    return KVector(n, w.k + 1, out, p)


def pure(vectors: Sequence[Sequence[int]], n: int, modulus: int | None = None) -> KVector:
    """Image of v_1 (x) ... (x) v_k in the k-th exterior power.

    The coefficient on a k-subset S is the k-by-k minor of the matrix with
    columns v_1..v_k on the rows S; the result is zero exactly when the
    vectors are dependent.
    """
    k = len(vectors)
    if k > n or any(len(v) != n for v in vectors):
        raise ValueError("need at most n vectors of dimension n")
    rows_of = list(vectors)
    coords: dict[int, int] = {}
    for subset in _k_subsets(n, k):
        minor = [[rows_of[t][s] for t in range(k)] for s in subset]
        d = det(minor, modulus) if modulus else det_int(minor)
        if d:
            coords[mask_of(s + 1 for s in subset)] = d
    return KVector(n, k, coords, modulus)


def _k_subsets(n: int, k: int):
    from itertools import combinations

    return combinations(range(n), k)
