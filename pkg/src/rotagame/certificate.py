"""Certificate chains of sparse multilinear forms over subset tuples.

A chain is the sequence of forms C_n, ..., C_0 used by the safe strategy.
Level k assigns an exact coefficient to each n-tuple of k-subsets of [n]
(stored as n bitmasks); the top form is normalized to the single entry
([n], ..., [n]) -> 1, which makes C_0 at the empty tuple equal the signed
Latin-square census.  A game tuple of grade-k elements is "good" exactly
when the level-k form evaluates to something nonzero on it.

Contraction from level k to k-1 is push-style over the support: for an
entry (S_1..S_n) -> c, every system of distinct representatives x_j in S_j
sends sgn(x) * prod_j eps(S_j \\ {x_j}, x_j) * c to the tuple (S_j \\ {x_j})_j,
where eps is the append-last wedge sign from extalg.  The fixed-diagonal
variant additionally forces column k to give up symbol n at level k, which
turns the terminal value into the fixed-diagonal census.

Coefficients are exact integers when modulus is None, else residues mod p.
The key cross-checks (terminal value, the contraction identity against the
determinant, and coefficient-by-coefficient agreement with
latin.signed_completions) live in check_chain and in the test suite.
"""

from __future__ import annotations

import functools
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import latin
from .extalg import KVector, mask_of, symbols_of, wedge
from .rng import SplitMix64

MAX_CHAIN_DIMENSION = 6
DEFAULT_SUPPORT_CAP = 2_000_000

PLAIN = "plain"
FIXED_DIAGONAL = "fixed-diagonal"


class SupportCapError(RuntimeError):
    """Predicted support of a chain level exceeds the configured cap."""

    def __init__(self, level: int, predicted: int, cap: int):
        super().__init__(
            f"level {level} predicted support {predicted} exceeds cap {cap}"
        )
        self.level = level


@dataclass
class CertificateForm:
    """One level of a chain: n-tuples of k-subset masks -> coefficient."""

    n: int
    level: int
    coeffs: dict[tuple[int, ...], int]
    modulus: int | None = None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def support_size(self) -> int:
        return len(self.coeffs)


@dataclass
class CertificateChain:
    n: int
    modulus: int | None
    variant: str = PLAIN
    forms: dict[int, CertificateForm] = field(default_factory=dict)

    @property
    def lowest_level(self) -> int:
        return min(self.forms)

    def form(self, level: int) -> CertificateForm:
        if level not in self.forms:
            raise ValueError(f"level {level} not built (have {sorted(self.forms)})")
        return self.forms[level]

    def terminal_value(self) -> int:
        return coefficient(self.form(0), (0,) * self.n)


def regular_tuple_count(n: int, k: int) -> int:
    """Number of n-tuples of k-subsets with every symbol in exactly k sets
    (equivalently 0/1 n x n matrices with all line sums k)."""
    if not 0 <= k <= n:
        return 0
    states = {(k,) * n: 1}
    for _ in range(n):
        nxt: dict[tuple[int, ...], int] = {}
        for rem, ways in states.items():
            live = [i for i, r in enumerate(rem) if r > 0]
            for pick in itertools.combinations(live, k):
                new = list(rem)
                for i in pick:
                    new[i] -= 1
                key = tuple(sorted(new, reverse=True))
                nxt[key] = nxt.get(key, 0) + ways
        states = nxt
    return states.get((0,) * n, 0)


# ---------------------------------------------------------------------------
# building


def _contract_entries(
    items: Sequence[tuple[tuple[int, ...], int]], n: int, forced_col: int | None
) -> dict[tuple[int, ...], int]:
    """Push every entry through all systems of distinct representatives."""
    out: dict[tuple[int, ...], int] = {}
    top_bit = 1 << (n - 1)
    for masks, c in items:
        picked = [0] * n

        def rec(j: int, used: int, parity: int) -> None:
            if j == n:
                key = tuple(m & ~b for m, b in zip(masks, picked))
                out[key] = out.get(key, 0) + (c if parity == 0 else -c)
                return
            if j == forced_col:
                avail = masks[j] & top_bit & ~used
            else:
                avail = masks[j] & ~used
                if forced_col is not None:
                    avail &= ~top_bit
            while avail:
                b = avail & -avail
                avail ^= b
                s = b.bit_length() - 1
                inv = (used >> (s + 1)).bit_count() + (masks[j] >> (s + 1)).bit_count()
                picked[j] = b
                rec(j + 1, used | b, parity ^ (inv & 1))
            picked[j] = 0

        rec(0, 0, 0)
    return out


def _contract_chunk(args) -> dict[tuple[int, ...], int]:
    items, n, forced_col = args
    return _contract_entries(items, n, forced_col)


def _contract(form: CertificateForm, forced_col: int | None, workers: int | None) -> CertificateForm:
    items = list(form.coeffs.items())
    if workers and workers > 1 and len(items) > 1:
        chunks = [items[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                _contract_chunk, [(c, form.n, forced_col) for c in chunks]
            )
        merged: dict[tuple[int, ...], int] = {}
        for part in parts:
            for key, v in part.items():
                merged[key] = merged.get(key, 0) + v
    else:
        merged = _contract_entries(items, form.n, forced_col)
    p = form.modulus
    cleaned = {}
    for key, v in merged.items():
        v = v % p if p else v
        if v:
            cleaned[key] = v
    return CertificateForm(form.n, form.level - 1, cleaned, p)


def _build(
    n: int,
    modulus: int | None,
    variant: str,
    down_to: int,
    support_cap: int,
    max_dimension: int,
    workers: int | None,
) -> CertificateChain:
    if not 1 <= n <= max_dimension:
        raise ValueError(f"chain dimension must be in [1, {max_dimension}], got {n}")
    if modulus is not None and modulus <= n:
        raise ValueError(f"modulus must exceed n, got {modulus}")
    if not 0 <= down_to <= n:
        raise ValueError(f"down_to must be in [0, {n}]")
    full = (1 << n) - 1
    top = CertificateForm(n, n, {(full,) * n: 1}, modulus)
    chain = CertificateChain(n=n, modulus=modulus, variant=variant, forms={n: top})
    current = top
    for level in range(n, down_to, -1):
        predicted = regular_tuple_count(n, level - 1)
        if predicted > support_cap:
            raise SupportCapError(level - 1, predicted, support_cap)
        forced_col = level - 1 if variant == FIXED_DIAGONAL else None
        current = _contract(current, forced_col, workers)
        chain.forms[level - 1] = current
    return chain


def build_chain(
    n: int,
    modulus: int | None = None,
    *,
    down_to: int = 0,
    support_cap: int = DEFAULT_SUPPORT_CAP,
    max_dimension: int = MAX_CHAIN_DIMENSION,
    workers: int | None = None,
) -> CertificateChain:
    """Build C_n .. C_down_to; exact over Z when modulus is None."""
    return _build(n, modulus, PLAIN, down_to, support_cap, max_dimension, workers)


def build_fixed_diagonal_chain(
    n: int,
    modulus: int | None = None,
    *,
    down_to: int = 0,
    support_cap: int = DEFAULT_SUPPORT_CAP,
    max_dimension: int = MAX_CHAIN_DIMENSION,
    workers: int | None = None,
) -> CertificateChain:
    """Variant whose level-k contraction forces column k to take symbol n;
    its terminal value is the fixed-diagonal census."""
    return _build(n, modulus, FIXED_DIAGONAL, down_to, support_cap, max_dimension, workers)


@functools.lru_cache(maxsize=32)
def build_chain_cached(n: int, modulus: int | None, variant: str = PLAIN) -> CertificateChain:
    if variant == FIXED_DIAGONAL:
        return build_fixed_diagonal_chain(n, modulus)
    return build_chain(n, modulus)


# ---------------------------------------------------------------------------
# using a chain


def coefficient(form: CertificateForm, masks: Sequence[int]) -> int:
    """Stored coefficient of an n-tuple of k-subset masks (0 if absent)."""
    masks = tuple(masks)
    if len(masks) != form.n:
        raise ValueError(f"need {form.n} subsets")
    if any(m.bit_count() != form.level or m >> form.n for m in masks):
        raise ValueError(f"subsets must be {form.level}-subsets of [{form.n}]")
    return form.coeffs.get(masks, 0)


def evaluate(form: CertificateForm, omegas: Sequence[KVector]) -> int:
    """Multilinear evaluation: sum of coeff * prod_j omega_j[S_j]."""
    if len(omegas) != form.n:
        raise ValueError(f"need {form.n} arguments")
    for w in omegas:
        if w.n != form.n or w.k != form.level:
            raise ValueError(
                f"grade mismatch: form level {form.level}, argument grade {w.k}"
            )
        if w.modulus != form.modulus:
            raise ValueError("modulus mismatch between form and argument")
    tables = [w.coords for w in omegas]
    total = 0
    for masks, c in form.coeffs.items():
        t = c
        for table, m in zip(tables, masks):
            x = table.get(m)
            if not x:
                t = 0
                break
            t *= x
        total += t
    p = form.modulus
    return total % p if p else total


def find_good_permutation(
    chain: CertificateChain,
    k: int,
    omegas: Sequence[KVector],
    vectors: Sequence[Sequence[int]],
    candidates=None,
):
    """First permutation (lexicographic) whose wedged tuple evaluates to a
    nonzero value at level k, or None if all candidates vanish."""
    perm, _, _ = _first_good(chain, k, omegas, vectors, candidates)
    return perm


def _first_good(chain, k, omegas, vectors, candidates=None):
    """Internal variant returning (perm, value, wedged tuple)."""
    n = chain.n
    form = chain.form(k)
    wedges = [[wedge(w, v) for v in vectors] for w in omegas]
    if candidates is None:
        candidates = itertools.permutations(range(n))
    for perm in candidates:
        tup = tuple(wedges[j][perm[j]] for j in range(n))
        value = evaluate(form, tup)
        if value:
            return tuple(perm), value, tup
    return None, 0, None


# ---------------------------------------------------------------------------
# serialization

CHAIN_FORMAT = "obc-chain"
CHAIN_VERSION = 1


def chain_to_payload(chain: CertificateChain) -> dict:
    payload = {
        "format": CHAIN_FORMAT,
        "version": CHAIN_VERSION,
        "n": chain.n,
        "modulus": chain.modulus or 0,
    }
    if chain.variant != PLAIN:
        payload["variant"] = chain.variant
    levels = []
    for level in sorted(chain.forms, reverse=True):
        form = chain.forms[level]
        entries = [
            [[symbols_of(m) for m in masks], str(form.coeffs[masks])]
            for masks in sorted(form.coeffs)
        ]
        levels.append({"level": level, "entries": entries})
    payload["levels"] = levels
    return payload


def chain_from_payload(payload: dict) -> CertificateChain:
    if payload.get("format") != CHAIN_FORMAT:
        raise ValueError(f"not a {CHAIN_FORMAT} file")
    if payload.get("version") != CHAIN_VERSION:
        raise ValueError(f"unsupported version {payload.get('version')}")
    n = payload["n"]
    modulus = payload["modulus"] or None
    chain = CertificateChain(n=n, modulus=modulus, variant=payload.get("variant", PLAIN))
    for entry in payload["levels"]:
        level = entry["level"]
        coeffs = {
            tuple(mask_of(s) for s in masks): int(value)
            for masks, value in entry["entries"]
        }
        chain.forms[level] = CertificateForm(n, level, coeffs, modulus)
    if not chain.forms:
        raise ValueError("chain file has no levels")
    return chain


def save_chain(chain: CertificateChain, path) -> None:
    with open(path, "w") as fh:
        json.dump(chain_to_payload(chain), fh)


def load_chain(path) -> CertificateChain:
    with open(path) as fh:
        return chain_from_payload(json.load(fh))


# ---------------------------------------------------------------------------
# verification


def _random_kvector(n: int, k: int, modulus, rng: SplitMix64) -> KVector:
    span = modulus if modulus else 7
    coords = {}
    for subset in itertools.combinations(range(n), k):
        c = rng.randrange(span) - (0 if modulus else 3)
        if c:
            coords[mask_of(s + 1 for s in subset)] = c
    return KVector(n, k, coords, modulus)


def contraction_check(
    chain: CertificateChain, k: int, rng: SplitMix64, samples: int = 5
) -> bool:
    """Sampled identity pinning all sign conventions.

    Plain chains:   sum_pi sgn(pi) C_k((w_j ^ u_pi(j))_j) = C_{k-1}(w) det(u).
    Fixed-diagonal: pi runs over permutations fixing column k-1, the vector
    wedged there is e_n, the others live in the hyperplane x_n = 0, and the
    right side carries (-1)**(n-k) times the (n-1)x(n-1) determinant.
    """
    from .gf import det as gf_det
    from .gf import det_int

    n = chain.n
    p = chain.modulus
    upper = chain.form(k)
    lower = chain.form(k - 1)
    span = p if p else 7
    shift = 0 if p else 3
    for _ in range(samples):
        omegas = tuple(_random_kvector(n, k - 1, p, rng) for _ in range(n))
        if chain.variant == FIXED_DIAGONAL:
            c = k - 1
            vecs: list[tuple[int, ...] | None] = [None] * n
            for i in range(n):
                if i == c:
                    vecs[i] = tuple(0 if t < n - 1 else 1 for t in range(n))
                else:
                    vecs[i] = tuple(rng.randrange(span) - shift for t in range(n - 1)) + (0,)
            wedges = [[wedge(w, v) for v in vecs] for w in omegas]
            lhs = 0
            others = [i for i in range(n) if i != c]
            for arrangement in itertools.permutations(others):
                perm = list(arrangement[:c]) + [c] + list(arrangement[c:])
                sign = latin.perm_sign(perm)
                tup = tuple(wedges[j][perm[j]] for j in range(n))
                lhs += sign * evaluate(upper, tup)
            minor = [[vecs[j][s] for j in others] for s in range(n - 1)]
            d = gf_det(minor, p) if p else det_int(minor)
            rhs = evaluate(lower, omegas) * d
            if (n - k) & 1:
                rhs = -rhs
        else:
            vecs = [tuple(rng.randrange(span) - shift for _ in range(n)) for _ in range(n)]
            wedges = [[wedge(w, v) for v in vecs] for w in omegas]
            lhs = 0
            for perm in itertools.permutations(range(n)):
                sign = latin.perm_sign(perm)
                tup = tuple(wedges[j][perm[j]] for j in range(n))
                lhs += sign * evaluate(upper, tup)
            d = gf_det(vecs, p) if p else det_int(vecs)
            rhs = evaluate(lower, omegas) * d
        if p:
            lhs %= p
            rhs %= p
        if lhs != rhs:
            return False
    return True


def check_chain(chain: CertificateChain, *, seed: int = 2024, samples: int = 5):
    """Re-verify the chain invariants; returns (ok, report rows)."""
    report: list[tuple[str, bool, str]] = []

    def add(name: str, ok: bool, detail: str = "") -> None:
        report.append((name, ok, detail))

    n = chain.n
    full = (1 << n) - 1
    top = chain.forms.get(n)
    add(
        "top-normalized",
        top is not None and top.coeffs == {(full,) * n: 1},
        "top form must be the single entry ([n],...,[n]) -> 1",
    )
    regular = True
    for level, form in chain.forms.items():
        for masks in form.coeffs:
            if len(masks) != n or any(m.bit_count() != level for m in masks):
                regular = False
            counts = [sum((m >> s) & 1 for m in masks) for s in range(n)]
            if any(c != level for c in counts):
                regular = False
    add("support-regular", regular, "every stored tuple is symbol-regular")

    vanish = True
    for level in sorted(chain.forms):
        if level + 1 in chain.forms and chain.forms[level + 1].is_zero:
            vanish = vanish and chain.forms[level].is_zero
    add("downward-vanishing", vanish, "a zero level forces all lower levels to zero")

    if 0 in chain.forms and n <= 4:
        if chain.variant == FIXED_DIAGONAL:
            expected = latin.census_signed_fixed_diagonal(n)
        else:
            expected = latin.census_signed(n)
        got = chain.terminal_value()
        if chain.modulus:
            ok = got == expected % chain.modulus
        else:
            ok = got == expected
        add("terminal-census", ok, f"terminal {got} vs census {expected}")

    if chain.modulus is None and chain.variant == PLAIN and n <= 4:
        ok = True
        for level, form in chain.forms.items():
            if level == n:
                continue
            for masks, c in form.coeffs.items():
                if latin.signed_completions(masks, n) != c:
                    ok = False
        add("oracle-coefficients", ok, "coefficients match signed completion counts")

    rng = SplitMix64(seed)
    ok = True
    for level in sorted(chain.forms, reverse=True):
        if level - 1 in chain.forms and level >= 1:
            ok = ok and contraction_check(chain, level, rng, samples=samples)
    add("contraction-identity", ok, f"{samples} samples per level")

    return all(ok for _, ok, _ in report), report
