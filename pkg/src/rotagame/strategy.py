"""Online strategies for the basis game.

Every strategy sees one dealt basis at a time and must commit a permutation
immediately (column j receives vector perm[j]).  Provided:

* certificate        - the provably safe play for dimensions whose signed
                       census is nonzero mod p; tracks one grade-k element
                       per column and keeps the level-k form nonvanishing.
* seeded-certificate - same engine started at grade n-r from random column
                       seeds, playing r rows into an r x n array.
* matching           - baseline: any perfect matching vector -> column that
                       keeps columns independent (Hall's condition only).
* random             - matching with seeded-random tie-breaks.
* common-vector      - every dealt basis contains e_n; e_n goes to column k
                       at row k and the projections of the rest are steered
                       by the fixed-diagonal chain.

Strategies raise ForcedError when no legal move exists (the strategy loses)
and StrategyStuck when a certificate guarantee is violated, which referees
turn into error verdicts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import certificate as cert
from .certificate import CertificateChain, evaluate, _first_good
from .extalg import KVector, pure, unit, wedge
from .gf import FieldSpec, find_game_prime, rref, span_contains
from .latin import census_signed_fixed_diagonal
from .rng import SplitMix64


class ForcedError(RuntimeError):
    """No legal move exists; the strategy loses at this step."""


class StrategyStuck(RuntimeError):
    """A certificate guarantee failed (precondition was violated)."""


class SeedingError(RuntimeError):
    """Could not sample a nonvanishing seed within the retry budget."""


@dataclass
class GameState:
    n: int
    p: int
    seed_level: int = 0
    grade: int = 0
    omegas: tuple[KVector, ...] = ()
    seeds: tuple[tuple[tuple[int, ...], ...], ...] = ()
    values: list[int] = field(default_factory=list)

    @property
    def step(self) -> int:
        return self.grade - self.seed_level


# ---------------------------------------------------------------------------
# certificate play


def certificate_step(chain: CertificateChain, state: GameState, row) -> tuple[int, ...]:
    """Choose and apply the lexicographically first good permutation."""
    level = state.grade + 1
    perm, value, wedged = _first_good(chain, level, state.omegas, row)
    if perm is None:
        raise StrategyStuck(f"no good permutation at level {level}")
    state.omegas = wedged
    state.grade = level
    state.values.append(value)
    return perm


class CertificateStrategy:
    def __init__(self, chain: CertificateChain):
        if chain.modulus is None:
            raise ValueError("game chains must be built modulo the game prime")
        if chain.lowest_level != 0 or chain.terminal_value() == 0:
            raise ValueError(
                "certificate strategy requires a chain with nonzero terminal "
                "value mod p (the census must not vanish in the field)"
            )
        self.chain = chain

    id = "certificate"

    def rows_required(self, n: int) -> int:
        return n

    def begin(self, n: int, fieldspec: FieldSpec, rng: SplitMix64) -> GameState:
        p = fieldspec.p
        if self.chain.n != n or self.chain.modulus != p:
            raise ValueError("chain does not match the game parameters")
        return GameState(n=n, p=p, omegas=tuple(unit(n, p) for _ in range(n)))

    def place(self, state: GameState, row) -> tuple[int, ...]:
        return certificate_step(self.chain, state, row)


def seeded_init(
    chain: CertificateChain,
    fieldspec: FieldSpec,
    r: int,
    rng: SplitMix64,
    max_retries: int = 1000,
) -> GameState:
    """Random column seeds of grade n-r with a nonvanishing start value.

    When the level n-r form is identically zero no nonzero start exists and
    the first independent sample is accepted (best-effort play).
    """
    n, p = chain.n, fieldspec.p
    if not 1 <= r <= n:
        raise ValueError(f"rows to play must be in [1, {n}]")
    level = n - r
    form = chain.form(level)
    for _ in range(max_retries):
        seeds = []
        omegas = []
        ok = True
        for _ in range(n):
            vs = tuple(rng.vector(n, p) for _ in range(level))
            w = pure(vs, n, p)
            if level and w.is_zero:
                ok = False
                break
            seeds.append(vs)
            omegas.append(w)
        if not ok:
            continue
        if form.is_zero or evaluate(form, omegas) != 0:
            return GameState(
                n=n,
                p=p,
                seed_level=level,
                grade=level,
                omegas=tuple(omegas),
                seeds=tuple(seeds),
            )
    raise SeedingError(f"no nonvanishing seed at level {level} after {max_retries} tries")


class SeededCertificateStrategy:
    def __init__(self, chain: CertificateChain, r: int):
        if chain.modulus is None:
            raise ValueError("game chains must be built modulo the game prime")
        self.chain = chain
        self.r = r
        self.id = f"seeded-certificate:r={r}"

    def rows_required(self, n: int) -> int:
        return self.r

    def begin(self, n, fieldspec, rng) -> GameState:
        return seeded_init(self.chain, fieldspec, self.r, rng)

    def place(self, state: GameState, row) -> tuple[int, ...]:
        return certificate_step(self.chain, state, row)


# ---------------------------------------------------------------------------
# matching baselines


def matching_step(
    columns, row, p: int, vec_order=None, col_orders=None
) -> tuple[int, ...]:
    """Perfect matching vector -> column avoiding columns that already span
    the vector; augmenting-path search with configurable scan orders (defaults
    are lexicographic).  Raises ForcedError when no perfect matching exists.
    """
    n = len(row)
    spans = [rref(col, p) if col else ([], []) for col in columns]
    admissible = [
        [not span_contains(spans[j][0], spans[j][1], v, p) for j in range(n)]
        for v in row
    ]
    if vec_order is None:
        vec_order = range(n)
    if col_orders is None:
        col_orders = [range(n)] * n
    match: list[int | None] = [None] * n

    def augment(i: int, visited: list[bool]) -> bool:
        for j in col_orders[i]:
            if admissible[i][j] and not visited[j]:
                visited[j] = True
                if match[j] is None or augment(match[j], visited):
                    match[j] = i
                    return True
        return False

    matched = 0
    for i in vec_order:
        # take the first admissible free column outright; augment only when
        # stuck, so untroubled rows are placed in scan order
        free = next(
            (j for j in col_orders[i] if admissible[i][j] and match[j] is None), None
        )
        if free is not None:
            match[free] = i
            matched += 1
        elif augment(i, [False] * n):
            matched += 1
    if matched < n:
        raise ForcedError("no perfect matching: some vector fits no column")
    return tuple(match[j] for j in range(n))  # type: ignore[misc]


class _MatchingState:
    def __init__(self, n: int, p: int, rng: SplitMix64 | None):
        self.n = n
        self.p = p
        self.rng = rng
        self.columns: list[list[tuple[int, ...]]] = [[] for _ in range(n)]


class MatchingStrategy:
    id = "matching"

    def rows_required(self, n: int) -> int:
        return n

    def begin(self, n, fieldspec, rng) -> _MatchingState:
        return _MatchingState(n, fieldspec.p, None)

    def place(self, state: _MatchingState, row) -> tuple[int, ...]:
        perm = matching_step(state.columns, row, state.p)
        for j in range(state.n):
            state.columns[j].append(tuple(row[perm[j]]))
        return perm


class RandomValidStrategy:
    """Matching with scan orders shuffled by the game's seeded generator."""

    id = "random"

    def rows_required(self, n: int) -> int:
        return n

    def begin(self, n, fieldspec, rng) -> _MatchingState:
        return _MatchingState(n, fieldspec.p, rng)

    def place(self, state: _MatchingState, row) -> tuple[int, ...]:
        n = state.n
        rng = state.rng
        vec_order = list(range(n))
        rng.shuffle(vec_order)
        col_orders = []
        for _ in range(n):
            order = list(range(n))
            rng.shuffle(order)
            col_orders.append(order)
        perm = matching_step(state.columns, row, state.p, vec_order, col_orders)
        for j in range(n):
            state.columns[j].append(tuple(row[perm[j]]))
        return perm


# ---------------------------------------------------------------------------
# common-vector play (every row contains e_n)


class CommonVectorStrategy:
    id = "common-vector"

    def __init__(self, chain: CertificateChain):
        if chain.variant != cert.FIXED_DIAGONAL:
            raise ValueError("common-vector play needs a fixed-diagonal chain")
        if chain.modulus is None:
            raise ValueError("game chains must be built modulo the game prime")
        if chain.lowest_level != 0 or chain.terminal_value() == 0:
            raise ValueError("fixed-diagonal census vanishes mod p; strategy unsafe")
        self.chain = chain

    def rows_required(self, n: int) -> int:
        return n

    def begin(self, n, fieldspec, rng) -> GameState:
        p = fieldspec.p
        if self.chain.n != n or self.chain.modulus != p:
            raise ValueError("chain does not match the game parameters")
        return GameState(n=n, p=p, omegas=tuple(unit(n, p) for _ in range(n)))

    def place(self, state: GameState, row) -> tuple[int, ...]:
        n, p = state.n, state.p
        e_n = tuple(0 if t < n - 1 else 1 for t in range(n))
        hits = [i for i, v in enumerate(row) if tuple(x % p for x in v) == e_n]
        if len(hits) != 1:
            raise ValueError("row must contain the common vector e_n exactly once")
        t = hits[0]
        level = state.grade + 1
        c = level - 1  # column that receives e_n at this row
        projected = [tuple(v[:-1]) + (0,) for v in row]
        others = [i for i in range(n) if i != t]
        candidates = (
            arr[:c] + (t,) + arr[c:] for arr in itertools.permutations(others)
        )
        vectors = list(projected)
        vectors[t] = e_n
        perm, value, wedged = _first_good(self.chain, level, state.omegas, vectors, candidates)
        if perm is None:
            raise StrategyStuck(f"no good permutation at level {level}")
        state.omegas = wedged
        state.grade = level
        state.values.append(value)
        return perm


def common_vector_play(n: int, rows, fieldspec: FieldSpec | None = None) -> list[tuple[int, ...]]:
    """Arrange n bases that all contain e_n; returns the chosen permutations.

    Raises ForcedError/StrategyStuck if play fails (cannot happen when the
    fixed-diagonal census is nonzero in the field and all rows are bases).
    """
    if fieldspec is None:
        fieldspec = find_game_prime(n, avoid_divisors={census_signed_fixed_diagonal(n)})
    chain = cert.build_chain_cached(n, fieldspec.p, cert.FIXED_DIAGONAL)
    strat = CommonVectorStrategy(chain)
    state = strat.begin(n, fieldspec, SplitMix64(0))
    return [strat.place(state, [tuple(x % fieldspec.p for x in v) for v in row]) for row in rows]


STRATEGY_IDS = ("certificate", "matching", "random", "seeded-certificate", "common-vector")


def make_strategy(name: str, n: int, fieldspec: FieldSpec, r: int | None = None):
    """Construct a strategy by id, building any chain it needs."""
    if name == "certificate":
        return CertificateStrategy(cert.build_chain_cached(n, fieldspec.p))
    if name == "matching":
        return MatchingStrategy()
    if name == "random":
        return RandomValidStrategy()
    if name == "seeded-certificate":
        if r is None:
            raise ValueError("seeded-certificate needs the number of rows r")
        return SeededCertificateStrategy(cert.build_chain_cached(n, fieldspec.p), r)
    if name == "common-vector":
        return CommonVectorStrategy(cert.build_chain_cached(n, fieldspec.p, cert.FIXED_DIAGONAL))
    raise ValueError(f"unknown strategy {name!r} (have {STRATEGY_IDS})")
