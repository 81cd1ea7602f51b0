"""The odd-dimension adversary.

For odd n the dealer below defeats every online strategy: it deals n-2
standard bases, reads off which two standard vectors each column still
misses (a 2-regular multigraph on the symbols, hence a union of cycles, at
least one of odd length m), then deals the probe basis built from the
Vandermonde-style block Y[s][t] = zeta**(s*t) on the odd cycle's symbols
(zeta a primitive m-th root of unity) padded with identity elsewhere.
However the strategy assigns the probe vectors, the enlarged cycle-column
spaces share a common nonzero vector; the final dealt basis contains that
trap vector, and whichever column receives it goes dependent.

`run_adversary` plays a full game and re-derives every step of the argument
from the transcript as per-run checks (graph regularity, forced placement,
the vanishing circulant determinant, trap membership, the Hall violation on
the cycle columns, and for n <= 5 exhaustive unplaceability of the last row).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from . import game
from .gf import (
    FieldSpec,
    det,
    extend_to_basis,
    find_game_prime,
    intersection_basis,
    rank,
    root_of_unity,
    rref,
    span_contains,
    standard_basis,
)


class AdversaryRefuted(RuntimeError):
    """The guaranteed trap vector does not exist; must never fire."""


@dataclass
class MissingPairGraph:
    """Per column, the unordered pair of symbols (0-based) it still misses."""

    n: int
    edges: list[tuple[int, int]]

    def __post_init__(self):
        n = self.n
        if len(self.edges) != n:
            raise ValueError(f"need one edge per column, got {len(self.edges)}")
        degree = [0] * n
        for a, b in self.edges:
            if a == b:
                raise ValueError("loops are impossible for independent columns")
            degree[a] += 1
            degree[b] += 1
        if any(d != 2 for d in degree):
            raise ValueError(f"graph is not 2-regular: degrees {degree}")


def build_missing_graph(column_symbols, n: int) -> MissingPairGraph:
    """column_symbols[l] = set of 0-based symbols present in column l."""
    edges = []
    for present in column_symbols:
        if len(present) != n - 2:
            raise ValueError("each column must hold n-2 distinct standard vectors")
        missing = sorted(set(range(n)) - set(present))
        edges.append((missing[0], missing[1]))
    return MissingPairGraph(n=n, edges=edges)


@dataclass
class OddCycle:
    """Cycle of odd length m: column columns[t] misses symbols[t], symbols[t+1]."""

    symbols: list[int]
    columns: list[int]

    @property
    def m(self) -> int:
        return len(self.symbols)


def _cycles(g: MissingPairGraph) -> list[tuple[list[int], list[int]]]:
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for idx, (a, b) in enumerate(g.edges):
        incident[a].append(idx)
        incident[b].append(idx)
    used = [False] * len(g.edges)
    cycles = []
    for start in range(g.n):
        for first in incident[start]:
            if used[first]:
                continue
            verts = [start]
            cols = []
            v, e = start, first
            while True:
                used[e] = True
                cols.append(e)
                a, b = g.edges[e]
                v = b if v == a else a
                if v == start:
                    break
                verts.append(v)
                e = next(i for i in incident[v] if not used[i])
            cycles.append((verts, cols))
    return cycles


def find_odd_cycle(g: MissingPairGraph) -> OddCycle:
    """The odd cycle containing the smallest symbol among all odd cycles."""
    odd = [(verts, cols) for verts, cols in _cycles(g) if len(verts) % 2 == 1]
    if not odd:
        raise RuntimeError("no odd cycle in a 2-regular graph on an odd vertex count")
    verts, cols = min(odd, key=lambda vc: min(vc[0]))
    return OddCycle(symbols=verts, columns=cols)


def probe_basis(cycle: OddCycle, fieldspec: FieldSpec) -> tuple[list[tuple[int, ...]], int]:
    """The (n-1)-st dealt basis and the root of unity used.

    Vector t (t = 1..m) carries zeta**(s*t) at the s-th cycle symbol; the
    remaining vectors are the standard vectors of the non-cycle symbols in
    increasing order.
    """
    n, p = fieldspec.n, fieldspec.p
    m = cycle.m
    zeta = root_of_unity(fieldspec, m)
    rows = []
    for t in range(1, m + 1):
        v = [0] * n
        for s, sym in enumerate(cycle.symbols, start=1):
            v[sym] = pow(zeta, s * t, p)
        rows.append(tuple(v))
    in_cycle = set(cycle.symbols)
    for sym in range(n):
        if sym not in in_cycle:
            rows.append(tuple(1 if j == sym else 0 for j in range(n)))
    if det(rows, p) == 0:
        raise RuntimeError("probe block is singular; zeta is not primitive")
    return rows, zeta


def trap_vector(column_spaces, n: int, p: int) -> tuple[int, ...]:
    """A nonzero vector in the intersection of all n column spaces."""
    basis = intersection_basis(column_spaces, n, p)
    if not basis:
        raise AdversaryRefuted("column spaces intersect trivially")
    return basis[0]


class AdversaryDealer:
    id = "adversary"

    def begin(self, n, fieldspec, rng):
        if n % 2 == 0 or n < 3:
            raise ValueError("the adversary construction needs odd n >= 3")
        self.n = n
        self.fieldspec = fieldspec
        self.graph: MissingPairGraph | None = None
        self.cycle: OddCycle | None = None
        self.zeta: int | None = None
        self.probe: list[tuple[int, ...]] | None = None
        self.trap: tuple[int, ...] | None = None

    def deal(self, step, columns):
        n, p = self.n, self.fieldspec.p
        if step <= n - 2:
            return standard_basis(n)
        if step == n - 1:
            symbols = []
            for col in columns:
                present = set()
                for v in col:
                    nz = [i for i, x in enumerate(v) if x]
                    if len(nz) != 1 or v[nz[0]] != 1:
                        raise ValueError("non-standard vector in a standard-phase column")
                    present.add(nz[0])
                symbols.append(present)
            self.graph = build_missing_graph(symbols, n)
            self.cycle = find_odd_cycle(self.graph)
            self.probe, self.zeta = probe_basis(self.cycle, self.fieldspec)
            return list(self.probe)
        self.trap = trap_vector(columns, n, p)
        return extend_to_basis([self.trap], n, p)


@dataclass
class AdversaryReport:
    n: int
    p: int
    strategy_id: str
    seed: int
    adversary_wins: bool
    error_step: int | None
    graph_edges: list[tuple[int, int]] | None = None
    cycle_symbols: list[int] | None = None
    cycle_length: int | None = None
    probe_forced_into_cycle: bool | None = None
    z_determinant: int | None = None
    z_determinant_expected: int | None = None
    trap: tuple[int, ...] | None = None
    trap_in_all_columns: bool | None = None
    cycle_intersection_dim: int | None = None
    hall_violation_on_cycle: bool | None = None
    last_row_unplaceable: bool | None = None
    checks: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def all_checks_pass(self) -> bool:
        return self.adversary_wins and all(ok for _, ok in self.checks)

    def to_payload(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "strategy": self.strategy_id,
            "seed": self.seed,
            "adversary_wins": self.adversary_wins,
            "error_step": self.error_step,
            "cycle_symbols": None
            if self.cycle_symbols is None
            else [s + 1 for s in self.cycle_symbols],
            "cycle_length": self.cycle_length,
            "checks": [{"name": name, "ok": ok} for name, ok in self.checks],
        }


def run_adversary(strategy, n: int, fieldspec: FieldSpec | None = None, seed: int = 0):
    """Play one adversarial game; returns (transcript, report)."""
    if fieldspec is None:
        fieldspec = find_game_prime(n, root_orders={m for m in range(3, n + 1, 2)})
    dealer = AdversaryDealer()
    t = game.play(n, fieldspec, strategy, dealer, seed)
    report = AdversaryReport(
        n=n,
        p=fieldspec.p,
        strategy_id=strategy.id,
        seed=seed,
        adversary_wins=t.verdict.get("kind") == game.VERDICT_ERROR,
        error_step=t.verdict.get("step"),
    )
    report.checks.append(("adversary-wins", report.adversary_wins))
    if dealer.graph is None:
        return t, report  # early win: strategy erred during the standard phase

    p = fieldspec.p
    cycle = dealer.cycle
    zeta = dealer.zeta
    m = cycle.m
    report.graph_edges = list(dealer.graph.edges)
    report.cycle_symbols = list(cycle.symbols)
    report.cycle_length = m

    placed = len(t.permutations)
    clean_prefix = report.error_step is None or report.error_step >= n
    if placed >= n - 1 and clean_prefix:
        # which probe vector landed in each cycle column
        perm = t.permutations[n - 2]
        assignment = [perm[l] for l in cycle.columns]
        forced = sorted(assignment) == list(range(m))
        report.probe_forced_into_cycle = forced
        report.checks.append(("probe-forced-into-cycle-columns", forced))

        # circulant determinant of the normal vectors z_t = zeta^pi(t) x_t - x_{t+1}
        pi = [a + 1 for a in assignment]  # 1-based probe indices
        zmat = [[0] * m for _ in range(m)]
        for tdx in range(m):
            zmat[tdx][tdx] = pow(zeta, pi[tdx], p)
            zmat[tdx][(tdx + 1) % m] = (-1) % p
        zdet = det(zmat, p)
        expected = (pow(zeta, sum(pi), p) - 1) % p
        report.z_determinant = zdet
        report.z_determinant_expected = expected
        report.checks.append(("z-determinant-vanishes", zdet == expected == 0))

        cols_after = t.columns_after(n - 1)
        # the normal vectors really annihilate their cycle columns
        normals_ok = True
        for tdx, l in enumerate(cycle.columns):
            z = [0] * n
            z[cycle.symbols[tdx]] = pow(zeta, pi[tdx], p)
            z[cycle.symbols[(tdx + 1) % m]] = (-1) % p
            for v in cols_after[l]:
                if sum(a * b for a, b in zip(z, v)) % p:
                    normals_ok = False
        report.checks.append(("normal-vectors-annihilate", normals_ok))

        inter_cycle = intersection_basis([cols_after[l] for l in cycle.columns], n, p)
        report.cycle_intersection_dim = len(inter_cycle)
        report.hall_violation_on_cycle = len(inter_cycle) > n - m
        report.checks.append(("cycle-hall-violation", report.hall_violation_on_cycle))

        trap = dealer.trap
        if trap is not None:
            report.trap = trap
            in_all = all(
                span_contains(*rref(col, p), trap, p) for col in cols_after
            )
            nonzero = any(trap)
            report.trap_in_all_columns = in_all
            report.checks.append(("trap-nonzero", nonzero))
            report.checks.append(("trap-in-all-columns", in_all))

            if n <= 5 and len(t.rows) == n:
                final = t.rows[-1]
                unplaceable = True
                for perm in permutations(range(n)):
                    if all(
                        rank(cols_after[j] + [final[perm[j]]], p) == n
                        for j in range(n)
                    ):
                        unplaceable = False
                        break
                report.last_row_unplaceable = unplaceable
                report.checks.append(("last-row-unplaceable", unplaceable))

    return t, report
