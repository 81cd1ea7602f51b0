"""Referee, transcripts, dealers and the Hall-condition analyzer.

`play` drives one game: the dealer produces one basis per step, the strategy
commits a permutation immediately (rows are pushed to it, it cannot look
ahead), and the referee validates everything: dealt rows must be bases,
permutations must be bijections, and every column must stay independent.
All randomness is forked from the single game seed via splitmix64.

A Transcript is a single JSON-serializable record of the run; transcripts
are re-checkable from scratch with `verify_transcript`.  Index conventions
in payloads: vectors are residue lists, permutation entry j is the 1-based
index of the dealt vector placed in column j+1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
import json

from . import certificate as cert
from .extalg import pure, unit, wedge
from .gf import FieldSpec, intersection_basis, is_basis, rank, standard_basis
from .rng import SplitMix64
from .strategy import ForcedError, StrategyStuck

VERDICT_COMPLETED = "completed"
VERDICT_ERROR = "error"
VERDICT_DEALER_DISQUALIFIED = "dealer-disqualified"


@dataclass
class Transcript:
    n: int
    p: int
    strategy_id: str
    dealer_id: str
    seed: int
    rows: list[list[tuple[int, ...]]] = field(default_factory=list)
    permutations: list[tuple[int, ...]] = field(default_factory=list)
    certificate_values: list[int] | None = None
    verdict: dict = field(default_factory=lambda: {"kind": VERDICT_COMPLETED})
    final_columns_ok: bool = False
    strategy_data: dict = field(default_factory=dict)

    @property
    def completed(self) -> bool:
        return self.verdict.get("kind") == VERDICT_COMPLETED

    def columns_after(self, steps: int) -> list[list[tuple[int, ...]]]:
        cols: list[list[tuple[int, ...]]] = [[] for _ in range(self.n)]
        for row, perm in zip(self.rows[:steps], self.permutations[:steps]):
            for j in range(self.n):
                cols[j].append(row[perm[j]])
        return cols

    def to_payload(self) -> dict:
        return {
            "format": "obc-transcript",
            "version": 1,
            "n": self.n,
            "p": self.p,
            "strategy": self.strategy_id,
            "dealer": self.dealer_id,
            "seed": self.seed,
            "rows": [[list(v) for v in row] for row in self.rows],
            "permutations": [[i + 1 for i in perm] for perm in self.permutations],
            "certificate_values": self.certificate_values,
            "verdict": self.verdict,
            "final_columns_ok": self.final_columns_ok,
            "strategy_data": self.strategy_data,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Transcript":
        if payload.get("format") != "obc-transcript":
            raise ValueError("not an obc-transcript file")
        return cls(
            n=payload["n"],
            p=payload["p"],
            strategy_id=payload["strategy"],
            dealer_id=payload["dealer"],
            seed=payload["seed"],
            rows=[[tuple(v) for v in row] for row in payload["rows"]],
            permutations=[tuple(i - 1 for i in perm) for perm in payload["permutations"]],
            certificate_values=payload.get("certificate_values"),
            verdict=payload["verdict"],
            final_columns_ok=payload["final_columns_ok"],
            strategy_data=payload.get("strategy_data", {}),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_payload(), fh)

    @classmethod
    def load(cls, path) -> "Transcript":
        with open(path) as fh:
            return cls.from_payload(json.load(fh))


# ---------------------------------------------------------------------------
# dealers


class StandardDealer:
    id = "standard"

    def begin(self, n, fieldspec, rng):
        self.n = n

    def deal(self, step, columns):
        return standard_basis(self.n)


class RandomDealer:
    """Uniform invertible matrix by rejection sampling."""

    id = "random"

    def begin(self, n, fieldspec, rng):
        self.n, self.p, self.rng = n, fieldspec.p, rng

    def deal(self, step, columns):
        while True:
            rows = [self.rng.vector(self.n, self.p) for _ in range(self.n)]
            if is_basis(rows, self.p):
                return rows


class ScriptedDealer:
    id = "scripted"

    def __init__(self, rows):
        self.script = [list(map(tuple, row)) for row in rows]

    def begin(self, n, fieldspec, rng):
        pass

    def deal(self, step, columns):
        if step > len(self.script):
            raise ValueError(f"scripted dealer has only {len(self.script)} rows")
        return self.script[step - 1]


class CommonVectorDealer:
    """Random bases containing the standard vector e_n exactly once."""

    id = "common-vector"

    def begin(self, n, fieldspec, rng):
        self.n, self.p, self.rng = n, fieldspec.p, rng

    def deal(self, step, columns):
        n, p = self.n, self.p
        e_n = tuple(0 if t < n - 1 else 1 for t in range(n))
        while True:
            rows = [self.rng.vector(n, p) for _ in range(n - 1)]
            pos = self.rng.randrange(n)
            rows.insert(pos, e_n)
            if any(v == e_n for i, v in enumerate(rows) if i != pos):
                continue
            if is_basis(rows, p):
                return rows


# ---------------------------------------------------------------------------
# the referee


def play(n: int, fieldspec: FieldSpec, strategy, dealer, seed: int = 0) -> Transcript:
    """Run one game and return its transcript."""
    p = fieldspec.p
    master = SplitMix64(seed)
    dealer.begin(n, fieldspec, master.fork())
    state = strategy.begin(n, fieldspec, master.fork())
    t = Transcript(n=n, p=p, strategy_id=strategy.id, dealer_id=dealer.id, seed=seed)
    columns: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    rows_total = strategy.rows_required(n)

    for step in range(1, rows_total + 1):
        row = [tuple(x % p for x in v) for v in dealer.deal(step, columns)]
        if len(row) != n or not is_basis(row, p):
            t.verdict = {"kind": VERDICT_DEALER_DISQUALIFIED, "step": step}
            break
        t.rows.append(row)
        try:
            perm = tuple(strategy.place(state, row))
        except (ForcedError, StrategyStuck) as exc:
            t.verdict = {"kind": VERDICT_ERROR, "step": step, "reason": str(exc)}
            break
        if sorted(perm) != list(range(n)):
            t.verdict = {"kind": VERDICT_ERROR, "step": step, "reason": "invalid permutation"}
            break
        t.permutations.append(perm)
        dependent = False
        for j in range(n):
            columns[j].append(row[perm[j]])
            if rank(columns[j], p) != len(columns[j]):
                dependent = True
        if dependent:
            t.verdict = {"kind": VERDICT_ERROR, "step": step, "reason": "dependent column"}
            break
    else:
        t.verdict = {"kind": VERDICT_COMPLETED}

    t.final_columns_ok = t.completed and all(
        len(columns[j]) == rows_total and rank(columns[j], p) == rows_total
        for j in range(n)
    )
    values = getattr(state, "values", None)
    if values:
        t.certificate_values = list(values)
    seeds = getattr(state, "seeds", None)
    if seeds:
        t.strategy_data = {"seeds": [[list(v) for v in col] for col in seeds]}
    return t


def _replay_certificate_values(t: Transcript) -> list[int] | None:
    """Recompute the per-step form values from the transcript alone."""
    n, p = t.n, t.p
    if t.strategy_id == "certificate" or t.strategy_id.startswith("seeded-certificate"):
        chain = cert.build_chain_cached(n, p)
        seeds = [
            [tuple(v) for v in col] for col in t.strategy_data.get("seeds", [])
        ] or [[] for _ in range(n)]
        omegas = tuple(pure(col, n, p) for col in seeds)
        grade = len(seeds[0])
        rows = t.rows
        project = False
    elif t.strategy_id == "common-vector":
        chain = cert.build_chain_cached(n, p, cert.FIXED_DIAGONAL)
        omegas = tuple(unit(n, p) for _ in range(n))
        grade = 0
        rows = t.rows
        project = True
    else:
        return None
    values = []
    e_n = tuple(0 if x < n - 1 else 1 for x in range(n))
    for row, perm in zip(rows, t.permutations):
        level = grade + 1
        if project:
            vectors = [v if v == e_n else tuple(v[:-1]) + (0,) for v in row]
        else:
            vectors = list(row)
        omegas = tuple(wedge(omegas[j], vectors[perm[j]]) for j in range(n))
        values.append(cert.evaluate(chain.form(level), omegas))
        grade = level
    return values


def verify_transcript(t: Transcript):
    """Independently recheck a transcript; returns (ok, report rows)."""
    report: list[tuple[str, bool, str]] = []
    n, p = t.n, t.p

    rows_ok = all(is_basis(row, p) for row in t.rows)
    report.append(("rows-are-bases", rows_ok, f"{len(t.rows)} rows"))

    perms_ok = all(sorted(perm) == list(range(n)) for perm in t.permutations)
    report.append(("permutations-valid", perms_ok, f"{len(t.permutations)} permutations"))

    prefix_ok = True
    bad_step = None
    cols: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for step, (row, perm) in enumerate(zip(t.rows, t.permutations), start=1):
        for j in range(n):
            cols[j].append(row[perm[j]])
        if any(rank(c, p) != len(c) for c in cols):
            prefix_ok = False
            bad_step = step
            break
    expect_clean = t.completed
    if expect_clean:
        report.append(("columns-independent", prefix_ok, f"first failure at step {bad_step}"))
    else:
        claimed = t.verdict.get("step")
        reason = t.verdict.get("reason", "")
        if t.verdict.get("kind") == VERDICT_ERROR and reason == "dependent column":
            report.append(
                ("error-step-matches", bad_step == claimed, f"recomputed {bad_step} vs claimed {claimed}")
            )
        else:
            report.append(("error-acknowledged", True, f"verdict {t.verdict.get('kind')}"))

    rows_placed = len(t.permutations)
    final_ok = (
        t.completed
        and rows_placed > 0
        and all(len(c) == rows_placed and rank(c, p) == rows_placed for c in cols)
    )
    report.append(
        ("final-columns-claim", final_ok == t.final_columns_ok,
         f"recomputed {final_ok}, claimed {t.final_columns_ok}")
    )
    if t.completed:
        report.append(("completed-implies-final", t.final_columns_ok, ""))

    if t.certificate_values is not None:
        fresh = _replay_certificate_values(t)
        if fresh is None:
            report.append(("certificate-values", False, f"unknown strategy {t.strategy_id}"))
        else:
            ok = fresh == list(t.certificate_values) and all(v != 0 for v in fresh)
            report.append(("certificate-values", ok, "fresh chain evaluation"))

    return all(ok for _, ok, _ in report), report


# ---------------------------------------------------------------------------
# Hall analyzer


@dataclass
class HallReport:
    step: int
    violations: list[tuple[tuple[int, ...], int]]

    def to_payload(self) -> dict:
        return {
            "step": self.step,
            "violations": [
                {"columns": [j + 1 for j in cols], "dimension": dim}
                for cols, dim in self.violations
            ],
        }


def hall_report(columns, n: int, p: int, step: int = 0) -> HallReport:
    """All column subsets L with dim(intersection) > n - |L|.

    Such a subset is exactly a Hall violation: a next basis concentrated in
    the intersection could not be matched to distinct columns.
    """
    if n > 12:
        raise ValueError("subset enumeration bounded at n <= 12")
    violations = []
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            spaces = [columns[j] for j in subset]
            dim = len(intersection_basis(spaces, n, p))
            if dim > n - size:
                violations.append((subset, dim))
    return HallReport(step=step, violations=violations)
