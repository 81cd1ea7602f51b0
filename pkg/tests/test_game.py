import json

import pytest

from rotagame import certificate as cert
from rotagame import game
from rotagame import strategy as strat
from rotagame.gf import FieldSpec, find_game_prime


F3 = FieldSpec(3, 2)


def certificate_strategy(n, fieldspec):
    return strat.CertificateStrategy(cert.build_chain_cached(n, fieldspec.p))


def test_play_completes_n2():
    t = game.play(2, F3, certificate_strategy(2, F3), game.RandomDealer(), seed=1)
    assert t.completed and t.final_columns_ok
    assert len(t.rows) == 2 and len(t.permutations) == 2
    ok, report = game.verify_transcript(t)
    assert ok, report


def test_play_deterministic_given_seed():
    a = game.play(2, F3, certificate_strategy(2, F3), game.RandomDealer(), seed=9)
    b = game.play(2, F3, certificate_strategy(2, F3), game.RandomDealer(), seed=9)
    assert a.to_payload() == b.to_payload()
    c = game.play(2, F3, certificate_strategy(2, F3), game.RandomDealer(), seed=10)
    assert c.rows != a.rows


def test_standard_dealer_gives_latin_pattern():
    fieldspec = find_game_prime(4, avoid_divisors={576})
    t = game.play(4, fieldspec, certificate_strategy(4, fieldspec), game.StandardDealer())
    assert t.completed
    # columns collect four distinct standard vectors; the permutation grid is
    # a Latin-square pattern
    for j in range(4):
        assert len({t.permutations[i][j] for i in range(4)}) == 4


def test_dealer_disqualified_on_non_basis():
    rows = [[(1, 0), (2, 0)]]
    t = game.play(2, F3, certificate_strategy(2, F3), game.ScriptedDealer(rows))
    assert t.verdict == {"kind": game.VERDICT_DEALER_DISQUALIFIED, "step": 1}
    assert not t.final_columns_ok


def test_forced_error_recorded():
    # scripted rows drive the matching strategy into the 2x4 trap, then feed
    # a basis containing the shared vector e1
    e = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    trap_rows = [
        e,
        [(0, 1, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)],
        [e[0], (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)],
    ]
    fieldspec = FieldSpec(7, 4)
    t = game.play(4, fieldspec, strat.MatchingStrategy(), game.ScriptedDealer(trap_rows))
    assert t.verdict["kind"] == game.VERDICT_ERROR
    assert t.verdict["step"] == 3
    ok, report = game.verify_transcript(t)
    assert ok, report


def test_transcript_round_trip(tmp_path):
    t = game.play(2, F3, certificate_strategy(2, F3), game.RandomDealer(), seed=4)
    path = tmp_path / "t.json"
    t.save(path)
    back = game.Transcript.load(path)
    assert back.to_payload() == t.to_payload()
    payload = json.loads(path.read_text())
    assert payload["format"] == "obc-transcript"
    assert all(isinstance(v, list) for row in payload["rows"] for v in row)
    # permutations serialize 1-based
    assert sorted(payload["permutations"][0]) == [1, 2]


def test_verify_detects_tampered_permutation():
    fieldspec = find_game_prime(4, avoid_divisors={576})
    t = game.play(4, fieldspec, certificate_strategy(4, fieldspec), game.RandomDealer(), seed=3)
    assert t.completed
    p0 = t.permutations[1]
    t.permutations[1] = (p0[1], p0[0]) + p0[2:]
    ok, report = game.verify_transcript(t)
    assert not ok
    names = {name for name, good, _ in report if not good}
    assert "columns-independent" in names or "certificate-values" in names


def test_verify_detects_forged_certificate_value():
    t = game.play(2, F3, certificate_strategy(2, F3), game.RandomDealer(), seed=6)
    t.certificate_values[-1] = (t.certificate_values[-1] + 1) % 3
    ok, report = game.verify_transcript(t)
    assert not ok
    assert any(name == "certificate-values" and not good for name, good, _ in report)


def test_verify_seeded_transcript_replays_from_recorded_seeds():
    fieldspec = find_game_prime(4, avoid_divisors={576})
    s = strat.SeededCertificateStrategy(cert.build_chain_cached(4, fieldspec.p), 3)
    t = game.play(4, fieldspec, s, game.RandomDealer(), seed=11)
    assert t.completed
    assert t.strategy_data.get("seeds")
    ok, report = game.verify_transcript(t)
    assert ok, report


def test_common_vector_game_verifies():
    fieldspec = find_game_prime(3, avoid_divisors={2})
    s = strat.CommonVectorStrategy(cert.build_chain_cached(3, fieldspec.p, cert.FIXED_DIAGONAL))
    t = game.play(3, fieldspec, s, game.CommonVectorDealer(), seed=2)
    assert t.completed and t.final_columns_ok
    # e_3 sits on the diagonal: row k placed its e_3 into column k
    e3 = (0, 0, 1)
    for k in range(3):
        assert t.rows[k][t.permutations[k][k]] == e3
    ok, report = game.verify_transcript(t)
    assert ok, report


# ---------------------------------------------------------------------------
# Hall analyzer


def test_certificate_play_never_violates_hall():
    """The safe strategy keeps every proper prefix Hall-clean (empirical,
    n=4): a violation would leave some next basis unplaceable."""
    fieldspec = find_game_prime(4, avoid_divisors={576})
    for seed in range(10):
        t = game.play(4, fieldspec, certificate_strategy(4, fieldspec),
                      game.RandomDealer(), seed=seed)
        assert t.completed
        for step in range(1, 4):
            rep = game.hall_report(t.columns_after(step), 4, fieldspec.p, step=step)
            assert rep.violations == [], (seed, step, rep.violations)


def test_hall_report_trap_array():
    e = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    row2 = [(0, 1, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)]
    columns = [[e[j], row2[j]] for j in range(4)]
    rep = game.hall_report(columns, 4, 7, step=2)
    assert rep.violations == [((0, 1, 2, 3), 1)]
    payload = rep.to_payload()
    assert payload["violations"] == [{"columns": [1, 2, 3, 4], "dimension": 1}]


def test_hall_report_identity_placement_clean():
    e = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    columns = [[e[j]] for j in range(3)]
    assert game.hall_report(columns, 3, 7).violations == []
    columns = [[e[j], e[j]] for j in range(3)]  # not reachable, just dims
    with pytest.raises(Exception):
        game.hall_report(columns, 3, 7)  # dependent columns rejected upstream


def test_hall_report_empty_columns_vacuous():
    assert game.hall_report([[], [], []], 3, 7).violations == []


def test_hall_dimension_guard():
    with pytest.raises(ValueError):
        game.hall_report([[]] * 13, 13, 17)
