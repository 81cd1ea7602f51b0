import pytest

from rotagame import certificate as cert
from rotagame import strategy as strat
from rotagame.extalg import pure
from rotagame.gf import FieldSpec, find_game_prime, is_basis, rank
from rotagame.rng import SplitMix64


F3 = FieldSpec(3, 2)
F5 = FieldSpec(5, 4)


def fresh_certificate(n, fieldspec):
    s = strat.CertificateStrategy(cert.build_chain_cached(n, fieldspec.p))
    return s, s.begin(n, fieldspec, SplitMix64(0))


def test_certificate_steps_n2():
    s, state = fresh_certificate(2, F3)
    assert s.place(state, [(1, 0), (0, 1)]) == (0, 1)
    # second standard-ish row is placed by the identity as well
    assert s.place(state, [(0, 1), (1, 0)]) == (0, 1)
    assert state.grade == 2
    assert all(v != 0 for v in state.values)


def test_certificate_refuses_vanishing_census():
    chain3 = cert.build_chain(3, 7)
    with pytest.raises(ValueError):
        strat.CertificateStrategy(chain3)
    with pytest.raises(ValueError):
        strat.CertificateStrategy(cert.build_chain(2))  # integer chain


def test_certificate_stuck_on_violated_precondition():
    s, state = fresh_certificate(2, F3)
    with pytest.raises(strat.StrategyStuck):
        s.place(state, [(1, 0), (1, 0)])  # not a basis: referee's job, stuck here


def test_certificate_safety_on_random_states():
    """Whenever the lower form is nonzero on the state and the row is a
    basis, a good permutation exists and the new value is nonzero."""
    fieldspec = find_game_prime(4, avoid_divisors={576})
    p = fieldspec.p
    chain = cert.build_chain_cached(4, p)
    rng = SplitMix64(314)
    from rotagame.extalg import KVector, mask_of
    from itertools import combinations

    tried = 0
    for _ in range(200):
        k = 1 + rng.randrange(4)
        lower = chain.form(k - 1)
        omegas = tuple(
            KVector(
                4, k - 1,
                {mask_of(s + 1 for s in c): rng.randrange(p) for c in combinations(range(4), k - 1)},
                p,
            )
            for _ in range(4)
        )
        if cert.evaluate(lower, omegas) == 0:
            continue
        row = [rng.vector(4, p) for _ in range(4)]
        if not is_basis(row, p):
            continue
        perm, value, _ = cert._first_good(chain, k, omegas, row)
        assert perm is not None and value != 0, (k, omegas)
        tried += 1
    assert tried > 50  # the sample actually exercised the lemma


def test_certificate_random_rows_never_stuck():
    fieldspec = find_game_prime(4, avoid_divisors={576})
    s = strat.CertificateStrategy(cert.build_chain_cached(4, fieldspec.p))
    rng = SplitMix64(99)
    for game in range(25):
        state = s.begin(4, fieldspec, rng.fork())
        for _ in range(4):
            while True:
                row = [rng.vector(4, fieldspec.p) for _ in range(4)]
                if is_basis(row, fieldspec.p):
                    break
            s.place(state, row)
        assert state.grade == 4
        assert all(v != 0 for v in state.values)


def test_matching_step_lexicographic():
    perm = strat.matching_step([[], [], []], [(1, 0, 0), (0, 1, 0), (0, 0, 1)], 7)
    assert perm == (0, 1, 2)


def test_matching_avoids_spanned_columns():
    # column 0 already spans e1: vector e1 must go elsewhere
    cols = [[(1, 0)], [(0, 1)]]
    perm = strat.matching_step(cols, [(1, 0), (0, 1)], 7)
    assert perm == (1, 0)


def test_matching_enters_trap_state():
    """Second row of the 2x4 trap is placed identically: matching enforces
    independence only and happily walks into the Hall violation."""
    e = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    cols = [[e[0]], [e[1]], [e[2]], [e[3]]]
    row2 = [(0, 1, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)]
    perm = strat.matching_step(cols, row2, 7)
    assert perm == (0, 1, 2, 3)


def test_matching_forced_error():
    cols = [[(1, 0)], [(1, 0)]]
    with pytest.raises(strat.ForcedError):
        strat.matching_step(cols, [(1, 0), (0, 1)], 7)


def test_random_valid_reproducible():
    fieldspec = FieldSpec(7, 3)
    row = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]
    perms = []
    for _ in range(2):
        s = strat.RandomValidStrategy()
        state = s.begin(3, fieldspec, SplitMix64(123))
        perms.append([s.place(state, row), s.place(state, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])])
    assert perms[0] == perms[1]


def test_random_valid_unique_matching_ignores_seed():
    fieldspec = FieldSpec(7, 2)
    for seed in range(5):
        s = strat.RandomValidStrategy()
        state = s.begin(2, fieldspec, SplitMix64(seed))
        state.columns = [[(1, 0)], [(0, 1)]]
        assert s.place(state, [(1, 0), (0, 1)]) == (1, 0)


def test_matching_keeps_columns_independent():
    fieldspec = FieldSpec(7, 3)
    rng = SplitMix64(5)
    s = strat.MatchingStrategy()
    state = s.begin(3, fieldspec, None)
    for _ in range(3):
        while True:
            row = [rng.vector(3, 7) for _ in range(3)]
            if is_basis(row, 7):
                break
        s.place(state, row)
        assert all(rank(c, 7) == len(c) for c in state.columns)


# ---------------------------------------------------------------------------
# seeded play


def test_seeded_init_full_rows_reduces_to_main_game():
    chain = cert.build_chain_cached(2, 3)
    state = strat.seeded_init(chain, F3, 2, SplitMix64(1))
    assert state.seed_level == 0 and state.grade == 0
    assert cert.evaluate(chain.form(0), state.omegas) != 0


def test_seeded_init_level_one_nonvanishing():
    fieldspec = find_game_prime(4, avoid_divisors={576})
    chain = cert.build_chain_cached(4, fieldspec.p)
    for seed in range(10):
        state = strat.seeded_init(chain, fieldspec, 3, SplitMix64(seed))
        assert state.seed_level == 1
        assert cert.evaluate(chain.form(1), state.omegas) != 0
        assert all(len(col) == 1 for col in state.seeds)


def test_seeded_init_vanishing_level_accepts_first_sample():
    fieldspec = find_game_prime(5, root_orders={3, 5})
    chain = cert.build_chain_cached(5, fieldspec.p)
    assert chain.form(2).is_zero
    state = strat.seeded_init(chain, fieldspec, 3, SplitMix64(7))
    assert state.seed_level == 2
    assert all(not w.is_zero for w in state.omegas)  # seeds independent per column


def test_seeded_rows_validation():
    chain = cert.build_chain_cached(2, 3)
    with pytest.raises(ValueError):
        strat.seeded_init(chain, F3, 0, SplitMix64(0))


# ---------------------------------------------------------------------------
# common-vector play


def test_common_vector_n1():
    perms = strat.common_vector_play(1, [[(1,)]])
    assert perms == [(0,)]


def test_common_vector_standard_rows_n3():
    rows = [[(1, 0, 0), (0, 1, 0), (0, 0, 1)]] * 3
    perms = strat.common_vector_play(3, rows)
    # diagonal receives e_3 = vector index 2 at row k, column k
    for k, perm in enumerate(perms):
        assert perm[k] == 2
    # the placements form a Latin arrangement: distinct vectors per column
    for j in range(3):
        assert len({perms[i][j] for i in range(3)}) == 3


def test_common_vector_requires_unique_common_vector():
    fieldspec = find_game_prime(3, avoid_divisors={2})
    chain = cert.build_chain_cached(3, fieldspec.p, cert.FIXED_DIAGONAL)
    s = strat.CommonVectorStrategy(chain)
    state = s.begin(3, fieldspec, SplitMix64(0))
    with pytest.raises(ValueError):
        s.place(state, [(1, 0, 0), (0, 1, 0), (0, 1, 1)])  # no e_3
    with pytest.raises(ValueError):
        s.place(state, [(0, 0, 1), (0, 0, 1), (0, 1, 0)])  # e_3 twice


def test_common_vector_strategy_validation():
    with pytest.raises(ValueError):
        strat.CommonVectorStrategy(cert.build_chain_cached(3, 7))  # plain chain
    with pytest.raises(ValueError):
        # p = 2 divides the fixed-diagonal census of order 3 -> unsafe
        strat.CommonVectorStrategy(cert.build_fixed_diagonal_chain(3, 5).__class__(
            n=3, modulus=5, variant=cert.FIXED_DIAGONAL,
            forms={0: cert.CertificateForm(3, 0, {}, 5)},
        ))


def test_make_strategy():
    fieldspec = FieldSpec(5, 4)
    assert strat.make_strategy("matching", 4, fieldspec).id == "matching"
    assert strat.make_strategy("certificate", 4, fieldspec).id == "certificate"
    s = strat.make_strategy("seeded-certificate", 4, fieldspec, r=3)
    assert s.rows_required(4) == 3
    with pytest.raises(ValueError):
        strat.make_strategy("seeded-certificate", 4, fieldspec)
    with pytest.raises(ValueError):
        strat.make_strategy("nope", 4, fieldspec)
