import pytest

from rotagame import gf
from rotagame.rng import SplitMix64


def span_rank(vectors, p):
    return gf.rank(vectors, p)


def test_find_game_prime_examples():
    assert gf.find_game_prime(3, {3}).p == 7
    assert gf.find_game_prime(5, {3, 5}).p == 31
    assert gf.find_game_prime(1).p == 2
    assert gf.find_game_prime(4, avoid_divisors={576}).p == 5
    assert gf.find_game_prime(2, avoid_divisors={2}).p == 3


def test_find_game_prime_bound_and_validation():
    with pytest.raises(gf.PrimeSearchError):
        gf.find_game_prime(3, {3}, search_bound=6)
    with pytest.raises(ValueError):
        gf.find_game_prime(3, avoid_divisors={0})


def test_fieldspec_invariants():
    with pytest.raises(ValueError):
        gf.FieldSpec(p=6, n=3)  # not prime
    with pytest.raises(ValueError):
        gf.FieldSpec(p=3, n=3)  # p must exceed n
    f = gf.FieldSpec(p=7, n=3)
    assert f.inv(3) * 3 % 7 == 1
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_root_of_unity_examples():
    assert gf.root_of_unity(gf.FieldSpec(7, 3), 3) == 2
    assert gf.root_of_unity(gf.FieldSpec(31, 5), 5) == 2
    assert gf.root_of_unity(gf.FieldSpec(7, 3), 1) == 1
    with pytest.raises(gf.RootOrderError):
        gf.root_of_unity(gf.FieldSpec(5, 3), 3)  # 3 does not divide 4


@pytest.mark.parametrize("p,m", [(7, 3), (7, 6), (31, 5), (31, 15), (13, 4), (13, 12)])
def test_root_of_unity_exact_order(p, m):
    z = gf.root_of_unity(gf.FieldSpec(p, 2), m)
    assert pow(z, m, p) == 1
    for d in range(1, m):
        if m % d == 0:
            assert pow(z, d, p) != 1


def test_det_examples():
    assert gf.det([[1, 0], [0, 1]], 5) == 1
    assert gf.det([[2, 4, 1], [4, 2, 1], [1, 1, 1]], 7) == 6
    assert gf.det([[1, 1], [2, 2]], 7) == 0  # equal columns
    with pytest.raises(ValueError):
        gf.det([[1, 2, 3], [4, 5, 6]], 7)


def test_det_multiplicative_and_int_agreement():
    rng = SplitMix64(11)
    p = 13
    for _ in range(50):
        a = [[rng.randrange(p) for _ in range(3)] for _ in range(3)]
        b = [[rng.randrange(p) for _ in range(3)] for _ in range(3)]
        ab = [[sum(a[i][k] * b[k][j] for k in range(3)) % p for j in range(3)] for i in range(3)]
        assert gf.det(ab, p) == gf.det(a, p) * gf.det(b, p) % p
        assert gf.det(a, p) == gf.det_int(a) % p


def test_field_axioms_sampled():
    rng = SplitMix64(5)
    p = 31
    for _ in range(200):
        a, b, c = (rng.randrange(p) for _ in range(3))
        assert (a + b) % p == (b + a) % p
        assert ((a + b) + c) % p == (a + (b + c)) % p
        assert a * (b + c) % p == (a * b + a * c) % p
        if a:
            assert a * pow(a, -1, p) % p == 1


def test_rank_nullity():
    rng = SplitMix64(17)
    p = 7
    for _ in range(60):
        rows = [[rng.randrange(p) for _ in range(5)] for _ in range(rng.randrange(5) + 1)]
        assert gf.rank(rows, p) + len(gf.nullspace(rows, p)) == 5


def test_nullspace_annihilates():
    rng = SplitMix64(23)
    p = 11
    for _ in range(40):
        rows = [[rng.randrange(p) for _ in range(4)] for _ in range(2)]
        for x in gf.nullspace(rows, p):
            assert all(sum(r * v for r, v in zip(row, x)) % p == 0 for row in rows)


def e(i, n):
    return tuple(1 if j == i else 0 for j in range(n))


def test_intersection_single_space_is_itself():
    basis = [(1, 2, 0), (0, 1, 1)]
    assert gf.intersection_basis([basis], 3, 7) == [(1, 2, 0), (0, 1, 1)]


def test_intersection_simple():
    p = 7
    got = gf.intersection_basis([[e(0, 4), e(1, 4)], [e(1, 4), e(2, 4)]], 4, p)
    assert len(got) == 1
    assert span_rank(got + [e(1, 4)], p) == 1  # spanned by e2


def test_intersection_trap_array():
    # the 2x4 trap: all four column spaces meet in <e1>
    p = 7
    spaces = [
        [e(0, 4), e(1, 4)],
        [e(1, 4), (1, 1, 0, 0)],
        [e(2, 4), (1, 0, 1, 0)],
        [e(3, 4), (1, 0, 0, 1)],
    ]
    got = gf.intersection_basis(spaces, 4, p)
    assert len(got) == 1
    assert span_rank(got + [e(0, 4)], p) == 1


def test_intersection_validates_inputs():
    with pytest.raises(gf.DependentVectorsError):
        gf.intersection_basis([[(1, 0), (2, 0)]], 2, 5)
    with pytest.raises(ValueError):
        gf.intersection_basis([], 2, 5)


def test_intersection_dimension_formula():
    # dim(U meet W) = dim U + dim W - dim(U + W), independently of annihilators
    rng = SplitMix64(3)
    p = 5
    n = 4
    for _ in range(40):
        u = [rng.vector(n, p) for _ in range(2)]
        w = [rng.vector(n, p) for _ in range(2)]
        if gf.rank(u, p) != 2 or gf.rank(w, p) != 2:
            continue
        inter = gf.intersection_basis([u, w], n, p)
        assert len(inter) == 4 - gf.rank(u + w, p)
        for v in inter:
            assert gf.rank(u + [v], p) == 2
            assert gf.rank(w + [v], p) == 2


def test_extend_to_basis_examples():
    assert gf.extend_to_basis([], 2, 5) == [(1, 0), (0, 1)]
    assert gf.extend_to_basis([(1, 0)], 2, 5) == [(1, 0), (0, 1)]
    assert gf.extend_to_basis([(1, 1)], 2, 5) == [(1, 1), (1, 0)]
    with pytest.raises(gf.DependentVectorsError):
        gf.extend_to_basis([(1, 1), (2, 2)], 2, 5)


def test_extend_to_basis_always_completes():
    rng = SplitMix64(9)
    p, n = 7, 5
    for _ in range(40):
        v = rng.vector(n, p)
        if not any(v):
            continue
        basis = gf.extend_to_basis([v], n, p)
        assert basis[0] == v
        assert gf.is_basis(basis, p)
