import random
from fractions import Fraction

import pytest

from eqiwasawa.fitcalc import IdealHandle, LambdaSpec
from eqiwasawa.grp import AbGroup
from eqiwasawa.motive import (
    MotiveMorphism,
    PadicOneMotive,
    TPrime,
    apply_matrix,
    delta_module,
    parse_fraction,
    split_pm,
    tate_module,
    torsion_points,
    transition_down,
    transition_up,
)

from gen import random_motive


def _frac_vec_mul(x, A):
    return [sum(x[l] * A[l][j] for l in range(len(x))) % 1 for j in range(len(A[0]) if A else 0)]


def _int_vec_mul(l, A):
    return [sum(l[i] * A[i][j] for i in range(len(l))) for j in range(len(A[0]) if A else 0)]


def test_parse_fraction():
    assert parse_fraction("2/3^2") == Fraction(2, 9)
    assert parse_fraction("7/3") == Fraction(1, 3)
    assert parse_fraction(5) == 0


def test_validation():
    with pytest.raises(ValueError):
        PadicOneMotive(2, 1, 1, [["1/2"]])
    with pytest.raises(ValueError):
        PadicOneMotive(3, 1, 1, [["1/5"]])
    G = AbGroup([2], j=[1])
    with pytest.raises(ValueError):
        # -delta != delta mod 1 for delta = 1/3: not equivariant
        PadicOneMotive(3, 1, 1, [["1/3"]], G, [[[-1]]], [[[1]]])


def test_torsion_action_matches_the_fiber_product():
    rng = random.Random(21)
    for _ in range(15):
        M = random_motive(rng)
        if not M.L_action:
            continue
        for n in (1, 2):
            T = torsion_points(M, n)
            AL, AJ = M.L_action[0], M.J_action[0]
            for _ in range(10):
                v = [rng.randrange(T.modulus) for _ in range(T.rank)]
                x, l = T.to_pair(v)
                assert T.from_pair(x, l) == v
                w = T.from_pair(_frac_vec_mul(x, AJ), _int_vec_mul(l, AL))
                assert T.act(1, v) == w


def test_transitions_match_the_fiber_product():
    rng = random.Random(22)
    for _ in range(15):
        M = random_motive(rng)
        for m, n in ((2, 1), (3, 1), (3, 2)):
            Tm, Tn = torsion_points(M, m), torsion_points(M, n)
            D = transition_down(M, m, n)
            U = transition_up(M, n, m)
            k = M.p ** (m - n)
            for _ in range(5):
                v = [rng.randrange(Tm.modulus) for _ in range(Tm.rank)]
                x, l = Tm.to_pair(v)
                assert apply_matrix(D, v, Tn.modulus) == Tn.from_pair([k * a % 1 for a in x], l)
                w = [rng.randrange(Tn.modulus) for _ in range(Tn.rank)]
                x, l = Tn.to_pair(w)
                assert apply_matrix(U, w, Tm.modulus) == Tm.from_pair(x, [k * a for a in l])


def test_split_iff_delta_zero():
    assert torsion_points(PadicOneMotive(3, 1, 1, [["0"]]), 2).is_split()
    assert not torsion_points(PadicOneMotive(3, 1, 1, [["1/3"]]), 2).is_split()


def test_tate_module_reductions():
    M = PadicOneMotive(3, 2, 2, [["1/9", "2/3"], ["2/3", "1/9"]], AbGroup([2], j=[1]),
                       [[[0, 1], [1, 0]]], [[[0, 1], [1, 0]]])
    tm = tate_module(M, 3)
    for k in (1, 2, 3):
        assert tm.reduce(k) == torsion_points(M, k).actions


def test_plus_minus_orders_multiply():
    M = PadicOneMotive(3, 2, 2, [["1/9", "2/3"], ["2/3", "1/9"]], AbGroup([2], j=[1]),
                       [[[0, 1], [1, 0]]], [[[0, 1], [1, 0]]])
    for n in (1, 2):
        T = torsion_points(M, n)
        pm = split_pm(T)
        assert pm.plus.order() * pm.minus.order() == T.order()
        assert pm.plus.order() == pm.minus.order() == 3 ** (2 * n)


def test_morphism_on_torsion():
    A = PadicOneMotive(3, 1, 1, [["1/3"]])
    B = PadicOneMotive(3, 1, 1, [["2/3"]])
    f = MotiveMorphism(A, B, [[2]], [[1]])
    assert f.is_compatible()
    assert not MotiveMorphism(A, B, [[1]], [[1]]).is_compatible()
    T = torsion_points(A, 2)
    mat = f.on_torsion(2)
    TB = torsion_points(B, 2)
    for v in T.elements():
        x, l = T.to_pair(list(v))
        assert apply_matrix(mat, list(v), 9) == TB.from_pair(x, [2 * a for a in l])


def test_delta_module_single_prime():
    spec = LambdaSpec(AbGroup([]), 3, 4, 3)
    dm = delta_module([TPrime(7, 0, 0)], spec)
    # 1 - 7 = -6 as the constant term
    assert dm.factors[0].coeffs[0].coeffs[0] == (-6) % 81
    assert dm.fitting_matches_product()
    assert dm.fitting_ideal() == IdealHandle(spec, [spec.scalar(-6)])


def test_delta_module_rejects_bad_input():
    spec = LambdaSpec(AbGroup([2], j=[1]), 3, 4, 3)
    with pytest.raises(ValueError):
        delta_module([], spec)
    with pytest.raises(ValueError):
        delta_module([TPrime(9, 0, 0)], spec)


def test_json_round_trip():
    M = PadicOneMotive(5, 1, 2, [["1/5", "3/25"]])
    assert PadicOneMotive.from_json(M.to_json()).to_json() == M.to_json()
