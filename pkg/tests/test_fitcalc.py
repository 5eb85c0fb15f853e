import random

import pytest
from hypothesis import given, settings, strategies as st

from eqiwasawa.fitcalc import (
    ExactnessError,
    GammaModule,
    GroupRingSpec,
    IdealHandle,
    LambdaSpec,
    Presentation,
    SubQuotient,
    annihilator,
    char_poly,
    check_four_term,
    det,
    fit_gamma_module,
    fitting_ideal,
    howell_contains,
    howell_form,
    poly_at_gamma,
    span_log_order,
    twist_ideal,
)
from eqiwasawa.grp import AbGroup
from eqiwasawa.iwasawa import PrecisionError

from oracles import all_vectors, ideal_as_set

TRIV = AbGroup([])
G2 = AbGroup([2], j=[1])


def ideal_set(I: IdealHandle, n: int, q: int) -> frozenset:
    return frozenset(v for v in all_vectors(n, q) if I.contains(I.spec.elem(list(v))))


@pytest.mark.parametrize("n,N", [(2, 2), (3, 2), (1, 3)])
def test_ideals_match_enumerated_spans(n, N):
    G = AbGroup([n]) if n > 1 else TRIV
    R = GroupRingSpec(G, 3, N)
    q = 3 ** N

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=1, max_size=2))
    def check(gens):
        I = IdealHandle(R, [R.elem(g) for g in gens])
        assert ideal_set(I, n, q) == ideal_as_set(gens, n, q)

    check()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 26), min_size=2, max_size=2), min_size=1, max_size=3))
def test_howell_form_spans_the_rows(rows):
    basis = howell_form(rows, 3, 3, 2)
    span = {tuple(v) for v in all_vectors(2, 27)
            if howell_contains(list(v), basis, 3, 3)}
    brute = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for x in frontier:
            for r in rows:
                y = ((x[0] + r[0]) % 27, (x[1] + r[1]) % 27)
                if y not in brute:
                    brute.add(y)
                    nxt.append(y)
        frontier = nxt
    assert span == brute
    assert 3 ** span_log_order(basis, 3) == len(brute)


def test_fitting_of_diagonal_and_zero_module():
    R = GroupRingSpec(TRIV, 3, 6)
    assert fitting_ideal(Presentation.diagonal(R, [R.scalar(3), R.scalar(9)])) == IdealHandle(R, [R.scalar(27)])
    assert fitting_ideal(Presentation.diagonal(R, [R.one(), R.one()])).is_unit_ideal()


def test_fitting_sits_between_annihilator_powers():
    rng = random.Random(11)
    R = GroupRingSpec(G2, 3, 6)
    checked = 0
    while checked < 15:
        m = rng.randint(1, 2)
        mat = [[R.elem([rng.choice([0, 1, 3, 9, rng.randrange(729)]) for _ in range(2)]) for _ in range(m + 1)]
               for _ in range(m)]
        P = Presentation(R, mat)
        S = SubQuotient.from_presentation(P)
        try:
            S.normal_form()
        except PrecisionError:
            continue
        F, A = fitting_ideal(P), annihilator(S)
        assert F.issubset(A)
        assert (A ** m).issubset(F)
        checked += 1


def test_char_poly_matches_determinant():
    rng = random.Random(12)
    R = GroupRingSpec(AbGroup([3]), 3, 5)
    for _ in range(10):
        n = rng.randint(1, 3)
        A = [[R.elem([rng.randrange(243) for _ in range(3)]) for _ in range(n)] for _ in range(n)]
        x = R.elem([rng.randrange(243) for _ in range(3)])
        cp = char_poly(A, R)
        val = R.zero()
        for c in reversed(cp):
            val = val * x + c
        B = [[(x if i == k else R.zero()) - A[i][k] for k in range(n)] for i in range(n)]
        assert val == det(B, R)


def test_dual_preserves_order_and_is_involutive():
    R = GroupRingSpec(G2, 3, 4)
    P = Presentation(R, [[R.scalar(3), R.group_elem(1) + R.one()], [R.zero(), R.scalar(9)]])
    M = SubQuotient.from_presentation(P).normal_form()
    D = M.dual("covariant")
    assert D.order() == M.order()
    assert fitting_ideal(D.dual("covariant").presentation()) == fitting_ideal(M.presentation())


def test_four_term_counterexample_to_the_literal_form():
    # 0 -> Z/3 -> Z/3 -> 0 -> 0 -> 0: Fit(A^dual)Fit(P') = (3) but Fit(A)Fit(P) = (9)
    R = GroupRingSpec(TRIV, 3, 4)
    Z3 = Presentation.diagonal(R, [R.scalar(3)])
    zero = Presentation.diagonal(R, [R.one()])
    res = check_four_term(Z3, Z3, zero, zero, [[[R.one()]], [[R.zero()]], [[R.zero()]]])
    assert res.verdict
    assert not res.verdict_with_A
    assert res.lhs == IdealHandle(R, [R.scalar(3)])


def test_four_term_rejects_non_exact_data():
    R = GroupRingSpec(TRIV, 3, 4)
    Z3 = Presentation.diagonal(R, [R.scalar(3)])
    Z9 = Presentation.diagonal(R, [R.scalar(9)])
    with pytest.raises(ExactnessError):
        check_four_term(Z3, Z9, Z9, Z3, [[[R.scalar(3)]], [[R.one()]], [[R.one()]]])


def test_twist_of_fitting_ideals():
    rng = random.Random(13)
    R = GroupRingSpec(G2, 3, 8)
    done = 0
    while done < 8:
        mat = [[R.elem([rng.choice([0, 1, 3, rng.randrange(3 ** 8)]) for _ in range(2)]) for _ in range(2)]
               for _ in range(2)]
        P = Presentation(R, mat)
        try:
            M = SubQuotient.from_presentation(P).normal_form()
        except PrecisionError:
            continue
        for n in (1, 2, -1):
            assert fitting_ideal(M.twist(n, [-1]).presentation()) == twist_ideal(fitting_ideal(P), -n, [-1])
        done += 1


def test_gamma_module_routes_agree():
    R = GroupRingSpec(TRIV, 3, 6)
    L = LambdaSpec(TRIV, 3, 6, 8)
    Mod = GammaModule(R, [[R.scalar(4)]])
    I = fit_gamma_module(Mod, 8, cross_check=True)
    assert I == IdealHandle(L, [L.gamma() - L.scalar(4)])
    assert I == IdealHandle(L, [poly_at_gamma(char_poly(Mod.action, R), L)])


def test_gamma_action_must_be_invertible():
    R = GroupRingSpec(TRIV, 3, 6)
    with pytest.raises(ValueError):
        GammaModule(R, [[R.scalar(3)]])


def test_presentation_json_round_trip():
    R = GroupRingSpec(G2, 3, 4)
    P = Presentation(R, [[R.scalar(3), R.group_elem(1)], [R.zero(), R.scalar(9)]])
    Q = Presentation.from_json(P.to_json())
    assert Q.matrix == P.matrix and fitting_ideal(Q) == fitting_ideal(P)
