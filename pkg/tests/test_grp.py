import pytest
from hypothesis import given, settings, strategies as st

from eqiwasawa.grp import (
    AbGroup,
    GroupRingElem,
    IntegersMod,
    Rationals,
    char_transform,
    enumerate_characters,
    inverse_char_transform,
    iota_gr,
    minus_projection,
    plus_projection,
    quotient_group,
    smith_with_transform,
    tate_twist_gr,
)
from eqiwasawa.coeff import make_coeff_ring

from oracles import cyclic_group_ring_mul

ZN = IntegersMod(3, 5)


def elems(G, dom=ZN):
    return st.lists(st.integers(0, dom.q - 1), min_size=G.order, max_size=G.order).map(
        lambda v: GroupRingElem(G, dom, v))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 7), st.data())
def test_cyclic_multiplication_matches_convolution(n, data):
    G = AbGroup([n])
    a = data.draw(elems(G))
    b = data.draw(elems(G))
    assert list((a * b).coeffs) == cyclic_group_ring_mul(a.coeffs, b.coeffs, n, ZN.q)


@pytest.mark.parametrize("orders,p", [([2], 3), ([4], 3), ([2, 2], 3), ([2, 4], 3), ([6], 5)])
def test_character_transform_round_trip(orders, p):
    G = AbGroup(orders)
    ring = make_coeff_ring(p, 5, G.exponent)
    chars = enumerate_characters(G)
    assert len(chars) == G.order

    @settings(max_examples=20, deadline=None)
    @given(elems(G, IntegersMod(p, 5)))
    def check(x):
        vals = char_transform(x, chars, ring)
        back = inverse_char_transform(vals, G, ring, chars)
        assert [c.to_int() for c in back.coeffs] == list(x.coeffs)

    check()


def test_inverse_transform_needs_order_prime_to_p():
    G = AbGroup([6])
    ring = make_coeff_ring(3, 5, 6)
    with pytest.raises(ArithmeticError):
        inverse_char_transform([ring.zero()] * 6, G, ring, enumerate_characters(G))


def test_characters_are_multiplicative():
    G = AbGroup([2, 4])
    ring = make_coeff_ring(5, 4, 4)
    for chi in enumerate_characters(G):
        for g in G.elements():
            for h in G.elements():
                assert chi.value(G.mul(g, h), ring) == chi.value(g, ring) * chi.value(h, ring)


def test_plus_minus_projections():
    G = AbGroup([2, 3], j=[1, 0])
    x = GroupRingElem(G, ZN, list(range(1, 7)))
    assert plus_projection(x) + minus_projection(x) == x
    assert minus_projection(minus_projection(x)) == minus_projection(x)
    j = GroupRingElem.basis(G, ZN, G.j)
    assert j * minus_projection(x) == -minus_projection(x)


def test_iota_is_an_involutive_ring_map():
    G = AbGroup([5])
    a = GroupRingElem(G, ZN, [1, 2, 3, 4, 5])
    b = GroupRingElem(G, ZN, [7, 0, 2, 0, 1])
    assert iota_gr(iota_gr(a)) == a
    assert iota_gr(a * b) == iota_gr(a) * iota_gr(b)


def test_tate_twist_composes():
    G = AbGroup([2], j=[1])
    x = GroupRingElem(G, ZN, [5, 11])
    assert tate_twist_gr(tate_twist_gr(x, 1, [-1]), 2, [-1]) == tate_twist_gr(x, 3, [-1])
    assert tate_twist_gr(x, 2, [-1]) == x


def test_quotient_group_of_units_mod_15():
    # (Z/15)^x = Z/2 x Z/4; killing the Z/2 factor leaves Z/4
    q = quotient_group([2, 4], [[1, 0]])
    assert q.group.order == 4
    assert q([1, 0]) == 0


def test_smith_diagonal():
    diag, V, Vinv = smith_with_transform([[2, 4], [6, 8]], 2)
    nz = sorted(abs(d) for d in diag if d)
    assert nz == [2, 4]


def test_rational_group_ring():
    G = AbGroup([2])
    half = GroupRingElem(G, Rationals(), [1, 1]) * Rationals().from_fraction(__import__("fractions").Fraction(1, 2))
    assert half * half == half
