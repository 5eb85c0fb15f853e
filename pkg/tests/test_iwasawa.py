import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eqiwasawa.coeff import make_coeff_ring, valuation
from eqiwasawa.grp import AbGroup, GroupRingElem, IntegersMod
from eqiwasawa.iwasawa import (
    AdmissibleQuotient,
    EqSeries,
    PrecisionError,
    associated_check,
    gamma_power,
    interpolate_from_values,
    iota_series,
    mu_invariant,
    project_level,
    reconstruct_per_character,
    twist_series,
    weierstrass_prepare,
)

from oracles import newton_polygon_lambda

G2 = AbGroup([2], j=[1])
Z = IntegersMod(3, 6)


def series(rng, G=G2, dom=Z, M=8):
    return EqSeries(G, dom, [GroupRingElem(G, dom, [rng.randrange(dom.q) for _ in range(G.order)])
                             for _ in range(M)])


def test_unit_series_inverse():
    rng = random.Random(0)
    for _ in range(10):
        F = series(rng)
        F.coeffs[0] = GroupRingElem(G2, Z, [1 + 3 * rng.randrange(100), 3 * rng.randrange(100)])
        assert F * F.inverse() == EqSeries.one(G2, Z, F.M)


@settings(max_examples=30, deadline=None)
@given(st.integers(-40, 40), st.integers(-40, 40))
def test_gamma_powers_multiply(a, b):
    assert gamma_power(a, Z, 8) * gamma_power(b, Z, 8) == gamma_power(a + b, Z, 8)


def test_project_level_sends_gamma_to_generator():
    for n in (1, 2):
        for a in (0, 1, 2, 5):
            F = gamma_power(a, Z, 3 ** n + 2, G2)
            elem, cert = project_level(F, n)
            Gn = G2.times_cyclic(3 ** n)
            expected = GroupRingElem.basis(Gn, Z, Gn.index([0, a % 3 ** n]))
            assert cert >= 1
            assert all((a - b) % 3 ** int(cert) == 0 for a, b in zip(elem.coeffs, expected.coeffs))


def test_project_level_needs_enough_terms():
    with pytest.raises(PrecisionError):
        project_level(EqSeries.one(G2, Z, 4), 2)


def test_twists_compose_on_polynomials():
    rng = random.Random(1)
    for _ in range(5):
        F = series(rng, M=6)
        for a, b in ((1, 1), (1, -1), (2, -3)):
            lhs = twist_series(twist_series(F, a, [-1], exact_polynomial=True), b, [-1], exact_polynomial=True)
            rhs = twist_series(F, a + b, [-1], exact_polynomial=True)
            assert lhs == rhs


def test_iota_is_an_involution():
    F = series(random.Random(2))
    assert iota_series(iota_series(F)) == F


def _mu_zero_series(rng, M=10):
    while True:
        F = series(rng, M=M)
        try:
            if mu_invariant(F, AdmissibleQuotient.minus(G2))["mu_zero"]:
                return F
        except PrecisionError:
            pass


def test_weierstrass_reconstruction_and_newton_oracle():
    rng = random.Random(3)
    quot = AdmissibleQuotient.minus(G2)
    ring = quot.ring_for(series(rng))
    for _ in range(15):
        F = _mu_zero_series(rng)
        prep = weierstrass_prepare(F, quot)
        rec = reconstruct_per_character(prep)
        for chi in quot.chars:
            cs = F.char_series(chi, ring).scalar_list()
            assert all(a == b for a, b in zip(rec[chi], cs))
            assert prep.per_character[chi].lam == newton_polygon_lambda([valuation(c) for c in cs])


def test_association_detects_non_units():
    rng = random.Random(4)
    quot = AdmissibleQuotient.minus(G2)
    F = _mu_zero_series(rng)
    unit = EqSeries.one(G2, Z, F.M) + F.t() * 3
    assert associated_check(F, unit * F, quot)
    assert not associated_check(F, (F.t() + 3) * F, quot)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=4))
def test_interpolation_recovers_polynomials(poly):
    p, u, W = 3, 4, 20
    ring = make_coeff_ring(p, W, 1)
    k = 5
    xs = [Fraction(u) ** m - 1 for m in range(k)]
    pts = [(ring.from_fraction(x), ring.from_fraction(sum(c * x ** i for i, c in enumerate(poly)))) for x in xs]
    s = interpolate_from_values(pts, k, u)
    cert = s.prec[0]
    for i, c in enumerate(s.scalar_list()):
        want = poly[i] if i < len(poly) else 0
        assert valuation(c - ring.from_int(want)) >= cert


def test_interpolation_precision_exhaustion():
    ring = make_coeff_ring(3, 3, 1)
    xs = [ring.from_int(4 ** m - 1) for m in range(6)]
    with pytest.raises(PrecisionError):
        interpolate_from_values([(x, ring.zero()) for x in xs], 6)


def test_json_round_trip():
    F = series(random.Random(5))
    assert EqSeries.from_json(F.to_json()) == F
