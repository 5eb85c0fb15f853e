"""Truncated equivariant power series R[G][[t]] with gamma <-> 1 + t.

Series are kept modulo (p^N, t^M).  The coefficient of t^k is a group ring
element over Z/p^N (``IntegersMod``) or over a cyclotomic ring O
(``CoeffRingDesc``); per-character work uses the trivial group over O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .coeff import (
    INF,
    CoeffRingDesc,
    CyclotomicCoeff,
    invert,
    make_coeff_ring,
    valuation,
    vp,
)
from .grp import (
    AbGroup,
    Character,
    GroupRingElem,
    IntegersMod,
    char_value,
    descend,
    embed,
    enumerate_characters,
    inverse_char_transform,
    twist_character_values,
)

TRIVIAL = AbGroup([])


class PrecisionError(ArithmeticError):
    pass


def domain_p(domain) -> int:
    return domain.p


def domain_N(domain) -> int:
    return domain.N


class EqSeries:
    """Element of R[G][[t]] modulo t^M (and modulo the precision of R)."""

    __slots__ = ("group", "domain", "coeffs", "u", "prec")

    def __init__(self, group: AbGroup, domain, coeffs: Sequence[GroupRingElem], u: int | None = None,
                 prec: Sequence[float] | None = None):
        self.group = group
        self.domain = domain
        self.coeffs = list(coeffs)
        if not self.coeffs:
            raise ValueError("t-precision must be >= 1")
        p = domain.p
        self.u = 1 + p if u is None else u
        if (self.u - 1) % p:
            raise ValueError("u must be congruent to 1 mod p")
        # per-degree certified precision (absolute, in p-digits for Zp, pi-units for O)
        self.prec = None if prec is None else list(prec)

    # construction ---------------------------------------------------------
    @property
    def M(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, group, domain, M: int, u: int | None = None) -> "EqSeries":
        z = GroupRingElem.zero(group, domain)
        return cls(group, domain, [z] * M, u)

    @classmethod
    def one(cls, group, domain, M: int, u: int | None = None) -> "EqSeries":
        return cls.const(GroupRingElem.one(group, domain), M, u)

    @classmethod
    def const(cls, x: GroupRingElem, M: int, u: int | None = None) -> "EqSeries":
        z = GroupRingElem.zero(x.group, x.domain)
        return cls(x.group, x.domain, [x] + [z] * (M - 1), u)

    @classmethod
    def from_scalars(cls, scalars: Sequence, domain, M: int | None = None, group: AbGroup = TRIVIAL,
                     u: int | None = None) -> "EqSeries":
        """Series whose t^k coefficient is scalars[k] times the identity of G."""
        M = len(scalars) if M is None else M
        vals = list(scalars)[:M] + [0] * max(0, M - len(scalars))
        coeffs = [GroupRingElem.basis(group, domain, 0, embed(c, domain)) for c in vals]
        return cls(group, domain, coeffs, u)

    def t(self) -> "EqSeries":
        s = EqSeries.zero(self.group, self.domain, self.M, self.u)
        if self.M > 1:
            s.coeffs[1] = GroupRingElem.one(self.group, self.domain)
        return s

    def like(self, coeffs: Sequence[GroupRingElem], prec=None) -> "EqSeries":
        return EqSeries(self.group, self.domain, coeffs, self.u, prec)

    def truncate(self, M: int) -> "EqSeries":
        if M > self.M:
            raise PrecisionError("cannot extend a truncated series")
        return self.like(self.coeffs[:M], None if self.prec is None else self.prec[:M])

    def scalar_list(self) -> list:
        """Coefficients when G is trivial."""
        return [c.coeffs[0] for c in self.coeffs]

    # arithmetic -------------------------------------------------------------
    def _match(self, other: "EqSeries") -> int:
        if other.group != self.group:
            raise ValueError("series over different groups")
        return min(self.M, other.M)

    def _merge_prec(self, other: "EqSeries", M: int):
        if self.prec is None and other.prec is None:
            return None
        a = self.prec or [INF] * M
        b = other.prec or [INF] * M
        return [min(x, y) for x, y in zip(a[:M], b[:M])]

    def __add__(self, other):
        if not isinstance(other, EqSeries):
            other = EqSeries.const(GroupRingElem.one(self.group, self.domain) * other, self.M, self.u)
        M = self._match(other)
        return self.like([a + b for a, b in zip(self.coeffs[:M], other.coeffs[:M])], self._merge_prec(other, M))

    __radd__ = __add__

    def __neg__(self):
        return self.like([-a for a in self.coeffs], self.prec)

    def __sub__(self, other):
        if not isinstance(other, EqSeries):
            other = EqSeries.const(GroupRingElem.one(self.group, self.domain) * other, self.M, self.u)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GroupRingElem):
            return self.like([a * other for a in self.coeffs], self.prec)
        if not isinstance(other, EqSeries):
            return self.like([a * other for a in self.coeffs], self.prec)
        M = self._match(other)
        zero = GroupRingElem.zero(self.group, self.domain)
        out = [zero] * M
        for i in range(M):
            a = self.coeffs[i]
            if a.is_zero():
                continue
            for j in range(M - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        prec = self._merge_prec(other, M)
        if prec is not None:
            # coefficient k depends on degrees <= k of both factors
            run = INF
            for k in range(M):
                run = min(run, prec[k])
                prec[k] = run
        return self.like(out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = EqSeries.one(self.group, self.domain, self.M, self.u)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, EqSeries):
            return NotImplemented
        M = self._match(other)
        return all(a == b for a, b in zip(self.coeffs[:M], other.coeffs[:M]))

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def inverse(self) -> "EqSeries":
        a0inv = gr_inverse(self.coeffs[0])
        M = self.M
        out = [a0inv]
        for k in range(1, M):
            acc = GroupRingElem.zero(self.group, self.domain)
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-(a0inv * acc))
        return self.like(out, self.prec)

    def map_group(self, f) -> "EqSeries":
        return self.like([f(c) for c in self.coeffs], self.prec)

    def compose(self, s: "EqSeries") -> "EqSeries":
        """F(s(t)) for a scalar series s with s(0) = 0 (exact mod t^M)."""
        M = min(self.M, s.M)
        out = EqSeries.zero(self.group, self.domain, M, self.u)
        sk = EqSeries.one(self.group, self.domain, M, self.u)
        for k in range(M):
            out = out + sk * self.coeffs[k]
            sk = sk * s
        return out

    def char_series(self, chi: Character, ring: CoeffRingDesc) -> "EqSeries":
        """chi(F) in O[[t]]."""
        coeffs = [GroupRingElem(TRIVIAL, ring, [char_value(c, chi, ring)]) for c in self.coeffs]
        return EqSeries(TRIVIAL, ring, coeffs, self.u)

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        d = {
            "p": self.domain.p,
            "N": self.domain.N,
            "M": self.M,
            "u": str(self.u),
            "group": self.group.to_json(),
            "coeffs": [c.to_dict() for c in self.coeffs],
        }
        if isinstance(self.domain, CoeffRingDesc):
            d["m"] = self.domain.m
        if self.prec is not None:
            d["prec"] = ["inf" if x == INF else int(x) for x in self.prec]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "EqSeries":
        G = AbGroup.from_json(d.get("group", {"cyclic_orders": []}))
        p, N = int(d["p"]), int(d["N"])
        domain = make_coeff_ring(p, N, int(d["m"])) if "m" in d else IntegersMod(p, N)
        M = int(d.get("M", len(d["coeffs"])))
        coeffs = [GroupRingElem.from_dict(G, domain, c) for c in d["coeffs"]]
        coeffs += [GroupRingElem.zero(G, domain)] * (M - len(coeffs))
        prec = d.get("prec")
        if prec is not None:
            prec = [INF if x == "inf" else int(x) for x in prec]
        return cls(G, domain, coeffs[:M], int(d.get("u", 1 + p)), prec)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                terms.append(f"({c})*t^{k}")
        return " + ".join(terms) if terms else "0"


# --------------------------------------------------------------------------
# group ring inverses

def gr_inverse(x: GroupRingElem) -> GroupRingElem:
    """Inverse of a unit of Z/p^N[G] or O[G] via a mod-p solve and Newton lifting."""
    G, dom = x.group, x.domain
    if G.order == 1:
        c = x.coeffs[0]
        if isinstance(dom, IntegersMod):
            if c % dom.p == 0:
                raise ArithmeticError("not a unit")
            return GroupRingElem(G, dom, [pow(c, -1, dom.q)])
        return GroupRingElem(G, dom, [invert(c)])
    if not isinstance(dom, IntegersMod):
        # per-character inversion through the Fourier transform
        chars = enumerate_characters(G)
        vals = [invert(char_value(x, chi, dom)) for chi in chars]
        return inverse_char_transform(vals, G, dom, chars)
    p, n = dom.p, G.order
    # regular representation mod p: column b of x * e_b
    table = G.mul_table
    A = [[0] * n for _ in range(n)]
    for a, c in enumerate(x.coeffs):
        for b in range(n):
            A[table[a][b]][b] = (A[table[a][b]][b] + c) % p
    rhs = [1] + [0] * (n - 1)
    z0 = solve_mod_p(A, rhs, p)
    if z0 is None:
        raise ArithmeticError("not a unit")
    z = GroupRingElem(G, dom, z0)
    one = GroupRingElem.one(G, dom)
    for _ in range(max(1, math.ceil(math.log2(dom.N)) + 1)):
        z = z * (one * 2 - x * z)
    if x * z != one:
        raise ArithmeticError("Newton lifting failed")
    return z


def solve_mod_p(A: list[list[int]], b: list[int], p: int) -> list[int] | None:
    n = len(A)
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    cols = len(A[0]) if A else 0
    piv_cols = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, n) if M[i][c] % p), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [v * inv % p for v in M[r]]
        for i in range(n):
            if i != r and M[i][c] % p:
                f = M[i][c]
                M[i] = [(vi - f * vr) % p for vi, vr in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(M[i][cols] % p for i in range(r, n)):
        return None
    x = [0] * cols
    for i, c in enumerate(piv_cols):
        x[c] = M[i][cols]
    return x


# --------------------------------------------------------------------------
# involution and twists

def iota_series(F: EqSeries) -> EqSeries:
    """g -> g^{-1}, t -> (1 + t)^{-1} - 1."""
    from .grp import iota_gr
    M = F.M
    s = EqSeries.from_scalars([0] + [(-1) ** k for k in range(1, M)], F.domain, M, F.group, F.u)
    return F.map_group(iota_gr).compose(s).with_prec(F.prec)


def _with_prec(self: EqSeries, prec) -> EqSeries:
    return EqSeries(self.group, self.domain, self.coeffs, self.u, prec)


EqSeries.with_prec = _with_prec


def twist_t_loss(N: int, M: int, n: int, p: int, u: int) -> int:
    """t-precision left after t -> u^n (1 + t) - 1 on data known mod (p^N, t^M)."""
    if n == 0:
        return M
    w = vp(u ** abs(n) - 1, p)
    return max(0, M - math.ceil(N / w) + 1)


def twist_series(F: EqSeries, n: int, c_data: Sequence | None, exact_polynomial: bool = False) -> EqSeries:
    """g -> c(g)^n g on G and t -> u^n (1 + t) - 1.

    The substitution moves the unknown tail t^{>=M} into low degrees, so the
    result is only certified modulo t^{M'} with M' from ``twist_t_loss`` and
    is truncated there.  With ``exact_polynomial`` the input is taken to be a
    polynomial of degree < M and the substitution is carried out exactly.
    """
    if n == 0:
        return F
    if c_data is None and F.group.order > 1:
        raise ValueError("twisting needs the values of c on the generators of G")
    p, N, M, u = F.domain.p, F.domain.N, F.M, F.u
    vals = twist_character_values(F.group, c_data or [], n, F.domain) if F.group.order > 1 else [F.domain.one()]
    twisted = [GroupRingElem(F.group, F.domain, [a * v for a, v in zip(c.coeffs, vals)]) for c in F.coeffs]
    un = _unit_power(u, n, F.domain)
    # (u^n (1+t) - 1)^k = sum_j C(k, j) (u^n - 1)^{k-j} u^{nj} t^j
    a0 = F.domain.reduce(un - 1)
    out = [GroupRingElem.zero(F.group, F.domain) for _ in range(M)]
    for k, c in enumerate(twisted):
        if c.is_zero():
            continue
        for j in range(k + 1):
            coef = F.domain.reduce(math.comb(k, j) * _pow(a0, k - j, F.domain) * _pow(un, j, F.domain))
            if coef != 0:
                out[j] = out[j] + c * coef
    res = F.like(out, F.prec)
    if exact_polynomial:
        return res
    return res.truncate(twist_t_loss(N, M, n, p, u))


def _pow(a, k: int, domain):
    if isinstance(domain, IntegersMod):
        return pow(a, k, domain.q)
    return a ** k


def _unit_power(u: int, n: int, domain):
    if isinstance(domain, IntegersMod):
        return pow(u, n, domain.q)
    x = domain.from_int(u)
    return x ** n if n >= 0 else invert(x) ** (-n)


# --------------------------------------------------------------------------
# mu, lambda and Weierstrass preparation

@dataclass(frozen=True)
class AdmissibleQuotient:
    """Quotient of Zp[G] cut out by a nonempty set of characters."""

    group: AbGroup
    chars: tuple[Character, ...]

    def __post_init__(self):
        if not self.chars:
            raise ValueError("the character set must be nonempty")

    @classmethod
    def minus(cls, G: AbGroup) -> "AdmissibleQuotient":
        return cls(G, tuple(c for c in enumerate_characters(G) if c.is_odd()))

    @classmethod
    def full(cls, G: AbGroup) -> "AdmissibleQuotient":
        return cls(G, tuple(enumerate_characters(G)))

    def ring_for(self, F: EqSeries) -> CoeffRingDesc:
        if isinstance(F.domain, CoeffRingDesc):
            m = math.lcm(F.domain.m, self.group.exponent)
            return make_coeff_ring(F.domain.p, F.domain.N, m)
        return make_coeff_ring(F.domain.p, F.domain.N, self.group.exponent)


def scalar_mu(coeffs: Sequence[CyclotomicCoeff]) -> float:
    return min(valuation(c) for c in coeffs)


def mu_invariant(F: EqSeries, quot: AdmissibleQuotient) -> dict:
    """Per-character mu (in pi-units) and whether mu(F) = 0 on the quotient."""
    ring = quot.ring_for(F)
    per = {}
    for chi in quot.chars:
        cs = F.char_series(chi, ring).scalar_list()
        mu = scalar_mu(cs)
        if mu == INF:
            raise PrecisionError(f"{chi}(F) vanishes at truncation; mu indeterminate")
        per[chi] = mu
    return {"per_character": per, "mu": min(per.values()), "mu_zero": all(v == 0 for v in per.values())}


def lambda_invariant(coeffs: Sequence[CyclotomicCoeff]) -> int | None:
    for k, c in enumerate(coeffs):
        if valuation(c) == 0:
            return k
    return None


@dataclass
class Preparation:
    unit: list[CyclotomicCoeff]
    poly: list[CyclotomicCoeff]  # monic, degree lam
    lam: int
    mu: float
    # pi-adic digits of ``poly`` that no tail t^{>=M} can change
    certified: float = INF


def prepare_scalar(coeffs: Sequence[CyclotomicCoeff]) -> Preparation:
    """F = U * f mod t^M for a series over O with mu = 0."""
    ring = coeffs[0].ring
    M = len(coeffs)
    lam = lambda_invariant(coeffs)
    if lam is None:
        if scalar_mu(coeffs) == INF:
            raise PrecisionError("series vanishes at truncation")
        raise PrecisionError("lambda >= t-precision or mu > 0: truncation too small")
    zero = ring.zero()
    A = list(coeffs)
    U = [ring.one()] + [zero] * (M - 1)
    for _ in range(ring.cap + 2):
        high = A[lam:] + [zero] * lam
        if _is_one(high):
            break
        hinv = _series_inverse(high)
        A = _series_mul(A, hinv)
        U = _series_mul(U, high)
    else:
        raise ArithmeticError("Weierstrass iteration did not converge")
    poly = [A[k] for k in range(lam)] + [ring.one()]
    return Preparation(U, poly, lam, 0, tail_certified(poly, M))


def tail_certified(poly: Sequence[CyclotomicCoeff], M: int) -> float:
    """Digits of a distinguished polynomial fixed by the series mod t^M.

    With s the smallest Newton slope of P, t^M mod P has content at least
    (M - lam + 1) s, so a tail t^M h shifts P only beyond that depth.
    """
    lam = len(poly) - 1
    cap = poly[0].ring.cap
    if lam == 0:
        return cap
    slope = min(min(valuation(poly[i]), cap) / (lam - i) for i in range(lam))
    return min(cap, math.ceil((M - lam + 1) * slope))


def _is_one(s: Sequence[CyclotomicCoeff]) -> bool:
    return valuation(s[0] - 1) == INF and all(valuation(c) == INF for c in s[1:])


def _series_mul(a: Sequence[CyclotomicCoeff], b: Sequence[CyclotomicCoeff]) -> list[CyclotomicCoeff]:
    M = len(a)
    ring = a[0].ring
    out = [ring.zero()] * M
    for i in range(M):
        if a[i].is_zero():
            continue
        for j in range(M - i):
            if not b[j].is_zero():
                out[i + j] = out[i + j] + a[i] * b[j]
    return out


def _series_inverse(a: Sequence[CyclotomicCoeff]) -> list[CyclotomicCoeff]:
    M = len(a)
    a0inv = invert(a[0])
    out = [a0inv]
    for k in range(1, M):
        acc = a[0].ring.zero()
        for i in range(1, k + 1):
            acc = acc + a[i] * out[k - i]
        out.append(-(a0inv * acc))
    return out


def _pad(poly: Sequence[CyclotomicCoeff], M: int) -> list[CyclotomicCoeff]:
    ring = poly[0].ring
    return list(poly[:M]) + [ring.zero()] * max(0, M - len(poly))


@dataclass
class EqPreparation:
    unit: EqSeries
    poly: EqSeries
    per_character: dict
    mu: float


def weierstrass_prepare(F: EqSeries, quot: AdmissibleQuotient, allow_uniform_mu: bool = False) -> EqPreparation:
    """Per-character Weierstrass decomposition, reassembled by inverse Fourier.

    The returned unit and polynomial are the (1 - j)/2-style sections: they
    have zero component at every character outside the quotient.
    """
    ring = quot.ring_for(F)
    M = F.M
    per = {}
    mus = mu_invariant(F, quot)["per_character"]
    uniform = set(mus.values())
    if uniform != {0}:
        if not allow_uniform_mu or len(uniform) != 1:
            raise PrecisionError(f"mu is not zero on the quotient: {mus}")
    mu = next(iter(uniform))
    for chi in quot.chars:
        cs = F.char_series(chi, ring).scalar_list()
        for _ in range(int(mu)):
            from .coeff import divide_by_pi
            cs = [divide_by_pi(c) for c in cs]
        per[chi] = prepare_scalar(cs)
    unit = _reassemble(F, quot, ring, {c: _pad(pr.unit, M) for c, pr in per.items()})
    poly = _reassemble(F, quot, ring, {c: _pad(pr.poly, M) for c, pr in per.items()})
    return EqPreparation(unit, poly, per, mu)


def _reassemble(F: EqSeries, quot: AdmissibleQuotient, ring: CoeffRingDesc, series: dict) -> EqSeries:
    G = quot.group
    coeffs = []
    for k in range(F.M):
        vals = [series[chi][k] for chi in quot.chars]
        x = inverse_char_transform(vals, G, ring, list(quot.chars))
        coeffs.append(descend(x, F.domain) if isinstance(F.domain, IntegersMod) else x)
    dom = F.domain if isinstance(F.domain, IntegersMod) else ring
    return EqSeries(G, dom, coeffs, F.u)


def reconstruct_per_character(prep: EqPreparation) -> dict:
    return {chi: _series_mul(pr.unit, _pad(pr.poly, len(pr.unit))) for chi, pr in prep.per_character.items()}


def associated_check(F: EqSeries, Theta: EqSeries, quot: AdmissibleQuotient) -> bool:
    """True iff F and Theta have equal Weierstrass polynomials at every character.

    Polynomials are compared to the depth certified by both truncations.
    """
    mF = mu_invariant(F, quot)
    mT = mu_invariant(Theta, quot)
    if not (mF["mu_zero"] and mT["mu_zero"]):
        raise PrecisionError(f"association needs mu = 0 (got {mF['per_character']}, {mT['per_character']})")
    pF = weierstrass_prepare(F, quot)
    pT = weierstrass_prepare(Theta, quot)
    for chi in quot.chars:
        a, b = pF.per_character[chi], pT.per_character[chi]
        if a.lam != b.lam:
            return False
        depth = min(a.certified, b.certified)
        if depth < 1:
            raise PrecisionError("t-precision too small to certify any digit of the Weierstrass polynomial")
        if any(valuation(x - y) < depth for x, y in zip(a.poly, b.poly)):
            return False
    return True


# --------------------------------------------------------------------------
# finite levels, gamma powers and interpolation

def _cminus1_powers(pn: int, count: int) -> list[list[int]]:
    """Integer coefficient vectors of (c - 1)^k in Z[Z/pn], k < count."""
    out = []
    cur = [1] + [0] * (pn - 1)
    for _ in range(count):
        out.append(cur)
        nxt = [0] * pn
        for i, a in enumerate(cur):
            if a:
                nxt[(i + 1) % pn] += a
                nxt[i] -= a
        cur = nxt
    return out


def level_precision(p: int, n: int, M: int) -> float:
    """p-adic content of (c - 1)^M in Z[Z/p^n]: digits certified after projection."""
    v = _cminus1_powers(p ** n, M + 1)[M]
    return min((vp(a, p) for a in v if a), default=INF)


def project_level(F: EqSeries, n: int) -> tuple[GroupRingElem, float]:
    """Image of F in R[G x Z/p^n] (gamma -> generator of the new factor).

    Returns the element and the number of p-adic digits that are certified
    independently of the unknown tail t^{>=M}.
    """
    p = F.domain.p
    pn = p ** n
    if F.M < pn and n > 0:
        raise PrecisionError(f"t-precision {F.M} < p^n = {pn}")
    G = F.group
    Gn = G.times_cyclic(pn) if n > 0 else G
    powers = _cminus1_powers(pn, F.M)
    out = [F.domain.zero()] * Gn.order
    for k, c in enumerate(F.coeffs):
        if c.is_zero():
            continue
        for g, a in enumerate(c.coeffs):
            if a == 0:
                continue
            base = list(G.vector(g))
            for i, b in enumerate(powers[k]):
                if b:
                    idx = Gn.index(base + [i]) if n > 0 else g
                    out[idx] = out[idx] + a * b
    elem = GroupRingElem(Gn, F.domain, out)
    cert = level_precision(p, n, F.M) if n > 0 else INF
    return elem, cert


def gamma_power(a: int, domain, M: int, group: AbGroup = TRIVIAL, u: int | None = None,
                a_prec: float = INF) -> EqSeries:
    """(1 + t)^a = sum_k C(a, k) t^k for an integer representative a.

    If a is only known mod p^{a_prec}, coefficient k is certified to
    a_prec - v_p(k!) digits; that bound is attached as ``prec``.
    """
    p = domain.p
    coeffs, prec = [], []
    for k in range(M):
        coeffs.append(_gen_binomial(a, k))
        prec.append(min(domain.N, a_prec - vp(math.factorial(k), p)))
    s = EqSeries.from_scalars(coeffs, domain, M, group, u)
    if a_prec != INF:
        s.prec = prec
    return s


def _gen_binomial(a: int, k: int) -> int:
    num = 1
    for i in range(k):
        num *= a - i
    return num // math.factorial(k)


def vandermonde_valuation(nodes: Sequence[CyclotomicCoeff]) -> float:
    total = 0
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            total += valuation(nodes[j] - nodes[i])
    return total


def interpolate_from_values(points: Sequence[tuple[CyclotomicCoeff, CyclotomicCoeff]], t_prec: int,
                            u: int | None = None) -> EqSeries:
    """Polynomial through the points (Newton divided differences), truncated at t_prec.

    Every coefficient is certified to (input precision) - v(Vandermonde).
    """
    if len(points) < t_prec:
        raise ValueError("need at least t_prec sample points")
    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    ring = xs[0].ring
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if valuation(xs[j] - xs[i]) == INF:
                raise ValueError("coincident interpolation nodes")
    V = vandermonde_valuation(xs)
    in_prec = min(min(x.prec for x in xs), min(y.prec for y in ys))
    cert = in_prec - V
    if cert <= 0:
        raise PrecisionError(f"precision exhausted: input {in_prec}, Vandermonde loss {V}")
    n = len(xs)
    dd = list(ys)
    newton = [dd[0]]
    for level in range(1, n):
        nxt = []
        for i in range(n - level):
            diff = dd[i + 1] - dd[i]
            den = xs[i + level] - xs[i]
            if valuation(diff) < valuation(den) and valuation(diff) != INF:
                raise ArithmeticError("interpolating polynomial is not integral")
            nxt.append(diff / den if not diff.is_zero() else ring.zero().with_prec(diff.prec))
        dd = nxt
        newton.append(dd[0])
    # expand the Newton form
    poly = [ring.zero()] * n
    basis = [ring.one()] + [ring.zero()] * (n - 1)
    for k in range(n):
        for i in range(n):
            poly[i] = poly[i] + newton[k] * basis[i]
        nb = [ring.zero()] * n
        for i in range(n - 1):
            nb[i + 1] = nb[i + 1] + basis[i]
            nb[i] = nb[i] - xs[k] * basis[i]
        basis = nb
    poly = [c.with_prec(cert) for c in poly[:t_prec]]
    s = EqSeries.from_scalars(poly, ring, t_prec, TRIVIAL, u)
    s.prec = [cert] * t_prec
    return s


def evaluate_scalar(coeffs: Sequence[CyclotomicCoeff], x: CyclotomicCoeff) -> CyclotomicCoeff:
    acc = x.ring.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
