"""Equivariant L-values of abelian fields over Q and their p-adic interpolation.

Fields are given as K = Q(zeta_f)^H for a subgroup H of (Z/f)^x with f the
exact conductor, so G = Gal(K/Q) = (Z/f)^x / H and sigma_a is the image of a.
Stickelberger elements use

    Theta_S(s) = sum_chi L_S(chi^-1, s) e_chi = sum_sigma zeta_S(s, sigma) sigma^-1,

computed by two independent routes: partial zeta values
zeta(1 - m, a mod f) = -f^(m-1) B_m(a/f) / m, and generalized Bernoulli
numbers of the (primitive) characters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

from .coeff import (
    INF,
    CycloField,
    CycloNumber,
    factorize,
    is_prime,
    make_coeff_ring,
    padic_log,
    teichmuller_int,
    vp,
)
from .grp import (
    AbGroup,
    Character,
    GroupRingElem,
    IntegersMod,
    Rationals,
    char_value,
    descend,
    enumerate_characters,
    inverse_char_transform,
    quotient_group,
)
from .iwasawa import (
    EqSeries,
    PrecisionError,
    interpolate_from_values,
    project_level,
    twist_series,
    twist_t_loss,
    vandermonde_valuation,
)

QQ = Rationals()


# --------------------------------------------------------------------------
# Bernoulli numbers and polynomials

@lru_cache(maxsize=None)
def bernoulli_number(m: int) -> Fraction:
    """B_m with B_1 = -1/2."""
    if m < 0:
        raise ValueError("m must be >= 0")
    B = [Fraction(1)]
    for n in range(1, m + 1):
        B.append(-sum(math.comb(n + 1, k) * B[k] for k in range(n)) / (n + 1))
    return B[m]


@lru_cache(maxsize=None)
def bernoulli_poly(m: int) -> tuple[Fraction, ...]:
    """Coefficients of B_m(x), lowest degree first."""
    return tuple(math.comb(m, k) * bernoulli_number(m - k) for k in range(m + 1))


def bernoulli_poly_value(m: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(bernoulli_poly(m)):
        acc = acc * x + c
    return acc


def partial_zeta(a: int, f: int, m: int) -> Fraction:
    """zeta(1 - m, a mod f) = sum over n = a mod f, n >= 1, of n^(m-1), regularized."""
    if m < 1:
        raise ValueError("m must be >= 1")
    a = a % f or f
    return -Fraction(f) ** (m - 1) * bernoulli_poly_value(m, Fraction(a, f)) / m


# --------------------------------------------------------------------------
# unit groups (Z/f)^x

class UnitGroup:
    """(Z/f)^x as a product of cyclic groups with an explicit discrete log."""

    def __init__(self, f: int):
        if f < 1:
            raise ValueError("modulus must be >= 1")
        self.f = f
        gens: list[int] = []
        orders: list[int] = []
        for q, k in sorted(factorize(f).items()):
            qk = q ** k
            rest = f // qk
            local: list[tuple[int, int]] = []
            if q == 2:
                if k >= 2:
                    local.append((qk - 1, 2))
                if k >= 3:
                    local.append((5, 2 ** (k - 2)))
            else:
                local.append((_primitive_root(qk), qk - qk // q))
            for g, d in local:
                gens.append(_crt(g, qk, 1, rest))
                orders.append(d)
        self.gens = gens
        self.orders = orders
        self.table: dict[int, tuple[int, ...]] = {}
        for vec in product(*[range(d) for d in orders]):
            x = 1
            for g, e in zip(gens, vec):
                x = x * pow(g, e, f) % f
            self.table[x % f] = vec
        if f == 1:
            self.table = {0: ()}

    @property
    def order(self) -> int:
        return len(self.table)

    def dlog(self, a: int) -> tuple[int, ...]:
        try:
            return self.table[a % self.f]
        except KeyError:
            raise ValueError(f"{a} is not a unit mod {self.f}") from None

    def elements(self) -> list[int]:
        return sorted(self.table)


def _primitive_root(qk: int) -> int:
    phi = len([a for a in range(1, qk) if math.gcd(a, qk) == 1])
    primes = list(factorize(phi))
    for g in range(2, qk):
        if math.gcd(g, qk) == 1 and all(pow(g, phi // r, qk) != 1 for r in primes):
            return g
    return 1


def _crt(a: int, m: int, b: int, n: int) -> int:
    """x = a mod m, x = b mod n for coprime m, n."""
    if n == 1:
        return a % m
    return (a * n * pow(n, -1, m) + b * m * pow(m, -1, n)) % (m * n)


def _lift_coprime(a: int, d: int, f: int) -> int:
    """Some b = a mod d with gcd(b, f) = 1 (d divides f, gcd(a, d) = 1)."""
    for k in range(f // d + 1):
        b = a + k * d
        if math.gcd(b, f) == 1:
            return b % f if f > 1 else b
    raise ValueError("no coprime lift")


# --------------------------------------------------------------------------
# abelian fields

class AbelianFieldSpec:
    """K = Q(zeta_f)^H with f the conductor of K."""

    def __init__(self, conductor: int, H: Iterable[int] = (), label: str | None = None):
        f = int(conductor)
        if f < 3:
            raise ValueError("conductor must be >= 3")
        self.f = f
        self.units = UnitGroup(f)
        self.H_gens = sorted({int(h) % f for h in H})
        for h in self.H_gens:
            if math.gcd(h, f) != 1:
                raise ValueError(f"{h} is not a unit mod {f}")
        self.qmap = quotient_group(self.units.orders, [self.units.dlog(h) for h in self.H_gens])
        G0 = self.qmap.group
        if G0.order == 1:
            raise ValueError("H must be a proper subgroup (K != Q)")
        jidx = self.qmap(self.units.dlog(f - 1))
        self.group = AbGroup(G0.orders, None if jidx == 0 else G0.vector(jidx))
        self.H_set = frozenset(a for a in self.units.elements() if self.sigma(a) == 0)
        cond = self._conductor()
        if cond != f:
            raise ValueError(f"f = {f} is not the conductor of K (conductor is {cond})")
        self.label = label or f"Q(zeta_{f})^{list(self.H_gens)}"
        self._lifts: dict[int, int] = {}
        for a in self.units.elements():
            self._lifts.setdefault(self.sigma(a), a)

    def _conductor(self) -> int:
        for d in sorted(x for x in range(1, self.f + 1) if self.f % x == 0):
            if all(a in self.H_set for a in self.units.elements() if a % d == 1 % d):
                return d
        return self.f

    def __repr__(self) -> str:
        return f"AbelianFieldSpec({self.f}, {self.H_gens})"

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianFieldSpec) and self.f == other.f and self.H_set == other.H_set

    def __hash__(self) -> int:
        return hash((self.f, self.H_set))

    @property
    def degree(self) -> int:
        return self.group.order

    @property
    def ramified_primes(self) -> list[int]:
        return sorted(factorize(self.f))

    def is_totally_real(self) -> bool:
        return self.group.j is None

    def sigma(self, a: int) -> int:
        """Index in G of sigma_a, a prime to f."""
        return self.qmap(self.units.dlog(a))

    def frobenius(self, ell: int) -> int:
        if self.f % ell == 0:
            raise ValueError(f"{ell} ramifies in K")
        return self.sigma(ell)

    def lift(self, g: int) -> int:
        """A residue a mod f with sigma_a = g."""
        return self._lifts[g]

    def contains_mu_p(self, p: int) -> bool:
        return self.f % p == 0 and all(a % p == 1 for a in self.H_set)

    def adjoin_mu_p(self, p: int) -> "AbelianFieldSpec":
        """K(mu_p): H' = {a mod lcm(f, p) : a mod f in H, a = 1 mod p}."""
        F = math.lcm(self.f, p)
        Hp = [a for a in UnitGroup(F).elements() if a % self.f in self.H_set and a % p == 1]
        return AbelianFieldSpec(F, Hp, label=f"{self.label}(mu_{p})")

    def restriction(self, other: "AbelianFieldSpec") -> list[int]:
        """Gal(self/Q) -> Gal(other/Q) for a subfield ``other``: index map."""
        if self.f % other.f:
            raise ValueError("not a subfield")
        out = []
        for g in self.group.elements():
            out.append(other.sigma(self.lift(g) % other.f))
        for a in self.H_set:
            if other.sigma(a % other.f) != 0:
                raise ValueError("not a subfield")
        return out

    # characters ---------------------------------------------------------
    def characters(self) -> list[Character]:
        return enumerate_characters(self.group)

    def dirichlet(self, chi: Character) -> "DirichletCharacter":
        D = self.group.exponent
        vals = {a: chi.exp_of(self.sigma(a)) for a in self.units.elements()}
        return DirichletCharacter(self.f, D, vals)

    def teichmuller_character(self, p: int) -> Character:
        """omega: sigma_a -> Teichmuller(a mod p); needs mu_p in K."""
        if not self.contains_mu_p(p):
            raise ValueError("omega is a character of G only when mu_p lies in K")
        D = self.group.exponent
        ring = make_coeff_ring(p, 1, D)
        gens = [self.group.generator(i) for i in range(len(self.group.orders))]
        for chi in self.characters():
            if all(chi.value(g, ring) == ring.from_int(self.lift(g) % p) for g in gens):
                return chi
        raise ArithmeticError("Teichmuller character not found")

    def c_data(self, p: int, N: int) -> list[int]:
        """Values of the cyclotomic character on the generators of G, mod p^N."""
        if not self.contains_mu_p(p):
            raise ValueError("the cyclotomic character factors through G only when mu_p lies in K")
        return [teichmuller_int(self.lift(self.group.generator(i)) % p, p, N)
                for i in range(len(self.group.orders))]

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"conductor": self.f, "H": list(self.H_gens)}

    @classmethod
    def from_json(cls, d: dict) -> "AbelianFieldSpec":
        return cls(int(d["conductor"]), d.get("H", []), d.get("label"))


def quadratic_field(D: int) -> AbelianFieldSpec:
    """Q(sqrt(D)) for a fundamental discriminant D."""
    f = abs(D)
    units = UnitGroup(f).elements()
    H = [a for a in units if kronecker(D, a) == 1]
    return AbelianFieldSpec(f, H, label=f"Q(sqrt({D}))" if D % 4 else f"Q(sqrt({D // 4}))")


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D / n) for n >= 1."""
    if n == 1:
        return 1
    out = 1
    for q, e in factorize(n).items():
        if q == 2:
            if D % 2 == 0:
                return 0
            s = 1 if D % 8 in (1, 7) else -1
        else:
            r = D % q
            if r == 0:
                return 0
            s = 1 if pow(r, (q - 1) // 2, q) == 1 else -1
        out *= s ** e
    return out


def enumerate_abelian_fields(max_conductor: int) -> list[AbelianFieldSpec]:
    """All abelian K/Q, K != Q, with conductor <= max_conductor (each exactly once)."""
    out = []
    for f in range(3, max_conductor + 1):
        if f % 4 == 2:
            continue
        U = UnitGroup(f)
        elems = U.elements()
        subgroups: set[frozenset[int]] = set()
        for gens in _generating_sets(elems, len(U.orders)):
            subgroups.add(_closure(gens, f))
        for Hs in sorted(subgroups, key=lambda s: (len(s), sorted(s))):
            if len(Hs) == len(elems):
                continue
            try:
                out.append(AbelianFieldSpec(f, sorted(Hs)))
            except ValueError:
                continue
    return out


def _generating_sets(elems: Sequence[int], rank: int):
    for k in range(0, rank + 1):
        yield from combinations(elems, k)


def _closure(gens: Sequence[int], f: int) -> frozenset[int]:
    S = {1 % f}
    frontier = [1 % f]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % f
            if y not in S:
                S.add(y)
                frontier.append(y)
    return frozenset(S)


# --------------------------------------------------------------------------
# Dirichlet characters

@dataclass(frozen=True)
class DirichletCharacter:
    """chi(a) = zeta_D^values[a] on units mod f (0 elsewhere)."""

    modulus: int
    D: int
    values: dict = field(hash=False, compare=False)

    @classmethod
    def trivial(cls, f: int = 1) -> "DirichletCharacter":
        return cls(f, 1, {a: 0 for a in UnitGroup(f).elements()})

    @classmethod
    def from_kronecker(cls, disc: int) -> "DirichletCharacter":
        f = abs(disc)
        return cls(f, 2, {a: 0 if kronecker(disc, a) == 1 else 1 for a in UnitGroup(f).elements()})

    def __call__(self, a: int) -> CycloNumber:
        F = CycloField(self.D)
        k = self.values.get(a % self.modulus)
        if k is None:
            return F.zero()
        return F.root_of_unity(self.D, k)

    def exponent(self, a: int) -> int | None:
        return self.values.get(a % self.modulus)

    def is_trivial(self) -> bool:
        return all(v % self.D == 0 for v in self.values.values())

    def is_even(self) -> bool:
        return self.exponent(-1) % self.D == 0

    @property
    def conductor(self) -> int:
        f = self.modulus
        for d in sorted(x for x in range(1, f + 1) if f % x == 0):
            if all(v % self.D == 0 for a, v in self.values.items() if a % d == 1 % d):
                return d
        return f

    def primitive(self) -> "DirichletCharacter":
        d = self.conductor
        if d == self.modulus:
            return self
        vals = {a: self.values[_lift_coprime(a, d, self.modulus) % self.modulus]
                for a in UnitGroup(d).elements()}
        return DirichletCharacter(d, self.D, vals)

    def inverse(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, self.D, {a: (-v) % self.D for a, v in self.values.items()})

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        f = math.lcm(self.modulus, other.modulus)
        D = math.lcm(self.D, other.D)
        vals = {}
        for a in UnitGroup(f).elements():
            vals[a] = (self.values[a % self.modulus] * (D // self.D)
                       + other.values[a % other.modulus] * (D // other.D)) % D
        return DirichletCharacter(f, D, vals)


def generalized_bernoulli(chi: DirichletCharacter, m: int) -> CycloNumber:
    """B_{m,chi} = f^(m-1) sum_{a=1}^f chi(a) B_m(a/f), f the modulus of chi."""
    if m < 1:
        raise ValueError("m must be >= 1")
    f = chi.modulus
    F = CycloField(chi.D)
    acc = F.zero()
    for a in range(1, f + 1):
        k = chi.exponent(a)
        if k is None:
            continue
        acc = acc + F.root_of_unity(chi.D, k) * bernoulli_poly_value(m, Fraction(a, f))
    return acc * Fraction(f) ** (m - 1)


def l_value_S(chi: DirichletCharacter, m: int, S: Iterable[int]) -> CycloNumber:
    """L_S(chi, 1 - m) = -B_{m,chi}/m * prod_{l in S} (1 - chi(l) l^(m-1)), chi made primitive."""
    S = sorted(set(int(l) for l in S))
    prim = chi.primitive()
    missing = [q for q in factorize(prim.modulus) if q not in S] if prim.modulus > 1 else []
    if missing:
        raise ValueError(f"S is missing ramified primes {missing}")
    val = generalized_bernoulli(prim, m) * Fraction(-1, m)
    for l in S:
        val = val * (1 - prim(l) * Fraction(l) ** (m - 1))
    return val


# --------------------------------------------------------------------------
# equivariant values

@dataclass
class LValueElement:
    """An element of Q[G] with the data it was computed from."""

    elem: GroupRingElem
    S: tuple[int, ...]
    T: tuple[int, ...]
    m: int
    level: int = 0

    def coefficients(self) -> list[Fraction]:
        return [Fraction(c) for c in self.elem.coeffs]

    def denominator(self) -> int:
        return math.lcm(*[c.denominator for c in self.coefficients()])

    def to_json(self) -> dict:
        return {"S": list(self.S), "T": list(self.T), "m": self.m, "level": self.level,
                "group": self.elem.group.to_json(),
                "coeffs": [str(c) for c in self.coefficients()]}


def _check_S(K: AbelianFieldSpec, S: Iterable[int]) -> tuple[int, ...]:
    S = tuple(sorted(set(int(l) for l in S)))
    for l in S:
        if not is_prime(l):
            raise ValueError(f"{l} is not a prime")
    missing = [q for q in K.ramified_primes if q not in S]
    if missing:
        raise ValueError(f"S must contain the ramified primes {missing}")
    return S


def _check_T(K: AbelianFieldSpec, S: Sequence[int], T: Iterable[int]) -> tuple[int, ...]:
    T = tuple(sorted(set(int(l) for l in T)))
    for l in T:
        if not is_prime(l):
            raise ValueError(f"{l} is not a prime")
        if l in S:
            raise ValueError(f"T and S overlap at {l}")
        if K.f % l == 0:
            raise ValueError(f"{l} ramifies in K")
    return T


def _euler_factor(G: AbGroup, g: int, c) -> GroupRingElem:
    """1 - c * g^-1 in Q[G]."""
    out = GroupRingElem.one(G, QQ)
    return out - GroupRingElem.basis(G, QQ, G.inv[g], Fraction(c))


def theta_S(K: AbelianFieldSpec, S: Iterable[int], m: int, route: str = "partial",
            cross_check: bool = False) -> LValueElement:
    """Theta_S(1 - m) in Q[G]."""
    if m < 1:
        raise ValueError("m must be >= 1")
    S = _check_S(K, S)
    if route == "partial":
        elem = _theta_partial(K, S, m)
    elif route == "character":
        elem = _theta_character(K, S, m)
    else:
        raise ValueError(f"unknown route {route!r}")
    if cross_check:
        other = _theta_character(K, S, m) if route == "partial" else _theta_partial(K, S, m)
        if other != elem:
            raise ArithmeticError("partial-zeta and character routes disagree")
    return LValueElement(elem, S, (), m)


def _theta_partial(K: AbelianFieldSpec, S: Sequence[int], m: int) -> GroupRingElem:
    G = K.group
    coeffs = [Fraction(0)] * G.order
    for a in K.units.elements():
        coeffs[G.inv[K.sigma(a)]] += partial_zeta(a, K.f, m)
    elem = GroupRingElem(G, QQ, coeffs)
    for l in S:
        if K.f % l:
            elem = elem * _euler_factor(G, K.sigma(l), Fraction(l) ** (m - 1))
    return elem


def _theta_character(K: AbelianFieldSpec, S: Sequence[int], m: int) -> GroupRingElem:
    G = K.group
    F = CycloField(max(G.exponent, 1))
    chars = K.characters()
    vals = [l_value_S(K.dirichlet(chi).inverse(), m, S) for chi in chars]
    x = inverse_char_transform(vals, G, F, chars)
    # Galois stability: every coefficient must already be rational
    for c in x.coeffs:
        if not c.is_rational():
            raise ArithmeticError("Theta_S is not Galois-stable")
    return descend(x, QQ)


def delta_T(K: AbelianFieldSpec, T: Iterable[int], m: int, S: Iterable[int] = ()) -> LValueElement:
    """prod_{v in T} (1 - sigma_v^-1 Nv^m)."""
    S = tuple(sorted(set(S)))
    T = _check_T(K, S, T)
    if not T:
        raise ValueError("T must be non-empty")
    G = K.group
    elem = GroupRingElem.one(G, QQ)
    for l in T:
        elem = elem * _euler_factor(G, K.frobenius(l), l ** m)
    return LValueElement(elem, S, T, m)


def theta_ST(K: AbelianFieldSpec, S: Iterable[int], T: Iterable[int], m: int,
             route: str = "partial", cross_check: bool = False) -> LValueElement:
    th = theta_S(K, S, m, route, cross_check)
    if not list(T):
        return th
    d = delta_T(K, T, m, th.S)
    return LValueElement(d.elem * th.elem, th.S, d.T, m)


# --------------------------------------------------------------------------
# integrality

def w_m_part(K: AbelianFieldSpec, q: int, m: int) -> int:
    """q-part of w_m(K) = |Q/Z(m)^{G_K}|: largest q^k with a^m = 1 mod q^k on G_K."""
    k = 0
    while True:
        qk = q ** (k + 1)
        L = math.lcm(K.f, qk)
        ok = all(pow(a, m, qk) == 1 for a in UnitGroup(L).elements() if a % K.f in K.H_set)
        if not ok:
            return q ** k
        k += 1


def w_m(K: AbelianFieldSpec, m: int) -> int:
    cands = set(factorize(K.f)) | {q for q in range(2, m + 2) if is_prime(q) and m % (q - 1) == 0}
    out = 1
    for q in sorted(cands):
        out *= w_m_part(K, q, m)
    return out


@dataclass
class IntegralityVerdict:
    status: str  # "pass", "fail", "not-applicable"
    field: str
    S: tuple[int, ...]
    T: tuple[int, ...]
    p: int
    m: int
    hypothesis: str
    element: LValueElement | None = None
    bad_coefficients: list[int] = field(default_factory=list)
    bad_characters: list[tuple[int, ...]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "field": self.field, "S": list(self.S), "T": list(self.T),
                "p": self.p, "m": self.m, "hypothesis": self.hypothesis,
                "element": None if self.element is None else self.element.to_json(),
                "bad_coefficients": self.bad_coefficients,
                "bad_characters": [list(c) for c in self.bad_characters]}


def integrality_hypothesis(K: AbelianFieldSpec, T: Sequence[int], p: int, m: int) -> tuple[bool, str]:
    if any(l != p for l in T):
        return True, "T contains a prime not above p"
    w = w_m_part(K, p, m)
    if w == 1:
        return True, f"p does not divide w_{m}(K)"
    return False, f"T has no prime away from p and p^{int(vp(w, p))} divides w_{m}(K)"


def strong_hypothesis(K: AbelianFieldSpec, T: Sequence[int], m: int) -> tuple[bool, str]:
    """Hypotheses under which Theta_{S,T}(1 - m) lies in Z[G]."""
    if len(set(T)) >= 2:
        return True, "T contains two primes of distinct residue characteristics"
    w = w_m(K, m)
    if any(w % l for l in T):
        return True, f"T contains a prime coprime to w_{m}(K) = {w}"
    return False, f"single prime of T divides w_{m}(K) = {w}"


def denominator_report(x: LValueElement, p: int) -> tuple[list[int], list[tuple[int, ...]]]:
    """Group elements and characters at which p divides a denominator."""
    bad = [g for g, c in enumerate(x.coefficients()) if c.denominator % p == 0]
    chars: list[tuple[int, ...]] = []
    if bad:
        G = x.elem.group
        F = CycloField(max(G.exponent, 1))
        for chi in enumerate_characters(G):
            v = char_value(x.elem, chi, F)
            if any(Fraction(c).denominator % p == 0 for c in v.coeffs):
                chars.append(chi.exps)
    return bad, chars


def integrality_check(K: AbelianFieldSpec, S: Iterable[int], T: Iterable[int], p: int, m: int,
                      strong: bool = False) -> IntegralityVerdict:
    """Theta_{S,T}(1 - m) in Z_(p)[G] (or in Z[G] with ``strong``)."""
    S = _check_S(K, S)
    T = _check_T(K, S, T)
    ok, why = strong_hypothesis(K, T, m) if strong else integrality_hypothesis(K, T, p, m)
    elem = theta_ST(K, S, T, m)
    if strong:
        bad = [g for g, c in enumerate(elem.coefficients()) if c.denominator != 1]
        chars: list[tuple[int, ...]] = []
    else:
        bad, chars = denominator_report(elem, p)
    if not ok:
        return IntegralityVerdict("not-applicable", K.label, S, T, p, m, why, elem, bad, chars)
    return IntegralityVerdict("fail" if bad else "pass", K.label, S, T, p, m, why, elem, bad, chars)


def integrality_battery(max_conductor: int = 40, ms: Sequence[int] = (1, 2, 3, 4),
                        ps: Sequence[int] = (3, 5, 7), prime_bound: int = 13) -> list[IntegralityVerdict]:
    """All fields of conductor <= max_conductor, S = ramified primes, T of size 1 and 2."""
    primes = [l for l in range(2, prime_bound + 1) if is_prime(l)]
    out = []
    for K in enumerate_abelian_fields(max_conductor):
        S = tuple(K.ramified_primes)
        admissible = [l for l in primes if l not in S]
        Ts = [(l,) for l in admissible] + list(combinations(admissible, 2))
        for m in ms:
            th = theta_S(K, S, m).elem
            G = K.group
            for T in Ts:
                elem = th
                for l in T:
                    elem = elem * _euler_factor(G, K.frobenius(l), l ** m)
                val = LValueElement(elem, S, T, m)
                for p in ps:
                    ok, why = integrality_hypothesis(K, T, p, m)
                    bad, chars = denominator_report(val, p)
                    status = "not-applicable" if not ok else ("fail" if bad else "pass")
                    out.append(IntegralityVerdict(status, K.label, S, T, p, m, why, None, bad, chars))
    return out


# --------------------------------------------------------------------------
# the cyclotomic Zp-tower

def gamma_exponent(a: int, p: int, digits: int, u: int | None = None) -> int:
    """x mod p^digits with <a> = u^x, <a> = a / omega(a) the principal unit part."""
    u = 1 + p if u is None else u
    if a % p == 0:
        raise ValueError("a must be prime to p")
    W = digits + 2
    ring = make_coeff_ring(p, W, 1)
    q = p ** W
    principal = a * pow(teichmuller_int(a, p, W), -1, q) % q
    la = padic_log(ring.from_int(principal)).to_int()
    lu = padic_log(ring.from_int(u)).to_int()
    ku = int(vp(lu, p))
    if ku == INF or la % p ** ku:
        raise ArithmeticError("principal unit is not a power of u")
    x = (la // p ** ku) * pow(lu // p ** ku, -1, q) % p ** digits
    return x


class CyclotomicTower:
    """K_n = K Q_n with Gal(K_n/Q) = G x Z/p^n, gamma <-> the unit u = 1 + p.

    The splitting sends sigma_a (a mod lcm(f, p^(n+1))) to
    (sigma_{a mod f}, log<a>/log u mod p^n).  It needs K and Q_1 to be
    linearly disjoint, which is checked at construction.
    """

    def __init__(self, K: AbelianFieldSpec, p: int, u: int | None = None):
        if p < 3 or not is_prime(p):
            raise ValueError("p must be an odd prime")
        self.K = K
        self.p = p
        self.u = 1 + p if u is None else u
        if (self.u - 1) % p or (self.u - 1) % (p * p) == 0:
            raise ValueError("u must be a topological generator of 1 + pZp")
        F = self.conductor(1)
        image = {self._split(a, 1) for a in UnitGroup(F).elements()}
        if len(image) != K.group.order * p:
            raise ValueError("K meets the first layer of the cyclotomic Zp-extension")

    def conductor(self, n: int) -> int:
        return math.lcm(self.K.f, self.p ** (n + 1))

    def level_group(self, n: int) -> AbGroup:
        return self.K.group.times_cyclic(self.p ** n) if n > 0 else self.K.group

    def _split(self, a: int, n: int) -> tuple[int, int]:
        g = self.K.sigma(a % self.K.f)
        x = gamma_exponent(a, self.p, n, self.u) if n > 0 else 0
        return g, x

    def sigma(self, a: int, n: int) -> int:
        """Index in G x Z/p^n of sigma_a."""
        g, x = self._split(a, n)
        if n == 0:
            return g
        return self.level_group(n).index(list(self.K.group.vector(g)) + [x])

    def frobenius_data(self, T: Iterable[int], digits: int):
        """TPrime records (Nv, Frobenius in G, Gamma exponent mod p^digits)."""
        from .motive import TPrime
        out = []
        for l in sorted(set(T)):
            if l == self.p:
                raise ValueError("primes of T must not lie above p")
            out.append(TPrime(l, self.K.frobenius(l), gamma_exponent(l, self.p, digits, self.u), digits))
        return out

    # finite levels ------------------------------------------------------
    def tower_element(self, S: Iterable[int], T: Iterable[int], n: int, m: int) -> LValueElement:
        """Theta^{(n)}_{S,T}(1 - m) over K_n by partial zeta values at conductor f p^(n+1)."""
        S = tuple(sorted(set(S) | {self.p}))
        S = _check_S(self.K, S)
        T = _check_T(self.K, S, T)
        Fn = self.conductor(n)
        if Fn > 200000:
            raise MemoryError(f"conductor {Fn} exceeds the size guard")
        Gn = self.level_group(n)
        coeffs = [Fraction(0)] * Gn.order
        for a in UnitGroup(Fn).elements():
            coeffs[Gn.inv[self.sigma(a, n)]] += partial_zeta(a, Fn, m)
        elem = GroupRingElem(Gn, QQ, coeffs)
        for l in S:
            if Fn % l:
                elem = elem * _euler_factor(Gn, self.sigma(l, n), Fraction(l) ** (m - 1))
        for l in T:
            elem = elem * _euler_factor(Gn, self.sigma(l, n), l ** m)
        return LValueElement(elem, S, T, m, n)

    def project_down(self, x: GroupRingElem, n: int, k: int) -> GroupRingElem:
        """Restriction Q[G x Z/p^n] -> Q[G x Z/p^k]."""
        if k > n:
            raise ValueError("cannot project upward")
        Gn, Gk = self.level_group(n), self.level_group(k)
        out = [x.domain.zero()] * Gk.order
        r = len(self.K.group.orders)
        for g, c in enumerate(x.coeffs):
            vec = list(Gn.vector(g)) if n > 0 else list(self.K.group.vector(g))
            base = vec[:r]
            idx = Gk.index(base + [vec[r] % self.p ** k]) if k > 0 else self.K.group.index(base)
            out[idx] = out[idx] + c
        return GroupRingElem(Gk, x.domain, out)

    def coherence_check(self, S: Iterable[int], T: Iterable[int], n: int, m: int) -> bool:
        top = self.tower_element(S, T, n, m)
        below = self.tower_element(S, T, n - 1, m)
        return self.project_down(top.elem, n, n - 1) == below.elem

    # Iwasawa-level objects ------------------------------------------------
    def delta_series(self, T: Iterable[int], N: int, M: int, power: int = 1) -> EqSeries:
        """prod_v (1 - Nv^power (sigma_v, gamma^{a_v})^-1) in Z/p^N[G][t]/t^M."""
        from .fitcalc import LambdaSpec
        from .motive import delta_factor
        spec = LambdaSpec(self.K.group, self.p, N, M, self.u)
        digits = N + int(vp(math.factorial(max(M - 1, 1)), self.p)) + 1
        out = spec.one()
        for v in self.frobenius_data(T, digits):
            out = out * delta_factor(spec, v, power)
        return out

    def delta_twist_check(self, T: Iterable[int], m: int, N: int, M: int) -> "TwistReport":
        """delta_T(1 - m) against t_{1-m}(delta_T(0)), exact modulo (p^N, t^M)."""
        c = self.K.c_data(self.p, N)
        direct = self.delta_series(T, N, M, m)
        n = 1 - m
        big = M
        while twist_t_loss(N, big, n, self.p, self.u) < M:
            big += 1
        twisted = twist_series(self.delta_series(T, N, big, 1), n, c).truncate(M)
        ok = direct == twisted
        return TwistReport(ok, N, M, m, direct, twisted)

    def stickelberger_series(self, S: Iterable[int], T: Iterable[int], N: int, M: int,
                             oversample: int = 2) -> "StickelbergerSeries":
        return stickelberger_series(self, S, T, N, M, oversample)


@dataclass
class TwistReport:
    ok: bool
    N: int
    M: int
    m: int
    lhs: object
    rhs: object
    digits: float = INF

    def to_json(self) -> dict:
        return {"ok": self.ok, "N": self.N, "M": self.M, "m": self.m,
                "digits": "inf" if self.digits == INF else int(self.digits)}


@dataclass
class StickelbergerSeries:
    series: EqSeries            # over Z/p^N'[G], minus part
    certified: int              # N'
    tower: CyclotomicTower
    S: tuple[int, ...]
    T: tuple[int, ...]
    nodes: int
    working_precision: int
    even_vanish: bool


def _to_ring(x: GroupRingElem, ring) -> GroupRingElem:
    return GroupRingElem(x.group, ring, [ring.from_fraction(Fraction(c)) for c in x.coeffs])


def stickelberger_series(tower: CyclotomicTower, S: Iterable[int], T: Iterable[int], N: int, M: int,
                         oversample: int = 2) -> StickelbergerSeries:
    """Theta_{S,T}^(inf) in Zp[G]^-[[t]] modulo (p^N, t^M), by interpolation.

    For an odd character chi the series chi(Theta) takes the value
    (chi omega^(m-1))(Theta_{S,T}(1 - m)) at t = u^(1-m) - 1.  With k nodes the
    interpolating polynomial agrees with chi(Theta) in degree j modulo
    p^(k - j) (Weierstrass division by the node polynomial), and is
    certified to (working precision - v(Vandermonde)) digits.
    """
    K, p, u = tower.K, tower.p, tower.u
    G = K.group
    if G.j is None:
        raise ValueError("K is totally real: the minus part is zero")
    if G.order % p == 0:
        raise ValueError("p divides [K:Q]; the character decomposition is not integral")
    omega = K.teichmuller_character(p)
    S = _check_S(K, tuple(set(S) | {p}))
    T = _check_T(K, S, T)
    k_nodes = M + N - 1 + oversample
    xs_int = [Fraction(u) ** (1 - m) - 1 for m in range(1, k_nodes + 1)]
    V = sum(int(vp(xs_int[b] - xs_int[a], p)) for a in range(k_nodes) for b in range(a + 1, k_nodes))
    W = N + V + 2
    ring = make_coeff_ring(p, W, max(G.exponent, 1))
    xs = [ring.from_fraction(x) for x in xs_int]
    if vandermonde_valuation(xs) != V:
        raise ArithmeticError("node valuations are inconsistent")
    thetas = [_to_ring(theta_ST(K, S, T, m).elem, ring) for m in range(1, k_nodes + 1)]
    per: dict[Character, list] = {}
    even_vanish = True
    for chi in enumerate_characters(G):
        vals = [char_value(th, chi * omega ** (m - 1), ring) for m, th in zip(range(1, k_nodes + 1), thetas)]
        if not chi.is_odd():
            even_vanish &= all(v.is_zero() for v in vals)
            per[chi] = [ring.zero()] * M
            continue
        s = interpolate_from_values(list(zip(xs, vals)), M, u)
        per[chi] = s.scalar_list()
    cert = min(N, W - V, k_nodes - (M - 1))
    dom = IntegersMod(p, cert)
    chars = list(per)
    coeffs = []
    for j in range(M):
        x = inverse_char_transform([per[chi][j] for chi in chars], G, ring, chars)
        coeffs.append(_descend_certified(x, dom))
    series = EqSeries(G, dom, coeffs, u)
    if not even_vanish:
        raise ArithmeticError("even components of Theta do not vanish")
    return StickelbergerSeries(series, cert, tower, S, T, k_nodes, W, even_vanish)


def theta_twist_check(st: StickelbergerSeries, m: int, n: int) -> TwistReport:
    """Level-n image of t_{1-m}(Theta^(inf)) against Theta^{(n)}_{S,T}(1 - m)."""
    tower = st.tower
    p = tower.p
    F = st.series
    c = tower.K.c_data(p, st.certified)
    twisted = twist_series(F, 1 - m, c)
    if n > 0 and twisted.M < p ** n:
        raise PrecisionError(f"t-precision {twisted.M} after twisting is below p^{n}")
    lhs, cert = project_level(twisted, n)
    digits = min(st.certified, cert)
    if digits < 1:
        raise PrecisionError("no certified digits at this level")
    direct = tower.tower_element(st.S, st.T, n, m).elem
    q = p ** int(digits)
    a = [int(x) % q for x in lhs.coeffs]
    b = [_frac_mod_int(Fraction(x), q, p) for x in direct.coeffs]
    return TwistReport(a == b, st.certified, F.M, m, a, b, digits)


def _descend_certified(x: GroupRingElem, dom: IntegersMod) -> GroupRingElem:
    # ring is unramified (p does not divide the exponent of G): digits above p^cert are noise
    out = []
    for c in x.coeffs:
        digits = [a % dom.q for a in c.coeffs]
        if any(digits[1:]):
            raise ArithmeticError("interpolated Theta is not Galois-stable at the certified precision")
        out.append(digits[0])
    return GroupRingElem(x.group, dom, out)


def _frac_mod_int(x: Fraction, q: int, p: int) -> int:
    if x.denominator % p == 0:
        raise ArithmeticError("value is not p-integral")
    return x.numerator * pow(x.denominator, -1, q) % q


def restrict_series(F: EqSeries, index_map: Sequence[int], G: AbGroup) -> EqSeries:
    """Image of F under Zp[G'][[t]] -> Zp[G][[t]] induced by restriction G' -> G."""
    coeffs = []
    for c in F.coeffs:
        out = [F.domain.zero()] * G.order
        for g, a in enumerate(c.coeffs):
            out[index_map[g]] = out[index_map[g]] + a
        coeffs.append(GroupRingElem(G, F.domain, out))
    return EqSeries(G, F.domain, coeffs, F.u, F.prec)


def stickelberger_series_for(K: AbelianFieldSpec, S: Iterable[int], T: Iterable[int], p: int, N: int, M: int,
                             oversample: int = 2) -> tuple[EqSeries, StickelbergerSeries]:
    """Theta^(inf) for K: computed over K(mu_p) and restricted to K when mu_p is not in K."""
    big = K if K.contains_mu_p(p) else K.adjoin_mu_p(p)
    st = stickelberger_series(CyclotomicTower(big, p), S, T, N, M, oversample)
    if big is K:
        return st.series, st
    return restrict_series(st.series, big.restriction(K), K.group), st
