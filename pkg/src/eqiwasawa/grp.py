"""Finite abelian groups, group rings and characters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from typing import Iterable, Mapping, Sequence

from .coeff import (
    CoeffRingDesc,
    CycloField,
    CycloNumber,
    CyclotomicCoeff,
    frac_mod,
    teichmuller_int,
)


# --------------------------------------------------------------------------
# coefficient domains

@dataclass(frozen=True)
class Rationals:
    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, a: int):
        return Fraction(a)

    def from_fraction(self, x):
        return Fraction(x)

    def reduce(self, x):
        return x

    def root_of_unity(self, d: int, k: int = 1):
        k %= d
        if k == 0:
            return Fraction(1)
        if 2 * k == d:
            return Fraction(-1)
        raise ValueError("Q only contains the roots of unity +-1")

    def fmt(self, x) -> str:
        return str(x)

    def __str__(self) -> str:
        return "Q"


@dataclass(frozen=True)
class IntegersMod:
    """Z/p^N, i.e. Zp known to absolute precision N."""

    p: int
    N: int

    @property
    def q(self) -> int:
        return self.p ** self.N

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, a: int):
        return a % self.q

    def from_fraction(self, x):
        return frac_mod(x, self.q, self.p)

    def reduce(self, x):
        return x % self.q

    def root_of_unity(self, d: int, k: int = 1):
        if (self.p - 1) % d:
            raise ValueError(f"mu_{d} is not contained in Z_{self.p}")
        # fixed generator: Teichmuller lift of the smallest residue of order d
        for a in range(1, self.p):
            if pow(a, d, self.p) == 1 and all(pow(a, d // r, self.p) != 1 for r in _prime_divisors(d)):
                return pow(teichmuller_int(a, self.p, self.N), k % d, self.q)
        raise ValueError("no root of unity found")

    def fmt(self, x) -> str:
        return str(x)

    def __str__(self) -> str:
        return f"Z/{self.p}^{self.N}"


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _domain_fmt(domain, x) -> object:
    if isinstance(x, CyclotomicCoeff):
        return x.to_json()
    if isinstance(x, CycloNumber):
        return [str(c) for c in x.coeffs]
    return str(x)


def embed(x, target):
    """Map a coefficient (Fraction, int residue, CycloNumber) into ``target``."""
    if isinstance(target, CoeffRingDesc):
        if isinstance(x, CyclotomicCoeff):
            return x
        if isinstance(x, CycloNumber):
            return x.to_coeff(target)
        if isinstance(x, Fraction):
            return target.from_fraction(x)
        return target.from_int(x)
    if isinstance(target, CycloField):
        if isinstance(x, CycloNumber):
            return x
        return target.rational(x)
    if isinstance(target, IntegersMod):
        if isinstance(x, Fraction):
            return target.from_fraction(x)
        if isinstance(x, CyclotomicCoeff):
            return target.from_int(x.to_int())
        return target.from_int(x)
    if isinstance(target, Rationals):
        if isinstance(x, CycloNumber):
            return x.to_rational()
        return Fraction(x)
    raise TypeError(f"unsupported domain {target!r}")


# --------------------------------------------------------------------------
# groups

class AbGroup:
    """Product of cyclic groups Z/d_1 x ... x Z/d_k with an optional involution j.

    Elements are addressed by an integer index (mixed radix, last factor
    fastest) or by their exponent vector.
    """

    def __init__(self, cyclic_orders: Sequence[int], j: Sequence[int] | None = None):
        orders = tuple(int(d) for d in cyclic_orders)
        if any(d < 1 for d in orders):
            raise ValueError("cyclic orders must be >= 1")
        self.orders = orders
        self.order = math.prod(orders)
        strides, s = [], 1
        for d in reversed(orders):
            strides.append(s)
            s *= d
        self.strides = tuple(reversed(strides))
        self.j: int | None = None
        if j is not None:
            jv = tuple(int(a) % d for a, d in zip(j, orders))
            idx = self.index(jv)
            if idx == 0 or self.mul(idx, idx) != 0:
                raise ValueError("j must have order exactly 2")
            self.j = idx

    def __repr__(self) -> str:
        jv = None if self.j is None else list(self.vector(self.j))
        return f"AbGroup({list(self.orders)}, j={jv})"

    def __eq__(self, other) -> bool:
        return isinstance(other, AbGroup) and self.orders == other.orders and self.j == other.j

    def __hash__(self) -> int:
        return hash((self.orders, self.j))

    @cached_property
    def exponent(self) -> int:
        return reduce(lambda a, b: a * b // math.gcd(a, b), self.orders, 1)

    def index(self, vec: Sequence[int]) -> int:
        return sum((int(a) % d) * s for a, d, s in zip(vec, self.orders, self.strides))

    def vector(self, idx: int) -> tuple[int, ...]:
        return tuple((idx // s) % d for d, s in zip(self.orders, self.strides))

    @cached_property
    def _vectors(self) -> list[tuple[int, ...]]:
        return [self.vector(i) for i in range(self.order)]

    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    @cached_property
    def mul_table(self) -> list[list[int]]:
        vecs = self._vectors
        return [[self.index([x + y for x, y in zip(va, vb)]) for vb in vecs] for va in vecs]

    @cached_property
    def inv(self) -> list[int]:
        return [self.index([-x for x in v]) for v in self._vectors]

    def power(self, a: int, n: int) -> int:
        return self.index([x * n for x in self.vector(a)])

    def element_order(self, a: int) -> int:
        v = self.vector(a)
        return reduce(lambda s, t: s * t // math.gcd(s, t), [d // math.gcd(x, d) for x, d in zip(v, self.orders)], 1)

    def generator(self, i: int) -> int:
        v = [0] * len(self.orders)
        v[i] = 1
        return self.index(v)

    def to_json(self) -> dict:
        return {"cyclic_orders": list(self.orders), "j": None if self.j is None else list(self.vector(self.j))}

    @classmethod
    def from_json(cls, d: Mapping) -> "AbGroup":
        return cls(d["cyclic_orders"], d.get("j"))

    def times_cyclic(self, d: int) -> "AbGroup":
        """G x Z/d, with j carried over."""
        j = None if self.j is None else list(self.vector(self.j)) + [0]
        return AbGroup(list(self.orders) + [d], j)


# --------------------------------------------------------------------------
# characters

@dataclass(frozen=True)
class Character:
    """chi(g) = zeta_D^{sum a_i x_i D/d_i} with D the group exponent."""

    group: AbGroup
    exps: tuple[int, ...]

    def exp_of(self, g: int) -> int:
        G = self.group
        D = G.exponent
        return sum(a * x * (D // d) for a, x, d in zip(self.exps, G.vector(g), G.orders)) % D

    def value(self, g: int, domain):
        return domain.root_of_unity(self.group.exponent, self.exp_of(g))

    @property
    def order(self) -> int:
        D = self.group.exponent
        vals = [self.exp_of(self.group.generator(i)) for i in range(len(self.group.orders))]
        return reduce(lambda s, t: s * t // math.gcd(s, t), [D // math.gcd(v, D) for v in vals], 1)

    @property
    def parity(self) -> int | None:
        G = self.group
        if G.j is None:
            return None
        return 1 if self.exp_of(G.j) == 0 else -1

    def is_odd(self) -> bool:
        return self.parity == -1

    def is_trivial(self) -> bool:
        return all(a % d == 0 for a, d in zip(self.exps, self.group.orders))

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.group, tuple((a + b) % d for a, b, d in zip(self.exps, other.exps, self.group.orders)))

    def __pow__(self, n: int) -> "Character":
        return Character(self.group, tuple((a * n) % d for a, d in zip(self.exps, self.group.orders)))

    def inverse(self) -> "Character":
        return self ** -1

    def __repr__(self) -> str:
        return f"chi{list(self.exps)}"


def enumerate_characters(G: AbGroup) -> list[Character]:
    return [Character(G, tuple(a)) for a in product(*[range(d) for d in G.orders])]


def character_from_values(G: AbGroup, gen_exps: Sequence[int]) -> Character:
    """Character sending generator i to zeta_D^{gen_exps[i]}."""
    D = G.exponent
    exps = []
    for v, d in zip(gen_exps, G.orders):
        step = D // d
        if v % step:
            raise ValueError("generator image has the wrong order")
        exps.append((v // step) % d)
    return Character(G, tuple(exps))


# --------------------------------------------------------------------------
# group ring elements

class GroupRingElem:
    __slots__ = ("group", "domain", "coeffs")

    def __init__(self, group: AbGroup, domain, coeffs: Sequence):
        if len(coeffs) != group.order:
            raise ValueError("coefficient table does not match the group")
        self.group = group
        self.domain = domain
        self.coeffs = tuple(domain.reduce(c) for c in coeffs)

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, group: AbGroup, domain) -> "GroupRingElem":
        return cls(group, domain, [domain.zero()] * group.order)

    @classmethod
    def one(cls, group: AbGroup, domain) -> "GroupRingElem":
        return cls.basis(group, domain, 0)

    @classmethod
    def basis(cls, group: AbGroup, domain, g: int, c=None) -> "GroupRingElem":
        coeffs = [domain.zero()] * group.order
        coeffs[g] = domain.one() if c is None else c
        return cls(group, domain, coeffs)

    @classmethod
    def from_dict(cls, group: AbGroup, domain, table: Mapping) -> "GroupRingElem":
        coeffs = [domain.zero()] * group.order
        for key, val in table.items():
            vec = [int(t) for t in str(key).strip("()[] ").split(",")] if not isinstance(key, tuple) else key
            coeffs[group.index(vec)] = coeffs[group.index(vec)] + _parse_scalar(val, domain)
        return cls(group, domain, coeffs)

    def to_dict(self) -> dict[str, object]:
        out = {}
        for g, c in enumerate(self.coeffs):
            if not _is_zero(c):
                out[",".join(str(x) for x in self.group.vector(g))] = _domain_fmt(self.domain, c)
        return out

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "GroupRingElem") -> None:
        if other.group != self.group:
            raise ValueError("group rings differ")

    def __add__(self, other):
        if not isinstance(other, GroupRingElem):
            other = self.scalar(other)
        self._check(other)
        return GroupRingElem(self.group, self.domain, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElem(self.group, self.domain, [-a for a in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, GroupRingElem):
            other = self.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scalar(self, c) -> "GroupRingElem":
        return GroupRingElem.basis(self.group, self.domain, 0, embed(c, self.domain))

    def __mul__(self, other):
        if not isinstance(other, GroupRingElem):
            c = embed(other, self.domain)
            return GroupRingElem(self.group, self.domain, [a * c for a in self.coeffs])
        self._check(other)
        G = self.group
        out = [self.domain.zero()] * G.order
        table = G.mul_table
        for a, ca in enumerate(self.coeffs):
            if _is_zero(ca):
                continue
            row = table[a]
            for b, cb in enumerate(other.coeffs):
                if not _is_zero(cb):
                    out[row[b]] = out[row[b]] + ca * cb
        return GroupRingElem(G, self.domain, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = GroupRingElem.one(self.group, self.domain)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        return self.group == other.group and all(_eq(a, b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.group, tuple(str(c) for c in self.coeffs)))

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def __getitem__(self, g: int):
        return self.coeffs[g]

    def coeff_at(self, vec: Sequence[int]):
        return self.coeffs[self.group.index(vec)]

    def change_domain(self, domain) -> "GroupRingElem":
        return GroupRingElem(self.group, domain, [embed(c, domain) for c in self.coeffs])

    def times_group(self, g: int) -> "GroupRingElem":
        """Multiplication by the group element g (a permutation of coefficients)."""
        out = [self.domain.zero()] * self.group.order
        row = self.group.mul_table[g]
        for a, c in enumerate(self.coeffs):
            out[row[a]] = c
        return GroupRingElem(self.group, self.domain, out)

    def __repr__(self) -> str:
        terms = []
        for g, c in enumerate(self.coeffs):
            if not _is_zero(c):
                terms.append(f"{c}*g{list(self.group.vector(g))}")
        return " + ".join(terms) if terms else "0"


def _is_zero(c) -> bool:
    if isinstance(c, CyclotomicCoeff):
        return c.is_zero()
    if isinstance(c, CycloNumber):
        return not any(c.coeffs)
    return c == 0


def _eq(a, b) -> bool:
    return _is_zero(a - b)


def _parse_scalar(val, domain):
    if isinstance(val, str):
        val = Fraction(val)
    if isinstance(val, dict):
        from .coeff import coeff_from_json
        return embed(coeff_from_json(val), domain)
    if isinstance(val, (list, tuple)) and isinstance(domain, CycloField):
        return domain([Fraction(x) for x in val])
    return embed(val if isinstance(val, Fraction) else Fraction(val) if not isinstance(val, int) else val, domain)


# --------------------------------------------------------------------------
# characters on group rings

def char_value(x: GroupRingElem, chi: Character, target=None):
    """chi(x) = sum_g x_g chi(g), computed in ``target`` (defaults to x's domain)."""
    target = x.domain if target is None else target
    out = target.zero()
    for g, c in enumerate(x.coeffs):
        if not _is_zero(c):
            out = out + embed(c, target) * chi.value(g, target)
    return out


def char_transform(x: GroupRingElem, chars: Sequence[Character] | None = None, target=None) -> list:
    chars = enumerate_characters(x.group) if chars is None else chars
    return [char_value(x, chi, target) for chi in chars]


def inverse_char_transform(values: Sequence, group: AbGroup, domain, chars: Sequence[Character] | None = None) -> GroupRingElem:
    """sum_chi values[chi] e_chi; characters not listed get value 0."""
    chars = enumerate_characters(group) if chars is None else chars
    inv_order = _inverse_of_order(group.order, domain)
    out = []
    for g in group.elements():
        ginv = group.inv[g]
        acc = domain.zero()
        for chi, v in zip(chars, values):
            if not _is_zero(v):
                acc = acc + embed(v, domain) * chi.value(ginv, domain)
        out.append(acc * inv_order)
    return GroupRingElem(group, domain, out)


def _inverse_of_order(n: int, domain):
    if isinstance(domain, (Rationals, CycloField)):
        return Fraction(1, n)
    p = domain.p
    if n % p == 0:
        raise ArithmeticError(f"|G| = {n} is not invertible in {domain}")
    if isinstance(domain, IntegersMod):
        return pow(n, -1, domain.q)
    return domain.from_fraction(Fraction(1, n))


def idempotent(chi: Character, domain) -> GroupRingElem:
    G = chi.group
    inv_order = _inverse_of_order(G.order, domain)
    coeffs = [domain.zero()] * G.order
    for s in G.elements():
        coeffs[G.inv[s]] = chi.value(s, domain) * inv_order
    return GroupRingElem(G, domain, coeffs)


def descend(x: GroupRingElem, base) -> GroupRingElem:
    """Move an element with coefficients in O or Q(zeta) down to Zp or Q.

    Raises if some coefficient is not in the base ring.
    """
    out = []
    for c in x.coeffs:
        if isinstance(c, CycloNumber):
            out.append(embed(c.to_rational(), base))
        elif isinstance(c, CyclotomicCoeff):
            out.append(embed(c.to_int(), base))
        else:
            out.append(embed(c, base))
    return GroupRingElem(x.group, base, out)


# --------------------------------------------------------------------------
# minus parts, involution and twists

def minus_projection(x: GroupRingElem) -> GroupRingElem:
    """Representative (1 - j)/2 * x of the class of x in R[G]/(1 + j)."""
    G = x.group
    if G.j is None:
        raise ValueError("group has no distinguished involution j")
    half = embed(Fraction(1, 2), x.domain)
    return (x - x.times_group(G.j)) * half


def plus_projection(x: GroupRingElem) -> GroupRingElem:
    G = x.group
    if G.j is None:
        raise ValueError("group has no distinguished involution j")
    half = embed(Fraction(1, 2), x.domain)
    return (x + x.times_group(G.j)) * half


def iota_gr(x: GroupRingElem) -> GroupRingElem:
    G = x.group
    out = [x.domain.zero()] * G.order
    for g, c in enumerate(x.coeffs):
        out[G.inv[g]] = c
    return GroupRingElem(G, x.domain, out)


def twist_character_values(G: AbGroup, c_data: Sequence, n: int, domain) -> list:
    """c(g)^n for every g, from the values c(g_i) on the cyclic generators."""
    gens = [embed(c, domain) for c in c_data]
    if n < 0:
        gens = [_inv(c, domain) for c in gens]
        n = -n
    gens = [c ** n for c in gens]
    out = []
    for g in G.elements():
        val = domain.one()
        for c, a in zip(gens, G.vector(g)):
            val = val * c ** a
        out.append(domain.reduce(val))
    return out


def _inv(c, domain):
    if isinstance(domain, IntegersMod):
        return pow(c, -1, domain.q)
    if isinstance(c, CyclotomicCoeff):
        from .coeff import invert
        return invert(c)
    return 1 / Fraction(c)


def tate_twist_gr(x: GroupRingElem, n: int, c_data: Sequence | None) -> GroupRingElem:
    """g -> c(g)^n g, with c given on the cyclic generators."""
    if c_data is None:
        raise ValueError("twisting needs the values c(g_i)")
    vals = twist_character_values(x.group, c_data, n, x.domain)
    return GroupRingElem(x.group, x.domain, [a * v for a, v in zip(x.coeffs, vals)])


def teichmuller_c_data(G: AbGroup, residues: Sequence[int], p: int, N: int) -> list[int]:
    """c_data for a twist whose value on generator i is omega(residues[i])."""
    return [teichmuller_int(r, p, N) for r in residues]


# --------------------------------------------------------------------------
# integer Smith form and quotient groups

def smith_with_transform(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Diagonal d and unimodular V (with inverse) such that rowspan(rows) V = rowspan(diag(d)).

    Only the column transform is tracked; that is what a quotient
    Z^ncols / rowspan(rows) needs: x -> x V gives coordinates in which the
    quotient is the product of the Z/d_i, and row i of V^{-1} is the
    corresponding generator.
    """
    A = [list(r) for r in rows]
    V = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    Vinv = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    nrows = len(A)

    def col_op(i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j), ad - bc = +-1
        for M in (A, V):
            for r in M:
                x, y = r[i], r[j]
                r[i], r[j] = a * x + b * y, c * x + d * y
        det = a * d - b * c
        ri, rj = Vinv[i], Vinv[j]
        Vinv[i] = [det * (d * x - c * y) for x, y in zip(ri, rj)]
        Vinv[j] = [det * (-b * x + a * y) for x, y in zip(ri, rj)]

    diag = []
    t = 0
    while t < min(nrows, ncols):
        piv = None
        for r in range(t, nrows):
            for c in range(t, ncols):
                if A[r][c] and (piv is None or abs(A[r][c]) < abs(A[piv[0]][piv[1]])):
                    piv = (r, c)
        if piv is None:
            break
        r, c = piv
        A[t], A[r] = A[r], A[t]
        if c != t:
            col_op(t, c, 0, 1, 1, 0)
        done = False
        while not done:
            done = True
            for c in range(t + 1, ncols):
                if A[t][c]:
                    a, b = A[t][t], A[t][c]
                    g, s, u = _xgcd(a, b)
                    col_op(t, c, s, u, -b // g, a // g)
                    done = False
            for r in range(t + 1, nrows):
                if A[r][t]:
                    a, b = A[t][t], A[r][t]
                    g, s, u = _xgcd(a, b)
                    rt, rr = A[t], A[r]
                    A[t] = [s * x + u * y for x, y in zip(rt, rr)]
                    A[r] = [(-b // g) * x + (a // g) * y for x, y in zip(rt, rr)]
                    done = False
            if done:
                piv_v = A[t][t]
                bad = None
                for r in range(t + 1, nrows):
                    if any(A[r][c] % piv_v for c in range(t + 1, ncols)):
                        bad = r
                        break
                if bad is not None:
                    A[t] = [x + y for x, y in zip(A[t], A[bad])]
                    done = False
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
        diag.append(A[t][t])
        t += 1
    diag += [0] * (ncols - len(diag))
    return diag, V, Vinv


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    if a and b % a == 0:
        # plain elimination; keeps the pivot row in place
        return (a, 1, 0) if a > 0 else (-a, -1, 0)
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        qt, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qt * x1
        y0, y1 = y1, y0 - qt * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass
class QuotientMap:
    """Z^k / relations realized as an AbGroup, with the projection on vectors."""

    group: AbGroup
    V: list[list[int]]
    keep: list[int]

    def __call__(self, vec: Sequence[int]) -> int:
        img = [sum(v * self.V[i][c] for i, v in enumerate(vec)) for c in range(len(self.V))]
        return self.group.index([img[c] for c in self.keep])


def quotient_group(orders: Sequence[int], relations: Iterable[Sequence[int]]) -> QuotientMap:
    k = len(orders)
    rows = [[d if i == c else 0 for c in range(k)] for i, d in enumerate(orders)]
    rows += [list(r) for r in relations]
    diag, V, _ = smith_with_transform(rows, k)
    if any(d == 0 for d in diag):
        raise ValueError("quotient is infinite")
    keep = [c for c, d in enumerate(diag) if d != 1]
    return QuotientMap(AbGroup([diag[c] for c in keep]), V, keep)
