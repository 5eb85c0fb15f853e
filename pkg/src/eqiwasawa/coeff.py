"""Truncated p-adic coefficient rings.

Two backends live here:

* ``CoeffRingDesc`` / ``CyclotomicCoeff``: the ring O = Zp[mu_m] known modulo
  p^N.  O is built as a tower: an unramified ring U = Z/p^N[y]/(h) of degree f
  over which a totally ramified Eisenstein layer in pi = zeta_{p^k} - 1 sits.
  Elements are stored on the basis pi^i y^j (i < e, j < f).
* ``CycloField`` / ``CycloNumber``: exact arithmetic in Q(zeta_n) with
  ``Fraction`` coefficients, used for exact L-values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

INF = math.inf


# --------------------------------------------------------------------------
# elementary integer helpers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def vp(x, p: int) -> float:
    """p-adic valuation of an int or Fraction (INF for zero)."""
    if x == 0:
        return INF
    if isinstance(x, Fraction):
        return vp(x.numerator, p) - vp(x.denominator, p)
    x = abs(int(x))
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def euler_phi(n: int) -> int:
    r = n
    for q in factorize(n):
        r = r // q * (q - 1)
    return r


def mult_order(a: int, n: int) -> int:
    if n == 1:
        return 1
    if math.gcd(a, n) != 1:
        raise ValueError("not a unit")
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, low degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        out[i] = c
        for k, bk in enumerate(b):
            a[i + k] -= c * bk
    assert all(x == 0 for x in a[: len(b) - 1])
    return out


def mod_inverse(a: int, n: int) -> int:
    return pow(a, -1, n)


def frac_mod(x: Fraction | int, q: int, p: int) -> int:
    """Reduce a p-integral rational modulo q = p^N."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, q) % q


# --------------------------------------------------------------------------
# polynomials over F_p (lists, low degree first)

def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _fp_trim([x % p for x in a])
    b = _fp_trim([x % p for x in b])
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        s = len(a) - len(b)
        q[s] = c
        for k, bk in enumerate(b):
            a[s + k] = (a[s + k] - c * bk) % p
        _fp_trim(a)
    return q, a


def _first_factor_mod_p(poly: Sequence[int], deg: int, p: int) -> list[int]:
    """Lexicographically first monic degree-``deg`` divisor of ``poly`` mod p."""
    for idx in range(p ** deg):
        cand, t = [], idx
        for _ in range(deg):
            cand.append(t % p)
            t //= p
        cand.append(1)
        _, r = _fp_divmod(list(poly), cand, p)
        if not r:
            return cand
    raise ArithmeticError("no factor found")


# --------------------------------------------------------------------------
# truncated cyclotomic rings

@dataclass(frozen=True)
class CoeffRingDesc:
    p: int
    N: int
    m: int
    m_prime: int
    k: int
    f: int
    e: int
    unram_poly: tuple[int, ...]
    eisenstein_poly: tuple[int, ...]
    _zeta_unram: tuple[int, ...] = field(repr=False, compare=False, default=())

    @property
    def q(self) -> int:
        return self.p ** self.N

    @property
    def degree(self) -> int:
        return self.e * self.f

    @property
    def cap(self) -> int:
        """Maximal pi-adic precision representable."""
        return self.N * self.e

    @property
    def uniformizer(self) -> str:
        return str(self.p) if self.k == 0 else f"zeta_{self.p ** self.k} - 1"

    @property
    def minpoly(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.unram_poly, self.eisenstein_poly

    def reduce(self, x):
        return x

    def fmt(self, x) -> str:
        return str(x.to_json())

    def with_precision(self, N: int) -> "CoeffRingDesc":
        return make_coeff_ring(self.p, N, self.m)

    # constructors -----------------------------------------------------
    def element(self, coeffs: Sequence[int], prec: float | None = None) -> "CyclotomicCoeff":
        cap = self.cap
        pr = cap if prec is None else min(prec, cap)
        return CyclotomicCoeff(self, tuple(int(c) % self.q for c in coeffs), pr)

    def from_int(self, a: int, prec: float | None = None) -> "CyclotomicCoeff":
        c = [0] * self.degree
        c[0] = a
        return self.element(c, prec)

    def from_fraction(self, x: Fraction | int, prec: float | None = None) -> "CyclotomicCoeff":
        return self.from_int(frac_mod(x, self.q, self.p), prec)

    def zero(self) -> "CyclotomicCoeff":
        return self.from_int(0)

    def one(self) -> "CyclotomicCoeff":
        return self.from_int(1)

    def pi(self) -> "CyclotomicCoeff":
        if self.k == 0:
            return self.from_int(self.p)
        c = [0] * self.degree
        c[self.f] = 1
        return self.element(c)

    def zeta(self, power: int = 1) -> "CyclotomicCoeff":
        """The fixed primitive m-th root of unity, raised to ``power``."""
        base = self._zeta_m()
        return base ** (power % self.m)

    def root_of_unity(self, d: int, power: int = 1) -> "CyclotomicCoeff":
        if self.m % d:
            raise ValueError(f"mu_{d} not contained in Zp[mu_{self.m}]")
        return self.zeta((power % d) * (self.m // d))

    def _zeta_m(self) -> "CyclotomicCoeff":
        c = [0] * self.degree
        c[: self.f] = self._zeta_unram
        z_unram = self.element(c)
        if self.k == 0:
            return z_unram
        return z_unram * (self.one() + self.pi())

    def __str__(self) -> str:
        return f"Zp[mu_{self.m}] (p={self.p}, N={self.N}, f={self.f}, e={self.e})"


@lru_cache(maxsize=None)
def make_coeff_ring(p: int, N: int, m: int) -> CoeffRingDesc:
    if not isinstance(p, int) or p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if N < 1:
        raise ValueError("N must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    k, mp = 0, m
    while mp % p == 0:
        mp //= p
        k += 1
    f = mult_order(p, mp)
    e = euler_phi(p ** k) if k else 1
    q = p ** N
    if f == 1:
        h = [0, 1]
    elif f == euler_phi(mp):
        h = [c % p for c in cyclotomic_poly(mp)]
    else:
        h = _first_factor_mod_p(cyclotomic_poly(mp), f, p)
    if k:
        # Phi_{p^k}(1 + pi) expanded
        eis = [0] * (e + 1)
        step = p ** (k - 1)
        for i in range(p):
            deg = i * step
            for t in range(deg + 1):
                eis[t] += math.comb(deg, t)
        eis = [c % q for c in eis]
    else:
        eis = [0, 1]
    desc = CoeffRingDesc(p, N, m, mp, k, f, e, tuple(x % q for x in h), tuple(eis))
    # Teichmuller lift of the residue class of y, a primitive m'-th root of unity
    if f == 1:
        base = teichmuller_int(_primitive_root_residue(mp, p), p, N) if mp > 1 else 1
        z = [base]
    else:
        u = _Unram(desc)
        z = [0, 1] + [0] * (f - 2)
        qf = p ** f
        for _ in range(N):
            z = u.pow(z, qf)
        z = list(z)
    object.__setattr__(desc, "_zeta_unram", tuple(z))
    return desc


def _primitive_root_residue(d: int, p: int) -> int:
    """Smallest residue mod p of exact multiplicative order d (d | p - 1)."""
    for a in range(1, p):
        if mult_order(a, p) == d:
            return a
    raise ValueError(f"no element of order {d} mod {p}")


class _Unram:
    """Bare multiplication in Z/p^N[y]/(h) on coefficient lists."""

    def __init__(self, desc: CoeffRingDesc):
        self.h = desc.unram_poly
        self.f = desc.f
        self.q = desc.q

    def mul(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        f, q = self.f, self.q
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        _reduce_monic(prod, self.h, f)
        return [c % q for c in prod[:f]]

    def pow(self, a: Sequence[int], n: int) -> list[int]:
        result = [1] + [0] * (self.f - 1)
        base = list(a)
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result


def _reduce_monic(poly: list[int], mod: Sequence[int], deg: int) -> None:
    for top in range(len(poly) - 1, deg - 1, -1):
        c = poly[top]
        if c:
            poly[top] = 0
            for t in range(deg):
                poly[top - deg + t] -= c * mod[t]


@dataclass(frozen=True)
class CyclotomicCoeff:
    ring: CoeffRingDesc
    coeffs: tuple[int, ...]
    prec: float

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "CyclotomicCoeff":
        if isinstance(other, CyclotomicCoeff):
            if other.ring.p != self.ring.p or other.ring.m != self.ring.m:
                raise ValueError("coefficient rings differ")
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        if isinstance(other, Fraction):
            return self.ring.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        r = self.ring
        return CyclotomicCoeff(r, tuple((a + b) % r.q for a, b in zip(self.coeffs, o.coeffs)), min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        r = self.ring
        return CyclotomicCoeff(r, tuple(-a % r.q for a in self.coeffs), self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        r = self.ring
        e, f, q = r.e, r.f, r.q
        a, b = self.coeffs, o.coeffs
        rows = [[0] * (2 * f - 1) for _ in range(2 * e - 1)]
        for i1 in range(e):
            for j1 in range(f):
                c = a[i1 * f + j1]
                if not c:
                    continue
                for i2 in range(e):
                    row = rows[i1 + i2]
                    for j2 in range(f):
                        d = b[i2 * f + j2]
                        if d:
                            row[j1 + j2] += c * d
        if f > 1:
            for row in rows:
                _reduce_monic(row, r.unram_poly, f)
        eis = r.eisenstein_poly
        for i in range(2 * e - 2, e - 1, -1):
            row = rows[i]
            if any(row[:f]):
                for t in range(e):
                    et = eis[t]
                    if et:
                        tgt = rows[i - e + t]
                        for j in range(f):
                            tgt[j] -= et * row[j]
        flat = [rows[i][j] % q for i in range(e) for j in range(f)]
        return CyclotomicCoeff(r, tuple(flat), min(self.prec, o.prec))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return invert(self) ** (-n)
        result = self.ring.one()
        result = CyclotomicCoeff(self.ring, result.coeffs, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        o = self._coerce(other)
        v = valuation(o)
        if v == INF:
            raise ZeroDivisionError("division by an element indistinguishable from 0")
        num = self
        for _ in range(int(v)):
            num = divide_by_pi(num)
        return num * invert(unit_part(o))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, CyclotomicCoeff):
            return NotImplemented
        return valuation(self - other) == INF

    def __hash__(self):
        return hash((self.ring.p, self.ring.m, self.coeffs))

    def is_zero(self) -> bool:
        return valuation(self) == INF

    def with_prec(self, prec: float) -> "CyclotomicCoeff":
        return CyclotomicCoeff(self.ring, self.coeffs, min(prec, self.prec))

    def to_int(self) -> int:
        """Residue mod p^N when the element lies in Zp."""
        if any(self.coeffs[1:]):
            raise ValueError("element is not in Zp")
        return self.coeffs[0]

    def rational_part(self) -> int | None:
        return None if any(self.coeffs[1:]) else self.coeffs[0]

    def to_json(self) -> dict:
        pr = "inf" if self.prec == INF else int(self.prec)
        return {"p": self.ring.p, "N": self.ring.N, "m": self.ring.m, "coeffs": [str(c) for c in self.coeffs], "prec": pr}

    def __repr__(self) -> str:
        if self.ring.degree == 1:
            return f"{self.coeffs[0]} (mod {self.ring.p}^{self.ring.N}, prec {self.prec})"
        return f"CyclotomicCoeff({list(self.coeffs)}, prec={self.prec})"


def coeff_from_json(d: dict) -> CyclotomicCoeff:
    ring = make_coeff_ring(int(d["p"]), int(d["N"]), int(d["m"]))
    prec = d.get("prec", "inf")
    prec = ring.cap if prec == "inf" else int(prec)
    return ring.element([int(c) for c in d["coeffs"]], prec)


def valuation(x: CyclotomicCoeff) -> float:
    """Normalized pi-adic valuation, v(p) = e; INF when zero at known precision."""
    r = x.ring
    best = INF
    for idx, c in enumerate(x.coeffs):
        if c:
            i = idx // r.f
            v = r.e * vp(c, r.p) + i
            if v < best:
                best = v
    return INF if best >= x.prec else best


def divide_by_pi(x: CyclotomicCoeff) -> CyclotomicCoeff:
    """x / pi for v(x) >= 1; loses one unit of precision."""
    r = x.ring
    if valuation(x) < 1:
        raise ArithmeticError("element is not divisible by the uniformizer")
    p, e, f, q = r.p, r.e, r.f, r.q
    c = x.coeffs
    if r.k == 0:
        out = tuple((a // p) % q for a in c)
        # top digit is unknown after the shift; precision drops accordingly
        return CyclotomicCoeff(r, out, x.prec - 1)
    # x = c0 + pi * rest, c0 divisible by p; p / pi = -(pi^{e-1} + sum_{i>=1} E_i pi^{i-1})
    eis = r.eisenstein_poly
    shifted = [0] * (e * f)
    for i in range(1, e):
        for j in range(f):
            shifted[(i - 1) * f + j] = c[i * f + j]
    c0 = [a // p for a in c[:f]]
    p_over_pi = [0] * e
    p_over_pi[e - 1] = -1
    for i in range(1, e):
        p_over_pi[i - 1] -= eis[i]
    term = r.element([p_over_pi[i] if j == 0 else 0 for i in range(e) for j in range(f)])
    c0_elem = r.element(c0 + [0] * (e * f - f))
    res = r.element(shifted) + c0_elem * term
    return CyclotomicCoeff(r, res.coeffs, x.prec - 1)


def unit_part(x: CyclotomicCoeff) -> CyclotomicCoeff:
    v = valuation(x)
    if v == INF:
        raise ArithmeticError("unit part of an element indistinguishable from 0")
    for _ in range(int(v)):
        x = divide_by_pi(x)
    return x


def invert(x: CyclotomicCoeff) -> CyclotomicCoeff:
    r = x.ring
    if valuation(x) != 0:
        raise ArithmeticError("element is not a unit")
    # residue-field inverse via x^{q-2}, then Newton doubling
    z = x ** (r.p ** r.f - 2)
    z = CyclotomicCoeff(r, z.coeffs, x.prec)
    acc = 1
    two = r.from_int(2)
    while acc < r.cap:
        z = z * (two - x * z)
        acc *= 2
    return CyclotomicCoeff(r, z.coeffs, x.prec)


def teichmuller_int(a: int, p: int, N: int) -> int:
    """The (p-1)-st root of unity in Z/p^N congruent to a mod p."""
    if a % p == 0:
        raise ValueError("Teichmuller lift of a residue divisible by p")
    q = p ** N
    x = a % q
    for _ in range(N):
        x = pow(x, p, q)
    return x


def teichmuller_lift(a: int, ring: CoeffRingDesc) -> CyclotomicCoeff:
    return ring.from_int(teichmuller_int(a, ring.p, ring.N))


def padic_log(x: CyclotomicCoeff) -> CyclotomicCoeff:
    """log(x) = sum (-1)^{k+1} (x-1)^k / k.

    Needs v(x - 1) > e/(p - 1) so that the series stays integral (for
    unramified rings this is just v(x - 1) >= 1).  Terms are summed with
    guard digits so each division by k is exact.  On this domain log is an
    isometry, so the divisions cost no precision: the result carries the
    input precision.
    """
    r = x.ring
    y = x - 1
    w = valuation(y)
    if w == INF:
        return CyclotomicCoeff(r, r.zero().coeffs, x.prec)
    if w < 1:
        raise ArithmeticError("log needs v(x - 1) >= 1")
    if w * (r.p - 1) <= r.e:
        raise ArithmeticError("log series is not integral for v(x - 1) <= e/(p-1)")
    target = r.cap
    bound = 4 * (target + r.e) + 10
    kmax = max(k for k in range(1, bound) if k == 1 or k * w - r.e * vp(k, r.p) < target)
    extra = max(int(vp(k, r.p)) for k in range(1, kmax + 1))
    big = r.with_precision(r.N + extra + 1)
    yb = big.element(y.coeffs)
    acc = big.zero()
    power = big.one()
    # p = pi^e * p_unit
    p_unit_inv = invert(unit_part(big.from_int(r.p))) if r.e > 1 else big.one()
    for k in range(1, kmax + 1):
        power = power * yb
        s = int(vp(k, r.p))
        term = power
        for _ in range(s * r.e):
            term = divide_by_pi(CyclotomicCoeff(big, term.coeffs, big.cap))
        if s and r.e > 1:
            term = term * p_unit_inv ** s
        term = term * big.from_int(pow(k // r.p ** s, -1, big.q))
        acc = acc + term if k % 2 else acc - term
    return r.element(acc.coeffs, x.prec)


# --------------------------------------------------------------------------
# exact cyclotomic numbers

class CycloField:
    """Q(zeta_n) with power basis 1, z, ..., z^{phi(n)-1}."""

    _cache: dict[int, "CycloField"] = {}

    def __new__(cls, n: int):
        if n in cls._cache:
            return cls._cache[n]
        self = super().__new__(cls)
        self.n = n
        self.phi = cyclotomic_poly(n)
        self.deg = len(self.phi) - 1
        cls._cache[n] = self
        return self

    def __repr__(self) -> str:
        return f"Q(zeta_{self.n})"

    def __call__(self, coeffs: Iterable) -> "CycloNumber":
        c = [Fraction(x) for x in coeffs]
        c += [Fraction(0)] * (self.deg - len(c))
        return CycloNumber(self, tuple(self._reduce(c)))

    def _reduce(self, c: list) -> list:
        c = list(c)
        d = self.deg
        for top in range(len(c) - 1, d - 1, -1):
            a = c[top]
            if a:
                c[top] = 0
                for t in range(d):
                    c[top - d + t] -= a * self.phi[t]
        return c[:d] + [Fraction(0)] * (d - len(c[:d]))

    def rational(self, x) -> "CycloNumber":
        return self([x])

    # domain protocol shared with the p-adic backends
    def zero(self) -> "CycloNumber":
        return self([0])

    def one(self) -> "CycloNumber":
        return self([1])

    def from_int(self, a: int) -> "CycloNumber":
        return self([a])

    def from_fraction(self, x) -> "CycloNumber":
        return self([x])

    def reduce(self, x):
        return x

    def root_of_unity(self, d: int, k: int = 1) -> "CycloNumber":
        if self.n % d:
            raise ValueError(f"mu_{d} not contained in Q(zeta_{self.n})")
        return self.zeta((k % d) * (self.n // d))

    def zeta(self, k: int = 1) -> "CycloNumber":
        k %= self.n
        c = [Fraction(0)] * max(k + 1, self.deg)
        c[k] = Fraction(1)
        return CycloNumber(self, tuple(self._reduce(c)))


@dataclass(frozen=True)
class CycloNumber:
    field: CycloField
    coeffs: tuple[Fraction, ...]

    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            if other.field.n != self.field.n:
                raise ValueError("cyclotomic fields differ")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloNumber(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.field, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prod = [Fraction(0)] * (2 * self.field.deg - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycloNumber(self.field, tuple(self.field._reduce(prod)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.field, tuple(a / other for a in self.coeffs))
        return NotImplemented

    def __pow__(self, n: int):
        out = self.field.rational(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, CycloNumber) else other
        if o is NotImplemented:
            return NotImplemented
        return self.field.n == o.field.n and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field.n, self.coeffs))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def galois(self, a: int) -> "CycloNumber":
        """Apply zeta -> zeta^a."""
        out = self.field.rational(0)
        for i, c in enumerate(self.coeffs):
            if c:
                out = out + self.field.zeta(i * a) * c
        return out

    def to_coeff(self, ring: CoeffRingDesc) -> CyclotomicCoeff:
        """Image under zeta_n -> the fixed root of unity of ring."""
        z = ring.root_of_unity(self.field.n, 1)
        out = ring.zero()
        power = ring.one()
        for c in self.coeffs:
            if c:
                out = out + power * ring.from_fraction(c)
            power = power * z
        return out

    def __repr__(self) -> str:
        if self.is_rational():
            return str(self.coeffs[0])
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) + f" [z=zeta_{self.field.n}]"
