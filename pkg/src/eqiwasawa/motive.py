"""Abstract p-adic 1-motives [L -> J], their torsion and Tate modules.

L = Z^r and J = (Qp/Zp)^s carry G-actions by integer matrices acting on
row vectors (v -> v A).  The structure map is an r x s matrix of fractions
a/p^k read mod 1.  Torsion points M[p^n] are the fiber product
{(x, l) : p^n x = l delta} tensored with Z/p^n.  We coordinatize it as
(Z/p^n)^s + (Z/p^n)^r via

    (t, b)  <->  (t / p^n + b J0, b),

where J0 = delta / p^n is the canonical choice of p^n-th roots of the rows
of delta.  Every map below is a row-convention integer matrix on these
coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .coeff import INF, make_coeff_ring
from .fitcalc import IdealHandle, LambdaSpec, Presentation, SubQuotient, fitting_ideal, howell_form, span_log_order
from .grp import AbGroup, GroupRingElem, enumerate_characters
from .iwasawa import EqSeries, gamma_power

Matrix = list[list[int]]


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def parse_fraction(s) -> Fraction:
    """'a/p^k', 'a/b', an int or a Fraction, reduced mod 1."""
    if isinstance(s, (Fraction, int)):
        return _mod1(Fraction(s))
    txt = str(s).strip()
    if "/" not in txt:
        return _mod1(Fraction(int(txt)))
    num, den = txt.split("/", 1)
    if "^" in den:
        b, e = den.split("^", 1)
        den_val = int(b) ** int(e)
    else:
        den_val = int(den)
    return _mod1(Fraction(int(num), den_val))


def _fmt_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _mul(A, B, mod: int | None = None) -> Matrix:
    cols = len(B[0]) if B else 0
    out = [[sum(A[i][l] * B[l][j] for l in range(len(B))) for j in range(cols)] for i in range(len(A))]
    if mod is not None:
        out = [[x % mod for x in row] for row in out]
    return out


def _eye(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _pow(A, e: int, mod: int | None = None) -> Matrix:
    out = _eye(len(A))
    for _ in range(e):
        out = _mul(out, A, mod)
    return out


def _reduce(A, mod: int) -> Matrix:
    return [[x % mod for x in row] for row in A]


def _det(A) -> Fraction:
    A = [[Fraction(x) for x in row] for row in A]
    n, d = len(A), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return d


def _integral(x: Fraction) -> bool:
    return x.denominator == 1


@dataclass
class PadicOneMotive:
    """[L -> J] with L = Z^r, J = (Qp/Zp)^s and a G-action on both.

    ``L_action`` and ``J_action`` hold one matrix per cyclic generator of
    ``group``.  The involution j is either the group's own j or given
    directly as a pair of matrices (useful over the trivial group).
    """

    p: int
    r: int
    s: int
    delta: list[list[Fraction]]
    group: AbGroup = field(default_factory=lambda: AbGroup([]))
    L_action: list[Matrix] = field(default_factory=list)
    J_action: list[Matrix] = field(default_factory=list)
    j_matrices: tuple[Matrix, Matrix] | None = None
    check_precision: int = 12

    def __post_init__(self):
        p = self.p
        if p < 3 or p % 2 == 0:
            raise ValueError("p must be an odd prime")
        if not self.delta:
            self.delta = [[Fraction(0)] * self.s for _ in range(self.r)]
        self.delta = [[parse_fraction(x) for x in row] for row in self.delta]
        if len(self.delta) != self.r or any(len(row) != self.s for row in self.delta):
            raise ValueError("delta must be an r x s matrix")
        for row in self.delta:
            for x in row:
                d = x.denominator
                while d % p == 0:
                    d //= p
                if d != 1:
                    raise ValueError("delta entries must have p-power denominators")
        k = len(self.group.orders)
        if len(self.L_action) != k or len(self.J_action) != k:
            raise ValueError("one L and one J action matrix per cyclic factor of G")
        mod = p ** self.check_precision
        for d, AL, AJ in zip(self.group.orders, self.L_action, self.J_action):
            self._check_pair(AL, AJ)
            if _pow(AL, d) != _eye(self.r):
                raise ValueError("L action does not have the order of its generator")
            if _pow(AJ, d, mod) != _reduce(_eye(self.s), mod):
                raise ValueError("J action does not have the order of its generator")
        for a in range(k):
            for b in range(a + 1, k):
                if _mul(self.L_action[a], self.L_action[b]) != _mul(self.L_action[b], self.L_action[a]):
                    raise ValueError("L actions do not commute")
                if _mul(self.J_action[a], self.J_action[b], mod) != _mul(self.J_action[b], self.J_action[a], mod):
                    raise ValueError("J actions do not commute")
        if self.j_matrices is not None:
            jL, jJ = self.j_matrices
            self._check_pair(jL, jJ)
            if _mul(jL, jL) != _eye(self.r) or _mul(jJ, jJ, mod) != _reduce(_eye(self.s), mod):
                raise ValueError("j must be an involution")

    def _check_pair(self, AL: Matrix, AJ: Matrix) -> None:
        if len(AL) != self.r or len(AJ) != self.s:
            raise ValueError("action matrix has the wrong size")
        if abs(_det(AL)) != 1:
            raise ValueError("L action is not invertible over Z")
        if self.s and _det(AJ) % self.p == 0:
            raise ValueError("J action is not invertible over Zp")
        if not self.is_equivariant(AL, AJ):
            raise ValueError("delta is not G-equivariant")

    def is_equivariant(self, AL: Matrix, AJ: Matrix) -> bool:
        """A_L delta == delta A_J entrywise mod 1."""
        d = self.delta
        for i in range(self.r):
            for j in range(self.s):
                lhs = sum(AL[i][l] * d[l][j] for l in range(self.r))
                rhs = sum(d[i][l] * AJ[l][j] for l in range(self.s))
                if not _integral(lhs - rhs):
                    return False
        return True

    # --- helpers ---------------------------------------------------------
    def roots(self, n: int) -> list[list[Fraction]]:
        """Canonical J0 with p^n J0 = delta: entries a/p^k become a/p^(k+n)."""
        return [[x / self.p ** n for x in row] for row in self.delta]

    def element_action(self, g: int) -> tuple[Matrix, Matrix]:
        """(A_L, A_J) for the group element with index g."""
        AL, AJ = _eye(self.r), _eye(self.s)
        for i, a in enumerate(self.group.vector(g)):
            AL = _mul(AL, _pow(self.L_action[i], a))
            AJ = _mul(AJ, _pow(self.J_action[i], a))
        return AL, AJ

    def j_pair(self) -> tuple[Matrix, Matrix]:
        if self.j_matrices is not None:
            return self.j_matrices
        if self.group.j is None:
            raise ValueError("motive has no involution j")
        return self.element_action(self.group.j)

    # --- serialization ---------------------------------------------------
    @classmethod
    def from_json(cls, d: dict) -> "PadicOneMotive":
        group = AbGroup.from_json(d["group"]) if "group" in d else AbGroup([])
        j = d.get("j")
        j_mats = None
        if isinstance(j, dict):
            j_mats = (j["L"], j["J"])
        elif j is not None:
            group = AbGroup(group.orders, j)
        return cls(int(d["p"]), int(d["r"]), int(d["s"]), d.get("delta") or [],
                   group, d.get("L_action", []), d.get("J_action", []), j_mats)

    def to_json(self) -> dict:
        out = {"p": self.p, "r": self.r, "s": self.s, "group": self.group.to_json(),
               "L_action": self.L_action, "J_action": self.J_action,
               "delta": [[_fmt_fraction(x) for x in row] for row in self.delta]}
        if self.j_matrices is not None:
            out["j"] = {"L": self.j_matrices[0], "J": self.j_matrices[1]}
        elif self.group.j is not None:
            out["j"] = list(self.group.vector(self.group.j))
        return out


def _correction(J0, fJ: Matrix, fL: Matrix, J0t, pn: int) -> Matrix:
    """p^n (J0 f_J - f_L J0') as an integer matrix mod p^n."""
    r = len(fL)
    s2 = len(J0t[0]) if J0t and J0t[0] else (len(fJ[0]) if fJ else 0)
    out = [[0] * s2 for _ in range(r)]
    for i in range(r):
        for j in range(s2):
            c = sum(J0[i][l] * fJ[l][j] for l in range(len(fJ))) - sum(fL[i][l] * J0t[l][j] for l in range(len(J0t)))
            z = c * pn
            if not _integral(z):
                raise ArithmeticError("map is not compatible with delta")
            out[i][j] = int(z) % pn
    return out


def _block(fJ: Matrix, C: Matrix, fL: Matrix, s2: int, r2: int, pn: int) -> Matrix:
    """[[f_J, 0], [C, f_L]] reduced mod p^n."""
    s, r = len(fJ), len(fL)
    out = [[0] * (s2 + r2) for _ in range(s + r)]
    for i in range(s):
        for j in range(s2):
            out[i][j] = fJ[i][j] % pn
    for i in range(r):
        for j in range(s2):
            out[s + i][j] = C[i][j] % pn
        for j in range(r2):
            out[s + i][s2 + j] = fL[i][j] % pn
    return out


def apply_matrix(mat: Sequence[Sequence[int]], v: Sequence[int], mod: int) -> list[int]:
    cols = len(mat[0]) if mat else 0
    return [sum(v[i] * mat[i][j] for i in range(len(v))) % mod for j in range(cols)]


@dataclass
class TorsionGroup:
    """M[p^n] in (t, b) coordinates: s coordinates for J[p^n], then r for L/p^n."""

    motive: PadicOneMotive
    n: int
    actions: list[Matrix]
    roots: list[list[Fraction]] = field(repr=False)

    @property
    def p(self) -> int:
        return self.motive.p

    @property
    def r(self) -> int:
        return self.motive.r

    @property
    def s(self) -> int:
        return self.motive.s

    @property
    def rank(self) -> int:
        return self.r + self.s

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    def order(self) -> int:
        return self.modulus ** self.rank

    def to_pair(self, v: Sequence[int]) -> tuple[list[Fraction], list[int]]:
        """A representative (x in J, l in L) of the class with coordinates v."""
        t, b = list(v[:self.s]), list(v[self.s:])
        x = [_mod1(Fraction(t[j], self.modulus) + sum(b[i] * self.roots[i][j] for i in range(self.r)))
             for j in range(self.s)]
        return x, b

    def from_pair(self, x: Sequence[Fraction], l: Sequence[int]) -> list[int]:
        if not self.in_fiber_product(x, l):
            raise ValueError("pair is not in the fiber product")
        t = []
        for j in range(self.s):
            y = _mod1(x[j] - sum(l[i] * self.roots[i][j] for i in range(self.r))) * self.modulus
            t.append(int(y) % self.modulus)
        return t + [a % self.modulus for a in l]

    def in_fiber_product(self, x: Sequence[Fraction], l: Sequence[int]) -> bool:
        d = self.motive.delta
        return all(_integral(self.modulus * x[j] - sum(l[i] * d[i][j] for i in range(self.r)))
                   for j in range(self.s))

    def act(self, g: int, v: Sequence[int]) -> list[int]:
        """Action of the group element with index g."""
        for i, a in enumerate(self.motive.group.vector(g)):
            for _ in range(a):
                v = apply_matrix(self.actions[i], v, self.modulus)
        return list(v)

    def j_matrix(self) -> Matrix:
        jL, jJ = self.motive.j_pair()
        C = _correction(self.roots, jJ, jL, self.roots, self.modulus)
        return _block(jJ, C, jL, self.s, self.r, self.modulus)

    def inclusion_from_J(self) -> Matrix:
        """J[p^n] -> M[p^n], t -> (t, 0); J[p^n] is (Z/p^n)^s via x = t/p^n."""
        return [[int(i == j) for j in range(self.rank)] for i in range(self.s)]

    def projection_to_L(self) -> Matrix:
        """M[p^n] -> L/p^n, (t, b) -> b."""
        return [[int(i == self.s + j) for j in range(self.r)] for i in range(self.rank)]

    def elements(self):
        return product(range(self.modulus), repeat=self.rank)

    def element_order(self, v: Sequence[int]) -> int:
        g = 0
        for a in v:
            g = math.gcd(g, a % self.modulus)
        return self.modulus // math.gcd(g, self.modulus) if g else 1

    def is_split(self) -> bool:
        """Whether l -> (0, l) is a section, i.e. every row of delta vanishes."""
        return all(x == 0 for row in self.motive.delta for x in row)

    def subquotient(self) -> SubQuotient:
        """M[p^n] as a finite G-module inside (Z/p^(n+1))^rank."""
        k = self.rank
        Y = [[self.modulus * int(i == j) for j in range(k)] for i in range(k)]
        return SubQuotient.build(self.motive.group, self.p, self.n + 1, k, _eye(k), Y, self.actions)


def torsion_points(M: PadicOneMotive, n: int) -> TorsionGroup:
    if n < 1:
        raise ValueError("level must be >= 1")
    pn = M.p ** n
    J0 = M.roots(n)
    actions = [_block(AJ, _correction(J0, AJ, AL, J0, pn), AL, M.s, M.r, pn)
               for AL, AJ in zip(M.L_action, M.J_action)]
    return TorsionGroup(M, n, actions, J0)


def transition_down(M: PadicOneMotive, m: int, n: int) -> Matrix:
    """M[p^m] -> M[p^n], (x, l) -> (p^(m-n) x, l)."""
    if n > m:
        raise ValueError("transition_down needs n <= m")
    k, pn = M.p ** (m - n), M.p ** n
    Jm = [[k * x for x in row] for row in M.roots(m)]
    C = _correction(Jm, _eye(M.s), _eye(M.r), M.roots(n), pn)
    return _block(_eye(M.s), C, _eye(M.r), M.s, M.r, pn)


def transition_up(M: PadicOneMotive, n: int, m: int) -> Matrix:
    """M[p^n] -> M[p^m], (x, l) -> (x, p^(m-n) l)."""
    if n > m:
        raise ValueError("transition_up needs n <= m")
    k, pn, pm = M.p ** (m - n), M.p ** n, M.p ** m
    Jm = [[k * x for x in row] for row in M.roots(m)]
    C = _correction(M.roots(n), _eye(M.s), _eye(M.r), Jm, pn)

    def scaled(d: int) -> Matrix:
        return [[k * int(i == j) for j in range(d)] for i in range(d)]

    return _block(scaled(M.s), [[k * c for c in row] for row in C], scaled(M.r), M.s, M.r, pm)


@dataclass
class MotiveMorphism:
    """A pair (f_L, f_J) with l f_L delta' == l delta f_J mod 1."""

    source: PadicOneMotive
    target: PadicOneMotive
    fL: Matrix
    fJ: Matrix

    def is_compatible(self) -> bool:
        d, d2 = self.source.delta, self.target.delta
        for i in range(self.source.r):
            for j in range(self.target.s):
                lhs = sum(d[i][l] * self.fJ[l][j] for l in range(self.source.s))
                rhs = sum(self.fL[i][l] * d2[l][j] for l in range(self.target.r))
                if not _integral(lhs - rhs):
                    return False
        return True

    def is_equivariant(self) -> bool:
        if self.source.group != self.target.group:
            return False
        return all(_mul(AL, self.fL) == _mul(self.fL, BL) and _mul(AJ, self.fJ) == _mul(self.fJ, BJ)
                   for AL, AJ, BL, BJ in zip(self.source.L_action, self.source.J_action,
                                             self.target.L_action, self.target.J_action))

    def on_torsion(self, n: int) -> Matrix:
        """(x, l) -> (x f_J, l f_L) on p^n-torsion."""
        pn = self.source.p ** n
        C = _correction(self.source.roots(n), self.fJ, self.fL, self.target.roots(n), pn)
        return _block(self.fJ, C, self.fL, self.target.s, self.target.r, pn)


@dataclass
class TateModule:
    """T_p(M) / p^n: free over Z/p^n of rank r + s, G acting by matrices."""

    motive: PadicOneMotive
    n: int
    actions: list[Matrix]

    @property
    def rank(self) -> int:
        return self.motive.r + self.motive.s

    def reduce(self, k: int) -> list[Matrix]:
        if k > self.n:
            raise ValueError("cannot reduce to a higher level")
        return [_reduce(A, self.motive.p ** k) for A in self.actions]

    def reduction_map(self, k: int) -> Matrix:
        """T_p(M)/p^n -> M[p^k] through the inverse system."""
        return transition_down(self.motive, self.n, k)


def tate_module(M: PadicOneMotive, n: int) -> TateModule:
    """T_p(M)/p^n read off the inverse system at levels 2n -> n.

    The transition M[p^(2n)] -> M[p^n] is checked to be surjective and
    equivariant, and the level-2n action mod p^n must agree with level n.
    """
    top, bottom = torsion_points(M, 2 * n), torsion_points(M, n)
    down = transition_down(M, 2 * n, n)
    pn, k = M.p ** n, bottom.rank
    if k and span_log_order(howell_form(down, M.p, n, k), n) != n * k:
        raise ArithmeticError("transition map is not surjective")
    for A2, A1 in zip(top.actions, bottom.actions):
        if _mul(A2, down, pn) != _mul(down, A1, pn):
            raise ArithmeticError("transition map is not G-equivariant")
    if [_reduce(A, pn) for A in top.actions] != bottom.actions:
        raise ArithmeticError("inverse system does not stabilize")
    return TateModule(M, n, bottom.actions)


@dataclass
class PlusMinus:
    plus: SubQuotient
    minus: SubQuotient
    plus_projector: Matrix
    minus_projector: Matrix


def split_pm(T: TorsionGroup) -> PlusMinus:
    """M^(+/-) = (1 +/- j)/2 M as subgroups of M[p^n]."""
    Aj = T.j_matrix()
    mod, k = T.modulus, T.rank
    half = pow(2, -1, mod)
    plus = [[(int(i == j) + Aj[i][j]) * half % mod for j in range(k)] for i in range(k)]
    minus = [[(int(i == j) - Aj[i][j]) * half % mod for j in range(k)] for i in range(k)]
    Y = [[mod * int(i == j) for j in range(k)] for i in range(k)]
    G = T.motive.group

    def build(X: Matrix) -> SubQuotient:
        return SubQuotient.build(G, T.p, T.n + 1, k, X, Y, T.actions)

    return PlusMinus(build(plus), build(minus), plus, minus)


# --------------------------------------------------------------------------
# the module attached to a finite set T of primes

@dataclass(frozen=True)
class TPrime:
    """A prime v of T: residue order q = Nv, Frobenius index in G, Gamma exponent.

    The arithmetic Frobenius is (frob, gamma^a) with a a p-adic integer
    known to ``a_digits`` digits.
    """

    q: int
    frob: int
    a: int
    a_digits: float = INF


@dataclass
class DeltaModule:
    spec: LambdaSpec
    primes: list[TPrime]
    factors: list[EqSeries]
    presentation: Presentation

    def product(self) -> EqSeries:
        out = self.spec.one()
        for f in self.factors:
            out = out * f
        return out

    def fitting_ideal(self) -> IdealHandle:
        return fitting_ideal(self.presentation, simplify=False)

    def product_ideal(self) -> IdealHandle:
        return IdealHandle(self.spec, [self.product()])

    def fitting_matches_product(self) -> bool:
        return self.fitting_ideal() == self.product_ideal()

    def nonzerodivisor_report(self) -> dict[int, dict[str, bool]]:
        """For each v and character chi: chi(delta_v) is nonzero modulo (p^N, t^M)."""
        G = self.spec.group
        ring = make_coeff_ring(self.spec.p, self.spec.N, max(G.exponent, 1))
        out: dict[int, dict[str, bool]] = {}
        for i, f in enumerate(self.factors):
            out[i] = {",".join(map(str, chi.exps)): not f.char_series(chi, ring).is_zero()
                      for chi in enumerate_characters(G)}
        return out


def delta_factor(spec: LambdaSpec, v: TPrime, power: int = 1) -> EqSeries:
    """1 - q^power * frob^-1 * (1 + t)^(-a)."""
    if v.q % spec.p == 0:
        raise ValueError("primes of T must not lie above p")
    G = spec.group
    sig_inv = GroupRingElem.basis(G, spec.domain, G.inv[v.frob])
    gam = gamma_power(-v.a, spec.domain, spec.M, G, spec.u, v.a_digits)
    return spec.one() - gam * sig_inv * pow(v.q, power, spec.domain.q)


def delta_module(primes: Sequence[TPrime], spec: LambdaSpec) -> DeltaModule:
    """(+)_v Lambda/(delta_v) with its diagonal presentation."""
    if not primes:
        raise ValueError("T must be non-empty")
    factors = [delta_factor(spec, v) for v in primes]
    return DeltaModule(spec, list(primes), factors, Presentation.diagonal(spec, factors))
