"""Verification harness: fixture ingestion, statement checks, reports and the CLI.

Every check returns a ``Verdict`` whose status is one of "pass", "fail" or
"not-applicable".  Reports are deterministic JSON with all numbers exact
(integers, or fractions and p-adic digit lists as strings).
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .coeff import INF, is_prime, make_coeff_ring, vp
from .fitcalc import (
    GammaModule,
    FiniteGModule,
    GroupRingSpec,
    IdealHandle,
    LambdaSpec,
    Presentation,
    SubQuotient,
    det,
    fit_gamma_module,
    fitting_ideal,
    fitting_of_module,
    is_nonzerodivisor,
)
from .grp import AbGroup, GroupRingElem, char_value, enumerate_characters
from .iwasawa import AdmissibleQuotient, EqSeries, PrecisionError, associated_check, weierstrass_prepare
from .lfun import (
    AbelianFieldSpec,
    CyclotomicTower,
    DirichletCharacter,
    delta_T,
    generalized_bernoulli,
    integrality_battery,
    integrality_check,
    quadratic_field,
    stickelberger_series_for,
    strong_hypothesis,
    theta_S,
    theta_ST,
    theta_twist_check,
    stickelberger_series,
    w_m_part,
)
from .motive import PadicOneMotive, delta_module, split_pm, tate_module, torsion_points

STATUSES = ("pass", "fail", "not-applicable")


class FixtureError(ValueError):
    """A fixture is malformed or lacks provenance."""


@dataclass
class Verdict:
    check: str
    statement: str
    status: str
    hypotheses: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_json(self) -> dict:
        return {"check": self.check, "statement": self.statement, "status": self.status,
                "hypotheses": self.hypotheses, "truncation": self.truncation,
                "certificate": self.certificate}


def exit_code(verdicts: Sequence[Verdict]) -> int:
    """0 if something passed and nothing failed, 1 on any failure, 2 if nothing applied."""
    if any(v.status == "fail" for v in verdicts):
        return 1
    if verdicts and all(v.status == "not-applicable" for v in verdicts):
        return 2
    return 0


# --------------------------------------------------------------------------
# exact conversions

def frac_mod(x: Fraction, q: int, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, q) % q


def to_spec(elem: GroupRingElem, spec: GroupRingSpec) -> GroupRingElem:
    q = spec.p ** spec.N
    return spec.elem([frac_mod(Fraction(c), q, spec.p) for c in elem.coeffs])


def _fmt_elem(elem: GroupRingElem) -> list[str]:
    return [str(c) for c in elem.coeffs]


def _ideal_json(I: IdealHandle) -> list[list[int]]:
    return [list(r) for r in I.canonical()]


# --------------------------------------------------------------------------
# fixtures

def _require(d: dict, keys: Iterable[str], where: str) -> None:
    missing = [k for k in keys if k not in d]
    if missing:
        raise FixtureError(f"{where}: missing {', '.join(missing)}")


def _check_provenance(d: dict) -> dict:
    prov = d.get("provenance")
    if not isinstance(prov, dict):
        raise FixtureError("fixture has no provenance record")
    _require(prov, ("oracle", "claim"), "provenance")
    if not str(prov["oracle"]).strip() or not str(prov["claim"]).strip():
        raise FixtureError("provenance fields must be non-empty")
    return prov


def _field_from(d) -> AbelianFieldSpec:
    if isinstance(d, AbelianFieldSpec):
        return d
    if isinstance(d, dict) and "disc" in d:
        return quadratic_field(int(d["disc"]))
    if isinstance(d, dict):
        _require(d, ("conductor",), "field")
        return AbelianFieldSpec(int(d["conductor"]), d.get("H", []), d.get("label"))
    raise FixtureError("field must be an object with 'conductor' (and 'H') or 'disc'")


def _module_from(d: dict, K: AbelianFieldSpec, p: int, N: int | None) -> FiniteGModule:
    """{"exps": [e_k], "actions": [matrix per generator of G]} as a Z/p^N[G]-module."""
    _require(d, ("exps", "actions"), "module")
    exps = [int(e) for e in d["exps"]]
    if any(e < 1 for e in exps):
        raise FixtureError("module exponents must be >= 1")
    G = K.group
    actions = d["actions"]
    if len(actions) != len(G.orders):
        raise FixtureError(f"module needs one action matrix per generator of G ({len(G.orders)})")
    s = len(exps)
    mats = []
    for i, A in enumerate(actions):
        if len(A) != s or any(len(r) != s for r in A):
            raise FixtureError("action matrices must be square of size len(exps)")
        mats.append([[int(x) % p ** exps[l] for l, x in enumerate(row)] for row in A])
    top = max(exps, default=0)
    N = N if N is not None else top + 2
    if N <= top:
        raise FixtureError("precision must exceed the exponent of the module")
    M = FiniteGModule(G, p, N, exps, mats)
    # well-definedness: b_k of order p^{e_k} must map to an element killed by p^{e_k}
    for A in mats:
        for k, row in enumerate(A):
            for l, x in enumerate(row):
                if exps[l] > exps[k] and x % p ** (exps[l] - exps[k]):
                    raise FixtureError("action matrix is not a homomorphism of the given group")
    for i, o in enumerate(G.orders):
        rho = [[int(r == c) for c in range(s)] for r in range(s)]
        for _ in range(o):
            rho = _matmul_mod(rho, mats[i], p, exps)
        if any((rho[r][c] - int(r == c)) % p ** exps[c] for r in range(s) for c in range(s)):
            raise FixtureError(f"generator {i} does not act with order dividing {o}")
    for i in range(len(mats)):
        for j in range(i):
            if _matmul_mod(mats[i], mats[j], p, exps) != _matmul_mod(mats[j], mats[i], p, exps):
                raise FixtureError("actions of G must commute")
    return M


def _matmul_mod(A, B, p, exps):
    s = len(exps)
    return [[sum(A[r][l] * B[l][c] for l in range(s)) % p ** exps[c] for c in range(s)] for r in range(s)]


@dataclass
class ClassModuleFixture:
    """A finite Zp[G]-module standing in for the minus part of a T-modified class group."""

    field: AbelianFieldSpec
    p: int
    S: list[int]
    T: list[int]
    module: FiniteGModule
    provenance: dict
    label: str = ""


@dataclass
class CohomologyFixture:
    """H^2 of Zp(n) over the S-integers (plus p) of K as a finite Zp[G]-module."""

    field: AbelianFieldSpec
    p: int
    n: int
    S: list[int]
    h2: FiniteGModule
    provenance: dict
    label: str = ""


def ingest_fixture(source) -> ClassModuleFixture | CohomologyFixture | dict:
    """Load and validate a fixture (path, JSON text or dict)."""
    if isinstance(source, str) and source.lstrip().startswith("{"):
        d = json.loads(source)
    elif isinstance(source, (str, Path)):
        d = json.loads(Path(source).read_text())
    else:
        d = dict(source)
    if not isinstance(d, dict):
        raise FixtureError("fixture must be a JSON object")
    _require(d, ("kind",), "fixture")
    kind = d["kind"]
    if kind == "class_module":
        prov = _check_provenance(d)
        _require(d, ("field", "p", "S", "T", "module"), "class_module")
        K, p = _field_from(d["field"]), int(d["p"])
        mod = _module_from(d["module"], K, p, d.get("N"))
        return ClassModuleFixture(K, p, sorted(int(x) for x in d["S"]), sorted(int(x) for x in d["T"]),
                                  mod, prov, d.get("label", K.label))
    if kind == "cohomology":
        prov = _check_provenance(d)
        _require(d, ("field", "p", "n", "S", "h2"), "cohomology")
        K, p = _field_from(d["field"]), int(d["p"])
        mod = _module_from(d["h2"], K, p, d.get("N"))
        return CohomologyFixture(K, p, int(d["n"]), sorted(int(x) for x in d["S"]), mod, prov,
                                 d.get("label", K.label))
    if kind in ("integrality", "twist", "emc_shape"):
        return d
    raise FixtureError(f"unknown fixture kind {kind!r}")


# --------------------------------------------------------------------------
# refined Brumer-Stark

def _acts_as_zero(x: GroupRingElem, M: FiniteGModule) -> bool:
    s = len(M.exps)
    acc = [[0] * s for _ in range(s)]
    for g, c in enumerate(x.coeffs):
        c = int(c)
        if not c:
            continue
        rho = M._group_matrix(g)
        acc = [[acc[r][k] + c * rho[r][k] for k in range(s)] for r in range(s)]
    return all(acc[r][k] % M.p ** M.exps[k] == 0 for r in range(s) for k in range(s))


def _match_fixture(K: AbelianFieldSpec, p: int, fixture) -> None:
    if fixture.field != K or fixture.p != p:
        raise FixtureError(f"fixture is for {fixture.field.label}, p={fixture.p}; check asked for {K.label}, p={p}")


def brumer_stark_check(K: AbelianFieldSpec, S: Sequence[int], T: Sequence[int], p: int,
                       fixture: ClassModuleFixture) -> list[Verdict]:
    """Annihilation of A by Theta_{S,T}(0), and membership in Fit(A^dual) (covariant dual)."""
    _match_fixture(K, p, fixture)
    S, T, A = sorted(S), sorted(T), fixture.module
    G = K.group
    hyp: dict = {"p_odd": p % 2 == 1, "K_CM": G.j is not None, "T_nonempty": bool(T),
                 "T_disjoint_from_S": not set(S) & set(T)}
    ok_T, why_T = strong_hypothesis(K, T, 1) if T else (False, "T is empty")
    hyp["T_condition"] = ok_T
    gates = list(hyp)
    hyp["T_condition_reason"] = why_T
    hyp["theorem_scope"] = {"S_contains_primes_above_p": p in S}
    cert: dict = {"fixture": fixture.label, "provenance": fixture.provenance, "S": S, "T": T}
    trunc = {"N": A.N}
    names = ("Brumer-Stark annihilation", "refined Brumer-Stark Fitting membership")
    if not all(hyp[k] for k in gates):
        return [Verdict("brumer-stark", nm, "not-applicable", hyp, trunc, cert) for nm in names]
    s = len(A.exps)
    jm = A._group_matrix(G.j)
    hyp["fixture_is_minus_part"] = all((jm[r][c] + int(r == c)) % p ** A.exps[c] == 0
                                       for r in range(s) for c in range(s))
    th = theta_ST(K, S, T, 1)
    cert["theta"] = _fmt_elem(th.elem)
    hyp["theta_integral"] = th.denominator() == 1
    if not (hyp["fixture_is_minus_part"] and hyp["theta_integral"]):
        return [Verdict("brumer-stark", nm, "not-applicable", hyp, trunc, cert) for nm in names]
    spec = GroupRingSpec(G, p, A.N)
    x = to_spec(th.elem, spec)
    ring = make_coeff_ring(p, A.N, G.exponent)
    images = {}
    for chi in enumerate_characters(G):
        if chi.is_odd():
            v = char_value(x, chi, ring)
            images[",".join(map(str, chi.exps))] = {"digits": str(v), "valuation": _val_str(v)}
    annih = _acts_as_zero(x, A)
    fit = fitting_of_module(A.dual("covariant"))
    member = fit.contains(x)
    c1 = dict(cert, module_order=A.order(), annihilates=annih)
    c2 = dict(cert, fitting_of_dual=_ideal_json(fit), in_fitting_of_dual=member, odd_character_images=images)
    return [Verdict("brumer-stark", names[0], "pass" if annih else "fail", hyp, trunc, c1),
            Verdict("brumer-stark", names[1], "pass" if member else "fail", hyp, trunc, c2)]


def _val_str(v) -> str:
    from .coeff import valuation
    w = valuation(v)
    return "inf" if w == INF else str(Fraction(w).limit_denominator())


# --------------------------------------------------------------------------
# Coates-Sinnott

def _cyclotomic_h1_tors(K: AbelianFieldSpec, p: int, n: int, N: int) -> FiniteGModule:
    """(Qp/Zp(n))^{G_K}: cyclic of order the p-part of w_n(K), g acting by a^n."""
    e = int(vp(w_m_part(K, p, n), p)) if p in _w_primes(K, n) else 0
    G = K.group
    if e == 0:
        return FiniteGModule(G, p, N, [], [[] for _ in G.orders])
    pe = p ** e
    big = math.lcm(K.f, pe)
    mats = []
    for i in range(len(G.orders)):
        g = G.generator(i)
        a = next(b for b in range(1, big) if math.gcd(b, big) == 1 and math.gcd(b, K.f) == 1
                 and K.sigma(b % K.f) == g)
        mats.append([[pow(a, n, pe)]])
    return FiniteGModule(G, p, N, [e], mats)


def _w_primes(K: AbelianFieldSpec, n: int) -> set[int]:
    from .coeff import factorize
    return set(factorize(K.f)) | {q for q in range(2, n + 2) if is_prime(q) and n % (q - 1) == 0}


def _e_n(G: AbGroup, n: int, spec: GroupRingSpec) -> GroupRingElem:
    """(1 + (-1)^n j) / 2 in Z/p^N[G] (p odd); 1 if G has no j."""
    if G.j is None:
        return spec.one()
    inv2 = pow(2, -1, spec.p ** spec.N)
    jdx = G.j
    x = [0] * G.order
    x[0] += inv2
    x[jdx] += inv2 * (-1) ** n
    return spec.elem([c % spec.p ** spec.N for c in x])


def coates_sinnott_check(K: AbelianFieldSpec, S: Sequence[int], p: int, n: int, fixture: CohomologyFixture,
                         T_bound: int = 30) -> Verdict:
    """<delta_T(1-n) Theta_S(1-n)> against Ann(H^2) and e_n Fit(H^2)."""
    _match_fixture(K, p, fixture)
    if fixture.n != n:
        raise FixtureError(f"fixture is for n={fixture.n}, check asked for n={n}")
    H2 = fixture.h2
    G = K.group
    hyp: dict = {"p_odd": p % 2 == 1, "n_at_least_2": n >= 2,
                 "S_contains_ramified": set(K.ramified_primes) <= set(S)}
    trunc = {"N": H2.N, "T_bound": T_bound}
    cert: dict = {"fixture": fixture.label, "provenance": fixture.provenance}
    if not all(hyp.values()):
        return Verdict("coates-sinnott", "Coates-Sinnott", "not-applicable", hyp, trunc, cert)
    spec = GroupRingSpec(G, p, H2.N)
    Sp = sorted(set(S) | {p})
    th = theta_S(K, Sp, n)
    # battery of T: single primes outside S and p
    Ts = [l for l in range(2, T_bound + 1) if is_prime(l) and l not in Sp]
    raw = [delta_T(K, [l], n).elem for l in Ts]
    deltas = [to_spec(d, spec) for d in raw]
    # Theta_S(1-n) itself need not be p-integral; the products are
    lhs = IdealHandle(spec, [to_spec(d * th.elem, spec) for d in raw])
    h1 = _cyclotomic_h1_tors(K, p, n, H2.N)
    ann_h1 = h1.annihilator()
    delta_ideal = IdealHandle(spec, deltas)
    fit = fitting_of_module(H2)
    ann = H2.annihilator()
    rhs = IdealHandle(spec, [_e_n(G, n, spec)]) * fit
    contained = lhs.issubset(ann)
    equal = lhs == rhs
    # Euler factor at p is a unit whenever p is unramified in K
    euler_unit = None
    if K.f % p:
        frob = K.frobenius(p)
        ef = spec.one() - spec.group_elem(G.inv[frob]) * pow(p, n - 1, p ** H2.N)
        euler_unit = spec.is_unit(ef)
    hyp["euler_factor_at_p_unit"] = euler_unit
    cert.update({"theta_S": _fmt_elem(th.elem), "S_used": Sp, "T_battery": Ts,
                 "lhs": _ideal_json(lhs), "e_n_fitting": _ideal_json(rhs),
                 "annihilator_H2": _ideal_json(ann), "contained_in_annihilator": contained,
                 "equals_e_n_fitting": equal, "H1_tors_order": h1.order(),
                 "delta_ideal_equals_ann_H1": delta_ideal == ann_h1})
    status = "pass" if contained and equal else "fail"
    return Verdict("coates-sinnott", "Coates-Sinnott", status, hyp, trunc, cert)


def synthetic_h2_fixture(K: AbelianFieldSpec, p: int, n: int, S: Sequence[int], N: int = 6,
                         T_bound: int = 30) -> CohomologyFixture:
    """H^2 := R / (L + (1 - e_n)R) for L the ideal of the left-hand side.

    Then e_n Fit(H^2) = L by construction; the fixture exercises the machinery
    on a non-trivial module rather than asserting anything arithmetic.
    """
    G = K.group
    spec = GroupRingSpec(G, p, N)
    Sp = sorted(set(S) | {p})
    th = theta_S(K, Sp, n).elem
    Ts = [l for l in range(2, T_bound + 1) if is_prime(l) and l not in Sp]
    gens = [to_spec(delta_T(K, [l], n).elem * th, spec) for l in Ts]
    gens = IdealHandle(spec, gens).basis_elements()
    gens.append(spec.one() - _e_n(G, n, spec))
    P = Presentation(spec, [gens], 1, len(gens))
    mod = SubQuotient.from_presentation(P).normal_form(strict=True)
    H2 = FiniteGModule(G, p, N, mod.exps, mod.actions)
    prov = {"oracle": "synthetic", "claim": "cyclic module whose Fitting ideal is the left-hand ideal plus (1 - e_n)"}
    return CohomologyFixture(K, p, n, list(S), H2, prov, f"synthetic:{K.label}")


# --------------------------------------------------------------------------
# structural checks around the equivariant main conjecture

def emc_shape_suite(config: dict | None = None) -> list[Verdict]:
    cfg = {"field": {"disc": -4}, "p": 3, "N": 5, "M": 8,
           "T_sets": [[5], [7], [5, 7], [5, 7, 11]], "seed": 0, "samples": 4}
    cfg.update(config or {})
    K = _field_from(cfg["field"])
    p, N, M = int(cfg["p"]), int(cfg["N"]), int(cfg["M"])
    G = K.group
    out: list[Verdict] = []
    # (a) Fit of the delta module equals the product of its factors
    tower = CyclotomicTower(K, p)
    spec = LambdaSpec(G, p, N, M, tower.u)
    for T in cfg["T_sets"]:
        dm = delta_module(tower.frobenius_data(T, N + M), spec)
        ok = dm.fitting_matches_product()
        agree = dm.product() == tower.delta_series(T, N, M)
        nzd = dm.nonzerodivisor_report()
        out.append(Verdict("emc-shape", "Fitting ideal of the delta module", "pass" if ok and agree else "fail",
                           {"T": list(T), "all_factors_nonzerodivisors": all(all(r.values()) for r in nzd.values())},
                           {"N": N, "M": M},
                           {"fitting_equals_product": ok, "product_matches_tower_series": agree,
                            "fitting": _ideal_json(dm.fitting_ideal())}))
    rng = random.Random(cfg["seed"])
    base = GroupRingSpec(G, p, N)
    quot = AdmissibleQuotient.minus(G) if G.j is not None else AdmissibleQuotient.full(G)
    for k in range(int(cfg["samples"])):
        # (b) characteristic series of a gamma module is associated with unit multiples of itself
        r = 1 + k % 2
        while True:
            A = [[base.elem([rng.randrange(p ** N) for _ in range(G.order)]) for _ in range(r)] for _ in range(r)]
            try:
                Mod = GammaModule(base, A)
                break
            except ValueError:
                continue
        I = fit_gamma_module(Mod, M, tower.u, cross_check=(r == 1))
        F = _char_series(Mod, M, tower.u)
        unit = spec.const(base.elem([1 + p * rng.randrange(p ** N)] + [p * rng.randrange(p ** N)
                                                                       for _ in range(G.order - 1)]))
        unit = unit + spec.gamma() * spec.scalar(p) - spec.scalar(p)
        try:
            assoc = associated_check(F, unit * F, quot)
            status = "pass" if assoc and IdealHandle(spec, [F]) == IdealHandle(spec, [unit * F]) else "fail"
        except PrecisionError as exc:
            assoc, status = str(exc), "not-applicable"
        out.append(Verdict("emc-shape", "association of characteristic series", status,
                           {"rank": r, "sample": k}, {"N": N, "M": M},
                           {"associated": assoc, "fitting": _ideal_json(I)}))
        # (c) Fitting ideals are multiplicative along block-triangular extensions
        Pa, Pb, Pt = _random_extension(base, rng)
        fa, fb, ft = fitting_ideal(Pa), fitting_ideal(Pb), fitting_ideal(Pt)
        out.append(Verdict("emc-shape", "multiplicativity along extensions", "pass" if ft == fa * fb else "fail",
                           {"square_nonsingular": True, "sample": k}, {"N": N},
                           {"total": _ideal_json(ft), "sub": _ideal_json(fa), "quotient": _ideal_json(fb)}))
    # (d) zero module
    zero = FiniteGModule(G, p, N, [], [[] for _ in G.orders])
    fz = fitting_of_module(zero)
    out.append(Verdict("emc-shape", "Fitting ideal of the zero module", "pass" if fz.is_unit_ideal() else "fail",
                       {}, {"N": N}, {"fitting": _ideal_json(fz)}))
    return out


def _char_series(Mod: GammaModule, M: int, u: int) -> EqSeries:
    from .fitcalc import char_poly, poly_at_gamma
    L = LambdaSpec(Mod.spec.group, Mod.spec.p, Mod.spec.N, M, u)
    return poly_at_gamma(char_poly(Mod.action, Mod.spec), L)


def _random_nzd(spec: GroupRingSpec, rng: random.Random) -> GroupRingElem:
    while True:
        x = spec.elem([rng.randrange(spec.p ** 2) for _ in range(spec.dim)])
        if is_nonzerodivisor(x):
            return x


def _random_extension(spec: GroupRingSpec, rng: random.Random):
    """Square presentations A (sub), B (quotient) and [[A, C], [0, B]] (total)."""
    a, b = rng.randint(1, 2), 1
    while True:
        A = [[_random_nzd(spec, rng) if i == j else spec.elem([rng.randrange(spec.p) for _ in range(spec.dim)])
              for j in range(a)] for i in range(a)]
        if is_nonzerodivisor(det(A, spec)):
            break
    B = [[_random_nzd(spec, rng)]]
    C = [[spec.elem([rng.randrange(spec.p ** spec.N) for _ in range(spec.dim)]) for _ in range(b)] for _ in range(a)]
    top = [A[i] + C[i] for i in range(a)]
    bottom = [[spec.zero()] * a + B[i] for i in range(b)]
    return (Presentation(spec, A, a, a), Presentation(spec, B, b, b),
            Presentation(spec, top + bottom, a + b, a + b))


# --------------------------------------------------------------------------
# integrality and twist checks from fixtures

def integrality_from_config(d: dict | None) -> list[Verdict]:
    if not d or "field" not in d:
        battery = integrality_battery(**(d or {}).get("battery", {}))
        return [_integrality_verdict(v) for v in battery]
    K = _field_from(d["field"])
    return [_integrality_verdict(integrality_check(K, d["S"], d["T"], int(d["p"]), int(m), d.get("strong", False)))
            for m in d.get("m", [1])]


def _integrality_verdict(v) -> Verdict:
    return Verdict("integrality", "integrality of Theta_{S,T}(1-m)", v.status,
                   {"hypothesis": v.hypothesis}, {}, v.to_json())


def twist_from_config(d: dict) -> list[Verdict]:
    K = _field_from(d.get("field", {"conductor": 12}))
    p, N, M = int(d.get("p", 3)), int(d.get("N", 5)), int(d.get("M", 8))
    T, S = d.get("T", [7]), d.get("S", [])
    big = K if K.contains_mu_p(p) else K.adjoin_mu_p(p)
    tower = CyclotomicTower(big, p)
    out = []
    for m in d.get("m", [1, 2, 3]):
        r = tower.delta_twist_check(T, int(m), N, M)
        out.append(Verdict("twist", "delta_T(1-m) = t_{1-m}(delta_T(0))", "pass" if r.ok else "fail",
                           {"field": big.label}, {"N": N, "M": M}, r.to_json()))
    if d.get("theta", True):
        st = stickelberger_series(tower, S or big.ramified_primes, T, int(d.get("theta_N", 4)),
                                  int(d.get("theta_M", 12)))
        for m in d.get("m", [1, 2, 3]):
            for n in d.get("levels", [0, 1]):
                r = theta_twist_check(st, int(m), int(n))
                out.append(Verdict("twist", "level image of t_{1-m}(Theta^inf)", "pass" if r.ok else "fail",
                                   {"field": big.label, "level": int(n)},
                                   {"N": st.certified, "M": st.series.M}, r.to_json()))
    return out


# --------------------------------------------------------------------------
# reports

def _assert_no_floats(obj, path="$") -> None:
    if isinstance(obj, float):
        raise TypeError(f"floating point value at {path}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _assert_no_floats(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _assert_no_floats(v, f"{path}[{i}]")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if isinstance(obj, float):
        if obj == INF:
            return "inf"
        raise TypeError(f"floating point value {obj!r} in report")
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)


def report_text(payload) -> str:
    data = _jsonable(payload)
    _assert_no_floats(data)
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def emit_report(verdicts: Sequence[Verdict], path, series: Sequence[tuple[str, EqSeries]] = (),
                extra: dict | None = None) -> dict:
    """Write the JSON report and, for any series, Newton polygon and lambda/mu figures beside it."""
    path = Path(path)
    figures = []
    for name, F in series:
        figures.extend(render_figures(F, path.parent / f"{path.stem}-{name}"))
    payload = dict(extra or {})
    payload.update({"verdicts": [v.to_json() for v in verdicts], "exit_code": exit_code(verdicts),
                    "figures": [f.name for f in figures]})
    path.write_text(report_text(payload))
    return payload


def render_figures(F: EqSeries, stem: Path) -> list[Path]:
    """Newton polygons per character and a lambda/mu bar chart (PNG)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from .coeff import valuation

    G = F.group
    quot = AdmissibleQuotient.minus(G) if G.j is not None else AdmissibleQuotient.full(G)
    ring = quot.ring_for(F)
    labels, lams, mus = [], [], []
    fig, ax = plt.subplots(figsize=(6, 4))
    for chi in quot.chars:
        cs = F.char_series(chi, ring).scalar_list()
        pts = [(k, valuation(c)) for k, c in enumerate(cs) if valuation(c) != INF]
        hull = _lower_hull(pts)
        lab = "chi=" + ",".join(map(str, chi.exps))
        if pts:
            ax.scatter([x for x, _ in pts], [y for _, y in pts], s=12)
            ax.plot([x for x, _ in hull], [y for _, y in hull], label=lab)
        labels.append(lab)
        lam = next((k for k, c in enumerate(cs) if valuation(c) == 0), None)
        mu = min((y for _, y in pts), default=0)
        lams.append(lam if lam is not None else 0)
        mus.append(mu)
    ax.set_xlabel("degree in t")
    ax.set_ylabel("valuation")
    ax.set_title("Newton polygons")
    ax.legend(fontsize=7)
    out1 = Path(f"{stem}-newton.png")
    fig.savefig(out1, metadata={"Software": None})
    plt.close(fig)
    fig, ax = plt.subplots(figsize=(6, 3))
    xs = range(len(labels))
    ax.bar([x - 0.2 for x in xs], lams, width=0.4, label="lambda")
    ax.bar([x + 0.2 for x in xs], mus, width=0.4, label="mu")
    ax.set_xticks(list(xs), labels, fontsize=7)
    ax.legend()
    out2 = Path(f"{stem}-invariants.png")
    fig.savefig(out2, metadata={"Software": None})
    plt.close(fig)
    return [out1, out2]


def _lower_hull(pts):
    hull: list = []
    for pt in sorted(pts):
        while len(hull) >= 2 and (hull[-1][1] - hull[-2][1]) * (pt[0] - hull[-2][0]) >= \
                (pt[1] - hull[-2][1]) * (hull[-1][0] - hull[-2][0]):
            hull.pop()
        hull.append(pt)
    return hull


# --------------------------------------------------------------------------
# CLI

def _load_json_arg(s: str):
    p = Path(s)
    return json.loads(p.read_text()) if p.exists() else json.loads(s)


def _field_arg(s: str) -> AbelianFieldSpec:
    try:
        return quadratic_field(int(s))
    except ValueError:
        return _field_from(_load_json_arg(s))


def _ints(s: str | None) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()] if s else []


def _character_arg(s: str) -> DirichletCharacter:
    """'D' (Kronecker symbol of a discriminant) or JSON {"field": ..., "char": [exponents]}."""
    try:
        D = int(s)
        return DirichletCharacter.trivial(1) if D == 1 else DirichletCharacter.from_kronecker(D)
    except ValueError:
        d = _load_json_arg(s)
        K = _field_from(d["field"])
        chi = next(c for c in K.characters() if list(c.exps) == list(d["char"]))
        return K.dirichlet(chi)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqiwasawa", description="Equivariant Iwasawa theory toolkit")
    ap.add_argument("--report", help="write a JSON report (and figures) to this path")
    sub = ap.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("bernoulli", help="generalized Bernoulli number B_{m,chi}")
    b.add_argument("chi", help="discriminant D (Kronecker character) or JSON {field, char}")
    b.add_argument("m", type=int)

    t = sub.add_parser("theta", help="Theta_{S,T}(1-m) in Q[G]")
    t.add_argument("--field", required=True, help="discriminant, or JSON {conductor, H}")
    t.add_argument("--S", default="")
    t.add_argument("--T", default="")
    t.add_argument("--m", type=int, default=1)
    t.add_argument("--cross-check", action="store_true")

    d = sub.add_parser("delta", help="Fitting ideal of the delta module over Lambda")
    d.add_argument("--field", required=True)
    d.add_argument("--T", required=True)
    d.add_argument("--p", type=int, default=3)
    d.add_argument("--N", type=int, default=5)
    d.add_argument("--M", type=int, default=8)

    f = sub.add_parser("fitting", help="Fitting ideal of a presented module")
    f.add_argument("--presentation", required=True, help="JSON file or text")

    w = sub.add_parser("weierstrass", help="per-character Weierstrass preparation")
    w.add_argument("--series", required=True, help="JSON file or text")
    w.add_argument("--quotient", choices=["minus", "full"], default="minus")

    mo = sub.add_parser("motive", help="torsion points or Tate module of a p-adic 1-motive")
    mo.add_argument("--spec", required=True)
    mo.add_argument("--op", choices=["torsion", "tate"], default="torsion")
    mo.add_argument("--n", type=int, default=1)

    s = sub.add_parser("series", help="Theta^inf modulo (p^N, t^M)")
    s.add_argument("--field", required=True)
    s.add_argument("--S", default="")
    s.add_argument("--T", required=True)
    s.add_argument("--p", type=int, default=3)
    s.add_argument("--N", type=int, default=4)
    s.add_argument("--M", type=int, default=8)

    c = sub.add_parser("check", help="run a statement check")
    c.add_argument("which", choices=["integrality", "twist", "brumer-stark", "coates-sinnott", "emc-shape"])
    c.add_argument("--fixture", help="fixture or configuration JSON")
    return ap


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    verdicts: list[Verdict] = []
    series: list[tuple[str, EqSeries]] = []
    out: dict = {}
    if args.cmd == "bernoulli":
        chi = _character_arg(args.chi)
        out = {"m": args.m, "value": str(generalized_bernoulli(chi, args.m))}
    elif args.cmd == "theta":
        K = _field_arg(args.field)
        S = _ints(args.S) or K.ramified_primes
        T = _ints(args.T)
        x = theta_ST(K, S, T, args.m, cross_check=args.cross_check) if T else \
            theta_S(K, S, args.m, cross_check=args.cross_check)
        out = {"field": K.label, "group": K.group.to_json(), "element": x.to_json()}
    elif args.cmd == "delta":
        K = _field_arg(args.field)
        tower = CyclotomicTower(K, args.p)
        spec = LambdaSpec(K.group, args.p, args.N, args.M, tower.u)
        dm = delta_module(tower.frobenius_data(_ints(args.T), args.N + args.M), spec)
        ok = dm.fitting_matches_product()
        verdicts.append(Verdict("delta", "Fitting ideal of the delta module", "pass" if ok else "fail",
                                {}, {"N": args.N, "M": args.M}, {"fitting": _ideal_json(dm.fitting_ideal())}))
    elif args.cmd == "fitting":
        P = Presentation.from_json(_load_json_arg(args.presentation))
        I = fitting_ideal(P)
        out = {"ring": P.spec.to_json(), "fitting": _ideal_json(I), "unit_ideal": I.is_unit_ideal()}
    elif args.cmd == "weierstrass":
        F = EqSeries.from_json(_load_json_arg(args.series))
        G = F.group
        quot = AdmissibleQuotient.minus(G) if args.quotient == "minus" else AdmissibleQuotient.full(G)
        prep = weierstrass_prepare(F, quot)
        out = {"characters": {",".join(map(str, chi.exps)): {"lambda": pr.lam, "mu": str(pr.mu),
                                                              "polynomial": [str(c) for c in pr.poly]}
                              for chi, pr in prep.per_character.items()}}
        series.append(("series", F))
    elif args.cmd == "motive":
        Mot = PadicOneMotive.from_json(_load_json_arg(args.spec))
        if args.op == "torsion":
            Tn = torsion_points(Mot, args.n)
            pm = split_pm(Tn) if Mot.group.j is not None else None
            out = {"n": args.n, "order": Tn.order(), "split": Tn.is_split(),
                   "actions": Tn.actions,
                   "plus_order": pm.plus.order() if pm else None,
                   "minus_order": pm.minus.order() if pm else None}
        else:
            Tm = tate_module(Mot, args.n)
            out = {"n": args.n, "rank": Tm.rank, "actions": Tm.actions}
    elif args.cmd == "series":
        K = _field_arg(args.field)
        F, st = stickelberger_series_for(K, _ints(args.S) or K.ramified_primes, _ints(args.T), args.p, args.N, args.M)
        out = {"field": K.label, "certified_digits": st.certified, "nodes": st.nodes, "series": F.to_json()}
        series.append(("theta", F))
    else:
        fx = ingest_fixture(args.fixture) if args.fixture else None
        if args.which == "integrality":
            verdicts = integrality_from_config(fx)
        elif args.which == "twist":
            verdicts = twist_from_config(fx or {})
        elif args.which == "brumer-stark":
            if not isinstance(fx, ClassModuleFixture):
                raise FixtureError("brumer-stark needs a class_module fixture")
            verdicts = brumer_stark_check(fx.field, fx.S, fx.T, fx.p, fx)
        elif args.which == "coates-sinnott":
            if not isinstance(fx, CohomologyFixture):
                raise FixtureError("coates-sinnott needs a cohomology fixture")
            verdicts = [coates_sinnott_check(fx.field, fx.S, fx.p, fx.n, fx)]
        else:
            verdicts = emc_shape_suite((fx or {}).get("config"))
    code = exit_code(verdicts)
    if args.report:
        return code, emit_report(verdicts, args.report, series, {"command": args.cmd, "result": out})
    return code, {"command": args.cmd, "result": out, "verdicts": [v.to_json() for v in verdicts],
                  "exit_code": code}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        code, payload = run(argv)
    except (FixtureError, ValueError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report_text(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
