"""Boundedness and infinitesimality of internal polynomials.

The decision follows the coefficient criteria: an internal polynomial is
absolutely bounded iff its standard-index coefficients are bounded and the
root test ``|a_nu|^(1/|nu|)`` is infinitesimal over the infinite index range;
absolutely infinitesimal additionally needs every standard coefficient (and
the constant term) infinitesimal.  The infinite-range quantifier is realized
on two growth rays, ``|nu| = d_i`` and ``|nu| = ceil(d_i/2)``: within the
band fragment used here a rule that decays along both rays decays uniformly
over the whole range.

A verdict never stands alone: it carries a :class:`Certificate` naming the
clause that fired, and the evaluation oracle in this module can cross-examine
it by sampling the polynomial on polydiscs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .config import Config, DEFAULT
from .hypernum import (
    APPRECIABLE,
    BOUNDED_UNCLASSIFIED,
    INFINITE,
    INFINITESIMAL,
    UNDECIDED,
    HyperComplex,
)
from .indexexpr import UNIT_CLASS, IndexExpr, squared_class_key
from .interpoly import (
    InternalPolynomial,
    ProductPoly,
    StructuredPoly,
    TailTerm,
    mi_total,
    poly_eval,
)
from .verdicts import FAILS, HOLDS, UNDETERMINED, Verdict

Q = Fraction

BOUNDED = "bounded"
UNBOUNDED = "unbounded"
# INFINITESIMAL / UNDECIDED reused from hypernum

# extended "limit of a root test factor" values
_ZERO, _POS, _INF, _UNK = "zero", "pos", "inf", "unknown"


@dataclass(frozen=True)
class Certificate:
    kind: str                      # root-test | sample | finite-degree | propagated
    details: tuple = field(default=())
    symbolic: bool = True

    def to_json(self):
        return {"kind": self.kind, "details": [str(d) for d in self.details],
                "symbolic": self.symbolic}


@dataclass(frozen=True)
class PolyClass:
    verdict: str                   # bounded | infinitesimal | unbounded | undetermined
    certificate: Certificate
    infinitesimal: str = "unknown"   # yes | no | unknown (within bounded verdicts)

    @property
    def bounded(self) -> bool:
        return self.verdict in (BOUNDED, INFINITESIMAL)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "infinitesimal": self.infinitesimal,
            "certificate": self.certificate.to_json(),
        }


def classify_poly(p: InternalPolynomial) -> PolyClass:
    if isinstance(p, StructuredPoly):
        return _classify_structured(p)
    if isinstance(p, ProductPoly):
        return _classify_product(p)
    return PolyClass(
        UNDECIDED,
        Certificate("propagated", ("materialization-backed node; no coefficient rule",)),
    )


def _classify_product(p: ProductPoly) -> PolyClass:
    """Ring-law propagation: bounded*bounded stays bounded, infinitesimal
    absorbs bounded, and standard parts multiply through an integral domain.
    """
    a = classify_poly(p.p)
    b = classify_poly(p.q)
    cert = Certificate("propagated", (a.verdict, b.verdict),
                       a.certificate.symbolic and b.certificate.symbolic)
    if a.bounded and b.bounded:
        if INFINITESIMAL in (a.verdict, b.verdict):
            return PolyClass(INFINITESIMAL, cert, "yes")
        flag = "no" if (a.infinitesimal, b.infinitesimal) == ("no", "no") else "unknown"
        return PolyClass(BOUNDED, cert, flag)
    return PolyClass(UNDECIDED, cert)


def _hc_class_label(c: HyperComplex, cfg: Config = DEFAULT) -> tuple[str, bool]:
    cls = c.classify(cfg)
    return cls.label, c.symbolic


def _classify_structured(p: StructuredPoly) -> PolyClass:
    symbolic = True
    inf_flag = "yes"
    undecided: list[str] = []

    # clause (i) at explicitly listed standard indices
    for nu, c in sorted(p.explicit.items()):
        label, sym = _hc_class_label(c)
        symbolic = symbolic and sym
        if label == INFINITE:
            return PolyClass(
                UNBOUNDED,
                Certificate("root-test", (f"clause i fails: coefficient at {nu} is infinite",), sym),
                "no",
            )
        if label == UNDECIDED:
            undecided.append(f"coefficient at {nu} undecided")
        elif label == APPRECIABLE:
            inf_flag = "no"
        elif label == BOUNDED_UNCLASSIFIED and inf_flag == "yes":
            inf_flag = "unknown"

    # moving top monomials (univariate): root test at |nu| = d - offset
    for t in p.tops:
        res = _classify_top(p, t)
        if res is not None:
            return res

    # coefficient bands
    for t in p.tails:
        fail = _band_failure(p, t)
        if fail is not None:
            return fail
        state = _band_finite_state(p, t)
        if state == "undecided":
            undecided.append("band finite-range class undecided")
        elif state == "appreciable":
            inf_flag = "no"
        elif state == "bounded":
            if inf_flag == "yes":
                inf_flag = "unknown"
        ray_state = _band_ray_state(p, t)
        if ray_state == "undecided":
            undecided.append("band root test undecided")

    if undecided:
        return PolyClass(
            UNDECIDED, Certificate("root-test", tuple(undecided), symbolic)
        )
    if inf_flag == "yes":
        return PolyClass(
            INFINITESIMAL,
            Certificate("root-test", ("all standard coefficients infinitesimal; "
                                      "root test vanishes on both rays",), symbolic),
            "yes",
        )
    return PolyClass(
        BOUNDED,
        Certificate("root-test", ("clauses i and ii hold",), symbolic),
        inf_flag,
    )


def _classify_top(p: StructuredPoly, t) -> Optional[PolyClass]:
    """Moving monomial c(i) X^(d_i - offset): decide its root-test limit."""
    c = t.coeff
    if not c.symbolic:
        return PolyClass(
            UNDECIDED, Certificate("root-test", ("numeric top coefficient",), False)
        )
    if c.is_zero_expr():
        return None
    if not p.degree.infinite:
        # a plain standard coefficient; fold into clause (i)
        label, sym = _hc_class_label(c)
        if label == INFINITE:
            return PolyClass(
                UNBOUNDED,
                Certificate("root-test", ("clause i fails: top coefficient infinite",), sym),
                "no",
            )
        return None
    m2 = c.modulus_squared_expr()
    key = squared_class_key_of(m2)
    if key is None:
        return PolyClass(
            UNDECIDED, Certificate("root-test", ("top coefficient class undecided",))
        )
    k2 = key[0]
    if k2 < 0:
        return None  # |c|^(1/d) -> 0: compatible with bounded
    # k2 >= 0: |c(i)|^(1/d_i) tends to a positive constant or diverges, and
    # factorial growth can never be cancelled by another band in this form
    interference = any(
        any(v != _ZERO for v in (_band_ray_values(p, u) or ()))
        for u in p.tails
    )
    if interference:
        return PolyClass(
            UNDECIDED,
            Certificate("root-test", ("top coefficient and band share the infinite range",)),
        )
    v = "oo" if k2 > 0 else f"({key[1]})^(1/{2 * p.degree.slope})"
    return PolyClass(
        UNBOUNDED,
        Certificate(
            "root-test",
            (f"clause ii fails: top coefficient root test -> {v} > 0",),
        ),
        "no",
    )


def squared_class_key_of(m2: IndexExpr):
    """Class key of a nonnegative expression already given as a square."""
    if m2.is_zero():
        return None
    from .indexexpr import _class_sub, _leading_on_parity  # noqa: PLC0415

    keys = []
    for form in (m2.num, m2.den):
        l0 = _leading_on_parity(form, 0)
        l1 = _leading_on_parity(form, 1)
        if l0 is None or l1 is None or l0[0] != l1[0]:
            return None
        keys.append(l0[0])
    return _class_sub(keys[0], keys[1])


def _band_reaches_standard(p: StructuredPoly, t: TailTerm) -> bool:
    return t.lo is None or not t.lo.infinite


def _band_reaches_ray(p: StructuredPoly, t: TailTerm, num: int, den: int) -> bool:
    """Does the band eventually cover the ray m = (num/den) * d_i?"""
    ray_slope = Fraction(p.degree.slope * num, den)
    if t.lo is not None:
        if Fraction(t.lo.slope) > ray_slope:
            return False
        if Fraction(t.lo.slope) == ray_slope and t.lo.intercept >= math.ceil(
            p.degree.intercept * num / den
        ):
            return False
    if t.hi is not None:
        if Fraction(t.hi.slope) < ray_slope:
            return False
    return True


def _root_factor_phi(phi_expr: IndexExpr) -> str:
    """lim |phi(m)|^(1/m) as a coarse value: zero / pos / inf / unknown."""
    if phi_expr.is_zero():
        return _ZERO
    key = squared_class_key(phi_expr)
    if key is None:
        return _UNK
    k2, _, _ = key
    if k2 < 0:
        return _ZERO
    if k2 > 0:
        return _INF
    return _POS


def _root_factor_seq(e2: IndexExpr) -> str:
    """lim |psi(i)|^(1/m) along a ray m ~ s*i, given e2 = |psi|^2.

    The slope never matters for the coarse value: a factorial class forces 0
    or oo, anything geometric-or-slower lands at a positive constant.
    """
    if e2.is_zero():
        return _ZERO
    key = squared_class_key_of(e2)
    if key is None:
        return _UNK
    k2 = key[0]
    if k2 < 0:
        return _ZERO
    if k2 > 0:
        return _INF
    return _POS


def _root_factor_eps(eps: IndexExpr) -> str:
    """lim |eps(i)| itself (exponent 1 per unit of m)."""
    if eps.is_zero():
        return _ZERO
    g = (eps * eps).growth()
    if g.kind == "zero":
        return _ZERO
    if g.kind == "infinite":
        return _INF
    if g.kind == "finite":
        return _POS
    if g.kind == "finite-or-zero":
        return _UNK
    return _UNK


def _combine_root_factors(factors: list[str]) -> str:
    if any(f == _UNK for f in factors):
        if _ZERO in factors and _INF not in factors:
            return _ZERO
        return _UNK
    if _INF in factors and _ZERO in factors:
        return _UNK
    if _INF in factors:
        return _INF
    if _ZERO in factors:
        return _ZERO
    return _POS


def _band_ray_values(p: StructuredPoly, t: TailTerm) -> Optional[list[str]]:
    """Root-test limits of the band along the two rays, None when no infinite range."""
    if not p.degree.infinite:
        return None
    out = []
    for num, den in ((1, 1), (1, 2)):
        if not _band_reaches_ray(p, t, num, den):
            continue
        for phi_expr in t.phi:
            if phi_expr.is_zero():
                continue
            factors = [
                _root_factor_eps(t.eps),
                _root_factor_phi(phi_expr),
                _root_factor_seq(t.psi_re * t.psi_re + t.psi_im * t.psi_im),
            ]
            out.append(_combine_root_factors(factors))
    return out


def _band_failure(p: StructuredPoly, t: TailTerm) -> Optional[PolyClass]:
    """Unbounded verdicts provable from this band alone."""
    # standard-range clause (i): walk the class key m -> m*key(eps) + key(psi)
    if _band_reaches_standard(p, t):
        step = _band_key_walk(p, t)
        if step is not None and step[0] == "unbounded":
            return PolyClass(
                UNBOUNDED,
                Certificate("root-test",
                            (f"clause i fails: band coefficient at |nu| = {step[1]} is infinite",)),
                "no",
            )
    rays = _band_ray_values(p, t)
    if rays:
        if any(v in (_POS, _INF) for v in rays) and _is_isolated_band(p, t):
            return PolyClass(
                UNBOUNDED,
                Certificate(
                    "root-test",
                    ("clause ii fails: band root test has a nonzero limit on a ray",),
                ),
                "no",
            )
    return None


def _is_isolated_band(p: StructuredPoly, t: TailTerm) -> bool:
    """No other band shares the infinite range (rules out cross cancellation)."""
    others = [u for u in p.tails if u is not t]
    for u in others:
        vals = _band_ray_values(p, u)
        if vals is None:
            continue
        if any(v != _ZERO for v in vals):
            return False
    return True


def _band_key_walk(p: StructuredPoly, t: TailTerm):
    """Walk standard degrees m: class key of a(m, .) is key(psi) + m*key(eps).

    Returns ("unbounded", m) on a provably infinite standard coefficient,
    ("ok", flag) when every standard coefficient in the band is bounded
    (flag is 'yes' if all are infinitesimal, 'no'/'unknown' otherwise),
    or None when undecided.
    """
    psi2 = t.psi_re * t.psi_re + t.psi_im * t.psi_im
    if psi2.is_zero():
        return ("ok", "yes")
    psi_key = squared_class_key_of(psi2)
    if psi_key is None:
        return None
    start = _band_standard_start(p, t)

    def first_live_m() -> Optional[int]:
        m = start
        for _ in range(256):
            if not _band_has_standard_m(p, t, m):
                return None
            if t.phi_at(m) != 0:
                return m
            m += 1
        return None

    if t.eps.is_zero():
        # eps^m kills every m >= 1; only m = 0 can contribute
        if start > 0 or not _band_has_standard_m(p, t, 0) or t.phi_at(0) == 0:
            return ("ok", "yes")
        if psi_key > UNIT_CLASS:
            return ("unbounded", 0)
        return ("ok", "yes" if psi_key < UNIT_CLASS else "no")
    eps_key = squared_class_key(t.eps)
    if eps_key is None:
        return None
    if eps_key == UNIT_CLASS:
        # |eps| appreciable: the class is the same at every live degree
        if first_live_m() is None:
            return ("ok", "yes")
        if psi_key > UNIT_CLASS:
            return ("unbounded", first_live_m())
        return ("ok", "yes" if psi_key < UNIT_CLASS else "no")
    flag = "yes"
    m = start
    for _ in range(512):
        if not _band_has_standard_m(p, t, m):
            return ("ok", flag)
        if t.phi_at(m) != 0:
            key = (psi_key[0] + m * eps_key[0],
                   psi_key[1] * eps_key[1] ** m,
                   psi_key[2] + m * eps_key[2])
            if key > UNIT_CLASS:
                return ("unbounded", m)
            if key == UNIT_CLASS:
                flag = "no"
            elif eps_key < UNIT_CLASS:
                return ("ok", flag)  # keys strictly decrease from here on
        m += 1
    return None


def _band_standard_start(p: StructuredPoly, t: TailTerm) -> int:
    if t.lo is None:
        return 0
    if t.lo.infinite:
        return 1 << 30
    return t.lo.finite_value + 1


def _band_has_standard_m(p: StructuredPoly, t: TailTerm, m: int) -> bool:
    """Is |nu| = m eventually inside the band (and under the degree)?"""
    if t.lo is not None and t.lo.infinite:
        return False
    if t.lo is not None and m <= t.lo.finite_value:
        return False
    for b in (t.hi, p.degree):
        if b is not None and not b.infinite and m > b.finite_value:
            return False
    return True


def _band_finite_state(p: StructuredPoly, t: TailTerm) -> str:
    """Summary of the band over standard degrees: infinitesimal | bounded |
    appreciable | undecided | empty."""
    if not _band_reaches_standard(p, t):
        return "empty"
    walk = _band_key_walk(p, t)
    if walk is None:
        return "undecided"
    if walk[0] == "unbounded":
        return "undecided"  # callers catch the failure through _band_failure
    flag = walk[1]
    if flag == "yes":
        return "infinitesimal"
    if flag == "no":
        return "appreciable"
    return "bounded"


def _band_ray_state(p: StructuredPoly, t: TailTerm) -> str:
    rays = _band_ray_values(p, t)
    if rays is None:
        return "empty"
    if all(v == _ZERO for v in rays):
        return "pass"
    if any(v in (_POS, _INF) for v in rays) and _is_isolated_band(p, t):
        return "fail-handled"  # _band_failure already produced the verdict
    return "undecided"


# ---------------------------------------------------------------------------
# the evaluation oracle
# ---------------------------------------------------------------------------

def _window_values_squared(p: InternalPolynomial, pt: tuple, horizon: int) -> list:
    """|P_i(pt)|^2 for i in the window, with point powers computed once."""
    mats = []
    max_exp = [0] * p.n
    for i in range(1, horizon + 1):
        try:
            mat = p.materialize(i)
        except ZeroDivisionError:
            continue
        mats.append(mat)
        for nu in mat:
            for var, e in enumerate(nu):
                if e > max_exp[var]:
                    max_exp[var] = e
    tables = []
    for var in range(p.n):
        tbl = [(Q(1), Q(0))]
        for _ in range(max_exp[var]):
            a, b = tbl[-1]
            c, d = pt[var]
            tbl.append((a * c - b * d, a * d + b * c))
        tables.append(tbl)
    out = []
    for mat in mats:
        total_re, total_im = Q(0), Q(0)
        for nu, coeff in mat.items():
            re, im = coeff
            for var, e in enumerate(nu):
                if e:
                    c, d = tables[var][e]
                    re, im = re * c - im * d, re * d + im * c
            total_re += re
            total_im += im
        out.append(total_re * total_re + total_im * total_im)
    return out


def _rational_circle_points(count: int, seed: int) -> list[tuple[Fraction, Fraction]]:
    """Deterministic low-discrepancy rational points exactly on the unit circle.

    Uses the tangent-half-angle parametrization at a golden-ratio-like
    rational stream, so coordinates are exact rationals of modest height.
    """
    pts = []
    p_num, p_den = 377, 610  # convergent of the golden ratio
    acc = seed % p_den
    for _ in range(count):
        acc = (acc + p_num) % p_den
        u = Fraction(acc, p_den)
        tval = 2 * u - 1  # in (-1, 1)
        d = 1 + tval * tval
        pts.append(((1 - tval * tval) / d, 2 * tval / d))
    return pts


@dataclass(frozen=True)
class OracleReport:
    bounded: Verdict
    infinitesimal: Verdict
    witness: Optional[tuple] = None
    radius: Fraction = Q(1)

    def to_json(self):
        return {
            "bounded": self.bounded.to_json(),
            "infinitesimal": self.infinitesimal.to_json(),
            "witness": None if self.witness is None else [str(c) for c in self.witness],
            "radius": str(self.radius),
        }


def sampling_oracle(
    p: InternalPolynomial,
    sample_count: int = 16,
    radius=1,
    horizon: int = 64,
    seed: int = 0,
    config: Config = DEFAULT,
) -> OracleReport:
    """Evaluate the polynomial at sampled bounded points across the window.

    A ``Fails`` verdict on boundedness is conclusive evidence: it names a
    witness point whose value sequence grows without bound.  ``Holds`` is
    evidence at this radius only.
    """
    R = Q(radius)
    if R <= 0:
        raise ValueError("radius must be a positive rational")
    if sample_count < 1:
        raise ValueError("need at least one sample")
    circle = _rational_circle_points(sample_count, seed)
    # the distinguished points go first: growth shows on the positive axis
    ones = tuple((Q(1), Q(0)) for _ in range(p.n))
    points: list[tuple[tuple[Fraction, Fraction], ...]] = [
        tuple((R, Q(0)) for _ in range(p.n)),
        ones,
    ]
    for j, (c, s) in enumerate(circle):
        scale = R if j % 2 == 0 else R * Fraction(j % 5 + 1, 5)
        pt = tuple(
            ((c * scale, s * scale) if (j + var) % 2 == 0 else (s * scale, -c * scale))
            for var in range(p.n)
        )
        points.append(pt)

    # fully explicit symbolic polynomials evaluate to classifiable sequences:
    # an exact infinite value at any sampled point is a conclusive witness
    if (
        isinstance(p, StructuredPoly)
        and not p.tails
        and not p.tops
        and p.is_symbolic()
    ):
        for pt in points[:4]:
            hpt = [HyperComplex.from_rational(c[0], c[1]) for c in pt]
            val = poly_eval(p, hpt)
            cls = val.classify(config)
            if cls.label == INFINITE:
                return OracleReport(
                    Verdict(FAILS, 1, f"symbolic: value at witness point is infinite"),
                    Verdict(FAILS, 1, "value infinite at a sampled point"),
                    pt,
                    R,
                )

    worst_growth: Optional[tuple] = None
    all_small = True
    all_bounded = True
    bound_seen = Q(0)
    for pt in points:
        seq = _window_values_squared(p, pt, horizon)
        if not seq:
            continue
        m = max(seq)
        bound_seen = max(bound_seen, m)
        quarter = seq[3 * len(seq) // 4:]
        if not all(v < Q(config.infinitesimal_tol) ** 2 for v in quarter):
            all_small = False
        ratios = [
            quarter[k + 1] / quarter[k] for k in range(len(quarter) - 1) if quarter[k] > 0
        ]
        if ratios and all(r > Q(config.growth_ratio) ** 2 for r in ratios):
            all_bounded = False
            if worst_growth is None:
                worst_growth = pt
                break  # one conclusive witness point is enough
    if worst_growth is not None:
        bounded = Verdict(FAILS, horizon,
                          f"value sequence grows at sampled point (radius {R})")
        infl = Verdict(FAILS, horizon, "grows at a sampled point")
        return OracleReport(bounded, infl, worst_growth, R)
    bounded = Verdict(HOLDS, 1, f"max |P|^2 = {float(bound_seen):.6g} over window at radius {R}")
    if all_small:
        infl = Verdict(HOLDS, 1, "all sampled value sequences vanish within tolerance")
    else:
        infl = Verdict(FAILS, 1, "some sampled value stays appreciable")
    return OracleReport(bounded, infl, None, R)


# ---------------------------------------------------------------------------
# Cauchy coefficient recovery
# ---------------------------------------------------------------------------

def _torus_values(
    p: InternalPolynomial, radius: float, at_index: int, nodes: int
) -> tuple[dict, list, dict]:
    """Materialize P_i and evaluate it at every node of the M^n torus grid."""
    import itertools as _it

    mat = p.materialize(at_index)
    roots = [cmath.exp(2j * cmath.pi * k / nodes) for k in range(nodes)]
    values = {}
    for js in _it.product(range(nodes), repeat=p.n):
        xi = tuple(radius * roots[j] for j in js)
        val = 0j
        for mu, c in mat.items():
            term = complex(c[0], c[1])
            for t, e in enumerate(mu):
                if e:
                    term *= xi[t] ** e
            val += term
        values[js] = val
    return mat, roots, values


def _per_variable_degree(mat: dict, n: int) -> int:
    deg = 0
    for mu in mat:
        deg = max(deg, max(mu))
    return deg


def cauchy_all_coefficients(
    p: InternalPolynomial, radius, at_index: int, nodes: int
) -> dict[tuple, complex]:
    """Trapezoidal recovery of every materialized coefficient at one index.

    One torus evaluation pass is shared across all coefficients; exact up to
    rounding once ``nodes`` exceeds the per-variable degree.
    """
    R = float(radius)
    mat, roots, values = _torus_values(p, R, at_index, nodes)
    deg = _per_variable_degree(mat, p.n) if mat else 0
    if nodes <= deg:
        raise ValueError(f"need more than deg = {deg} nodes, got {nodes}")
    out = {}
    for nu in mat:
        total = 0j
        for js, val in values.items():
            phase = 1.0 + 0j
            for t, j in enumerate(js):
                phase *= roots[(-j * nu[t]) % nodes]
            total += val * phase
        out[nu] = total / (nodes ** p.n * R ** mi_total(nu))
    return out


def cauchy_coefficient(
    p: InternalPolynomial,
    nu: tuple,
    radius,
    at_index: int,
    nodes: int,
) -> complex:
    """Tensor-product trapezoidal quadrature of P(xi)/xi^(nu+1) on the torus.

    Exact (up to rounding) once ``nodes`` exceeds the per-variable degree of
    the materialized polynomial; refuses otherwise, because exactness is the
    whole point of the trapezoidal rule on the torus.
    """
    nu = tuple(nu)
    R = float(radius)
    mat, roots, values = _torus_values(p, R, at_index, nodes)
    deg = _per_variable_degree(mat, p.n) if mat else 0
    if nodes <= deg:
        raise ValueError(f"need more than deg = {deg} nodes, got {nodes}")
    total = 0j
    for js, val in values.items():
        phase = 1.0 + 0j
        for t, j in enumerate(js):
            phase *= roots[(-j * nu[t]) % nodes]
        total += val * phase
    return total / (nodes ** p.n * R ** mi_total(nu))


def coefficient_bound_check(
    p: InternalPolynomial,
    radius,
    at_index: int,
    nodes: Optional[int] = None,
    slack: float = 1e-8,
) -> dict:
    """Max-modulus bound M_R on the torus and the list of violating indices.

    Checks |a_nu| <= M_R / R^|nu| for every materialized coefficient; the
    list should be empty up to quadrature slack.
    """
    R = float(radius)
    if nodes is None:
        deg = _per_variable_degree(p.materialize(at_index), p.n) if p.materialize(at_index) else 0
        nodes = max(16, 2 * deg + 5)
    mat, _, values = _torus_values(p, R, at_index, nodes)
    m_r = max((abs(v) for v in values.values()), default=0.0)
    violations = []
    for mu, c in mat.items():
        lhs = abs(complex(c[0], c[1]))
        if lhs > m_r / (R ** mi_total(mu)) + slack:
            violations.append(mu)
    return {"M_R": m_r, "violations": violations, "radius": R, "index": at_index}
