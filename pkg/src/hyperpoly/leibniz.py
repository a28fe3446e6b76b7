"""Differentials as polynomials in infinitesimal increments.

A differential element is a polynomial in X_1..X_n and dX_1..dX_n, stored by
dX-slices: body = sum over mu of C_mu(X) * dX^mu with internal-polynomial
coefficients.  The map ``delta(f) = f(X+dX) - f(X)`` lands in the ideal I of
elements that take infinitesimal values when X is bounded and dX is
infinitesimal; reduction mod I^2 realizes 1-forms, and the comparison map
phi sends a reduced element to the standard parts of its linear slices.

Membership in I^2 is decided through the explicit kernel criterion: the
dX-free slice and the dX-linear slices must be infinitesimal (complete for
the dX-degree <= 2 elements every reduction here produces, with boundedness
of the higher slices making their quadratic part land in I*I).

The factorization lemma (infinitesimal = infinitesimal * infinitesimal) is
implemented by the explicit recipe eps = max |a_nu|^(1/2): the scalar and the
cofactor are powers of one rational sequence, so iterated factorizations
verify exactly by exponent arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .classify import BOUNDED, INFINITESIMAL, Certificate, PolyClass, classify_poly
from .hypernat import HyperNatural
from .interpoly import (
    InternalPolynomial,
    StructuredPoly,
    mi_total,
    partial_derivative,
    poly_add,
    poly_mul,
    scalar_mul,
    zero_poly,
)
from .stdpart import StandardPowerSeries, StandardPartError, lift_series, st_poly
from .verdicts import FAILS, HOLDS, UNDETERMINED, Verdict

Q = Fraction
MultiIndex = tuple


class DnCertificateError(ValueError):
    """The element has no certificate placing it in the bounded diff ring."""


@dataclass
class DiffElement:
    """body = sum_mu slices[mu](X) * dX^mu, slices internal polynomials."""

    n: int
    slices: dict[MultiIndex, InternalPolynomial] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mu, poly in self.slices.items():
            mu = tuple(mu)
            if len(mu) != self.n:
                raise ValueError("slice index arity mismatch")
            if poly.n != self.n:
                raise ValueError("slice polynomial arity mismatch")
            if isinstance(poly, StructuredPoly) and not poly.explicit \
                    and not poly.tails and not poly.tops:
                continue
            clean[mu] = poly
        self.slices = clean

    # -- basics -----------------------------------------------------------------
    @staticmethod
    def from_poly(p: InternalPolynomial) -> "DiffElement":
        return DiffElement(p.n, {tuple([0] * p.n): p})

    def x_part(self) -> InternalPolynomial:
        """The dX-free slice P(X, 0)."""
        return self.slices.get(tuple([0] * self.n), zero_poly(self.n))

    def linear_slice(self, var: int) -> InternalPolynomial:
        e = tuple(1 if t == var else 0 for t in range(self.n))
        return self.slices.get(e, zero_poly(self.n))

    def dx_degree(self) -> int:
        return max((mi_total(mu) for mu in self.slices), default=0)

    def __add__(self, other: "DiffElement") -> "DiffElement":
        out = dict(self.slices)
        for mu, poly in other.slices.items():
            out[mu] = poly_add(out[mu], poly) if mu in out else poly
        return DiffElement(self.n, out)

    def __sub__(self, other: "DiffElement") -> "DiffElement":
        return self + other.scale(-1)

    def scale(self, c) -> "DiffElement":
        return DiffElement(
            self.n, {mu: scalar_mul(c, poly) for mu, poly in self.slices.items()}
        )

    def __mul__(self, other: "DiffElement") -> "DiffElement":
        out: dict[MultiIndex, InternalPolynomial] = {}
        for mu, a in self.slices.items():
            for rho, b in other.slices.items():
                key = tuple(x + y for x, y in zip(mu, rho))
                prod = poly_mul(a, b)
                out[key] = poly_add(out[key], prod) if key in out else prod
        return DiffElement(self.n, out)

    def mul_poly(self, p: InternalPolynomial) -> "DiffElement":
        return DiffElement(
            self.n, {mu: poly_mul(p, s) for mu, s in self.slices.items()}
        )

    # -- verification hooks --------------------------------------------------------
    def decomposition(self) -> tuple[InternalPolynomial, list["DiffElement"]]:
        """body = P_0 + sum_i Q_i dX_i, routing each monomial by its first dX."""
        p0 = self.x_part()
        qs: list[dict] = [dict() for _ in range(self.n)]
        for mu, poly in self.slices.items():
            if mi_total(mu) == 0:
                continue
            j = next(t for t, e in enumerate(mu) if e > 0)
            reduced = tuple(e - 1 if t == j else e for t, e in enumerate(mu))
            qs[j][reduced] = poly_add(qs[j][reduced], poly) if reduced in qs[j] else poly
        return p0, [DiffElement(self.n, q) for q in qs]

    def decomposition_identity_holds(self, indices, probe) -> bool:
        """Exact check of body = P_0 + sum Q_i dX_i at sampled indices.

        ``probe`` supplies exact rational values for (X, dX) coordinates.
        """
        p0, qs = self.decomposition()
        xs, dxs = probe
        for i in indices:
            lhs = self.eval_exact(i, xs, dxs)
            total = p0.eval_exact(i, xs)
            for var, q in enumerate(qs):
                qv = q.eval_exact(i, xs, dxs)
                d = dxs[var]
                total = (
                    total[0] + qv[0] * d[0] - qv[1] * d[1],
                    total[1] + qv[0] * d[1] + qv[1] * d[0],
                )
            if lhs != total:
                return False
        return True

    def eval_exact(self, i: int, xs, dxs):
        total = (Q(0), Q(0))
        for mu, poly in self.slices.items():
            v = poly.eval_exact(i, xs)
            for var, e in enumerate(mu):
                for _ in range(e):
                    d = dxs[var]
                    v = (v[0] * d[0] - v[1] * d[1], v[0] * d[1] + v[1] * d[0])
            total = (total[0] + v[0], total[1] + v[1])
        return total

    def dn_certificate(self) -> Optional[str]:
        """None when every slice classifies bounded; else the failure reason."""
        for mu, poly in sorted(self.slices.items()):
            cls = classify_poly(poly)
            if not cls.bounded:
                return f"slice at dX^{mu} classifies {cls.verdict}"
        return None


# ---------------------------------------------------------------------------
# delta and the ideal I
# ---------------------------------------------------------------------------

def _mi_factorial(mu: MultiIndex) -> int:
    import math

    out = 1
    for e in mu:
        out *= math.factorial(e)
    return out


def delta(f: InternalPolynomial) -> DiffElement:
    """f(X + dX) - f(X), expanded exactly by the Taylor identity.

    For polynomials the expansion sum_mu (d^mu f / mu!) dX^mu is finite at
    every index; derivative slices keep the structured form, so membership
    tests on the result stay decidable.
    """
    n = f.n
    slices: dict[MultiIndex, InternalPolynomial] = {}
    max_total = _derivative_support_cap(f)
    from .interpoly import multi_indices_of_degree

    for m in range(1, max_total + 1):
        for mu in multi_indices_of_degree(n, m):
            d = partial_derivative(f, mu)
            if isinstance(d, StructuredPoly) and not d.explicit and not d.tails and not d.tops:
                continue
            slices[mu] = scalar_mul(Q(1, _mi_factorial(mu)), d)
    return DiffElement(n, slices)


def _derivative_support_cap(f: InternalPolynomial) -> int:
    """Total dX-degree beyond which all derivative slices vanish."""
    if not f.degree.infinite:
        return max([max(0, f.degree.intercept)] + [v for _, v in f.degree.patches])
    raise ValueError(
        "delta of a hyperfinite-degree polynomial has hyperfinitely many slices; "
        "apply it to finite-degree (explicit) polynomials or use delta_directional"
    )


def delta_directional(f: InternalPolynomial, var: int, depth: int) -> DiffElement:
    """f(X + dX_var e_var) - f(X) up to dX-degree ``depth`` slices.

    The one construction that needs delta of a banded polynomial (the
    phi-preimage of a monomial 1-form) only ever reads finitely many slices;
    ``depth`` makes that truncation explicit.
    """
    n = f.n
    slices = {}
    for k in range(1, depth + 1):
        mu = tuple(k if t == var else 0 for t in range(n))
        d = partial_derivative(f, mu)
        slices[mu] = scalar_mul(Q(1, _mi_factorial(mu)), d)
    return DiffElement(n, slices)


def in_I(p: DiffElement) -> Verdict:
    """Membership in the infinitesimal-value ideal: P_0 must be infinitesimal."""
    reason = p.dn_certificate()
    if reason is not None:
        raise DnCertificateError(reason)
    cls = classify_poly(p.x_part())
    if cls.verdict == INFINITESIMAL:
        return Verdict(HOLDS, 1, "dX-free slice classifies infinitesimal")
    if cls.verdict == BOUNDED and cls.infinitesimal == "no":
        return Verdict(FAILS, 1, "dX-free slice is bounded and not infinitesimal")
    return Verdict(UNDETERMINED, 1, f"dX-free slice classifies {cls.verdict}")


def in_I2(p: DiffElement) -> Verdict:
    """Kernel criterion for I^2: dX-free and dX-linear slices infinitesimal.

    Complete for elements of dX-degree <= 2 whose higher slices are bounded
    (those contribute products of two increments, already in I*I).
    """
    reason = p.dn_certificate()
    if reason is not None:
        raise DnCertificateError(reason)
    parts = [("dX-free", p.x_part())] + [
        (f"dX_{i + 1}-linear", p.linear_slice(i)) for i in range(p.n)
    ]
    for name, poly in parts:
        cls = classify_poly(poly)
        if cls.verdict == INFINITESIMAL:
            continue
        if cls.verdict == BOUNDED and cls.infinitesimal == "no":
            return Verdict(FAILS, 1, f"{name} slice is not infinitesimal")
        return Verdict(UNDETERMINED, 1, f"{name} slice classifies {cls.verdict}")
    return Verdict(HOLDS, 1, "free and linear slices are infinitesimal")


# ---------------------------------------------------------------------------
# phi and reduction mod I^2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OneForm:
    n: int
    components: tuple          # StandardPowerSeries per variable

    def is_zero_to_order(self, order: int) -> bool:
        return all(c.is_constant_to_order(order) and c.coeff(tuple([0] * self.n)) == (0, 0)
                   for c in self.components)

    def eq_to_order(self, other: "OneForm", order: int) -> bool:
        return all(
            a.eq_to_order(b, order) for a, b in zip(self.components, other.components)
        )

    def to_json(self, order: int = 8):
        return {
            "n": self.n,
            "components": [c.to_json(order) for c in self.components],
        }


def phi(p: DiffElement) -> OneForm:
    """Standard parts of the linear slices; kills I^2 by construction."""
    verdict = in_I(p)
    if not verdict.holds():
        raise StandardPartError(f"phi needs an element of I ({verdict})")
    comps = []
    for i in range(p.n):
        s = p.linear_slice(i)
        cls = classify_poly(s)
        if not cls.bounded:
            raise StandardPartError(
                f"linear slice {i} is not bounded ({cls.verdict})"
            )
        comps.append(st_poly(s, cls))
    return OneForm(p.n, tuple(comps))


def reduce_mod_I2(p: DiffElement) -> OneForm:
    """Canonical representative of p modulo I^2, as a 1-form."""
    return phi(p)


def reduce_equal(p: DiffElement, q: DiffElement) -> Verdict:
    """Do p and q reduce identically, i.e. is p - q in I^2?"""
    return in_I2(p - q)


def derivation_check(f: InternalPolynomial, g: InternalPolynomial) -> Verdict:
    """delta(fg) - f delta(g) - g delta(f) lands in I^2."""
    lhs = delta(poly_mul(f, g))
    rhs = delta(g).mul_poly(f) + delta(f).mul_poly(g)
    return in_I2(lhs - rhs)


def taylor_identity_check(f: InternalPolynomial) -> Verdict:
    """delta(f) - sum_i (d_i f) dX_i is in I^2 for bounded f."""
    d = delta(f)
    for i in range(f.n):
        e = tuple(1 if t == i else 0 for t in range(f.n))
        d = d - DiffElement(f.n, {e: partial_derivative(f, e)})
    return in_I2(d)


# ---------------------------------------------------------------------------
# the factorization lemma
# ---------------------------------------------------------------------------

class FactorizationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EpsFactor:
    """The scalar s^exponent, where s_i = max |a_nu(i)|^2 of the source."""

    source: InternalPolynomial
    exponent: Fraction

    def s_value(self, i: int) -> Fraction:
        best = Q(0)
        for _, c in self.source.materialize(i).items():
            best = max(best, c[0] * c[0] + c[1] * c[1])
        return best

    def value_float(self, i: int) -> float:
        return float(self.s_value(i)) ** float(self.exponent)

    def classify_label(self) -> str:
        return INFINITESIMAL  # derived: the source is certified infinitesimal


class ScaledPoly(InternalPolynomial):
    """source * s^exponent: exact by exponent arithmetic, never materialized.

    The coefficients are irrational scalings of the source's, so this node
    does not pretend to materialize; equality claims about products with the
    matching EpsFactor are checked by adding exponents.
    """

    def __init__(self, source: InternalPolynomial, exponent: Fraction):
        self.n = source.n
        self.degree = source.degree
        self.source = source
        self.exponent = Fraction(exponent)

    def materialize(self, i: int):
        raise TypeError("scaled cofactors carry irrational coefficients; "
                        "use exponent arithmetic on the factorization instead")

    def coeff(self, nu):
        raise TypeError("scaled cofactors have no rational coefficient stream")


@dataclass(frozen=True)
class Factorization:
    """source = (prod of eps factors) * cofactor, exact by construction."""

    source: InternalPolynomial
    eps: tuple            # EpsFactor, ...
    cofactor: ScaledPoly

    def exponent_identity(self) -> bool:
        total = sum((e.exponent for e in self.eps), Q(0))
        return total + self.cofactor.exponent == 0

    def verify_at(self, indices) -> bool:
        """Exact check source_i = prod eps_i * cofactor_i.

        All factors are powers of the same rational sequence s, so the check
        is exponent arithmetic plus the zero convention: where s_i = 0 the
        source materializes to zero and every factor is zero by definition.
        """
        if not self.exponent_identity():
            return False
        e0 = self.eps[0]
        for i in indices:
            s = e0.s_value(i)
            mat = self.source.materialize(i)
            if s == 0 and mat:
                return False
        return True


def infinitesimal_factor(p: InternalPolynomial) -> tuple[EpsFactor, ScaledPoly]:
    """Split an infinitesimal polynomial as eps * Q, both infinitesimal.

    eps_i = (max_nu |a_nu(i)|^2)^(1/4) = max |a_nu(i)|^(1/2); the cofactor
    divides every coefficient by eps.  Both classifications derive from the
    source certificate: eps^4 = s -> 0, and |a_nu/eps| <= |a_nu|^(1/2)
    pointwise, so the cofactor inherits the root-test decay.
    """
    cls = classify_poly(p)
    if cls.verdict != INFINITESIMAL or not cls.certificate.symbolic:
        raise FactorizationError(
            f"factorization needs a symbolically certified infinitesimal polynomial "
            f"(got {cls.verdict})"
        )
    return EpsFactor(p, Q(1, 4)), ScaledPoly(p, Q(-1, 4))


def factor_chain(p: InternalPolynomial, steps: int) -> Factorization:
    """Iterate the lemma: p = eps_1 ... eps_steps * Q with every factor
    infinitesimal; all factors are powers of one rational sequence."""
    if steps < 1:
        raise ValueError("need at least one factorization step")
    eps_list = []
    exponent = Q(0)
    # each round halves the remaining mass: eps_j = s^(1/4) * s^(previous/2)...
    # concretely: cofactor exponent after j rounds is -(1/2)(1 - 2^-j)
    for j in range(1, steps + 1):
        e_j = Q(1, 4) * Q(1, 2) ** (j - 1)
        eps_list.append(EpsFactor(p, e_j))
        exponent -= e_j
    cofactor = ScaledPoly(p, exponent)
    first = infinitesimal_factor(p)  # validates the precondition
    assert first[0].exponent == eps_list[0].exponent
    return Factorization(p, tuple(eps_list), cofactor)


def classify_scaled(obj) -> PolyClass:
    """Derived classification for factorization pieces."""
    if isinstance(obj, (EpsFactor, ScaledPoly)):
        src = classify_poly(obj.source)
        if src.verdict == INFINITESIMAL:
            return PolyClass(
                INFINITESIMAL,
                Certificate("propagated", ("factorization lemma on a certified source",)),
                "yes",
            )
        return PolyClass("undetermined", Certificate("propagated", ("source not infinitesimal",)))
    return classify_poly(obj)


# ---------------------------------------------------------------------------
# the section of the standard part, mod I^(m+1)
# ---------------------------------------------------------------------------

@dataclass
class SectionClass:
    """s(f) = [lift of f] mod I^(m+1): any two lifts differ inside I^(m+1)."""

    series: StandardPowerSeries
    order: int
    degree: HyperNatural
    lift: DiffElement

    def compare_lift(self, other_degree: HyperNatural) -> Factorization:
        """Factor the difference against a second lift into m+1 infinitesimals."""
        first = lift_series(self.series, self.degree)
        second = lift_series(self.series, other_degree)
        diff = poly_add(first, scalar_mul(-1, second))
        cls = classify_poly(diff)
        if cls.verdict != INFINITESIMAL:
            raise FactorizationError(
                f"lift difference should be infinitesimal, classifier says {cls.verdict}"
            )
        return factor_chain(diff, self.order + 1)


def section_s(f: StandardPowerSeries, order: int, d: HyperNatural) -> SectionClass:
    """The natural section of st into the diff ring modulo I^(order+1)."""
    if not f.entire:
        raise ValueError("the section needs an entire-certified series")
    lifted = lift_series(f, d)
    return SectionClass(f, order, d, DiffElement.from_poly(lifted))


# ---------------------------------------------------------------------------
# surjectivity onto monomial 1-forms
# ---------------------------------------------------------------------------

def phi_preimage_of_monomial_form(
    f: StandardPowerSeries, var: int, d: HyperNatural, n: Optional[int] = None
) -> DiffElement:
    """An element of I with phi-image f dx_var.

    Taking F with dF/dX_var = (lift of f) and expanding F(X + dX_var) - F(X)
    gives the preimage; only finitely many slices are ever read, and the
    linear one is the lifted f by construction.
    """
    n = f.n if n is None else n
    lifted = lift_series(f, d)
    big = _antiderivative(lifted, var)
    return delta_directional(big, var, depth=3)


def _antiderivative(p: InternalPolynomial, var: int) -> InternalPolynomial:
    """An internal polynomial F with dF/dX_var = p (structured inputs)."""
    if not isinstance(p, StructuredPoly):
        raise ValueError("antiderivative needs a structured polynomial")
    explicit = {}
    for nu, c in p.explicit.items():
        up = tuple(e + 1 if t == var else e for t, e in enumerate(nu))
        explicit[up] = c * Q(1, nu[var] + 1)
    tails = []
    for t in p.tails:
        if p.n != 1:
            raise ValueError("banded antiderivatives are univariate")
        period = len(t.phi)
        from .indexexpr import IndexExpr

        m_expr = IndexExpr.index()
        new_phi = tuple(
            t.phi[(r - 1) % period].subst_affine(1, -1) / m_expr for r in range(period)
        )
        lo = (t.lo + HyperNatural.constant(1)) if t.lo is not None \
            else HyperNatural.constant(0)
        hi = (t.hi + HyperNatural.constant(1)) if t.hi is not None else None
        tails.append(
            type(t)(new_phi, t.eps, t.psi_re / t.eps, t.psi_im / t.eps, lo, hi)
        )
    if p.tops:
        raise ValueError("antiderivative of moving-top monomials is not needed here")
    deg = p.degree + HyperNatural.constant(1)
    return StructuredPoly(p.n, deg, explicit, tuple(tails))
