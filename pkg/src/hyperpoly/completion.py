"""Adic completion by late representatives.

A coherent tower of residues mod powers of the maximal ideal (X_1, ..., X_n)
lifts to a single internal polynomial: take the representing sequence whose
index-i member is the deepest available level.  Every congruence against the
tower is then exact - "any sufficiently late representative works" becomes,
concretely, the tail of the sequence.

Coefficients live in Q or in a prime field F_p; the finite-field case is the
one where the lift map onto residues is exhaustively checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Union

from .hypernat import HyperNatural
from .hypernum import HyperComplex
from .interpoly import InternalPolynomial, StructuredPoly, mi_total, multi_indices_of_degree
from .verdicts import FAILS, HOLDS, UNDETERMINED, Verdict

Q = Fraction

FieldSpec = Union[str, int]   # "Q" or a prime modulus


class TowerError(ValueError):
    pass


def _field_ok(field: FieldSpec) -> None:
    if field == "Q":
        return
    if isinstance(field, int) and field >= 2:
        return
    raise TowerError(f"unsupported coefficient field {field!r}")


def _normalize(field: FieldSpec, c):
    if field == "Q":
        return Q(c)
    return int(c) % field


@dataclass(frozen=True)
class FieldPoly:
    """Plain standard polynomial over Q or F_p, dense-by-dict."""

    field: FieldSpec
    n: int
    coeffs: tuple            # sorted ((nu, c), ...)

    @staticmethod
    def make(field: FieldSpec, n: int, coeffs: dict) -> "FieldPoly":
        _field_ok(field)
        norm = {}
        for nu, c in coeffs.items():
            c = _normalize(field, c)
            if c != 0:
                norm[tuple(nu)] = c
        return FieldPoly(field, n, tuple(sorted(norm.items())))

    def to_dict(self) -> dict:
        return dict(self.coeffs)

    def truncate(self, degree: int) -> "FieldPoly":
        """Residue mod m^(degree+1): drop total degrees above ``degree``."""
        return FieldPoly.make(
            self.field, self.n,
            {nu: c for nu, c in self.coeffs if mi_total(nu) <= degree},
        )

    def add(self, other: "FieldPoly") -> "FieldPoly":
        out = dict(self.coeffs)
        for nu, c in other.coeffs:
            out[nu] = out.get(nu, 0) + c
        return FieldPoly.make(self.field, self.n, out)

    def mul(self, other: "FieldPoly") -> "FieldPoly":
        out: dict = {}
        for nu1, c1 in self.coeffs:
            for nu2, c2 in other.coeffs:
                key = tuple(a + b for a, b in zip(nu1, nu2))
                out[key] = out.get(key, 0) + c1 * c2
        return FieldPoly.make(self.field, self.n, out)

    def scale(self, c) -> "FieldPoly":
        return FieldPoly.make(
            self.field, self.n, {nu: v * c for nu, v in self.coeffs}
        )

    def eval_at(self, point) -> "Fraction | int":
        total = 0
        for nu, c in self.coeffs:
            term = c
            for var, e in enumerate(nu):
                if e:
                    term = term * point[var] ** e
            total = total + term
        return _normalize(self.field, total) if self.field != "Q" else Q(total)

    def is_zero(self) -> bool:
        return not self.coeffs

    def congruent(self, other: "FieldPoly", degree: int) -> bool:
        return self.truncate(degree) == other.truncate(degree)

    @property
    def degree(self) -> int:
        return max((mi_total(nu) for nu, _ in self.coeffs), default=0)


@dataclass(frozen=True)
class ResidueTower:
    """Levels x_0, ..., x_K with x_{k+1} = x_k mod m^{k+1}."""

    field: FieldSpec
    n: int
    levels: tuple

    @staticmethod
    def make(field: FieldSpec, n: int, levels) -> "ResidueTower":
        _field_ok(field)
        lv = tuple(levels)
        for k in range(len(lv) - 1):
            if not lv[k + 1].congruent(lv[k], k):
                raise TowerError(f"tower incoherent at level {k}: "
                                 f"x_{k + 1} != x_{k} mod m^{k + 1}")
        return ResidueTower(field, n, lv)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


@dataclass(frozen=True)
class LiftedTower:
    """The internal polynomial whose index-i member is x_min(i, K)."""

    tower: ResidueTower

    def at_index(self, i: int) -> FieldPoly:
        k = min(max(i, 0), self.tower.depth)
        return self.tower.levels[k]

    def residue(self, k: int) -> FieldPoly:
        """The class of the lift mod m^(k+1) (stable from index k on)."""
        return self.at_index(self.tower.depth).truncate(k)

    def check_congruences(self) -> bool:
        y = self.at_index(self.tower.depth)
        return all(
            y.congruent(self.tower.levels[k], k) for k in range(self.tower.depth + 1)
        )

    def as_internal(self) -> InternalPolynomial:
        """Rational towers as honest internal polynomials over C."""
        t = self.tower
        if t.field != "Q":
            raise TowerError("only rational towers embed into the complex model")
        K = t.depth
        explicit = {}
        all_nu = set()
        for lv in t.levels:
            all_nu.update(nu for nu, _ in lv.coeffs)
        for nu in all_nu:
            vals = [dict(t.levels[min(i, K)].coeffs).get(nu, Q(0)) for i in range(0, K + 1)]
            final = vals[K]
            prefix = {
                i: (vals[i], Q(0)) for i in range(1, K) if vals[i] != final
            }
            explicit[nu] = HyperComplex.from_rational(final) if not prefix else \
                HyperComplex(
                    _const_expr(final), _const_expr(0), prefix
                )
        deg = max((lv.degree for lv in t.levels), default=0)
        return StructuredPoly(t.n, HyperNatural.constant(deg), explicit)


def _const_expr(v):
    from .indexexpr import IndexExpr

    return IndexExpr.const(Q(v))


def lift_tower(tower: ResidueTower, horizon: int) -> LiftedTower:
    """Lift a coherent tower; the horizon plays the role of the late index.

    Congruences y = x_k mod m^(k+1) are verified exactly for every level.
    """
    if horizon < tower.depth:
        raise TowerError(
            f"horizon {horizon} is below the tower depth {tower.depth}"
        )
    lifted = LiftedTower(tower)
    if not lifted.check_congruences():
        raise TowerError("lift failed its congruence check")
    return lifted


# ---------------------------------------------------------------------------
# halo membership: P in m^k eventually
# ---------------------------------------------------------------------------

def halo_membership(p: InternalPolynomial, k: int, horizon: int = 64) -> Verdict:
    """Does every monomial of total degree < k have eventually-zero coefficient?

    Structured polynomials are decided exactly through their coefficient
    streams; anything else gets a windowed check.
    """
    if k <= 0:
        return Verdict(HOLDS, 1, "m^0 is the whole ring")
    low = [
        nu
        for m in range(k)
        for nu in multi_indices_of_degree(p.n, m)
    ]
    if isinstance(p, StructuredPoly):
        threshold = 1
        for nu in low:
            c = p.coeff(nu)
            if not c.symbolic:
                return Verdict(UNDETERMINED, horizon, f"coefficient at {nu} is numeric")
            if not c.is_zero_expr():
                return Verdict(FAILS, 1, f"coefficient at {nu} persists")
            nonzero = [i for i, v in c.prefix.items() if v != (0, 0)]
            if nonzero:
                threshold = max(threshold, max(nonzero) + 1)
        return Verdict(HOLDS, threshold, f"all coefficients below degree {k} vanish")
    last_bad = 0
    for i in range(1, horizon + 1):
        mat = p.materialize(i)
        if any(mat.get(nu, (0, 0)) != (0, 0) for nu in low):
            last_bad = i
    if last_bad == 0:
        return Verdict(HOLDS, 1, "window evidence only")
    if last_bad <= horizon / 2:
        return Verdict(HOLDS, last_bad + 1, "window evidence only")
    return Verdict(FAILS, 1, f"low-degree coefficient alive at index {last_bad}")


# ---------------------------------------------------------------------------
# finite fields: exhaustive surjectivity
# ---------------------------------------------------------------------------

def enumerate_residues(p: int, n: int, K: int):
    """All residues mod m^(K+1) over F_p, as FieldPoly truncations."""
    monomials = [
        nu for m in range(K + 1) for nu in multi_indices_of_degree(n, m)
    ]
    for values in iproduct(range(p), repeat=len(monomials)):
        yield FieldPoly.make(p, n, dict(zip(monomials, values)))


def finite_field_surjectivity_check(p: int, n: int, K: int) -> dict:
    """Hit every residue class by a tower lift; report the count and bijectivity."""
    if p not in (2, 3, 5):
        raise TowerError("finite-field check supports p in {2, 3, 5}")
    if n > 2 or K > 6:
        raise TowerError("size cap: n <= 2 and K <= 6")
    hits = {}
    total = 0
    for residue in enumerate_residues(p, n, K):
        total += 1
        tower = ResidueTower.make(
            p, n, [residue.truncate(k) for k in range(K + 1)]
        )
        lifted = lift_tower(tower, horizon=max(K, 1))
        got = lifted.residue(K)
        hits[got] = hits.get(got, 0) + 1
        if got != residue:
            raise TowerError(f"lift missed its residue: {residue} -> {got}")
    return {
        "field": p,
        "variables": n,
        "depth": K,
        "residues": total,
        "hit": len(hits),
        "bijective": len(hits) == total and all(v == 1 for v in hits.values()),
    }
