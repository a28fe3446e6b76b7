"""Hypercomplex numbers modeled by representative sequences.

Two tiers share one interface.  A *symbolic* number carries one
:class:`~hyperpoly.indexexpr.IndexExpr` per real/imaginary component, so
magnitude classification and standard parts are exact decisions.  A *numeric*
number wraps an opaque generator ``i -> value``; it stays fully usable in
arithmetic, but classification falls back to windowed evidence and may come
back Undetermined.

Finitely many leading indices never matter (the ultraproduct quotient), so a
symbolic number may carry a finite ``prefix`` of per-index overrides - this is
how reciprocals are zero-padded below their non-vanishing threshold, and how
"eventually constant" coefficient streams are represented.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .config import Config, DEFAULT
from .indexexpr import IndexExpr
from .verdicts import HOLDS, UNDETERMINED, Verdict

Q = Fraction

INFINITESIMAL = "infinitesimal"
APPRECIABLE = "appreciable"
INFINITE = "infinite"
BOUNDED_UNCLASSIFIED = "bounded-unclassified"
UNDECIDED = "undetermined"

_TAGS = ("standard", "infinitesimal", "infinite", "bounded")


class NoStandardPartError(ArithmeticError):
    pass


class NotEventuallyNonzeroError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Classification:
    label: str
    verdict: Verdict

    def to_json(self):
        return {"class": self.label, "verdict": self.verdict.to_json()}


class HyperComplex:
    """An element of the hypercomplex numbers, given by its representative."""

    __slots__ = ("re", "im", "prefix", "gen", "tag")

    def __init__(
        self,
        re: Optional[IndexExpr] = None,
        im: Optional[IndexExpr] = None,
        prefix: Optional[dict[int, tuple[Fraction, Fraction]]] = None,
        gen: Optional[Callable[[int], complex]] = None,
        tag: Optional[str] = None,
    ):
        if gen is not None and (re is not None or im is not None):
            raise ValueError("a hypercomplex is either symbolic or generator-backed")
        if gen is None:
            self.re = re if re is not None else IndexExpr.const(0)
            self.im = im if im is not None else IndexExpr.const(0)
        else:
            self.re = None
            self.im = None
        self.gen = gen
        self.prefix = dict(prefix or {})
        self.tag = tag
        if tag is not None:
            if tag not in _TAGS:
                raise ValueError(f"unknown tag {tag!r}")
            if self.symbolic:
                _check_tag(self, tag)

    # -- constructors ---------------------------------------------------------
    @staticmethod
    def from_rational(re, im=0) -> "HyperComplex":
        return HyperComplex(IndexExpr.const(Q(re)), IndexExpr.const(Q(im)))

    @staticmethod
    def from_expr(re: IndexExpr, im: Optional[IndexExpr] = None) -> "HyperComplex":
        return HyperComplex(re, im if im is not None else IndexExpr.const(0))

    @staticmethod
    def from_generator(gen: Callable[[int], complex]) -> "HyperComplex":
        return HyperComplex(gen=gen)

    @staticmethod
    def epsilon() -> "HyperComplex":
        """The canonical infinitesimal [1/i]."""
        return HyperComplex(IndexExpr.const(1) / IndexExpr.index())

    @staticmethod
    def omega() -> "HyperComplex":
        """The canonical infinite number [i]."""
        return HyperComplex(IndexExpr.index())

    @property
    def symbolic(self) -> bool:
        return self.gen is None

    # -- evaluation -------------------------------------------------------------
    def value_exact(self, i: int) -> tuple[Fraction, Fraction]:
        if not self.symbolic:
            raise TypeError("numeric-tier value has no exact form")
        if i in self.prefix:
            return self.prefix[i]
        return (self.re.eval(i), self.im.eval(i))

    def value(self, i: int) -> complex:
        if self.symbolic:
            re, im = self.value_exact(i)
            return complex(re, im)
        return complex(self.gen(i))

    def is_zero_expr(self) -> bool:
        """Zero as an element of the ultraproduct (prefix overrides ignored)."""
        return self.symbolic and self.re.is_zero() and self.im.is_zero()

    def is_real(self) -> bool:
        return self.symbolic and self.im.is_zero() and all(v[1] == 0 for v in self.prefix.values())

    # -- ring operations ----------------------------------------------------------
    def _binary(self, other: "HyperComplex", sym_op, num_op) -> "HyperComplex":
        other = coerce(other)
        if self.symbolic and other.symbolic:
            re, im = sym_op(self.re, self.im, other.re, other.im)
            prefix = {}
            for i in set(self.prefix) | set(other.prefix):
                try:
                    a, b = self.value_exact(i)
                    c, d = other.value_exact(i)
                except ZeroDivisionError:
                    continue
                prefix[i] = num_op((a, b), (c, d))
            return HyperComplex(re, im, prefix)
        return HyperComplex(gen=lambda i, x=self, y=other: num_op(
            _approx(x, i), _approx(y, i), approximate=True))

    def __add__(self, other):
        return self._binary(
            other,
            lambda a, b, c, d: (a + c, b + d),
            _pair_add,
        )

    __radd__ = __add__

    def __neg__(self):
        if self.symbolic:
            return HyperComplex(
                -self.re, -self.im, {i: (-a, -b) for i, (a, b) in self.prefix.items()}
            )
        return HyperComplex(gen=lambda i, g=self.gen: -complex(g(i)))

    def __sub__(self, other):
        return self + (-coerce(other))

    def __rsub__(self, other):
        return coerce(other) - self

    def __mul__(self, other):
        return self._binary(
            other,
            lambda a, b, c, d: (a * c - b * d, a * d + b * c),
            _pair_mul,
        )

    __rmul__ = __mul__

    def modulus_squared_expr(self) -> IndexExpr:
        if not self.symbolic:
            raise TypeError("numeric tier has no symbolic modulus")
        return self.re * self.re + self.im * self.im

    def inv(self, config: Config = DEFAULT) -> "HyperComplex":
        """Pointwise reciprocal, zero below the non-vanishing threshold.

        Requires the number to be eventually nonzero; symbolic numbers get an
        exact dominance certificate, numeric ones a windowed check.
        """
        if self.symbolic:
            if self.is_zero_expr():
                raise NotEventuallyNonzeroError("not eventually nonzero: the zero sequence")
            m2 = self.modulus_squared_expr()
            t = m2.eventual_nonzero_threshold()
            if t is None:
                raise NotEventuallyNonzeroError(
                    "not eventually nonzero: vanishes on a parity class"
                )
            m2_den_safe = t
            re = self.re / m2
            im = -self.im / m2
            prefix: dict[int, tuple[Fraction, Fraction]] = {}
            for i in range(1, m2_den_safe):
                prefix[i] = (Q(0), Q(0))
            for i, (a, b) in self.prefix.items():
                n = a * a + b * b
                prefix[i] = (Q(0), Q(0)) if n == 0 else (a / n, -b / n)
            return HyperComplex(re, im, prefix)
        # numeric tier: demand nonzero through the back half of the window
        h = config.horizon
        vals = [complex(self.gen(i)) for i in range(1, h + 1)]
        t = h + 1
        for i in range(h, 0, -1):
            if vals[i - 1] != 0:
                t = i
            else:
                break
        if t > h / 2:
            raise NotEventuallyNonzeroError(
                "not eventually nonzero within the sampled window"
            )
        def gen(i, g=self.gen, t=t):
            if i < t:
                return 0j
            v = complex(g(i))
            return 1 / v
        return HyperComplex(gen=gen)

    # -- classification -------------------------------------------------------------
    def classify(self, config: Config = DEFAULT) -> Classification:
        if self.symbolic:
            return _classify_symbolic(self)
        return _classify_numeric(self, config)

    def standard_part(self, config: Config = DEFAULT):
        """Exact limit (symbolic) or windowed estimate (numeric).

        Returns a (re, im) Fraction pair in the symbolic tier, a complex in the
        numeric tier, or None when the value oscillates (Undetermined).
        Raises for infinite inputs.
        """
        if self.symbolic:
            # convergent components settle everything without the modulus form
            re_l, im_l = self.re.limit(), self.im.limit()
            if re_l is not None and im_l is not None:
                return (re_l, im_l)
        cls = self.classify(config)
        if cls.label == INFINITE:
            raise NoStandardPartError("no standard part: the number is infinite")
        if self.symbolic:
            m2 = self.modulus_squared_expr()
            if m2.growth().kind == "zero":
                return (Q(0), Q(0))
            return None
        h = config.horizon
        prev = [complex(self.gen(i)) for i in range(max(1, h // 2), 3 * h // 4)]
        tail = [complex(self.gen(i)) for i in range(max(1, 3 * h // 4), h + 1)]
        mean = sum(tail) / len(tail)
        spread = max(abs(v - mean) for v in tail)
        prev_spread = max(abs(v - mean) for v in prev) if prev else spread
        # accept a shrinking spread (convergence trend) or one already at tol
        if spread <= config.tol * 10 or spread <= prev_spread / 1.5:
            return mean
        return None


def classify_magnitude(x: HyperComplex, config: Config = DEFAULT) -> Classification:
    """Module-level spelling of :meth:`HyperComplex.classify`."""
    return coerce(x).classify(config)


def standard_part(x: HyperComplex, config: Config = DEFAULT):
    """Module-level spelling of :meth:`HyperComplex.standard_part`."""
    return coerce(x).standard_part(config)


def coerce(x) -> HyperComplex:
    if isinstance(x, HyperComplex):
        return x
    if isinstance(x, (int, Fraction)):
        return HyperComplex.from_rational(x)
    if isinstance(x, IndexExpr):
        return HyperComplex.from_expr(x)
    raise TypeError(f"cannot use {type(x).__name__} as a HyperComplex")


def _pair_add(x, y, approximate=False):
    if approximate:
        return x + y
    return (x[0] + y[0], x[1] + y[1])


def _pair_mul(x, y, approximate=False):
    if approximate:
        return x * y
    a, b = x
    c, d = y
    return (a * c - b * d, a * d + b * c)


def _approx(x: HyperComplex, i: int) -> complex:
    return x.value(i)


def _check_tag(x: HyperComplex, tag: str):
    cls = _classify_symbolic(x).label
    ok = {
        "infinitesimal": cls == INFINITESIMAL,
        "infinite": cls == INFINITE,
        "bounded": cls in (INFINITESIMAL, APPRECIABLE, BOUNDED_UNCLASSIFIED),
        "standard": cls in (INFINITESIMAL, APPRECIABLE)
        and x.re.limit() is not None
        and x.im.limit() is not None,
    }[tag]
    if not ok:
        raise ValueError(f"declared tag {tag!r} inconsistent with symbolic class {cls}")


def _classify_symbolic(x: HyperComplex) -> Classification:
    m2 = x.modulus_squared_expr()
    g = m2.growth()
    if g.kind == "zero":
        return Classification(
            INFINITESIMAL, Verdict(HOLDS, 1, "symbolic: |x|^2 -> 0")
        )
    if g.kind == "infinite":
        return Classification(INFINITE, Verdict(HOLDS, 1, "symbolic: |x|^2 -> oo"))
    if g.kind == "finite":
        note = (
            f"symbolic: |x|^2 -> {g.limit}" if g.limit is not None
            else "symbolic: |x|^2 has nonzero parity limits"
        )
        return Classification(APPRECIABLE, Verdict(HOLDS, 1, note))
    if g.kind == "finite-or-zero":
        return Classification(
            BOUNDED_UNCLASSIFIED,
            Verdict(HOLDS, 1, "symbolic: bounded, dips toward zero on one parity"),
        )
    return Classification(
        UNDECIDED, Verdict(UNDETERMINED, 1, f"symbolic growth not decided ({g.kind})")
    )


def _classify_numeric(x: HyperComplex, config: Config) -> Classification:
    h = config.horizon
    vals = []
    for i in range(1, h + 1):
        try:
            vals.append(abs(complex(x.gen(i))))
        except ZeroDivisionError:
            vals.append(float("inf"))
    quarter = vals[3 * h // 4:]
    if all(v < config.infinitesimal_tol for v in quarter):
        return Classification(
            INFINITESIMAL,
            Verdict(HOLDS, 3 * h // 4 + 1, f"window: |x| < {config.infinitesimal_tol} on last quarter"),
        )
    ratios = [
        vals[i + 1] / vals[i]
        for i in range(3 * h // 4, h - 1)
        if vals[i] > 0
    ]
    if ratios and all(r > config.growth_ratio for r in ratios):
        return Classification(
            INFINITE,
            Verdict(HOLDS, 3 * h // 4 + 1, f"window: sustained growth ratio > {config.growth_ratio}"),
        )
    if max(vals) <= config.bounded_cap:
        return Classification(
            BOUNDED_UNCLASSIFIED,
            Verdict(HOLDS, 1, f"window: |x| <= {max(vals):.6g} across horizon {h}"),
        )
    return Classification(UNDECIDED, Verdict(UNDETERMINED, h, "window evidence inconclusive"))
