"""Cross-module surface checks: public API, exit codes, stated invariants."""

import io
import json
import random
from contextlib import redirect_stdout
from fractions import Fraction as Q

import pytest

import hyperpoly
from hyperpoly import (
    HyperComplex,
    HyperNatural,
    IndexExpr,
    classify_magnitude,
    classify_poly,
    sampling_oracle,
    st_poly,
    standard_part,
)
from hyperpoly.classify import INFINITESIMAL
from hyperpoly.cli import EXIT_OK, EXIT_UNDETERMINED, main, run
from hyperpoly.families import labeled_family
from hyperpoly.interpoly import scalar_mul, variable
from hyperpoly.leibniz import DiffElement, delta
from hyperpoly.interpoly import constant as const_poly


class TestModuleAliases:
    def test_classify_and_st_aliases(self):
        assert classify_magnitude(HyperComplex.epsilon()).label == "infinitesimal"
        assert standard_part(HyperComplex.from_rational(Q(7, 2))) == (Q(7, 2), 0)

    def test_version_and_exports(self):
        assert hyperpoly.__version__
        for name in ("eventually", "theta", "lift_tower", "generic_point", "parse"):
            assert hasattr(hyperpoly, name)


class TestOracleSymbolicWitness:
    def test_omega_x_fails_at_radius_1(self):
        P = scalar_mul(HyperComplex.omega(), variable(1, 0))
        rep = sampling_oracle(P, sample_count=4, radius=1, horizon=24)
        assert rep.bounded.fails()
        assert rep.witness is not None


class TestCliContracts:
    def test_exit_2_on_undetermined_eval(self):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(["eval", "sum(k=0..d, X^k)", "--d", "i", "--at", "2"])
        assert code == EXIT_UNDETERMINED
        assert json.loads(buf.getvalue())["classification"]["class"] == "undetermined"

    def test_run_program_text(self):
        report, code = run("eps := 1/i; classify eps*X")
        assert code == EXIT_OK
        assert report["verdict"] == "infinitesimal"

    def test_geometric_base_in_grammar(self):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(["classify", "c := (0-1)^i; c*X"])
        assert code == EXIT_OK
        assert json.loads(buf.getvalue())["verdict"] == "bounded"

    def test_horizon_env_override(self, monkeypatch):
        from hyperpoly.config import default_config

        monkeypatch.setenv("HYPERPOLY_HORIZON", "32")
        assert default_config().horizon == 32
        monkeypatch.setenv("HYPERPOLY_HORIZON", "zero")
        with pytest.raises(ValueError):
            default_config()


class TestRingLawsPointwise:
    def test_hypercomplex_ring_laws_at_32_indices(self):
        rng = random.Random(9)
        pool = [
            HyperComplex.epsilon(),
            HyperComplex.omega(),
            HyperComplex.from_rational(Q(3, 2), Q(-1, 3)),
            HyperComplex.from_expr((2 * IndexExpr.index() + 1) / (IndexExpr.index() + 2)),
            HyperComplex.from_expr(IndexExpr.geometric(-1)),
        ]
        for _ in range(10):
            x, y, z = (rng.choice(pool) for _ in range(3))
            indices = [rng.randint(1, 200) for _ in range(32)]
            for i in indices:
                lhs = ((x + y) * z).value_exact(i)
                rhs = (x * z + y * z).value_exact(i)
                assert lhs == rhs
                assert (x * y).value_exact(i) == (y * x).value_exact(i)
            # symbolic normal-form equality on top of the samples
            assert ((x + y) * z).re.eq((x * z + y * z).re)
            assert ((x + y) * z).im.eq((x * z + y * z).im)


class TestStKernel:
    def test_st_zero_iff_infinitesimal_on_decided_family(self):
        from hyperpoly.interpoly import multi_indices_of_degree

        for label, poly in labeled_family(seed=33, count=60):
            cls = classify_poly(poly)
            if not cls.bounded:
                continue
            s = st_poly(poly, cls)
            vanishes = all(
                s.coeff(nu) == (0, 0)
                for m in range(13)
                for nu in multi_indices_of_degree(poly.n, m)
            )
            if cls.verdict == INFINITESIMAL:
                assert vanishes
            else:
                assert not vanishes


class TestDnClosure:
    def test_products_and_sums_stay_certified(self):
        f = delta(const_poly(1, 1) + variable(1, 0) * variable(1, 0))
        g = delta(variable(1, 0))
        for elem in (f + g, f * g, f - g):
            assert elem.dn_certificate() is None

    def test_derivative_slices_stay_certified(self):
        from hyperpoly.interpoly import partial_derivative

        f = delta(variable(1, 0) * variable(1, 0))
        derived = DiffElement(
            1, {mu: partial_derivative(s, (1,)) for mu, s in f.slices.items()}
        )
        assert derived.dn_certificate() is None
