"""Plant dynamics: parameter validation, growth law, vector field, equilibrium."""

import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giapop import (ModelParams, PlantState, ValidationError, growth_rate,
                    open_loop_equilibrium, output, vector_field)
from conftest import (DX1_AT_EXAMPLE, DX2_AT_EXAMPLE, GROWTH_AT_EXAMPLE,
                      PAPER_MODEL, RES_DECAY, X2_STAR)

REL = 1e-12


class TestModelParams:
    @pytest.mark.parametrize("field", ["r0", "K", "beta_d", "beta_m", "w_m", "sigma"])
    def test_nonpositive_field_rejected(self, field):
        bad = dict(PAPER_MODEL)
        bad[field] = 0.0
        with pytest.raises(ValidationError, match=field):
            ModelParams(**bad)

    @pytest.mark.parametrize("field", ["r0", "K", "beta_d", "beta_m", "w_m", "sigma"])
    def test_negative_field_rejected(self, field):
        bad = dict(PAPER_MODEL)
        bad[field] = -1.0
        with pytest.raises(ValidationError, match=field):
            ModelParams(**bad)

    def test_multiple_bad_fields_all_named(self):
        bad = dict(PAPER_MODEL, r0=-1.0, sigma=0.0)
        with pytest.raises(ValidationError) as exc:
            ModelParams(**bad)
        assert "r0" in str(exc.value) and "sigma" in str(exc.value)

    def test_frozen(self, params):
        with pytest.raises(dataclasses.FrozenInstanceError):
            params.r0 = 1.0

    def test_resistance_decay_rate(self, params):
        assert params.resistance_decay_rate == pytest.approx(RES_DECAY, rel=REL)


class TestGrowthRate:
    def test_example_point(self, params):
        r = growth_rate(params, PlantState(1e5, 4.8), 0.0)
        assert r == pytest.approx(GROWTH_AT_EXAMPLE, rel=REL)

    def test_at_carrying_capacity_no_resistance(self, params):
        # With x2 = 0 and x1 = K the logistic term contributes exactly r0.
        assert growth_rate(params, PlantState(params.K, 0.0), 0.0) == params.r0

    def test_dose_slope_is_minus_beta_d(self, params):
        s = PlantState(1e5, 4.8)
        r0u = growth_rate(params, s, 0.0)
        r1u = growth_rate(params, s, 10.0)
        assert (r0u - r1u) / 10.0 == pytest.approx(params.beta_d, rel=1e-9)

    def test_negative_dose_rejected(self, params):
        with pytest.raises(ValidationError):
            growth_rate(params, PlantState(1e5, 4.8), -0.1)

    @given(x2=st.floats(min_value=-50.0, max_value=50.0))
    @settings(max_examples=200, deadline=None)
    def test_mutation_term_bounded_by_flux_peak(self, x2):
        # x2 * exp(-x2^2 / w_m) attains its max magnitude sqrt(w_m / (2 e)),
        # so the resistance contribution to r never exceeds
        # beta_m * sqrt(w_m / (2 e)).  Allow 1 ulp of slack.
        p = ModelParams(**PAPER_MODEL)
        contrib = abs(p.beta_m * x2 * math.exp(-x2 * x2 / p.w_m))
        cap = p.beta_m * math.sqrt(p.w_m / (2.0 * math.e))
        assert contrib <= cap * (1.0 + 1e-12)


class TestVectorField:
    def test_example_point(self, params):
        d = vector_field(params, PlantState(1e5, 4.8), 0.0)
        assert d.dx1 == pytest.approx(DX1_AT_EXAMPLE, rel=REL)
        assert d.dx2 == pytest.approx(DX2_AT_EXAMPLE, rel=REL)

    def test_dx1_zero_at_origin_and_capacity(self, params):
        # Logistic factor vanishes identically at both fixed points of x1
        # when x2 = 0, so no tolerance is needed.
        assert vector_field(params, PlantState(0.0, 0.0), 0.0).dx1 == 0.0
        assert vector_field(params, PlantState(params.K, 0.0), 0.0).dx1 == 0.0

    def test_equilibrium_residuals(self, params):
        x1s, x2s = open_loop_equilibrium(params)
        d = vector_field(params, PlantState(x1s, x2s), 0.0)
        assert abs(d.dx1) < 1e-6 * params.K * params.r0
        assert abs(d.dx2) < 1e-9

    def test_output_is_population(self):
        assert output(PlantState(123.0, 4.0)) == 123.0


class TestEquilibrium:
    def test_matches_frozen_root(self, params):
        x1s, x2s = open_loop_equilibrium(params)
        assert x1s == params.K
        assert x2s == pytest.approx(X2_STAR, abs=1e-10)

    def test_root_residual(self, params):
        _, x2s = open_loop_equilibrium(params)
        g = math.sqrt(params.w_m / 2.0) * math.exp(-x2s * x2s / params.w_m) - x2s
        assert abs(g) < 1e-10

    def test_small_w_m_limit(self):
        # As w_m -> 0 the fixed point collapses toward 0.
        p = ModelParams(**dict(PAPER_MODEL, w_m=1e-6))
        _, x2s = open_loop_equilibrium(p)
        assert 0.0 < x2s < 1e-3
