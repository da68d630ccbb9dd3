import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfbinding import (BindingTrial, ConvergenceError, SelfEnergyTrial, binding_energy_gain, binding_rayleigh,
                       f_lambda, one_photon_sector_minimum, photon_quadrature, resolvent_norm_sq,
                       richardson_limit, self_energy_leading, self_energy_rayleigh, vacuum_resolvent_integral)

import oracles


@pytest.fixture(scope="module")
def unit_trial():
    return SelfEnergyTrial(1.0)


# -- self-energy trial state -------------------------------------------------

def test_self_energy_bracket(unit_trial):
    alpha = 1e-3
    rep = unit_trial.report(alpha)
    est = self_energy_leading(alpha, 1.0)
    excess = rep.quotient - est.leading
    assert 0 < excess <= oracles.ERROR_COEFF_UNIT * alpha**2
    # the closed-form remainder alpha^2 V1 N2 / (1 + alpha N2)
    v1, n2 = vacuum_resolvent_integral(1.0), resolvent_norm_sq(1.0)
    assert excess == pytest.approx(alpha**2 * v1 * n2 / (1 + alpha * n2), rel=1e-9)


def test_self_energy_free_theory(unit_trial):
    rep = unit_trial.report(0.0)
    assert rep.quotient == 0 and rep.norm_sq == 1 and rep.field_energy == 0


def test_self_energy_residual_order():
    alphas = [1e-4, 1e-3, 1e-2]
    trial = SelfEnergyTrial(1.0)
    resid = [trial.quotient(a) - self_energy_leading(a, 1.0).leading for a in alphas]
    slope = np.polyfit(np.log(alphas), np.log(resid), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)
    assert trial.report(1e-4).residual_order == pytest.approx(2.0, abs=0.01)


def test_self_energy_vacuum_terms_match_closed_forms(unit_trial):
    assert unit_trial.V1 == pytest.approx(oracles.VACUUM_INTEGRAL[1.0], rel=1e-10)
    assert unit_trial.N2 == pytest.approx(oracles.RESOLVENT_NORM_SQ[1.0], rel=1e-10)
    assert unit_trial.commutator == pytest.approx(4 * math.pi, rel=1e-13)


def test_self_energy_cross_terms_vanish(unit_trial):
    rep = unit_trial.report(1e-2)
    names = {c.name for c in rep.cross_terms}
    assert {"DstarD_one_photon", "Re_Dstar_p_f_psi1", "recoil_l_dot_k"} <= names
    for term in rep.cross_terms:
        assert term.relative <= 1e-10


def test_self_energy_finite_width_approaches_limit():
    alpha = 1e-3
    limit = self_energy_rayleigh(alpha, 1.0).quotient
    gaps = []
    for width in (10.0, 100.0, 1000.0):
        rep = self_energy_rayleigh(alpha, 1.0, f_width=width)
        for term in rep.cross_terms:
            assert term.relative <= 1e-10
        gaps.append(rep.quotient - limit)
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[2] < 1e-5


def test_self_energy_kernel_positive(unit_trial):
    state = unit_trial.kernel(1e-3)
    assert np.all(np.isfinite(state.kernel)) and np.all(state.kernel > 0)
    assert np.all((state.nodes > 0) & (state.nodes < 1.0))


def test_self_energy_underresolved_quadrature_detected():
    with pytest.raises(ConvergenceError):
        SelfEnergyTrial(1.0, photon_quadrature(1.0, 3))


def test_report_json_fields(unit_trial):
    payload = json.loads(unit_trial.report(1e-3).to_json())
    assert list(payload) == ["quotient", "norm_sq", "field_energy", "kinetic_norm", "cross_terms",
                             "residual_order"]
    assert all(set(t) == {"name", "value", "scale"} for t in payload["cross_terms"])


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(1e-6, 0.05), lam=st.floats(0.05, 12.6))
def test_variational_bracket_property(alpha, lam):
    rep = self_energy_rayleigh(alpha, lam)
    est = self_energy_leading(alpha, lam)
    assert rep.quotient >= est.leading - 1e-12
    assert rep.quotient <= est.leading + est.error_bound * (1 + 1e-9)
    assert rep.norm_sq >= 1 and rep.field_energy >= 0


# -- brute-force one-photon sector ---------------------------------------------

def test_sector_minimum_matches_trial():
    quad = photon_quadrature(1.0, 64)
    q = self_energy_rayleigh(1e-3, 1.0, quad).quotient
    assert one_photon_sector_minimum(1e-3, 1.0, quad) == pytest.approx(q, rel=1e-10)


def test_sector_minimum_free_theory():
    assert one_photon_sector_minimum(0.0, 1.0) == 0.0


def test_sector_minimum_node_doubling():
    q64 = one_photon_sector_minimum(1e-3, 1.0, photon_quadrature(1.0, 64))
    q128 = one_photon_sector_minimum(1e-3, 1.0, photon_quadrature(1.0, 128))
    assert q128 == pytest.approx(q64, rel=1e-8)


@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(1e-5, 0.05), lam=st.floats(0.1, 5.0))
def test_sector_minimum_property(alpha, lam):
    quad = photon_quadrature(lam, 48)
    q = self_energy_rayleigh(alpha, lam, quad).quotient
    assert one_photon_sector_minimum(alpha, lam, quad) == pytest.approx(q, rel=1e-10)


# -- binding trial state -------------------------------------------------------

def test_binding_uncoupled(binding_trial, hydrogen):
    assert binding_trial.quotient(0.0) == pytest.approx(-hydrogen.ground.e0, rel=1e-15)


def test_binding_source_proportionality(binding_trial, hydrogen):
    # exact node by node; the residual is rounding amplified by the
    # condition number of H_0 + e0 + k^2 + k, ~4/(h^2 (k^2 + k))
    trial = binding_trial.trial
    assert trial.e_source_proportionality() < 1e-5
    u = hydrogen.ground.unit_u
    k = trial.nodes
    big = k >= hydrogen.ground.e0
    dev = np.abs((k * k + k)[big, None] * trial.z[big] - u[None, :]).max() / np.abs(u).max()
    assert dev < 1e-10


def test_binding_vacuum_pieces(binding_trial):
    # A_V^-1 sigma E* phi reduces to the free resolvent, so these are V1 and N2
    assert binding_trial.VE == pytest.approx(oracles.VACUUM_INTEGRAL[1.0], rel=1e-10)
    assert binding_trial.NE == pytest.approx(oracles.RESOLVENT_NORM_SQ[1.0], rel=1e-10)


def test_binding_radiative_term_matches_spectral_route(binding_trial, hydrogen):
    e_spectral = 4 * hydrogen.ground.p_norm_sq * f_lambda(hydrogen.measure, 1.0)
    assert binding_trial.E == pytest.approx(e_spectral, rel=1e-3)


def test_binding_cross_terms_vanish(binding_trial):
    rep = binding_trial.report(1e-3)
    names = {c.name for c in rep.cross_terms}
    assert {"Re_sigmaE_AVinv_Dstar_p", "px_peta_DD", "px_peta_EE", "px_peta_DE"} <= names
    for term in rep.cross_terms:
        assert term.relative <= 1e-10, term


def test_binding_expansion_residual_order(binding_trial, hydrogen):
    e0 = hydrogen.ground.e0
    f1 = f_lambda(hydrogen.measure, 1.0)
    alphas = np.array([1e-4, 1e-3])

    def residual(a):
        return binding_trial.quotient(a) - (-e0 + self_energy_leading(a, 1.0).leading - 4 * a * e0 * f1)

    res = np.array([residual(a) for a in alphas])
    slope = np.polyfit(np.log(alphas), np.log(np.abs(res)), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.15)


def test_binding_report_fields(binding_trial):
    rep = binding_trial.report(1e-4)
    assert rep.norm_sq >= 1 and rep.field_energy >= 0
    assert rep.residual_order == pytest.approx(2.0, abs=0.05)


def test_binding_rayleigh_function(hydrogen):
    rep = binding_rayleigh(0.0, hydrogen.potential, hydrogen.grid, 1.0)
    assert rep.quotient == pytest.approx(-hydrogen.ground.e0, rel=1e-15)


def test_gain_free_theory(binding_trial, hydrogen):
    assert binding_energy_gain(0.0, hydrogen.potential, hydrogen.grid, 1.0, trial=binding_trial) == 0.0


def test_gain_small_coupling(binding_trial, hydrogen):
    alpha = 1e-4
    target = alpha * 4 * hydrogen.ground.e0 * f_lambda(hydrogen.measure, 1.0)
    gain = binding_energy_gain(alpha, hydrogen.potential, hydrogen.grid, 1.0, trial=binding_trial)
    assert gain == pytest.approx(target, rel=0.1)


def test_gain_extrapolates_to_radiative_correction(binding_trial, hydrogen):
    alphas = [1e-3, 5e-4, 2.5e-4]
    ratios = [binding_energy_gain(a, hydrogen.potential, hydrogen.grid, 1.0, trial=binding_trial) / a
              for a in alphas]
    target = 4 * hydrogen.ground.e0 * f_lambda(hydrogen.measure, 1.0)
    assert richardson_limit(alphas, ratios) == pytest.approx(target, rel=0.1)
    assert richardson_limit(alphas, ratios) == pytest.approx(target, rel=1e-3)


def test_gain_positive_below_threshold(binding_trial, hydrogen):
    for alpha in (1e-8, 3e-8, 1e-6, 1e-4, 1e-3):
        assert binding_energy_gain(alpha, hydrogen.potential, hydrogen.grid, 1.0, trial=binding_trial) > 0


def test_richardson_exact_on_polynomials():
    xs = [0.4, 0.2, 0.1]
    assert richardson_limit(xs, [3 + 2 * x - x * x for x in xs]) == pytest.approx(3.0, rel=1e-12)
