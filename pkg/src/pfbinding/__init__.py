"""Enhanced binding of a nonrelativistic electron coupled to a cut-off
quantized radiation field: closed forms, a radial spectral engine and
zero-plus-one-photon trial states.

Energies are in units of mc^2/2 and lengths in units of 2 hbar/(mc).
"""
from .core import (DEFAULT_A_SPLIT, DEFAULT_BETA, LAMBDA_BAR, UNITS, AngularRule, ConvergenceError,
                   FormFactor, FormFactorKind, ModelParams, PhotonQuadrature, UnitSystem, ValidationError,
                   angular_rule, cutoff, make_params, photon_quadrature, polarization_vectors,
                   transverse_projector)
from .closed_form import (ErrorBudget, MassRatios, SelfEnergyEstimate, ThresholdReport, alpha_threshold,
                          apriori_field_bound, apriori_kinetic_bound, hydrogen_ground_energy,
                          mass_renormalization, radiative_correction_log_approx,
                          radiative_correction_upper_bound, resolvent_norm_sq, schwarz_condition,
                          self_energy_error_budget, self_energy_leading, vacuum_resolvent_integral)
from .radial import (GroundState, PotentialKind, RadialGrid, RadialPotential, RadiativeCorrection,
                     ShiftedSolver, SpectralMeasure, UnboundPotentialError, default_grid, dipole_source,
                     dipole_spectrum, f_lambda, f_lambda_ratio, inner_photon_integral, observed_order,
                     radiative_correction_exact, radiative_correction_resolvent,
                     radiative_correction_routes, radiative_correction_spectral, resolvent_quadrature,
                     solve_ground_state)
from .fock import (BindingTrial, CrossTerm, RayleighReport, SelfEnergyTrial, TrialStateBinding,
                   TrialStateSelfEnergy, binding_energy_gain, binding_rayleigh, one_photon_sector_minimum,
                   richardson_limit, self_energy_rayleigh)

__version__ = "0.1.0"
