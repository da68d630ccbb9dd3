# coding: utf-8

# # The hydrogen radiative correction from the dipole spectrum
#
# The radial problem p^2 - beta Z / r is discretised by finite differences.
# The p-wave spectrum with dipole weights gives the spectral function
# F(L) = (8 pi / 3) sum_i w_i int_0^L p / (gap_i + p + p^2) dp.

import math

from pfbinding import (RadialPotential, default_grid, dipole_spectrum, f_lambda, f_lambda_ratio,
                       radiative_correction_routes, solve_ground_state)

beta_z = 1 / 137
pot = RadialPotential.coulomb(beta_z)
grid = default_grid(beta_z)
ground = solve_ground_state(pot, grid)
measure = dipole_spectrum(pot, grid, ground)
print(f"e0 = {ground.e0:.6e}  exact {beta_z**2 / 4:.6e}")
print(f"sum rule {measure.sum_rule:.6f}, first gap / e0 = {measure.gaps[0] / ground.e0:.6f}")

# ## F(L) against its logarithmic approximant

for lam in (ground.e0, 1e-3, 0.1, 1.0, 10.0, 100.0):
    print(f"L={lam:9.3e}  F={f_lambda(measure, lam):.6e}  "
          f"log approx={(8 * math.pi / 3) * math.log1p(lam):.6e}  ratio={f_lambda_ratio(measure, lam):.5f}")

# At L = e0 only a quarter of the logarithm survives, because the photon
# energies are comparable to the level spacing. At L = 1 the two agree.

# ## Two independent routes to E(V, L)

for lam in (ground.e0, 1.0):
    rc = radiative_correction_routes(pot, grid, lam, measure=measure)
    print(f"L={lam:.3e}  spectral {rc.spectral:.8e}  resolvent {rc.resolvent:.8e}  "
          f"rel diff {rc.relative_difference:.1e}  bound {rc.upper_bound:.8e}")
