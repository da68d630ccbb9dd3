# coding: utf-8

# # Self-energy of a free electron: closed form against a trial state
#
# Energies are in units of mc^2/2 and lengths in units of 2 hbar/(mc).
# The closed form gives the leading self-energy 8 pi alpha [L - ln(1+L)].
# A zero-plus-one-photon trial state bounds the true value from above.
# Its excess over the leading term is O(alpha^2).

import numpy as np

from pfbinding import (SelfEnergyTrial, one_photon_sector_minimum, photon_quadrature, resolvent_norm_sq,
                       self_energy_leading, vacuum_resolvent_integral)

cutoff_value = 1.0
coeff = vacuum_resolvent_integral(cutoff_value) * resolvent_norm_sq(cutoff_value)
print(f"V1 = {vacuum_resolvent_integral(cutoff_value):.6f}, N2 = {resolvent_norm_sq(cutoff_value):.6f}, "
      f"C = V1 N2 = {coeff:.4f}")

# ## The bracket leading < trial <= leading + C alpha^2

trial = SelfEnergyTrial(cutoff_value)
alphas = np.array([1e-4, 1e-3, 1e-2, 1 / 137])
excess = []
for alpha in alphas:
    lead = self_energy_leading(alpha, cutoff_value)
    quotient = trial.quotient(alpha)
    excess.append(quotient - lead.leading)
    print(f"alpha={alpha:.3g}  leading={lead.leading:.10f}  trial={quotient:.10f}  "
          f"excess/alpha^2={excess[-1] / alpha**2:.4f}")

slope = np.polyfit(np.log(alphas[:3]), np.log(excess[:3]), 1)[0]
print(f"fitted exponent of the excess: {slope:.3f}")

# ## Brute force inside the one-photon sector
#
# Minimising the quadratic form over every one-photon amplitude lands on the
# same number as the analytic trial state.

quad = photon_quadrature(cutoff_value, 64)
alpha = 1e-3
brute = one_photon_sector_minimum(alpha, cutoff_value, quad)
print(f"brute force {brute:.15f} vs trial {trial.quotient(alpha):.15f}")
