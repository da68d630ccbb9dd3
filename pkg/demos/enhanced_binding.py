# coding: utf-8

# # Enhanced binding from a trial state
#
# The trial binding energy minus the trial self-energy, taken relative to
# the uncoupled e0, is the binding gain. Divided by alpha it tends to the
# radiative correction 4 e0 F(L).

from pfbinding import (BindingTrial, RadialPotential, alpha_threshold, binding_energy_gain, default_grid,
                       dipole_spectrum, f_lambda, richardson_limit, solve_ground_state)

beta_z = 1 / 137
pot = RadialPotential.coulomb(beta_z)
grid = default_grid(beta_z)
ground = solve_ground_state(pot, grid)
measure = dipole_spectrum(pot, grid, ground)
trial = BindingTrial(pot, grid, 1.0, ground=ground)
target = 4 * ground.e0 * f_lambda(measure, 1.0)
print(f"4 e0 F(1) = {target:.8e}")

alphas = [1e-3, 5e-4, 2.5e-4, 1e-4, 1e-6]
ratios = []
for alpha in alphas:
    gain = binding_energy_gain(alpha, pot, grid, 1.0, trial=trial)
    ratios.append(gain / alpha)
    print(f"alpha={alpha:.2e}  gain={gain:.6e}  gain/alpha / target = {gain / alpha / target:.5f}")

print(f"extrapolated from the first three: {richardson_limit(alphas[:3], ratios[:3]) / target:.6f} of target")

# ## Below the guaranteed threshold the gain stays positive

amax = alpha_threshold(ground.e0, 1.0, 0.25).alpha_max
for frac in (0.01, 0.5, 0.99):
    alpha = frac * amax
    print(f"alpha={alpha:.3e}  gain={binding_energy_gain(alpha, pot, grid, 1.0, trial=trial):.3e}")
