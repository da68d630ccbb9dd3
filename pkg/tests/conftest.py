import pytest

from pfbinding import (BindingTrial, RadialPotential, default_grid, dipole_spectrum, hydrogen_ground_energy,
                       solve_ground_state)

BETA = 1 / 137


class Hydrogen:
    """Coulomb problem on the default grid, solved once per session."""

    def __init__(self, z):
        self.z = z
        self.beta_z = BETA * z
        self.exact_e0 = hydrogen_ground_energy(BETA, z)
        self.potential = RadialPotential.coulomb(self.beta_z)
        self.grid = default_grid(self.beta_z)
        self.ground = solve_ground_state(self.potential, self.grid)
        self.measure = dipole_spectrum(self.potential, self.grid, self.ground)


@pytest.fixture(scope="session")
def hydrogen():
    return Hydrogen(1)


@pytest.fixture(scope="session")
def hydrogen_z2():
    return Hydrogen(2)


@pytest.fixture(scope="session")
def binding_trial(hydrogen):
    return BindingTrial(hydrogen.potential, hydrogen.grid, 1.0, ground=hydrogen.ground)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split("criterion ")[1].split()[0])):
            terminalreporter.write_line(line)
