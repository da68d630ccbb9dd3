"""Finite-difference radial Schroedinger engine.

The reduced radial equation -u'' + [V(r) + l(l+1)/r^2] u = E u is discretized
with second-order central differences on a uniform grid with Dirichlet
conditions at r = 0 and r = r_max.  The l = 0 channel gives the ground state;
the l = 1 channel carries the dipole excitations of grad(phi), whose
distribution over the l = 1 spectrum determines the radiative correction.

Continuum states are represented by box-normalized eigenstates of the finite
grid.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.linalg import eigh_tridiagonal, solveh_banded

from .core import (ConvergenceError, PhotonQuadrature, ValidationError, photon_quadrature,
                   require_nonnegative, require_positive)

FOUR_PI = 4 * math.pi


class UnboundPotentialError(ValidationError):
    """p^2 + V has no negative eigenvalue on the given grid."""

    def __init__(self, message):
        super().__init__("potential", message)


# -- grid and potentials -----------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    n_points: int

    def __post_init__(self):
        require_positive(self.r_max, "r_max")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ValidationError("n_points", f"must be an integer >= 16, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return self.r_max / (self.n_points + 1)

    @property
    def r(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.n_points + 1)


def default_grid(beta_z, n_points=4000, bohr_radii=60.0) -> RadialGrid:
    """Box of ``bohr_radii`` ground-state radii 2/(beta Z) for a Coulomb tail."""
    require_positive(beta_z, "beta_z")
    return RadialGrid(bohr_radii * 2.0 / beta_z, n_points)


class PotentialKind(enum.Enum):
    COULOMB = "coulomb"
    CUSTOM = "custom"


@dataclass(frozen=True)
class RadialPotential:
    """Spherically symmetric potential V(r).

    Build with :meth:`coulomb`, :meth:`custom`, :meth:`from_samples` or
    :meth:`load`.
    """

    kind: PotentialKind
    beta_z: Optional[float] = None
    func: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    @classmethod
    def coulomb(cls, beta_z):
        require_positive(beta_z, "beta_z")
        return cls(PotentialKind.COULOMB, beta_z=float(beta_z), name=f"coulomb({beta_z:g})")

    @classmethod
    def custom(cls, func, name="custom"):
        return cls(PotentialKind.CUSTOM, func=func, name=name)

    @classmethod
    def from_samples(cls, r, v, name="tabulated"):
        """Linear interpolation of (r, V) samples; V is held at its first
        value below the first radius and vanishes beyond the last."""
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or len(r) < 2:
            raise ValidationError("potential", "need two equal-length columns with >= 2 rows")
        if np.any(np.diff(r) <= 0):
            raise ValidationError("potential", "radii must be strictly increasing")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValidationError("potential", "samples must be finite")
        return cls.custom(lambda x: np.interp(x, r, v, left=v[0], right=0.0), name=name)

    @classmethod
    def load(cls, path):
        """Read a two-column text file ``r V(r)`` (whitespace or comma
        separated, ``#`` comments)."""
        path = Path(path)
        rows = []
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            line = line.split("#", 1)[0].replace(",", " ").strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError("potential", f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValidationError("potential", f"{path}:{lineno}: not a number: {line!r}") from None
        if not rows:
            raise ValidationError("potential", f"{path}: no data rows")
        r, v = np.array(rows).T
        return cls.from_samples(r, v, name=path.name)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind is PotentialKind.COULOMB:
            return -self.beta_z / r
        return np.asarray(self.func(r), dtype=float) * np.ones_like(r)


def _diagonal(potential, grid, ell):
    r = grid.r
    h = grid.spacing
    return 2.0 / h**2 + potential(r) + ell * (ell + 1) / r**2


# -- ground state ------------------------------------------------------------

@dataclass(frozen=True)
class GroundState:
    """Lowest l = 0 eigenpair of p^2 + V on a grid.

    ``u_samples`` is r*phi(r) with 4 pi int u^2 dr = 1 (so ||phi|| = 1);
    ``p_norm_sq`` is ||p phi||^2 from the discrete Dirichlet form.
    """

    e0: float
    r: np.ndarray
    u_samples: np.ndarray
    p_norm_sq: float
    grid: RadialGrid

    @property
    def unit_u(self) -> np.ndarray:
        """Reduced radial function normalized to int u^2 dr = 1."""
        return self.u_samples * math.sqrt(FOUR_PI)


def solve_ground_state(potential: RadialPotential, grid: RadialGrid) -> GroundState:
    h = grid.spacing
    off = np.full(grid.n_points - 1, -1.0 / h**2)
    w, v = eigh_tridiagonal(_diagonal(potential, grid, 0), off, select="i", select_range=(0, 0))
    if not w[0] < 0:
        raise UnboundPotentialError(
            f"lowest l=0 eigenvalue is {w[0]:.6g} >= 0; no bound state on this grid")
    u = v[:, 0] / math.sqrt(h)
    u *= np.sign(u[np.argmax(np.abs(u))])
    big = np.abs(u) > 1e-8 * np.max(np.abs(u))
    if np.any(u[big] < 0):
        raise ConvergenceError("lowest l=0 eigenvector changes sign; grid is unresolved")
    padded = np.concatenate([[0.0], u, [0.0]])
    p_norm_sq = float(np.sum(np.diff(padded) ** 2) / h)
    return GroundState(float(-w[0]), grid.r, u / math.sqrt(FOUR_PI), p_norm_sq, grid)


def dipole_source(ground: GroundState) -> np.ndarray:
    """l = 1 reduced radial function g = u' - u/r of grad(phi).

    Each Cartesian component d_i phi has reduced radial part g / sqrt(3), so
    sum_i ||d_i phi||^2 = int g^2 dr = ||p phi||^2 on a complete l = 1 basis.
    """
    u = ground.unit_u
    h = ground.grid.spacing
    padded = np.concatenate([[0.0], u, [0.0]])
    du = (padded[2:] - padded[:-2]) / (2 * h)
    return du - u / ground.r


# -- dipole spectrum ---------------------------------------------------------

@dataclass(frozen=True)
class SpectralMeasure:
    """Dipole-weighted l = 1 spectrum seen from the ground state.

    gaps         -- Delta_i = e0 - e_i, with -e_i the l = 1 eigenvalues
    weights      -- normalized probabilities (sum exactly 1)
    raw_weights  -- |<u_i, g>|^2 / ||p phi||^2; their sum is the sum rule,
                    which tends to 1 as the grid converges
    """

    gaps: np.ndarray
    weights: np.ndarray
    raw_weights: np.ndarray
    e0: float
    p_norm_sq: float

    @property
    def sum_rule(self) -> float:
        return float(np.sum(self.raw_weights))

    @property
    def transverse_dipole_sum(self) -> float:
        """Polarization-traced dipole sum: two transverse polarizations times
        the per-component completeness 1/3, i.e. 2/3 on a complete basis."""
        return 2.0 / 3.0 * self.sum_rule

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["gap", "weight"])
        for d, w in zip(self.gaps, self.weights):
            writer.writerow([repr(float(d)), repr(float(w))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def dipole_spectrum(potential: RadialPotential, grid: RadialGrid, ground: GroundState,
                    window=2.0, min_states=8) -> SpectralMeasure:
    """Diagonalize the l = 1 operator and project grad(phi) on its eigenbasis.

    At least ``min_states`` l = 1 states must have gaps below
    ``window * e0``; otherwise the box or grid is too coarse to resolve the
    low-lying dipole spectrum.
    """
    if ground.grid != grid:
        raise ValidationError("ground", "ground state was computed on a different grid")
    h = grid.spacing
    off = np.full(grid.n_points - 1, -1.0 / h**2)
    energies, vecs = eigh_tridiagonal(_diagonal(potential, grid, 1), off)
    gaps = ground.e0 + energies
    if np.any(gaps <= 0):
        raise ConvergenceError("an l=1 level lies at or below the ground state")
    n_low = int(np.sum(gaps < window * ground.e0))
    if n_low < min_states:
        raise ConvergenceError(
            f"only {n_low} l=1 states below {window:g}*e0 (need {min_states}); enlarge the grid")
    amps = vecs.T @ dipole_source(ground) * math.sqrt(h)
    raw = amps**2 / ground.p_norm_sq
    return SpectralMeasure(gaps, raw / np.sum(raw), raw, ground.e0, ground.p_norm_sq)


# -- photon integral and F(Lambda) -------------------------------------------

def _atanh_ratio(z):
    """atanh(sqrt(z))/sqrt(z), continued analytically to z <= 0 as
    atan(sqrt(-z))/sqrt(-z)."""
    if abs(z) < 1e-4:
        return 1 + z / 3 + z * z / 5 + z**3 / 7
    if z > 0:
        s = math.sqrt(z)
        return math.atanh(s) / s
    s = math.sqrt(-z)
    return math.atan(s) / s


def _inner_series(delta, lam, ratio):
    """Taylor series of p/(Delta + p + p^2) integrated term by term; used
    when lam is well inside the radius of convergence (lam/radius = ratio),
    where the closed forms cancel to O(lam^2)."""
    # 1/q = sum c_n p^n with Delta c_n + c_(n-1) + c_(n-2) = 0; individual
    # c_n may vanish, so the length is set by the convergence ratio
    n_terms = int(math.ceil(math.log(1e-18) / math.log(max(ratio, 1e-300)))) + 2
    c_prev, c = 0.0, 1.0 / delta
    total, power = 0.0, lam * lam
    for n in range(min(n_terms, 200)):
        total += c * power / (n + 2)
        c_prev, c = c, -(c + c_prev) / delta
        power *= lam
    return total


def _inner_closed(delta, lam):
    if delta == 0.0:
        return math.log1p(lam)
    disc = 1.0 - 4.0 * delta
    # distance from the origin to the nearest zero of Delta + p + p^2
    radius = 2.0 * delta / (1.0 + math.sqrt(disc)) if disc > 0 else math.sqrt(delta)
    if lam <= 0.25 * radius:
        return _inner_series(delta, lam, lam / radius)
    if disc > 0.25:
        # well-separated negative roots -a, -b of p^2 + p + delta:
        # p/((p+a)(p+b)) = [b/(p+b) - a/(p+a)] / (b - a)
        s = math.sqrt(disc)
        a = 2.0 * delta / (1.0 + s)
        b = 0.5 * (1.0 + s)
        # a ln(1 + lam/a) -> 0 as a -> 0; avoid overflow of lam/a
        small = a * (math.log(a + lam) - math.log(a)) if a < 1e-8 * lam else a * math.log1p(lam / a)
        return (b * math.log1p(lam / b) - small) / s
    # int p/q = ln(q(L)/q(0))/2 - J/2 with J = int dp/q; J is written through
    # atanh (disc > 0), atan (disc < 0) or their common series (disc ~ 0)
    y = lam + 0.5
    quarter = disc / 4.0
    j = 2.0 * _atanh_ratio(disc) - _atanh_ratio(quarter / y**2) / y
    return 0.5 * math.log1p(lam * (lam + 1.0) / delta) - 0.5 * j


def _inner_quad(delta, lam):
    # the integrand turns over at p ~ Delta; split geometrically down to it
    # [0, 1e-16 lam] contributes below 1e-16 relative whatever Delta is
    lo = max(delta, 1e-16 * lam)
    if lo < lam:
        pts = np.geomspace(lo, lam, int(math.log10(lam / lo)) + 2)[:-1]
        edges = np.concatenate([[0.0], pts, [lam]])
    else:
        edges = np.array([0.0, lam])
    f = lambda p: p / (delta + p + p * p)
    return float(sum(integrate.quad(f, x0, x1, epsabs=0.0, epsrel=1e-13, limit=200)[0]
                     for x0, x1 in zip(edges[:-1], edges[1:])))


def inner_photon_integral(delta, lambda_cut, method="closed"):
    """I(Delta, L) = int_0^L p / (Delta + p + p^2) dp.

    ``method`` is "closed" (analytic branches by the sign of 1 - 4 Delta) or
    "quadrature" (adaptive).  Accepts scalars or arrays for ``delta``.
    """
    require_nonnegative(lambda_cut, "lambda_cut")
    d = np.asarray(delta, dtype=float)
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise ValidationError("delta", "must be finite and >= 0")
    if method == "closed":
        fn = _inner_closed
    elif method == "quadrature":
        fn = _inner_quad
    else:
        raise ValidationError("method", f"unknown method {method!r}")
    if lambda_cut == 0:
        return np.zeros_like(d) if d.ndim else 0.0
    out = np.array([fn(float(x), float(lambda_cut)) for x in d.ravel()]).reshape(d.shape)
    return out if d.ndim else float(out)


def f_lambda(measure: SpectralMeasure, lambda_cut, method="closed") -> float:
    """F(L) = (8 pi / 3) sum_i w_i I(Delta_i, L)."""
    require_positive(lambda_cut, "lambda_cut")
    vals = inner_photon_integral(measure.gaps, lambda_cut, method=method)
    return 8 * math.pi / 3 * float(np.dot(measure.weights, vals))


def f_lambda_ratio(measure: SpectralMeasure, lambda_cut) -> float:
    """F(L) / [(8 pi/3) ln(1 + L)]."""
    return f_lambda(measure, lambda_cut) / (8 * math.pi / 3 * math.log1p(lambda_cut))


# -- shifted l = 1 resolvent -------------------------------------------------

class ShiftedSolver:
    """Solves (H_l + shift) y = b for the tridiagonal radial operator H_l.

    Requires H_l + shift to be positive definite; a failed Cholesky
    factorization means the shifted operator is singular or indefinite.
    """

    def __init__(self, potential, grid, ell):
        self.grid = grid
        h = grid.spacing
        self._diag = _diagonal(potential, grid, ell)
        self._upper = np.full(grid.n_points, -1.0 / h**2)
        self._upper[0] = 0.0

    def solve(self, shift, rhs):
        ab = np.vstack([self._upper, self._diag + shift])
        try:
            return solveh_banded(ab, rhs, lower=False, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"shifted radial operator is not positive definite (shift={shift})") from exc


def resolvent_quadrature(ground: GroundState, lambda_cut, order=24) -> PhotonQuadrature:
    """Graded photon rule resolving the scale of the smallest gaps (~ e0)."""
    return photon_quadrature(lambda_cut, order, min_scale=1e-3 * ground.e0)


@dataclass(frozen=True)
class RadiativeCorrection:
    """E(V, L) from the spectral sum and from per-node resolvent solves."""

    spectral: float
    resolvent: float
    upper_bound: float
    p_norm_sq: float
    e0: float

    @property
    def relative_difference(self) -> float:
        return abs(self.spectral - self.resolvent) / abs(self.spectral)

    @property
    def value(self) -> float:
        return self.spectral


def radiative_correction_spectral(measure: SpectralMeasure, lambda_cut) -> float:
    """E = 4 ||p phi||^2 F(L), i.e. 4 e0 F(L) for Coulomb."""
    return 4 * measure.p_norm_sq * f_lambda(measure, lambda_cut)


def radiative_correction_resolvent(potential, grid, ground, lambda_cut, quadrature=None) -> float:
    """E = (32 pi / 3) int_0^L k <g, (H_1 + e0 + k^2 + k)^-1 g> dk, one
    tridiagonal solve per photon node."""
    quad = quadrature or resolvent_quadrature(ground, lambda_cut)
    solver = ShiftedSolver(potential, grid, 1)
    g = dipole_source(ground)
    h = grid.spacing
    vals = np.array([k * np.dot(g, solver.solve(ground.e0 + k * k + k, g)) * h for k in quad.nodes])
    return 32 * math.pi / 3 * quad.integrate(vals)


def radiative_correction_routes(potential, grid, lambda_cut, quadrature=None,
                                measure: Optional[SpectralMeasure] = None) -> RadiativeCorrection:
    require_positive(lambda_cut, "lambda_cut")
    ground = solve_ground_state(potential, grid)
    if measure is None:
        measure = dipole_spectrum(potential, grid, ground)
    from .closed_form import radiative_correction_upper_bound
    return RadiativeCorrection(
        spectral=radiative_correction_spectral(measure, lambda_cut),
        resolvent=radiative_correction_resolvent(potential, grid, ground, lambda_cut, quadrature),
        upper_bound=radiative_correction_upper_bound(ground.p_norm_sq, lambda_cut),
        p_norm_sq=ground.p_norm_sq,
        e0=ground.e0,
    )


def radiative_correction_exact(potential, grid, lambda_cut, quadrature=None, rtol=0.01) -> float:
    """E(V, L), cross-checked between the spectral and resolvent routes."""
    rc = radiative_correction_routes(potential, grid, lambda_cut, quadrature)
    if rc.relative_difference > rtol:
        raise ConvergenceError(
            f"spectral ({rc.spectral:.6g}) and resolvent ({rc.resolvent:.6g}) routes differ "
            f"by {rc.relative_difference:.2%}")
    return rc.value


def observed_order(spacings, errors) -> float:
    """Least-squares slope of log|error| against log(spacing)."""
    x = np.log(np.asarray(spacings, dtype=float))
    y = np.log(np.abs(np.asarray(errors, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])
