"""Units, model parameters, field form factors and photon quadrature.

All quantities are dimensionless: energies in units of mc^2/2 and lengths in
units of 2*hbar/(mc).  The ultraviolet cutoff is a sharp step at ``lambda_cut``.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

#: Largest cutoff for which the O(alpha^2) self-energy error regime is known
#: to hold.  Used only as a guard; never alters any result.
LAMBDA_BAR = 12.6

DEFAULT_A_SPLIT = 0.25
DEFAULT_BETA = 1.0 / 137.0


class ValidationError(ValueError):
    """An input violates a documented precondition."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class ConvergenceError(RuntimeError):
    """A discretization is too coarse to deliver the requested quantity."""


@dataclass(frozen=True)
class UnitSystem:
    energy_unit: str = "mc^2/2"
    length_unit: str = "2hbar/mc"


UNITS = UnitSystem()


@dataclass(frozen=True)
class ModelParams:
    """Coupling, cutoff and the auxiliary constants of the model.

    ``above_critical_cutoff`` is set when ``lambda_cut > LAMBDA_BAR``; in that
    regime the self-energy expansion carries larger errors than the O(alpha^2)
    estimates implemented here.
    """

    alpha: float
    lambda_cut: float
    a_split: float = DEFAULT_A_SPLIT
    beta: float = DEFAULT_BETA
    z_charge: float = 1.0
    above_critical_cutoff: bool = field(init=False)

    def __post_init__(self):
        _check_finite(self.alpha, "alpha")
        _check_finite(self.lambda_cut, "lambda_cut")
        _check_finite(self.a_split, "a_split")
        _check_finite(self.beta, "beta")
        _check_finite(self.z_charge, "z_charge")
        if self.alpha < 0:
            raise ValidationError("alpha", f"must be >= 0, got {self.alpha}")
        if self.lambda_cut <= 0:
            raise ValidationError("lambda_cut", f"must be > 0, got {self.lambda_cut}")
        if not 0 < self.a_split < 1:
            raise ValidationError("a_split", f"must lie in (0, 1), got {self.a_split}")
        if self.beta <= 0:
            raise ValidationError("beta", f"must be > 0, got {self.beta}")
        if self.z_charge <= 0:
            raise ValidationError("z_charge", f"must be > 0, got {self.z_charge}")
        above = self.lambda_cut > LAMBDA_BAR
        object.__setattr__(self, "above_critical_cutoff", above)
        if above:
            log.warning("lambda_cut=%g exceeds the critical cutoff %g", self.lambda_cut, LAMBDA_BAR)

    @property
    def beta_z(self) -> float:
        return self.beta * self.z_charge


def _check_finite(value, name):
    try:
        ok = math.isfinite(value)
    except TypeError:
        raise ValidationError(name, f"must be a real number, got {value!r}") from None
    if not ok:
        raise ValidationError(name, f"must be finite, got {value!r}")


def make_params(alpha, lambda_cut, a_split=DEFAULT_A_SPLIT, beta=DEFAULT_BETA, z_charge=1.0) -> ModelParams:
    return ModelParams(float(alpha), float(lambda_cut), float(a_split), float(beta), float(z_charge))


def require_positive(value, name):
    _check_finite(value, name)
    if value <= 0:
        raise ValidationError(name, f"must be > 0, got {value}")


def require_nonnegative(value, name):
    _check_finite(value, name)
    if value < 0:
        raise ValidationError(name, f"must be >= 0, got {value}")


# -- form factors ------------------------------------------------------------

class FormFactorKind(enum.Enum):
    G = "G"  # vector potential, creation part acting on the vacuum
    H = "H"  # magnetic field, creation part acting on the vacuum


@dataclass(frozen=True)
class FormFactor:
    """Polarization-summed squared form factor as a function of |k|.

    G: sum_l |G_l(k)|^2 = 2 chi(|k|) / |k|
    H: sum_l |H_l(k)|^2 = 2 |k| chi(|k|)
    """

    kind: FormFactorKind
    lambda_cut: float

    def magnitude_squared_sum(self, k):
        k = np.asarray(k, dtype=float)
        inside = (k > 0) & (k <= self.lambda_cut)
        out = np.zeros_like(k)
        if self.kind is FormFactorKind.G:
            with np.errstate(over="ignore"):  # 2/k overflows to inf for subnormal k
                out[inside] = 2.0 / k[inside]
        else:
            out[inside] = 2.0 * k[inside]
        return out


def cutoff(k, lambda_cut):
    """Sharp cutoff chi(|k|) = Theta(lambda_cut - |k|)."""
    return (np.asarray(k, dtype=float) <= lambda_cut).astype(float)


def transverse_projector(directions):
    """sum_l eps_l,i eps_l,j = delta_ij - khat_i khat_j for unit vectors."""
    d = np.asarray(directions, dtype=float)
    return np.eye(3) - d[..., :, None] * d[..., None, :]


def polarization_vectors(directions):
    """Two real orthonormal polarizations per direction, with eps1 x eps2 = khat.

    Returns an array of shape (n, 2, 3).  Directions must be given through
    their spherical angles (see :class:`AngularRule`) to avoid the pole
    ambiguity, so this takes an AngularRule-like object with theta and phi.
    """
    theta, phi = directions.theta, directions.phi
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    e1 = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e2 = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    return np.stack([e1, e2], axis=1)


# -- quadrature --------------------------------------------------------------

@dataclass(frozen=True)
class PhotonQuadrature:
    """Radial nodes and weights for integrals over |k| in (0, lambda_cut)."""

    nodes: np.ndarray
    weights: np.ndarray
    lambda_cut: float

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, f):
        values = f(self.nodes) if callable(f) else np.asarray(f)
        return float(np.dot(self.weights, values))

    def refined(self) -> "PhotonQuadrature":
        """Same panel layout with twice the nodes per panel."""
        return photon_quadrature(self.lambda_cut, 2 * self._per_panel, min_scale=self._min_scale)

    # filled in by photon_quadrature; kept off the public constructor
    _per_panel: int = field(default=0, repr=False, compare=False)
    _min_scale: float | None = field(default=None, repr=False, compare=False)


def _panel_breaks(lambda_cut, min_scale):
    if min_scale is None or min_scale >= lambda_cut:
        return np.array([0.0, lambda_cut])
    n_dec = max(1, int(math.ceil(math.log10(lambda_cut / min_scale))))
    return np.concatenate([[0.0], np.geomspace(min_scale, lambda_cut, n_dec + 1)])


def photon_quadrature(lambda_cut, order, min_scale=None) -> PhotonQuadrature:
    """Gauss-Legendre rule on [0, lambda_cut].

    With ``min_scale`` the interval is split into geometrically graded panels
    (one per decade between ``min_scale`` and ``lambda_cut``, plus
    [0, min_scale]) with ``order`` nodes each.  This resolves integrands that
    vary on a scale much smaller than the cutoff.
    """
    require_positive(lambda_cut, "lambda_cut")
    if int(order) != order or order < 2:
        raise ValidationError("order", f"must be an integer >= 2, got {order}")
    order = int(order)
    if min_scale is not None:
        require_positive(min_scale, "min_scale")
    x, w = np.polynomial.legendre.leggauss(order)
    breaks = _panel_breaks(lambda_cut, min_scale)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    return PhotonQuadrature(np.concatenate(nodes), np.concatenate(weights), float(lambda_cut),
                            _per_panel=order, _min_scale=min_scale)


@dataclass(frozen=True)
class AngularRule:
    """Product rule on the unit sphere: Gauss-Legendre in cos(theta) and a
    uniform trapezoid in phi.  Weights sum to 4*pi."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    @property
    def directions(self):
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)], axis=-1)


def angular_rule(n_theta=8) -> AngularRule:
    if n_theta < 1:
        raise ValidationError("n_theta", f"must be >= 1, got {n_theta}")
    x, w = np.polynomial.legendre.leggauss(n_theta)
    n_phi = 2 * n_theta
    phi = 2 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    theta = np.arccos(x)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.outer(w, np.full(n_phi, 2 * np.pi / n_phi))
    return AngularRule(tt.ravel(), pp.ravel(), ww.ravel())
