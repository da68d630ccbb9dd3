"""Rayleigh quotients of zero-plus-one-photon trial states.

Self-energy: Psi = {f up, -sqrt(alpha) A^-1 (sigma up).E* f} with
A = p_eta^2 + H_f in relative photon coordinates, evaluated in the limit
||p f|| -> 0.

Binding: Psi = {phi up, -2 sqrt(alpha) A_V^-1 D* p phi up
                - sqrt(alpha) A_V^-1 (sigma up).E* phi}
with A_V = (p_x^2 + V + e0) + (p_eta^2 + H_f).

Polarization and spin sums are contracted analytically wherever the integrand
is isotropic, so only radial photon quadrature and radial resolvent solves are
needed for the quotients themselves.  Terms that vanish by angular symmetry
are evaluated with an explicit product rule on the sphere and reported as
cross terms together with a cancellation scale (the same sum with absolute
values), so that |value| / scale measures how completely they cancel.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .closed_form import self_energy_leading
from .core import (ConvergenceError, FormFactor, FormFactorKind, PhotonQuadrature, angular_rule,
                   photon_quadrature, polarization_vectors, require_nonnegative, require_positive)
from .radial import (GroundState, RadialGrid, RadialPotential, ShiftedSolver, dipole_source,
                     resolvent_quadrature, solve_ground_state)

PI = math.pi

# <s| sigma_m |up> for s = up, down
_SIGMA_UP = np.array([[0.0, 0.0, 1.0], [1.0, 1.0j, 0.0]])


class CrossTerm(NamedTuple):
    name: str
    value: float
    scale: float

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else abs(self.value)


@dataclass
class RayleighReport:
    quotient: float
    norm_sq: float
    field_energy: float
    kinetic_norm: float
    cross_terms: List[CrossTerm] = field(default_factory=list)
    residual_order: Optional[float] = None

    def cross_term(self, name) -> CrossTerm:
        for term in self.cross_terms:
            if term.name == name:
                return term
        raise KeyError(name)

    def to_dict(self):
        d = asdict(self)
        d["cross_terms"] = [{"name": t.name, "value": t.value, "scale": t.scale} for t in self.cross_terms]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _local_order(residual, alpha):
    """Exponent p in residual ~ alpha^p from alpha and alpha/2."""
    r1, r2 = residual(alpha), residual(alpha / 2)
    if alpha == 0 or r1 == 0 or r2 == 0 or (r1 > 0) != (r2 > 0):
        return None
    return math.log(r1 / r2) / math.log(2.0)


# -- angular structure -------------------------------------------------------

def _photon_tensors(n_theta):
    """Angular sums over photon directions, (signed, absolute) pairs."""
    rule = angular_rule(n_theta)
    khat = rule.directions
    eps = polarization_vectors(rule)                       # (n, 2, 3)
    cross = np.cross(khat[:, None, :], eps)                # khat x eps_l
    # sum_l eps_l,i (khat x eps_l)_m  contracted with <s|sigma_m|up>
    spin_tensor = np.einsum("nli,nlm,sm->nis", eps, cross, _SIGMA_UP)
    proj = np.eye(3) - khat[:, :, None] * khat[:, None, :]
    out = {
        "rule": rule,
        "spin_tensor": spin_tensor,
        # k_i (delta_jl - k_j k_l)
        "k_proj": np.einsum("ni,njl->nijl", khat, proj),
        # k_i sum_l eps_l,j (khat x eps_l)_m <up|sigma_m|up>
        "k_eps_cross": np.einsum("ni,nj->nij", khat, spin_tensor[:, :, 0]),
        # k_i sum_l |khat x eps_l|^2 = 2 k_i
        "k_mag": 2.0 * khat,
    }
    return out


def _signed_and_abs(per_node, weights):
    per_node = np.asarray(per_node)
    flat = per_node.reshape(len(weights), -1)
    signed = np.tensordot(weights, flat, axes=1)
    absolute = np.tensordot(weights, np.abs(flat), axes=1)
    return signed, absolute


def _contract(a, b):
    """|sum a*b| and sum |a||b| for two angular tensors given as (signed, abs)."""
    return float(abs(np.sum(a[0] * b[0]))), float(np.sum(a[1] * b[1]))


# -- self-energy trial state -------------------------------------------------

@dataclass(frozen=True)
class TrialStateSelfEnergy:
    """One-photon amplitude magnitude sqrt(alpha) sqrt(2k) chi(k)/(k^2 + k)
    on the photon nodes (spin and polarization contracted)."""

    alpha: float
    lambda_cut: float
    nodes: np.ndarray
    kernel: np.ndarray
    f_width: Optional[float] = None


class SelfEnergyTrial:
    """alpha-independent integrals of the self-energy trial state.

    ``f_width`` switches from the ||p f|| -> 0 limit to a Gaussian
    f(x) ~ exp(-x^2 / (2 w^2)); its kinetic energy 3/(2 w^2) then enters both
    sectors and the recoil cross term -2 alpha (l.k) is averaged over the
    isotropic momentum distribution of f.
    """

    def __init__(self, lambda_cut, quadrature: Optional[PhotonQuadrature] = None,
                 angular_order=8, f_width=None, check_convergence=True):
        require_positive(lambda_cut, "lambda_cut")
        if f_width is not None:
            require_positive(f_width, "f_width")
        self.lambda_cut = float(lambda_cut)
        self.quadrature = quadrature or photon_quadrature(lambda_cut, 64)
        self.f_width = f_width
        ints = self._radial(self.quadrature)
        if check_convergence:
            fine = self._radial(self.quadrature.refined())
            for key in ("V1", "N2"):
                if abs(fine[key] - ints[key]) > 1e-8 * abs(fine[key]):
                    raise ConvergenceError(f"photon quadrature unresolved: {key} changes by "
                                           f"{abs(fine[key] - ints[key]) / abs(fine[key]):.2e} on doubling")
        self.__dict__.update(ints)
        self._angular(angular_order)

    @staticmethod
    def _radial(quad):
        k, w = quad.nodes, quad.weights
        shell = w * 4 * PI * k**2
        a_k = k * k + k
        h2 = FormFactor(FormFactorKind.H, quad.lambda_cut).magnitude_squared_sum(k)
        g2 = FormFactor(FormFactorKind.G, quad.lambda_cut).magnitude_squared_sum(k)
        return {
            "commutator": float(np.sum(shell * g2)),                 # [D_i, D*_i] = 4 pi L^2
            "V1": float(np.sum(shell * h2 / a_k)),
            "N2": float(np.sum(shell * h2 / a_k**2)),
            "field": float(np.sum(shell * h2 * k / a_k**2)),
            "recoil": float(np.sum(shell * h2 * k * k / a_k**2)),
            # int k^2 dk (chi/sqrt k)(sqrt k)/(k^2 + k): radial part of D psi_1
            "d_radial": float(np.sum(w * k**2 / a_k)),
        }

    def _angular(self, n_theta):
        t = _photon_tensors(n_theta)
        w = t["rule"].weights
        self.spin_sum = _signed_and_abs(t["spin_tensor"], w)
        # Re(2 D*.p f, psi_1): photon factor sum_l (eps_l.l)(khat x eps_l).<up|sigma|up>
        # carries an overall i; both its real part and the angular sum vanish
        self.dp_sum = _signed_and_abs(np.real(t["spin_tensor"][:, :, 0]), w)
        # recoil cross term l.k averaged over directions of k
        self.lk_sum = _signed_and_abs(t["rule"].directions, w)

    def kernel(self, alpha) -> TrialStateSelfEnergy:
        k = self.quadrature.nodes
        values = math.sqrt(alpha) * np.sqrt(2 * k) / (k * k + k)
        return TrialStateSelfEnergy(alpha, self.lambda_cut, k, values, self.f_width)

    def _pieces(self, alpha):
        n1 = alpha * self.N2
        field = alpha * self.field
        recoil = alpha * self.recoil
        coupling = -2 * alpha * self.V1
        # D psi_1 = -sqrt(alpha) * d_radial * (angular spin tensor); ||.||^2 summed over i, s
        d_signed = alpha * self.d_radial**2 * float(np.sum(np.abs(self.spin_sum[0]) ** 2))
        d_scale = alpha * self.d_radial**2 * float(np.sum(self.spin_sum[1] ** 2))
        dd = 2 * alpha * d_signed
        kin_f = self._kin_limit()
        cross = [CrossTerm("DstarD_one_photon", dd, 2 * alpha * d_scale)]
        if self.f_width is None:
            dp_value = dp_scale = lk_value = lk_scale = 0.0
        else:
            # a momentum l of f, |l| ~ sqrt(<l^2>), taken along z
            lmag = math.sqrt(kin_f)
            pre = 4 * alpha * lmag * self.d_radial
            dp_value = -pre * float(np.real(-1j * self.dp_sum[0][2]))
            dp_scale = pre * float(self.dp_sum[1][2])
            # -2 alpha l.k weighted by the one-photon density; field = int k |psi_1|^2 / alpha
            pre = 2 * alpha * lmag * self.field / (4 * PI)
            lk_value = -pre * float(self.lk_sum[0][2])
            lk_scale = pre * float(self.lk_sum[1][2])
        cross.append(CrossTerm("Re_Dstar_p_f_psi1", dp_value, dp_scale))
        cross.append(CrossTerm("recoil_l_dot_k", lk_value, lk_scale))
        numerator = (alpha * self.commutator * (1 + n1) + field + recoil + coupling + dd
                     + kin_f * (1 + n1) + dp_value + lk_value)
        return numerator, n1, field, recoil, kin_f, cross

    def quotient(self, alpha) -> float:
        num, n1, *_ = self._pieces(alpha)
        return num / (1 + n1)

    def report(self, alpha) -> RayleighReport:
        require_nonnegative(alpha, "alpha")
        num, n1, field, recoil, kin_f, cross = self._pieces(alpha)
        lead = lambda a: self_energy_leading(a, self.lambda_cut).leading
        order = _local_order(lambda a: self.quotient(a) - lead(a) - self._kin_limit(), alpha)
        return RayleighReport(
            quotient=num / (1 + n1),
            norm_sq=1 + n1,
            field_energy=field,
            kinetic_norm=kin_f * (1 + n1) + recoil,
            cross_terms=cross,
            residual_order=order,
        )

    def _kin_limit(self):
        return 0.0 if self.f_width is None else 1.5 / self.f_width**2


def self_energy_rayleigh(alpha, lambda_cut, quadrature=None, *, angular_order=8, f_width=None) -> RayleighReport:
    """Rayleigh quotient (Psi, T Psi)/(Psi, Psi) of the self-energy trial state.

    The quotient equals 4 pi alpha L^2 - alpha V1/(1 + alpha N2) up to the
    terms reported in ``cross_terms``, so it exceeds the leading term
    8 pi alpha [L - ln(1+L)] by at most alpha^2 V1 N2.
    """
    require_nonnegative(alpha, "alpha")
    return SelfEnergyTrial(lambda_cut, quadrature, angular_order, f_width).report(alpha)


def one_photon_sector_minimum(alpha, lambda_cut, quadrature=None, angular_order=4) -> float:
    """Brute-force optimum over one-photon amplitudes with f up fixed.

    The one-photon space is discretized on radial nodes x angular nodes x two
    polarizations x two spin states.  The normal-ordered energy
    (psi1, (A + 2 alpha D*D) psi1) + 2 sqrt(alpha) Re(b, psi1), with
    b = (sigma up).E* f, is minimized by a linear solve (D*D has rank 6 and is
    handled with the Woodbury identity); the returned value is the Rayleigh
    quotient of T at the minimizer.
    """
    require_nonnegative(alpha, "alpha")
    require_positive(lambda_cut, "lambda_cut")
    quad = quadrature or photon_quadrature(lambda_cut, 64)
    rule = angular_rule(angular_order)
    khat = rule.directions
    eps = polarization_vectors(rule)
    k = quad.nodes
    # mode measure: radial weight k^2 dk times solid angle
    mu = np.sqrt(np.outer(quad.weights * k**2, rule.weights))          # (nk, na)
    na = len(rule.weights)
    # b_{l,s}(k) = <s|sigma_m|up> (-i sqrt(k)) (khat x eps_l)_m
    cross = np.cross(khat[:, None, :], eps)                             # (na, 2, 3)
    b_ang = -1j * np.einsum("alm,sm->als", cross, _SIGMA_UP)            # (na, 2, 2)
    beta = (mu[:, :, None, None] * np.sqrt(k)[:, None, None, None] * b_ang[None]).ravel()
    diag = np.repeat(k * k + k, na * 4)
    # D_i columns: sqrt(mu) eps_l,i / sqrt(k) delta_{s s'}
    cols = []
    for i in range(3):
        for s in range(2):
            u = np.zeros((len(k), na, 2, 2))
            u[:, :, :, s] = mu[:, :, None] / np.sqrt(k)[:, None, None] * eps[None, :, :, i]
            cols.append(u.ravel())
    umat = np.array(cols).T.astype(complex)
    dinv_b = beta / diag
    if alpha > 0:
        dinv_u = umat / diag[:, None]
        cap = np.eye(6) + 2 * alpha * (umat.conj().T @ dinv_u)
        if np.linalg.cond(cap) > 1e12:
            raise RuntimeError("singular normal equations in one-photon minimization")
        x = dinv_b - dinv_u @ np.linalg.solve(cap, 2 * alpha * (umat.conj().T @ dinv_b))
    else:
        x = dinv_b
    psi1 = -math.sqrt(alpha) * x
    q_min = -alpha * float(np.real(np.vdot(beta, x)))
    norm1 = float(np.real(np.vdot(psi1, psi1)))
    commutator = 8 * PI * float(np.dot(quad.weights, k))
    return alpha * commutator + q_min / (1 + norm1)


# -- binding trial state -----------------------------------------------------

@dataclass(frozen=True)
class TrialStateBinding:
    """Per photon node k: y_k = (H_1 + e0 + k^2 + k)^-1 g (the D* p phi
    component) and z_k = (H_0 + e0 + k^2 + k)^-1 u (the sigma E* phi
    component); the latter is proportional to u node by node."""

    ground: GroundState
    nodes: np.ndarray
    weights: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def e_source_proportionality(self) -> float:
        """max_k max_r |(k^2 + k) z_k - u| / max|u|."""
        u = self.ground.unit_u
        k = self.nodes
        dev = (k * k + k)[:, None] * self.z - u[None, :]
        return float(np.max(np.abs(dev)) / np.max(np.abs(u)))


def _kinetic_form(v, h, ell, r):
    padded = np.concatenate([[0.0], v, [0.0]])
    return float(np.sum(np.diff(padded) ** 2) / h + ell * (ell + 1) * np.sum(v * v / (r * r)) * h)


class BindingTrial:
    """alpha-independent pieces of the binding trial state; ``report(alpha)``
    assembles the full Rayleigh quotient of H_alpha = T + V."""

    def __init__(self, potential: RadialPotential, grid: RadialGrid, lambda_cut,
                 quadrature: Optional[PhotonQuadrature] = None, angular_order=8,
                 ground: Optional[GroundState] = None):
        require_positive(lambda_cut, "lambda_cut")
        self.lambda_cut = float(lambda_cut)
        self.ground = ground or solve_ground_state(potential, grid)
        self.quadrature = quadrature or resolvent_quadrature(self.ground, lambda_cut)
        g0 = self.ground
        h = grid.spacing
        r = grid.r
        u = g0.unit_u
        g = dipole_source(g0)
        k, w = self.quadrature.nodes, self.quadrature.weights
        s1 = ShiftedSolver(potential, grid, 1)
        s0 = ShiftedSolver(potential, grid, 0)
        y = np.array([s1.solve(g0.e0 + kk * kk + kk, g) for kk in k])
        z = np.array([s0.solve(g0.e0 + kk * kk + kk, u) for kk in k])
        self.trial = TrialStateBinding(g0, k, w, y, z)

        c_d = 8 * PI / 3        # photon angular factor for the D* p phi source
        c_e = 8 * PI            # 4 pi * sum_l |H_l|^2 / k
        gy = y @ g * h
        uz = z @ u * h
        yy = np.einsum("ij,ij->i", y, y) * h
        zz = np.einsum("ij,ij->i", z, z) * h
        ky = np.array([_kinetic_form(v, h, 1, r) for v in y])
        kz = np.array([_kinetic_form(v, h, 0, r) for v in z])
        self.E = 4 * c_d * np.sum(w * k * gy)                 # 4 (s_D, A_V^-1 s_D)
        self.VE = c_e * np.sum(w * k**3 * uz)                 # (s_E, A_V^-1 s_E) = V1
        self.ND = c_d * np.sum(w * k * yy)                    # ||A_V^-1 s_D||^2
        self.NE = c_e * np.sum(w * k**3 * zz)                 # ||A_V^-1 s_E||^2 = N2
        self.field_D = c_d * np.sum(w * k * k * yy)
        self.field_E = c_e * np.sum(w * k**3 * k * zz)
        self.recoil_D = c_d * np.sum(w * k * k * k * yy)
        self.recoil_E = c_e * np.sum(w * k**3 * k * k * zz)
        self.kin_D = c_d * np.sum(w * k * ky)
        self.kin_E = c_e * np.sum(w * k**3 * kz)
        self.commutator = 8 * PI * float(np.dot(w, k))
        big_y = (w * k) @ y
        self.DD = c_d**2 * float(big_y @ big_y) * h           # ||D A_V^-1 s_D||^2 / 1
        self._cross_magnitudes(u, g, y, z, h, r, w, k)
        self._angular(angular_order)

    def _cross_magnitudes(self, u, g, y, z, h, r, w, k):
        dy = np.array([(np.concatenate([v[1:], [0.0]]) - np.concatenate([[0.0], v[:-1]])) / (2 * h) for v in y])
        # radial magnitudes that multiply each angular factor
        self.m_sigmaE_Dp = float(np.sum(w * k * np.sqrt(k) * np.abs(z @ g * h)))
        self.m_pp_DD = float(np.sum(w * k * k * (np.abs(np.einsum("ij,ij->i", y, dy)) + np.abs(np.einsum("ij,ij->i", y, y / r))) * h))
        # (phi, d_i phi) = int dOmega n_i / (4 pi) * int u (u' - u/r) dr
        self.m_pp_EE = float(np.sum(w * k**3 * k * np.einsum("ij,ij->i", z, z) * h)) * abs(np.dot(u, g) * h)
        self.dd_e_radial = float(np.sum(w * k**2 * (z @ u) * h))
        self.m_pp_DE = float(np.sum(w * k * k * np.sqrt(k) * np.abs(y @ g * h)))

    def _angular(self, n_theta):
        t = _photon_tensors(n_theta)
        w = t["rule"].weights
        xhat = t["rule"].directions
        y00 = 1 / math.sqrt(4 * PI)
        # electron angular factors (directions of x)
        el_vec = _signed_and_abs(y00 * xhat, w)                             # int Y00 n_j
        el_mean = _signed_and_abs(xhat / (4 * PI), w)                       # int n_i / (4 pi)
        el_odd3 = _signed_and_abs(np.einsum("ni,nj,nl->nijl", xhat, xhat, xhat), w)
        proj = np.eye(3)[None] - np.einsum("ni,nl->nil", xhat, xhat)
        el_odd1 = _signed_and_abs(np.einsum("nj,nil->nijl", xhat, proj), w)
        el_quad = _signed_and_abs(np.einsum("ni,nj->nij", xhat, xhat), w)
        # photon angular factors
        ph_spin = _signed_and_abs(t["spin_tensor"][:, :, 0], w)              # j
        ph_kproj = _signed_and_abs(t["k_proj"], w)                           # i j l
        ph_kmag = _signed_and_abs(t["k_mag"], w)                             # i
        ph_keps = _signed_and_abs(t["k_eps_cross"], w)                       # i j
        self.ang = {
            "sigmaE_Dp": _contract(ph_spin, el_vec),
            "pp_DD": tuple(a + b for a, b in zip(_contract(ph_kproj, el_odd3), _contract(ph_kproj, el_odd1))),
            "pp_EE": _contract(ph_kmag, el_mean),
            "pp_DE": _contract(ph_keps, el_quad),
        }
        # D on the sigma E* component: photon spin tensor integrated alone
        self.dd_e = _signed_and_abs(t["spin_tensor"], w)

    def _cross_terms(self, alpha):
        out = []
        terms = [
            ("Re_sigmaE_AVinv_Dstar_p", 4 * alpha, self.m_sigmaE_Dp, self.ang["sigmaE_Dp"]),
            ("px_peta_DD", 8 * alpha, self.m_pp_DD, self.ang["pp_DD"]),
            ("px_peta_EE", 2 * alpha, self.m_pp_EE, self.ang["pp_EE"]),
            ("px_peta_DE", 8 * alpha, self.m_pp_DE, self.ang["pp_DE"]),
        ]
        for name, coeff, mag, (signed, absolute) in terms:
            out.append(CrossTerm(name, coeff * mag * signed, coeff * mag * absolute))
        # 2 alpha ||D psi_1||^2 restricted to the sigma E* component
        pre = 2 * alpha * alpha * self.dd_e_radial**2
        out.append(CrossTerm("DstarD_sigmaE_component", pre * float(np.sum(np.abs(self.dd_e[0]) ** 2)),
                             pre * float(np.sum(self.dd_e[1] ** 2))))
        return out

    def _assemble(self, alpha):
        e0 = self.ground.e0
        n1 = alpha * (4 * self.ND + self.NE)
        a_v = alpha * (self.E + self.VE)               # (psi1, A_V psi1)
        coupling = -2 * alpha * (self.E + self.VE)     # 2 sqrt(alpha) Re((sigma E* + 2 D* p) phi, psi1)
        dd = 2 * alpha * 4 * alpha * self.DD           # 2 alpha ||D psi1||^2
        cross = self._cross_terms(alpha)
        numerator = ((alpha * self.commutator - e0) * (1 + n1) + a_v + coupling + dd
                     + sum(c.value for c in cross))
        return numerator, n1, dd, cross

    def quotient(self, alpha) -> float:
        num, n1, *_ = self._assemble(alpha)
        return num / (1 + n1)

    def expansion(self, alpha, radiative=None) -> float:
        """-e0 + 8 pi alpha [L - ln(1+L)] - alpha E(V, L)."""
        e = self.E if radiative is None else radiative
        return -self.ground.e0 + self_energy_leading(alpha, self.lambda_cut).leading - alpha * e

    def report(self, alpha) -> RayleighReport:
        require_nonnegative(alpha, "alpha")
        num, n1, dd, cross = self._assemble(alpha)
        order = _local_order(lambda a: self.quotient(a) - self.expansion(a), alpha)
        field = alpha * (4 * self.field_D + self.field_E)
        kinetic = self.ground.p_norm_sq + alpha * (4 * (self.kin_D + self.recoil_D) + self.kin_E + self.recoil_E)
        return RayleighReport(
            quotient=num / (1 + n1),
            norm_sq=1 + n1,
            field_energy=field,
            kinetic_norm=kinetic,
            cross_terms=cross,
            residual_order=order,
        )


def binding_rayleigh(alpha, potential, grid, lambda_cut, quadrature=None, *, angular_order=8) -> RayleighReport:
    """Rayleigh quotient (Psi, H_alpha Psi)/(Psi, Psi) of the binding trial state."""
    require_nonnegative(alpha, "alpha")
    return BindingTrial(potential, grid, lambda_cut, quadrature, angular_order).report(alpha)


def binding_energy_gain(alpha, potential, grid, lambda_cut, quadrature=None, *, trial: Optional[BindingTrial] = None) -> float:
    """Sigma_trial - E_trial - e0 = alpha E(V, L) + O(alpha^2).

    Both quotients use the same photon nodes so that the vacuum terms cancel
    to rounding.  Pass a prebuilt ``trial`` to scan many couplings.
    """
    require_nonnegative(alpha, "alpha")
    bt = trial or BindingTrial(potential, grid, lambda_cut, quadrature)
    se = SelfEnergyTrial(bt.lambda_cut, bt.quadrature, check_convergence=False)
    return se.quotient(alpha) - bt.quotient(alpha) - bt.ground.e0


def richardson_limit(xs, values) -> float:
    """Polynomial extrapolation of values(x) to x = 0 (degree len(xs) - 1)."""
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    coeffs = np.polyfit(xs, values, len(xs) - 1)
    return float(coeffs[-1])
