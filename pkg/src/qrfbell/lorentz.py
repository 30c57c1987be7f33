"""Special-relativistic kinematics in natural units (c = 1).

Pure boosts are parametrised by the momentum-to-mass ratio ``p/m`` of the
particle they take from rest to ``p``.  Composition of two non-collinear pure
boosts is a pure boost times a spatial (Wigner) rotation; that rotation is
available both from an explicit 4x4 factorisation and from the closed-form
cosine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
E_Z = np.array([0.0, 0.0, 1.0])

_FACTOR_TOL = 1e-10
_PARALLEL_TOL = 1e-14


def _as_vec3(p, name="momentum"):
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1:] != (3,):
        raise DomainError(f"{name} must have a trailing dimension of 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite components")
    return arr


def _check_mass(m, name="mass"):
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise DomainError(f"{name} must be positive and finite, got {m}")
    return m


def gamma_of(p, m):
    """Lorentz factor ``sqrt(1 + |p|^2/m^2)`` of momentum ``p`` for mass ``m``."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(1.0 + np.sum(p * p, axis=-1) / np.asarray(m, dtype=float) ** 2)


def beta_of(p, m):
    """Velocity vector ``p / sqrt(m^2 + |p|^2)``."""
    p = np.asarray(p, dtype=float)
    energy = np.sqrt(np.asarray(m, dtype=float) ** 2 + np.sum(p * p, axis=-1))
    return p / energy[..., None]


@dataclass(frozen=True)
class FourMomentum:
    """On-shell four-momentum ``(E, p)`` of a particle of the given mass."""

    energy: float
    momentum: np.ndarray

    def __post_init__(self):
        mom = _as_vec3(self.momentum).copy()
        mom.setflags(write=False)
        object.__setattr__(self, "momentum", mom)
        object.__setattr__(self, "energy", float(self.energy))

    @classmethod
    def on_shell(cls, momentum, mass):
        mom = _as_vec3(momentum)
        _check_mass(mass)
        return cls(float(np.sqrt(mass**2 + mom @ mom)), mom)

    @property
    def vector(self):
        return np.concatenate(([self.energy], self.momentum))

    @property
    def invariant_mass(self):
        return float(np.sqrt(max(self.energy**2 - self.momentum @ self.momentum, 0.0)))

    def is_on_shell(self, mass, rtol=1e-12):
        expected = np.sqrt(mass**2 + self.momentum @ self.momentum)
        return self.energy > 0 and abs(self.energy - expected) <= rtol * expected


@dataclass(frozen=True)
class BoostMatrix:
    """A 4x4 Lorentz matrix acting on contravariant ``(E, px, py, pz)``."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.shape != (4, 4):
            raise DomainError(f"boost matrix must be 4x4, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def gamma(self):
        return float(self.entries[0, 0])

    @property
    def beta(self):
        return self.entries[1:, 0] / self.entries[0, 0]

    def __matmul__(self, other):
        if isinstance(other, BoostMatrix):
            return BoostMatrix(self.entries @ other.entries)
        if isinstance(other, FourMomentum):
            v = self.entries @ other.vector
            return FourMomentum(v[0], v[1:])
        return self.entries @ np.asarray(other, dtype=float)

    def inverse(self):
        # eta L^T eta is the inverse of any metric-preserving L
        return BoostMatrix(METRIC @ self.entries.T @ METRIC)

    def metric_residual(self):
        return float(np.max(np.abs(self.entries.T @ METRIC @ self.entries - METRIC)))


@dataclass(frozen=True)
class WignerRotation:
    """Spatial rotation by a signed ``angle`` (radians) about a unit ``axis``."""

    axis: np.ndarray
    angle: float
    as_matrix: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, rot, axis):
        """Read the signed angle of ``rot`` about ``axis`` (assumed to be its fixed axis)."""
        axis = np.asarray(axis, dtype=float)
        cos_w, sin_w = _cos_sin_about(rot, axis)
        return cls(axis, float(np.arctan2(sin_w, cos_w)), np.asarray(rot, dtype=float))

    @classmethod
    def identity(cls):
        return cls(E_Z.copy(), 0.0, np.eye(3))

    @property
    def cos(self):
        return float(np.cos(self.angle))


def boost_matrices(p, m):
    """Vectorised pure boosts ``L_{p/m}`` for momenta of shape ``(..., 3)``.

    Returns an array of shape ``(..., 4, 4)``.
    """
    p = _as_vec3(p)
    m = _check_mass(m)
    m = np.broadcast_to(m, p.shape[:-1])
    u = p / m[..., None]
    g = np.sqrt(1.0 + np.sum(u * u, axis=-1))
    out = np.zeros(p.shape[:-1] + (4, 4))
    out[..., 0, 0] = g
    out[..., 0, 1:] = u
    out[..., 1:, 0] = u
    out[..., 1:, 1:] = np.eye(3) + u[..., :, None] * u[..., None, :] / (g + 1.0)[..., None, None]
    return out


def pure_boost_matrix(p, m):
    """Pure boost taking a particle of mass ``m`` from rest to momentum ``p``."""
    p = _as_vec3(p)
    if p.shape != (3,):
        raise DomainError("pure_boost_matrix expects a single 3-vector; use boost_matrices for arrays")
    return BoostMatrix(boost_matrices(p, m))


def boost_momenta(p_boost, m_boost, p, m):
    """Apply ``L_{p_boost/m_boost}`` to the on-shell momenta ``p`` of mass ``m``.

    Broadcasts over leading dimensions; returns ``(energy, momentum)``.
    """
    p_boost = _as_vec3(p_boost, "boost momentum")
    p = _as_vec3(p)
    m = np.asarray(_check_mass(m), dtype=float)
    u = p_boost / np.asarray(_check_mass(m_boost), dtype=float)[..., None]
    g = np.sqrt(1.0 + np.sum(u * u, axis=-1))
    energy = np.sqrt(m**2 + np.sum(p * p, axis=-1))
    u_dot_p = np.sum(u * p, axis=-1)
    new_energy = g * energy + u_dot_p
    new_mom = p + u * (energy + u_dot_p / (g + 1.0))[..., None]
    return new_energy, new_mom


def _cos_sin_about(rot, axis):
    rot = np.asarray(rot)
    axis = np.asarray(axis, dtype=float)
    cos_w = (np.trace(rot, axis1=-2, axis2=-1) - 1.0) / 2.0
    vee = 0.5 * np.stack(
        [
            rot[..., 2, 1] - rot[..., 1, 2],
            rot[..., 0, 2] - rot[..., 2, 0],
            rot[..., 1, 0] - rot[..., 0, 1],
        ],
        axis=-1,
    )
    sin_w = np.sum(vee * axis, axis=-1)
    return cos_w, sin_w


def composition_rotations(p_boost, m_boost, p_particle, m_particle):
    """Batched factorisation ``L_b L_p = L_{p'} R``.

    Returns ``(R, p_prime)`` where ``R`` has shape ``(..., 4, 4)`` and
    ``p_prime`` is the boosted spatial momentum.  This is the matrix oracle:
    every rotation is read off an explicit product of 4x4 matrices.
    """
    total = boost_matrices(p_boost, m_boost) @ boost_matrices(p_particle, m_particle)
    m_particle = np.broadcast_to(np.asarray(m_particle, dtype=float), total.shape[:-2])
    # boosted four-momentum is the first column times the mass
    p_prime = total[..., 1:, 0] * m_particle[..., None]
    rot = boost_matrices(-p_prime, m_particle) @ total
    return rot, p_prime


def _factorisation_residual(rot):
    e0 = np.zeros(4)
    e0[0] = 1.0
    return max(
        float(np.max(np.abs(rot[..., 0, :] - e0))),
        float(np.max(np.abs(rot[..., :, 0] - e0))),
    )


def wigner_from_composition(p_boost, m_boost, p_particle, m_particle):
    """Boost a moving particle and split the result into pure boost and rotation.

    Computes ``L_total = L_{p_boost/m_boost} L_{p_particle/m_particle}`` and
    factors it as ``L_{p'/m_particle} R``.  The rotation axis is oriented along
    ``p_boost x p_particle``; with ``p_boost = -pi_C`` and
    ``p_particle = pi_B`` this is ``pi_B x pi_C``.  Collinear or vanishing
    momenta give the identity with axis ``e_z``.

    Raises
    ------
    ConsistencyError
        If the temporal block of ``R`` deviates from the identity by more than 1e-10.
    """
    p_boost = _as_vec3(p_boost, "boost momentum")
    p_particle = _as_vec3(p_particle, "particle momentum")
    _check_mass(m_boost, "boost mass")
    _check_mass(m_particle, "particle mass")
    rot, p_prime = composition_rotations(p_boost, m_boost, p_particle, m_particle)
    residual = _factorisation_residual(rot)
    if residual > _FACTOR_TOL:
        raise ConsistencyError(f"boost factorisation residual {residual:.3e} exceeds {_FACTOR_TOL}")
    spatial = rot[1:, 1:]
    cross = np.cross(p_boost, p_particle)
    scale = np.linalg.norm(p_boost) * np.linalg.norm(p_particle)
    if scale == 0 or np.linalg.norm(cross) <= _PARALLEL_TOL * scale:
        rotation = WignerRotation(E_Z.copy(), 0.0, spatial)
    else:
        rotation = WignerRotation.from_matrix(spatial, cross / np.linalg.norm(cross))
    return FourMomentum.on_shell(p_prime, m_particle), rotation


def lab_gamma(pi_B, m_B, pi_C, m_C):
    """Lorentz factor of B after the boost ``L_{-pi_C/m_C}``: ``g_B g_C (1 - b_B.b_C)``."""
    g_b = gamma_of(pi_B, m_B)
    g_c = gamma_of(pi_C, m_C)
    dot = np.sum(beta_of(pi_B, m_B) * beta_of(pi_C, m_C), axis=-1)
    return g_b * g_c * (1.0 - dot)


def wigner_angle_closed_form(pi_B, m_B, pi_C, m_C):
    """Cosine of the Wigner angle from the three Lorentz factors.

    ``cos W = (1 + g_B + g_C + g_L)^2 / ((1 + g_B)(1 + g_C)(1 + g_L)) - 1``.
    Vectorised over leading dimensions.  Equal to 1 for collinear or zero
    momenta.
    """
    pi_B = _as_vec3(pi_B)
    pi_C = _as_vec3(pi_C)
    _check_mass(m_B)
    _check_mass(m_C)
    g_b = gamma_of(pi_B, m_B)
    g_c = gamma_of(pi_C, m_C)
    g_l = lab_gamma(pi_B, m_B, pi_C, m_C)
    num = (1.0 + g_b + g_c + g_l) ** 2
    den = (1.0 + g_b) * (1.0 + g_c) * (1.0 + g_l)
    return num / den - 1.0


def wigner_angle_as_printed(pi_B, m_B, pi_C, m_C):
    """Closed form with an unsquared numerator; kept only to show that it disagrees with the oracle."""
    g_b = gamma_of(pi_B, m_B)
    g_c = gamma_of(pi_C, m_C)
    g_l = lab_gamma(pi_B, m_B, pi_C, m_C)
    return (1.0 + g_b + g_c + g_l) / ((1.0 + g_b) * (1.0 + g_c) * (1.0 + g_l)) - 1.0


def signed_wigner_angles(pi_B, m_B, pi_C, m_C, axis=E_Z, method="closed"):
    """Cosine and sine of the Wigner rotation of B under ``L_{-pi_C/m_C}``.

    The sign refers to ``axis`` (``e_z`` for motion in the xy-plane) and is
    always read off the matrix oracle.  ``method="closed"`` takes the cosine
    from :func:`wigner_angle_closed_form`; ``method="oracle"`` takes it from
    the matrix factorisation too.
    """
    if method not in ("closed", "oracle"):
        raise DomainError(f"unknown method {method!r}")
    pi_B = _as_vec3(pi_B)
    pi_C = _as_vec3(pi_C)
    rot, _ = composition_rotations(-pi_C, m_C, pi_B, m_B)
    residual = _factorisation_residual(rot)
    if residual > _FACTOR_TOL:
        raise ConsistencyError(f"boost factorisation residual {residual:.3e} exceeds {_FACTOR_TOL}")
    cos_o, sin_o = _cos_sin_about(rot[..., 1:, 1:], axis)
    if method == "oracle":
        return cos_o, sin_o
    cos_c = np.clip(wigner_angle_closed_form(pi_B, m_B, pi_C, m_C), -1.0, 1.0)
    # sqrt(1 - cos^2) is ill-conditioned near zero angle; the oracle sine is not
    return cos_c, sin_o
