"""Transformations from A's rest frame to the laboratory frame C.

The single-particle map relabels C's momentum ``pi`` as A's momentum
``-(m_A/m_C) pi`` and reinterprets A's spin label in the rest-spin basis.
The two-particle map additionally boosts B by ``-pi_C/m_C``, controlled on
C's momentum.  For non-collinear motion the composed boosts rotate B's
rest-spin label about ``e_z`` by a momentum-dependent Wigner angle.

All maps act on basis labels only, so they are exactly unitary on the
discretised space: amplitudes move between indices and pick up a unitary
2x2 factor, and quadrature weights are carried along unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConsistencyError, DomainError
from .lorentz import E_Z, boost_momenta, signed_wigner_angles, wigner_angle_closed_form
from .spin import z_rotation_matrices
from .state import NORM_TOL, FrameAState, FrameCState, Masses, SingleParticleState

COLLINEAR_TOL = 1e-15
ORACLE_TOL = 1e-10


@dataclass(frozen=True)
class QrfTransform:
    """Description of a frame change; call :meth:`apply` on a state."""

    kind: str
    masses: Masses
    direction_B: np.ndarray
    direction_C: np.ndarray
    method: str = "closed"

    @classmethod
    def for_state(cls, state, method="closed"):
        kind = "two_particle_collinear" if _is_collinear(state.grid_B, state.grid_C) else "two_particle_noncollinear"
        return cls(kind, state.masses, state.grid_B.direction, state.grid_C.direction, method)

    def apply(self, state):
        if self.kind == "two_particle_collinear":
            return transform_to_lab_collinear(state)
        if self.kind == "two_particle_noncollinear":
            return transform_to_lab_noncollinear(state, method=self.method)
        raise ConfigurationError(f"{self.kind} transforms act on single-particle states")

    def inverse(self, state):
        return inverse_transform(state)


def _is_collinear(grid_B, grid_C):
    return np.linalg.norm(np.cross(grid_B.direction, grid_C.direction)) <= COLLINEAR_TOL


def relabel_to_a(pi_C, masses):
    """A's laboratory momentum for each value of C's momentum in A's frame."""
    return -(masses.m_A / masses.m_C) * pi_C


def transform_single_particle(c, phi, m_A):
    """Map ``sum_a c_a |a> (x) |phi>_C`` to the laboratory description of A.

    Returns a :class:`SingleParticleState` with ``psi[a, i] = c[a] phi[i]`` at
    momenta ``p[i] = -(m_A/m_C) pi_C[i]``.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape != (2,):
        raise DomainError("single-particle spin coefficients must have shape (2,)")
    total = float(np.sum(np.abs(c) ** 2)) * phi.norm
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(f"input is not normalised: norm = {total!r}")
    grid = phi.grid
    momenta = -(m_A / grid.mass) * grid.vectors
    return SingleParticleState(np.outer(c, phi.amplitudes), momenta, grid.weights.copy(), float(m_A))


def _lab_kinematics(state):
    masses = state.masses
    pi_B = state.grid_B.vectors[None, :, :]
    pi_C = state.grid_C.vectors[:, None, :]
    energy_B, p_B = boost_momenta(-pi_C, masses.m_C, pi_B, masses.m_B)
    p_A = relabel_to_a(1.0, masses) * state.grid_C.vectors
    return p_A, p_B, energy_B


def transform_to_lab_collinear(state: FrameAState) -> FrameCState:
    """Collinear frame change: relabel momenta, boost B, leave spin labels alone."""
    if not _is_collinear(state.grid_B, state.grid_C):
        raise ConfigurationError(
            "B and C move along different directions; use transform_to_lab_noncollinear"
        )
    p_A, p_B, energy_B = _lab_kinematics(state)
    psi = np.transpose(state.psi, (0, 1, 3, 2))
    shape = (len(state.grid_C), len(state.grid_B))
    return FrameCState(
        psi, state.grid_B, state.grid_C, state.masses, p_A, p_B, energy_B,
        np.ones(shape), np.zeros(shape), "collinear",
    )


def wigner_table(state, method="closed"):
    """Cosine and sine of B's Wigner angle about ``e_z``, indexed ``[i_C, i_B]``."""
    return signed_wigner_angles(
        state.grid_B.vectors[None, :, :], state.masses.m_B,
        state.grid_C.vectors[:, None, :], state.masses.m_C,
        axis=E_Z, method=method,
    )


def oracle_discrepancy(state):
    """Largest gap between closed-form and matrix-oracle cosines over the grid."""
    cos_closed, _ = wigner_table(state, "closed")
    cos_oracle, _ = wigner_table(state, "oracle")
    return float(np.max(np.abs(cos_closed - cos_oracle)))


def transform_to_lab_noncollinear(state: FrameAState, method="closed", check_oracle=False) -> FrameCState:
    """Non-collinear frame change with momentum-controlled Wigner rotation of B's spin.

    ``psi_C[a, b', i_A, i_B] = sum_b R(W[i_A, i_B] e_z)[b', b] psi_A[a, b, i_B, i_A]``.
    B must move along ``e_x`` and C along a non-parallel direction in the
    xy-plane.  ``check_oracle`` compares closed-form and matrix cosines at
    every grid pair and raises :class:`ConsistencyError` above 1e-10.
    """
    gb, gc = state.grid_B, state.grid_C
    if _is_collinear(gb, gc):
        raise ConfigurationError("B and C move collinearly; use transform_to_lab_collinear")
    if abs(gb.direction[2]) > 1e-15 or abs(gc.direction[2]) > 1e-15:
        raise ConfigurationError("B and C must move in the xy-plane")
    if check_oracle:
        gap = oracle_discrepancy(state)
        if gap > ORACLE_TOL:
            raise ConsistencyError(f"closed-form Wigner cosine deviates from the matrix oracle by {gap:.3e}")
    cos_w, sin_w = wigner_table(state, method)
    p_A, p_B, energy_B = _lab_kinematics(state)
    rot = z_rotation_matrices(cos_w, sin_w)
    psi = np.transpose(state.psi, (0, 1, 3, 2))
    # R is diagonal in the sigma_z basis
    psi = psi * np.stack([rot[..., 0, 0], rot[..., 1, 1]])[None, :, :, :]
    return FrameCState(
        psi, gb, gc, state.masses, p_A, p_B, energy_B, cos_w, sin_w, "noncollinear",
    )


def transform_to_lab(state, method="closed"):
    if _is_collinear(state.grid_B, state.grid_C):
        return transform_to_lab_collinear(state)
    return transform_to_lab_noncollinear(state, method=method)


def _check_geometry(state):
    p_A, p_B, energy_B = _lab_kinematics(state)
    scale = max(1.0, float(np.max(np.abs(p_B))))
    if state.p_A.shape != p_A.shape or np.max(np.abs(state.p_A - p_A)) > 1e-12 * max(1.0, np.max(np.abs(p_A))):
        raise ConfigurationError("p_A table does not match the relabelled C grid")
    if state.p_B.shape != p_B.shape or np.max(np.abs(state.p_B - p_B)) > 1e-12 * scale:
        raise ConfigurationError("p_B table does not match the boosted B grid")


def inverse_transform(state: FrameCState) -> FrameAState:
    """Undo the Wigner rotation and the relabelling, returning to A's rest frame."""
    _check_geometry(state)
    psi = state.psi
    if state.kind == "noncollinear":
        rot = z_rotation_matrices(state.wigner_cos, state.wigner_sin)
        psi = psi * np.stack([rot[..., 0, 0], rot[..., 1, 1]]).conj()[None, :, :, :]
    return FrameAState(np.transpose(psi, (0, 1, 3, 2)), state.grid_B, state.grid_C, state.masses)


def lab_frame_wigner_cosines(state: FrameCState):
    """Wigner cosine recomputed from laboratory momenta ``p_A``, ``p_B``.

    Uses the same closed form as in A's frame, with the Lorentz factor of B
    seen from A obtained from ``g_A g_B (1 - b_A . b_B)``.
    """
    p_A = np.broadcast_to(state.p_A[:, None, :], state.p_B.shape)
    return wigner_angle_closed_form(p_A, state.masses.m_A, state.p_B, state.masses.m_B)


def on_shell_residual(state: FrameCState):
    """Largest relative gap between the boosted energies of B and ``sqrt(m^2 + |p_B|^2)``."""
    expected = np.sqrt(state.masses.m_B**2 + np.sum(state.p_B**2, axis=-1))
    return float(np.max(np.abs(state.energy_B - expected) / expected))
