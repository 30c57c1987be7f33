"""Spin-1/2 algebra in the basis |+z> = (1, 0), |-z> = (0, 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

UNIT_TOL = 1e-9


def _unit(v, name, tol=UNIT_TOL):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise DomainError(f"{name} must be a finite 3-vector, got {v!r}")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > tol:
        raise DomainError(f"{name} must have unit norm, got |{name}| = {n!r}")
    return v


def spin_operator(direction):
    """``direction . sigma`` as a 2x2 Hermitian matrix; ``direction`` may be batched ``(..., 3)``."""
    direction = np.asarray(direction, dtype=float)
    return np.tensordot(direction, PAULI, axes=([-1], [0]))


@dataclass(frozen=True)
class SettingVector:
    """Unit Bloch vector giving the orientation of a spin measurement.

    Inputs are validated, never silently renormalised.
    """

    direction: np.ndarray

    def __post_init__(self):
        d = _unit(self.direction, "setting").copy()
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    @property
    def operator(self):
        return spin_operator(self.direction)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.direction, dtype=dtype)


@dataclass(frozen=True)
class SpinRotationOperator:
    """SU(2) matrix ``exp(-i angle axis.sigma / 2)`` with its source angle-axis pair."""

    entries: np.ndarray
    axis: np.ndarray
    angle: float

    def __matmul__(self, other):
        if isinstance(other, SpinRotationOperator):
            return self.entries @ other.entries
        return self.entries @ other

    @property
    def dagger(self):
        return self.entries.conj().T


def rotation_operator(axis, angle):
    axis = _unit(axis, "axis")
    half = 0.5 * float(angle)
    entries = np.cos(half) * IDENTITY - 1j * np.sin(half) * spin_operator(axis)
    return SpinRotationOperator(entries, axis, float(angle))


def z_rotation_matrices(cos_w, sin_w):
    """Batched ``exp(-i W sigma_z / 2)`` from the cosine and sine of ``W``.

    Returns shape ``(..., 2, 2)``; only the diagonal is non-zero.
    """
    w = np.arctan2(sin_w, cos_w)
    out = np.zeros(np.shape(w) + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * w)
    out[..., 1, 1] = np.exp(0.5j * w)
    return out


def rodrigues(y, n, cos_w, sin_w):
    """Rotate ``y`` about unit ``n``; broadcasts ``cos_w``/``sin_w`` over leading dims."""
    y = np.asarray(y, dtype=float)
    n = np.asarray(n, dtype=float)
    cos_w = np.asarray(cos_w, dtype=float)[..., None]
    sin_w = np.asarray(sin_w, dtype=float)[..., None]
    return y * cos_w + n * (n @ y) * (1.0 - cos_w) + np.cross(n, y) * sin_w


def rotate_setting(y, n, omega):
    """Setting ``y`` rotated by ``omega`` about ``n``.

    Satisfies ``R(n, omega) (y.sigma) R(n, omega)^dagger = y_rot . sigma``.
    """
    y = y.direction if isinstance(y, SettingVector) else _unit(y, "y")
    n = _unit(n, "n")
    return SettingVector(rodrigues(y, n, np.cos(omega), np.sin(omega)))
