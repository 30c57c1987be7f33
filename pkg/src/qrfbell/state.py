"""Discretised momentum wavepackets and two-particle spin-momentum states.

Every system moves along one fixed direction, so momenta are scalars
projected on that direction.  Amplitudes are sampled on a uniform grid and
integrals use trapezoid spacings folded into the Lorentz-invariant measure
``dpi / (4 pi sqrt(m^2 + pi^2))``; a state's squared norm is the
measure-weighted sum of ``|psi|^2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, DomainError

NORM_TOL = 1e-10
EDGE_WIDTHS = 5.0

SINGLET = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex) / np.sqrt(2.0)


class Masses(NamedTuple):
    m_A: float
    m_B: float
    m_C: float

    def validate(self):
        for name, m in zip(self._fields, self):
            if not np.isfinite(m) or m <= 0:
                raise DomainError(f"{name} must be positive, got {m!r}")
        return self


def invariant_weights(samples, spacing, mass):
    return spacing / (4.0 * np.pi * np.sqrt(mass**2 + samples**2))


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    """Scalar momenta along ``direction`` with invariant quadrature weights."""

    mass: float
    direction: np.ndarray
    samples: np.ndarray
    weights: np.ndarray
    spacing: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("direction", "samples", "weights", "spacing"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.mass <= 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if abs(np.linalg.norm(self.direction) - 1.0) > 1e-12:
            raise DomainError("grid direction must be a unit vector")
        if self.samples.ndim != 1 or len(self.samples) < 2 or np.any(np.diff(self.samples) <= 0):
            raise DomainError("grid samples must be strictly increasing with at least two points")
        if np.any(self.weights <= 0):
            raise DomainError("grid weights must be positive")

    def __len__(self):
        return len(self.samples)

    @property
    def step(self):
        return float(self.samples[1] - self.samples[0])

    @property
    def vectors(self):
        """Momentum 3-vectors, shape ``(n, 3)``."""
        return self.samples[:, None] * self.direction

    @property
    def energies(self):
        return np.sqrt(self.mass**2 + self.samples**2)

    def same_as(self, other, tol=0.0):
        return (
            len(self) == len(other)
            and abs(self.mass - other.mass) <= tol * self.mass
            and np.allclose(self.direction, other.direction, rtol=0, atol=max(tol, 1e-15))
            and np.allclose(self.samples, other.samples, rtol=tol, atol=0)
        )


def build_grid(mass, direction, pi_min, pi_max, n_points):
    """Uniform grid on ``[pi_min, pi_max]`` with trapezoid invariant weights."""
    if not (np.isfinite(mass) and mass > 0):
        raise DomainError(f"mass must be positive, got {mass!r}")
    if int(n_points) != n_points or n_points < 2:
        raise DomainError(f"n_points must be an integer >= 2, got {n_points!r}")
    if not (np.isfinite(pi_min) and np.isfinite(pi_max)) or pi_max <= pi_min:
        raise DomainError(f"need pi_min < pi_max, got [{pi_min}, {pi_max}]")
    if pi_max - pi_min <= 1e-12 * max(1.0, abs(pi_min), abs(pi_max)):
        raise DomainError(f"degenerate momentum range [{pi_min}, {pi_max}]")
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (3,) or abs(np.linalg.norm(direction) - 1.0) > 1e-12:
        raise DomainError("direction must be a unit 3-vector")
    n = int(n_points)
    samples = np.linspace(pi_min, pi_max, n)
    spacing = np.full(n, (pi_max - pi_min) / (n - 1))
    spacing[0] *= 0.5
    spacing[-1] *= 0.5
    return MomentumGrid(float(mass), direction, samples, invariant_weights(samples, spacing, mass), spacing)


@dataclass(frozen=True, eq=False)
class Wavepacket:
    """Complex amplitudes on a grid; ``clipped`` marks support reaching the grid edge."""

    grid: MomentumGrid
    amplitudes: np.ndarray
    clipped: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.grid),):
            raise DomainError("amplitudes must align with grid samples")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.sum(self.grid.weights * np.abs(self.amplitudes) ** 2))

    @property
    def probabilities(self):
        """Per-sample probabilities ``w_k |amp_k|^2``."""
        return self.grid.weights * np.abs(self.amplitudes) ** 2

    def normalized(self):
        n = self.norm
        if n == 0:
            raise DomainError("cannot normalise a zero wavepacket")
        return Wavepacket(self.grid, self.amplitudes / np.sqrt(n), self.clipped)

    def __add__(self, other):
        if not self.grid.same_as(other.grid):
            raise ConfigurationError("wavepackets live on different grids")
        return Wavepacket(self.grid, self.amplitudes + other.amplitudes, self.clipped or other.clipped)

    def __mul__(self, scalar):
        return Wavepacket(self.grid, self.amplitudes * scalar, self.clipped)

    __rmul__ = __mul__


def gaussian_packet(grid, center, width):
    """Normalised ``exp(-(pi - center)^2 / (4 width^2))`` on ``grid``.

    Warns (and sets ``clipped``) when the centre is closer than five widths to
    a grid edge.
    """
    if not (np.isfinite(width) and width > 0):
        raise DomainError(f"width must be positive, got {width!r}")
    clipped = bool(
        center - EDGE_WIDTHS * width < grid.samples[0] or center + EDGE_WIDTHS * width > grid.samples[-1]
    )
    if clipped:
        warnings.warn(
            f"packet centred at {center:g} (width {width:g}) is within {EDGE_WIDTHS:g} widths of the grid "
            f"edge [{grid.samples[0]:g}, {grid.samples[-1]:g}]",
            stacklevel=2,
        )
    amps = np.exp(-((grid.samples - center) ** 2) / (4.0 * width**2)).astype(complex)
    if not np.any(amps):
        # far outside the grid: fall back to the nearest sample so the packet stays normalisable
        amps[np.argmin(np.abs(grid.samples - center))] = 1.0
    return Wavepacket(grid, amps, clipped).normalized()


def superpose(packets, coefficients=None):
    """Normalised sum of wavepackets with optional complex coefficients."""
    packets = list(packets)
    if coefficients is None:
        coefficients = np.ones(len(packets))
    total = packets[0] * coefficients[0]
    for pkt, c in zip(packets[1:], coefficients[1:]):
        total = total + pkt * c
    return total.normalized()


def sharp_packet(grid, index):
    """Wavepacket supported on a single grid point (a discrete sharp momentum)."""
    amps = np.zeros(len(grid), dtype=complex)
    amps[index] = 1.0 / np.sqrt(grid.weights[index])
    return Wavepacket(grid, amps)


@dataclass(frozen=True, eq=False)
class FrameAState:
    """State in A's rest frame: ``psi[a, b, i_B, i_C]``.

    ``a`` is A's spin, ``b`` is B's rest-frame spin label, ``i_B``/``i_C``
    index the momentum grids of B and the laboratory C.
    """

    psi: np.ndarray
    grid_B: MomentumGrid
    grid_C: MomentumGrid
    masses: Masses

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.shape != (2, 2, len(self.grid_B), len(self.grid_C)):
            raise DomainError(f"psi has shape {psi.shape}, grids need (2, 2, {len(self.grid_B)}, {len(self.grid_C)})")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "masses", Masses(*self.masses).validate())
        if abs(self.grid_B.mass - self.masses.m_B) > 1e-12 * self.masses.m_B:
            raise ConfigurationError("grid_B mass differs from m_B")
        if abs(self.grid_C.mass - self.masses.m_C) > 1e-12 * self.masses.m_C:
            raise ConfigurationError("grid_C mass differs from m_C")

    @property
    def weights(self):
        return self.grid_B.weights[:, None] * self.grid_C.weights[None, :]

    @property
    def collinear(self):
        return abs(abs(self.grid_B.direction @ self.grid_C.direction) - 1.0) <= 1e-15

    def scaled(self, factor):
        return FrameAState(self.psi * factor, self.grid_B, self.grid_C, self.masses)


@dataclass(frozen=True, eq=False)
class FrameCState:
    """State in the laboratory frame: ``psi[a, b, i_A, i_B]``.

    Momentum labels are carried per index: ``p_A[i_A]`` and ``p_B[i_A, i_B]``
    are the physical momenta of the relabelled basis points, and the
    quadrature weights are inherited from the frame-A grids (the relabelling
    preserves the invariant measure).  ``wigner_cos``/``wigner_sin`` hold the
    rotation of B's spin about ``e_z`` at each index pair.
    """

    psi: np.ndarray
    grid_B: MomentumGrid
    grid_C: MomentumGrid
    masses: Masses
    p_A: np.ndarray
    p_B: np.ndarray
    energy_B: np.ndarray
    wigner_cos: np.ndarray
    wigner_sin: np.ndarray
    kind: str

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        n_a, n_b = len(self.grid_C), len(self.grid_B)
        if psi.shape != (2, 2, n_a, n_b):
            raise DomainError(f"psi has shape {psi.shape}, expected (2, 2, {n_a}, {n_b})")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)
        if self.kind not in ("collinear", "noncollinear"):
            raise DomainError(f"unknown kind {self.kind!r}")

    @property
    def weights_A(self):
        return self.grid_C.weights

    @property
    def weights_B(self):
        return self.grid_B.weights

    @property
    def weights(self):
        return self.weights_A[:, None] * self.weights_B[None, :]

    @property
    def energy_A(self):
        return np.sqrt(self.masses.m_A**2 + np.sum(self.p_A**2, axis=-1))

    @property
    def wigner_angle(self):
        return np.arctan2(self.wigner_sin, self.wigner_cos)

    def with_psi(self, psi):
        return FrameCState(
            psi, self.grid_B, self.grid_C, self.masses, self.p_A, self.p_B,
            self.energy_B, self.wigner_cos, self.wigner_sin, self.kind,
        )


@dataclass(frozen=True, eq=False)
class SingleParticleState:
    """One particle in the laboratory frame: ``psi[a, i]`` with momenta ``p[i]``."""

    psi: np.ndarray
    momenta: np.ndarray
    weights: np.ndarray
    mass: float


def _check_spin_table(c):
    c = np.asarray(c, dtype=complex)
    if c.shape[:2] != (2, 2) or c.ndim not in (2, 3):
        raise DomainError(f"spin coefficients must have shape (2, 2) or (2, 2, n_B), got {c.shape}")
    return c


def assemble_frame_a_state(c, eta, phi, masses):
    """``psi[a, b, i_B, i_C] = c[a, b] eta[i_B] phi[i_C]``.

    ``c`` may also be a per-momentum table ``c[a, b, i_B]``, giving states with
    spin-momentum correlations; the joint normalisation is then checked.
    """
    c = _check_spin_table(c)
    masses = Masses(*masses).validate()
    if abs(eta.norm - 1.0) > NORM_TOL or abs(phi.norm - 1.0) > NORM_TOL:
        raise DomainError("eta and phi must be normalised")
    if c.ndim == 2:
        total = float(np.sum(np.abs(c) ** 2))
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"spin coefficients are not normalised: sum |c|^2 = {total!r}")
        psi = c[:, :, None, None] * eta.amplitudes[None, None, :, None] * phi.amplitudes[None, None, None, :]
    else:
        if c.shape[2] != len(eta.grid):
            raise DomainError("per-momentum spin table does not match eta's grid")
        marginal = np.sum(np.abs(c) ** 2 * eta.probabilities, axis=None)
        if abs(marginal - 1.0) > NORM_TOL:
            raise DomainError(f"spin-momentum table is not normalised: {marginal!r}")
        psi = (c * eta.amplitudes)[:, :, :, None] * phi.amplitudes[None, None, None, :]
    return FrameAState(psi, eta.grid, phi.grid, masses)


def frame_a_from_tensor(psi, grid_B, grid_C, masses):
    """Wrap a full ``psi[a, b, i_B, i_C]`` tensor, checking its normalisation."""
    state = FrameAState(psi, grid_B, grid_C, masses)
    n = norm(state)
    if abs(n - 1.0) > NORM_TOL:
        raise DomainError(f"state is not normalised: norm = {n!r}")
    return state


def sector_norms(state):
    """Squared norm of each ``(a, b)`` spin sector, shape ``(2, 2)``."""
    return np.einsum("abij,ij->ab", np.abs(state.psi) ** 2, state.weights)


def norm(state):
    """Measure-weighted squared 2-norm ``sum w |psi|^2`` (quadratic in psi)."""
    if isinstance(state, SingleParticleState):
        return float(np.sum(np.abs(state.psi) ** 2 * state.weights[None, :]))
    return float(np.sum(sector_norms(state)))


def inner(left, right):
    """Discrete inner product ``<left|right>`` of two states on the same grids."""
    if left.psi.shape != right.psi.shape:
        raise ConfigurationError("states have different shapes")
    return complex(np.einsum("abij,abij,ij->", left.psi.conj(), right.psi, left.weights))


def haar_spin_table(rng, product=False):
    """Random normalised ``c[a, b]``; ``product=True`` draws ``u (x) v``."""
    if product:
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        c = np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))
    else:
        c = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        c /= np.linalg.norm(c)
    return c


def random_packet(rng, grid, n_peaks=None, margin=EDGE_WIDTHS):
    """Superposition of 1-3 Gaussians kept ``margin`` widths inside the grid."""
    lo, hi = grid.samples[0], grid.samples[-1]
    span = hi - lo
    n_peaks = n_peaks or int(rng.integers(1, 4))
    packets = []
    for _ in range(n_peaks):
        width = span * rng.uniform(0.02, 0.08)
        center = rng.uniform(lo + margin * width, hi - margin * width)
        packets.append(gaussian_packet(grid, center, width))
    phases = np.exp(2j * np.pi * rng.uniform(size=n_peaks)) * rng.uniform(0.3, 1.0, size=n_peaks)
    return superpose(packets, phases)


def random_frame_a_state(rng, grid_B, grid_C, masses, kind="general"):
    """Random normalised frame-A state for property sweeps.

    ``kind`` is ``"product"`` (separable spins), ``"general"`` (Haar-like
    ``c[a, b]``) or ``"correlated"`` (spin table varying with B's momentum).
    """
    eta = random_packet(rng, grid_B)
    phi = random_packet(rng, grid_C)
    if kind == "product":
        c = haar_spin_table(rng, product=True)
    elif kind == "general":
        c = haar_spin_table(rng)
    elif kind == "correlated":
        c0, c1 = haar_spin_table(rng), haar_spin_table(rng)
        t = np.linspace(0.0, 1.0, len(grid_B))
        c = np.cos(np.pi * t / 2) * c0[:, :, None] + np.sin(np.pi * t / 2) * c1[:, :, None]
        c = c / np.sqrt(np.sum(np.abs(c) ** 2, axis=(0, 1)))
    else:
        raise DomainError(f"unknown kind {kind!r}")
    return assemble_frame_a_state(c, eta, phi, masses)


def direction_at_angle(xi):
    """Unit vector in the xy-plane at angle ``xi`` from ``e_x``."""
    return np.array([np.cos(xi), np.sin(xi), 0.0])
