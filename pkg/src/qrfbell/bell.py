"""Bell correlations and CHSH values in A's rest frame and in the laboratory.

All observables used here are diagonal in the momentum labels and act as
Pauli matrices on the rest-spin labels, so expectation values reduce to
per-momentum-pair spin correlations ``K[i, j, :, :]`` summed with the
quadrature weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .lorentz import E_Z, _cos_sin_about, boost_momenta, composition_rotations, wigner_angle_closed_form
from .spin import PAULI, SettingVector, rodrigues, spin_operator
from .state import NORM_TOL, FrameAState, FrameCState, norm

TSIRELSON = 2.0 * np.sqrt(2.0)
MODES = ("naive", "coherent")


@dataclass(frozen=True)
class CorrelationTensor:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.shape != (3, 3):
            raise DomainError("correlation tensor must be 3x3")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __matmul__(self, other):
        return self.entries @ np.asarray(other, dtype=float)

    @property
    def singular_values(self):
        return np.linalg.svd(self.entries, compute_uv=False)


def _setting(v):
    return v if isinstance(v, SettingVector) else SettingVector(v)


@dataclass(frozen=True)
class BellSettings:
    x1: SettingVector
    x2: SettingVector
    y1: SettingVector
    y2: SettingVector
    mode: str = "naive"

    def __post_init__(self):
        for name in ("x1", "x2", "y1", "y2"):
            object.__setattr__(self, name, _setting(getattr(self, name)))
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")

    @classmethod
    def optimal_singlet(cls, mode="naive"):
        """x1 = (0,1,1)/sqrt2, x2 = (0,1,-1)/sqrt2, y1 = e_y, y2 = e_z."""
        r = 1.0 / np.sqrt(2.0)
        return cls((0.0, r, r), (0.0, r, -r), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), mode)

    def with_mode(self, mode):
        return BellSettings(self.x1, self.x2, self.y1, self.y2, mode)

    def as_array(self):
        return np.stack([self.x1.direction, self.x2.direction, self.y1.direction, self.y2.direction])


@dataclass(frozen=True)
class ChshResult:
    E11: float
    E12: float
    E21: float
    E22: float
    S: float
    frame: str
    mode: str

    @property
    def violation(self):
        return abs(self.S) > 2.0


def _require_normalised(state):
    n = norm(state)
    if abs(n - 1.0) > NORM_TOL:
        raise DomainError(f"state is not normalised: norm = {n!r}")


# KRON_PAULI[k, l] = sigma^k (x) sigma^l as a 4x4 matrix on the (a, b) spin pair
KRON_PAULI = np.einsum("kpa,lqb->klpqab", PAULI, PAULI).reshape(3, 3, 4, 4)


def _pair_density(state):
    """Weighted two-spin density per momentum pair, ``rho[i, j, (a b), (a' b')]``."""
    amps = state.psi.reshape(4, *state.psi.shape[2:]) * np.sqrt(state.weights)
    return np.einsum("sij,tij->ijst", amps, amps.conj())


def _correlations_from_density(rho):
    # <sigma^k (x) sigma^l> = Tr(rho K_kl) = sum_st rho[s, t] K_kl[t, s]
    flat = rho.reshape(*rho.shape[:-2], 16)
    ops = np.swapaxes(KRON_PAULI, -1, -2).reshape(9, 16)
    return (flat @ ops.T).real.reshape(*rho.shape[:-2], 3, 3)


def pair_correlations(state):
    """Weighted spin correlations per momentum pair, shape ``(n1, n2, 3, 3)``.

    ``K[i, j, k, l] = w_ij <psi_ij| sigma^k (x) sigma^l |psi_ij>``; summing over
    pairs gives the correlation tensor.
    """
    return _correlations_from_density(_pair_density(state))


def _total_correlations(state):
    amps = state.psi.reshape(4, -1) * np.sqrt(state.weights).reshape(-1)
    return _correlations_from_density(amps @ amps.conj().T)


def _z_rotations(cos_w, sin_w):
    rot = np.zeros(np.shape(cos_w) + (3, 3))
    rot[..., 0, 0] = cos_w
    rot[..., 0, 1] = -sin_w
    rot[..., 1, 0] = sin_w
    rot[..., 1, 1] = cos_w
    rot[..., 2, 2] = 1.0
    return rot


def effective_tensor(state, mode="naive"):
    """Tensor ``T`` with ``E(x, y) = x . T . y`` for the given frame and mode.

    In coherent mode B's setting at each pair is ``R_ij y``, so the pair
    contributions are ``K_ij R_ij``.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    if isinstance(state, FrameAState) and mode == "coherent":
        raise ConfigurationError("coherent settings are defined only for laboratory-frame states")
    if mode == "naive" or state.kind == "collinear":
        return CorrelationTensor(_total_correlations(state))
    k = pair_correlations(state)
    rot = _z_rotations(state.wigner_cos, state.wigner_sin)
    return CorrelationTensor(np.einsum("ijkl,ijlm->km", k, rot, optimize=True))


def correlation_tensor_frame_a(state: FrameAState) -> CorrelationTensor:
    """``T^ij = <psi| sigma^i_A (x) Xi^j_B (x) 1_C |psi>`` in A's rest frame."""
    if not isinstance(state, FrameAState):
        raise DomainError("expected a FrameAState")
    _require_normalised(state)
    return effective_tensor(state, "naive")


def expectation(state, x, y, mode="naive"):
    """Expectation of the joint spin observable with settings ``x`` (A) and ``y`` (B).

    Frame A: ``x.sigma (x) y.Xi``.  Laboratory frame: ``x.Xi_A (x) y.Xi_B`` in
    naive mode, or with ``y`` replaced by the Wigner-rotated setting at each
    momentum pair in coherent mode.
    """
    x, y = _setting(x), _setting(y)
    _require_normalised(state)
    t = effective_tensor(state, mode)
    return float(x.direction @ t.entries @ y.direction)


def _chsh_from_tensor(t, settings, frame):
    e = {
        (i, j): float(xv.direction @ t @ yv.direction)
        for i, xv in ((1, settings.x1), (2, settings.x2))
        for j, yv in ((1, settings.y1), (2, settings.y2))
    }
    s = e[1, 1] + e[1, 2] + e[2, 1] - e[2, 2]
    return ChshResult(e[1, 1], e[1, 2], e[2, 1], e[2, 2], s, frame, settings.mode)


def chsh(state, settings: BellSettings) -> ChshResult:
    """``S = E(x1,y1) + E(x1,y2) + E(x2,y1) - E(x2,y2)``."""
    _require_normalised(state)
    frame = "A" if isinstance(state, FrameAState) else "C"
    t = effective_tensor(state, settings.mode).entries
    return _chsh_from_tensor(t, settings, frame)


def horodecki_bound(t):
    """Maximal CHSH value ``2 sqrt(t1^2 + t2^2)`` from the two largest singular values."""
    t = t.entries if isinstance(t, CorrelationTensor) else np.asarray(t, dtype=float)
    s = np.linalg.svd(t, compute_uv=False)
    return float(2.0 * np.sqrt(s[0] ** 2 + s[1] ** 2))


def _unit_or_any(v, fallback):
    n = np.linalg.norm(v)
    return v / n if n > 1e-300 else fallback


def _chsh_value(t, x1, x2, y1, y2):
    return x1 @ t @ (y1 + y2) + x2 @ t @ (y1 - y2)


def optimal_settings(t, n_starts=8, seed=0, tol=1e-12, max_iter=10_000):
    """Maximise ``|S|`` over unit settings by alternating exact maximisation.

    For fixed ``y1, y2`` the best ``x1, x2`` are the normalised images
    ``T(y1 + y2)`` and ``T(y1 - y2)``; symmetrically for fixed ``x``.  The
    ascent is restarted ``n_starts`` times from random settings.

    Returns ``(BellSettings, |S|)``.
    """
    t = t.entries if isinstance(t, CorrelationTensor) else np.asarray(t, dtype=float)
    rng = np.random.default_rng(seed)
    best = (-1.0, None)
    for _ in range(n_starts):
        y1, y2 = (_unit_or_any(v, np.array([0.0, 0.0, 1.0])) for v in rng.normal(size=(2, 3)))
        x1, x2 = (_unit_or_any(v, np.array([1.0, 0.0, 0.0])) for v in rng.normal(size=(2, 3)))
        value = _chsh_value(t, x1, x2, y1, y2)
        for _ in range(max_iter):
            x1 = _unit_or_any(t @ (y1 + y2), x1)
            x2 = _unit_or_any(t @ (y1 - y2), x2)
            y1 = _unit_or_any(t.T @ (x1 + x2), y1)
            y2 = _unit_or_any(t.T @ (x1 - x2), y2)
            new = _chsh_value(t, x1, x2, y1, y2)
            if new - value <= tol * max(abs(new), 1.0):
                value = new
                break
            value = new
        if value > best[0]:
            best = (value, (x1, x2, y1, y2))
    value, (x1, x2, y1, y2) = best
    return BellSettings(x1, x2, y1, y2), float(abs(value))


# ancilla protocol ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AncillaRegister:
    """Ancilla M holding a copy of A's laboratory momentum.

    ``momenta[m]`` are the momentum values M can carry and ``source[i_A]`` is
    the M label written when A has momentum index ``i_A``.
    """

    momenta: np.ndarray
    source: np.ndarray

    @classmethod
    def perfect_copy(cls, state: FrameCState):
        return cls(np.array(state.p_A, dtype=float), np.arange(len(state.p_A)))


def lab_rotated_settings(y, p_M, m_A, p_B, m_B):
    """Bob's setting ``y^R`` computed only from laboratory momenta ``p_M`` and ``p_B``.

    The Wigner cosine uses the closed form in laboratory variables; its sign
    about ``e_z`` comes from re-composing the boosts from those momenta.
    """
    p_M = np.broadcast_to(p_M, np.shape(p_B))
    # B's momentum in A's frame, recovered from the laboratory labels
    _, pi_B = boost_momenta(-p_M, m_A, p_B, m_B)
    rot, _ = composition_rotations(p_M, m_A, pi_B, m_B)
    _, sin_w = _cos_sin_about(rot[..., 1:, 1:], E_Z)
    cos_w = np.clip(wigner_angle_closed_form(p_M, m_A, p_B, m_B), -1.0, 1.0)
    return rodrigues(np.asarray(y, dtype=float), E_Z, cos_w, sin_w)


def expectation_with_ancilla(state: FrameCState, x, y, ancilla=None):
    """Factorised laboratory observable ``(x.Xi_A) (x) (y^R(p_M, p_B).Xi_B)``.

    The state is extended by an ancilla M correlated with A's momentum; Bob's
    setting depends only on his own particle and on M.
    """
    if not isinstance(state, FrameCState):
        raise DomainError("expected a FrameCState")
    if state.kind != "noncollinear":
        raise ConfigurationError("the ancilla protocol applies to non-collinear laboratory states")
    x, y = _setting(x), _setting(y)
    _require_normalised(state)
    ancilla = ancilla or AncillaRegister.perfect_copy(state)
    m_A, m_B = state.masses.m_A, state.masses.m_B
    # extended amplitudes psi[a, b, i_A, i_B] delta(m, source[i_A]); M is diagonal in the observable
    p_M = ancilla.momenta[ancilla.source][:, None, :]
    y_rot = lab_rotated_settings(y.direction, p_M, m_A, state.p_B, m_B)
    alice = spin_operator(x.direction)
    bob = spin_operator(y_rot)
    value = np.einsum(
        "pqij,pa,ijqb,abij,ij->", state.psi.conj(), alice, bob, state.psi, state.weights, optimize=True
    )
    return float(value.real)


def chsh_with_ancilla(state, settings: BellSettings, ancilla=None) -> ChshResult:
    e = {
        (i, j): expectation_with_ancilla(state, xv, yv, ancilla)
        for i, xv in ((1, settings.x1), (2, settings.x2))
        for j, yv in ((1, settings.y1), (2, settings.y2))
    }
    s = e[1, 1] + e[1, 2] + e[2, 1] - e[2, 2]
    return ChshResult(e[1, 1], e[1, 2], e[2, 1], e[2, 2], s, "C", "coherent")


def random_unit_vectors(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_settings(rng, mode="naive"):
    return BellSettings(*random_unit_vectors(rng, 4), mode=mode)


def mean_wigner_cosine(state: FrameCState):
    """Probability-weighted mean of ``cos W`` over momentum pairs."""
    prob = np.sum(np.abs(state.psi) ** 2, axis=(0, 1)) * state.weights
    return float(np.sum(prob * state.wigner_cos) / np.sum(prob))
