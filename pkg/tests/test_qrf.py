import numpy as np
import pytest

from helpers import EX, make_state
from oracles import su2_z, wigner_expm
from qrfbell import qrf
from qrfbell.errors import ConfigurationError, ConsistencyError, DomainError
from qrfbell.qrf import (
    QrfTransform,
    inverse_transform,
    lab_frame_wigner_cosines,
    on_shell_residual,
    oracle_discrepancy,
    transform_single_particle,
    transform_to_lab,
    transform_to_lab_collinear,
    transform_to_lab_noncollinear,
)
from qrfbell.state import Masses, build_grid, gaussian_packet, inner, norm, random_frame_a_state


def test_single_particle_relabel():
    g = build_grid(10.0, EX, -5, 5, 64)
    phi = gaussian_packet(g, 1.0, 0.5)
    c = np.array([0.6, 0.8j])
    out = transform_single_particle(c, phi, 2.0)
    np.testing.assert_allclose(out.momenta[:, 0], -0.2 * g.samples)
    assert norm(out) == pytest.approx(1.0, abs=1e-13)
    np.testing.assert_allclose(out.psi[1], 0.8j * phi.amplitudes)
    with pytest.raises(DomainError):
        transform_single_particle([1.0, 1.0], phi, 2.0)


def test_collinear_is_relabelling():
    s = make_state(xi=0.0)
    lab = transform_to_lab_collinear(s)
    np.testing.assert_array_equal(lab.psi, np.transpose(s.psi, (0, 1, 3, 2)))
    np.testing.assert_allclose(lab.p_A, -(1 / 3) * s.grid_C.vectors)
    assert lab.kind == "collinear"
    assert on_shell_residual(lab) < 1e-14
    with pytest.raises(ConfigurationError):
        transform_to_lab_noncollinear(s)


def test_noncollinear_rejected_by_collinear_map():
    with pytest.raises(ConfigurationError):
        transform_to_lab_collinear(make_state())


def test_noncollinear_matches_oracle_rotation():
    s = make_state(xi=2.0, n=8)
    lab = transform_to_lab_noncollinear(s, check_oracle=True)
    for iC, pC in enumerate(s.grid_C.vectors):
        for iB, pB in enumerate(s.grid_B.vectors):
            cos_w, sin_w, p_lab = wigner_expm(pB, 1.0, pC, 3.0)
            expected = np.einsum("cb,abk->ack", su2_z(cos_w, sin_w), s.psi[:, :, iB, iC][..., None])[..., 0]
            np.testing.assert_allclose(lab.psi[:, :, iC, iB], expected, atol=1e-12)
            np.testing.assert_allclose(lab.p_B[iC, iB], p_lab, atol=1e-12)


def test_lab_momenta_are_on_shell_and_recover_wigner():
    lab = transform_to_lab(make_state(xi=1.2))
    assert on_shell_residual(lab) < 1e-14
    np.testing.assert_allclose(lab_frame_wigner_cosines(lab), lab.wigner_cos, atol=1e-12)


@pytest.mark.parametrize("kind", ["product", "general", "correlated"])
def test_unitarity_and_round_trip(kind):
    rng = np.random.default_rng(11)
    base = make_state(xi=1.0, n=24)
    for _ in range(10):
        a = random_frame_a_state(rng, base.grid_B, base.grid_C, base.masses, kind=kind)
        b = random_frame_a_state(rng, base.grid_B, base.grid_C, base.masses, kind=kind)
        la, lb = transform_to_lab(a), transform_to_lab(b)
        assert abs(inner(la, lb) - inner(a, b)) < 1e-12
        assert abs(norm(la) - 1) < 1e-12
        back = inverse_transform(la)
        assert np.abs(back.psi - a.psi).max() < 1e-12


def test_inverse_checks_momentum_tables():
    lab = transform_to_lab(make_state())
    tampered = type(lab)(lab.psi, lab.grid_B, lab.grid_C, lab.masses, lab.p_A * 1.01, lab.p_B,
                         lab.energy_B, lab.wigner_cos, lab.wigner_sin, lab.kind)
    with pytest.raises(ConfigurationError):
        inverse_transform(tampered)


def test_requires_xy_plane():
    s = make_state()
    gC = build_grid(3.0, np.array([0, 0.6, 0.8]), 0.2, 1.4, 32)
    bad = type(s)(np.zeros((2, 2, 32, 32)), s.grid_B, gC, s.masses)
    with pytest.raises(ConfigurationError):
        transform_to_lab_noncollinear(bad)


def test_oracle_gap_small_and_check_triggers(monkeypatch):
    s = make_state(masses=(1.0, 1.0, 1000.0), phi=(500.0, 100.0))
    assert oracle_discrepancy(s) < 1e-12
    monkeypatch.setattr(qrf, "oracle_discrepancy", lambda state: 1e-6)
    with pytest.raises(ConsistencyError):
        transform_to_lab_noncollinear(s, check_oracle=True)


def test_transform_object():
    s = make_state()
    t = QrfTransform.for_state(s, method="oracle")
    assert t.kind == "two_particle_noncollinear"
    lab = t.apply(s)
    np.testing.assert_allclose(lab.psi, transform_to_lab(s).psi, atol=1e-12)
    assert np.abs(t.inverse(lab).psi - s.psi).max() < 1e-12
    assert QrfTransform.for_state(make_state(xi=0.0)).kind == "two_particle_collinear"
