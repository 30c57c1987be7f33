import numpy as np

from qrfbell.state import SINGLET, Masses, assemble_frame_a_state, build_grid, direction_at_angle, gaussian_packet

EX = np.array([1.0, 0.0, 0.0])


def make_state(xi=np.pi / 2, n=32, masses=(1.0, 1.0, 3.0), c=SINGLET, eta=(0.5, 0.15), phi=(0.8, 0.3)):
    """Frame-A state with B along e_x and C at angle ``xi`` in the xy-plane."""
    masses = Masses(*masses)
    gB = build_grid(masses.m_B, EX, eta[0] - 6 * eta[1], eta[0] + 6 * eta[1], n)
    gC = build_grid(masses.m_C, direction_at_angle(xi), phi[0] - 6 * phi[1], phi[0] + 6 * phi[1], n)
    return assemble_frame_a_state(c, gaussian_packet(gB, *eta), gaussian_packet(gC, *phi), masses)
