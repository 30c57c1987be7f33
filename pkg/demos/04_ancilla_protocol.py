# Bob reads A's momentum off an ancilla and rotates his setting locally.
import numpy as np

from qrfbell import BellSettings, Masses, assemble_frame_a_state, build_grid, chsh, gaussian_packet, transform_to_lab
from qrfbell.bell import AncillaRegister, chsh_with_ancilla
from qrfbell.state import SINGLET, direction_at_angle

masses = Masses(1.0, 1.0, 1.0)
grid_B = build_grid(1.0, np.array([1.0, 0, 0]), 0.0, 3.0, 96)
grid_C = build_grid(1.0, direction_at_angle(1.2), 0.0, 4.0, 96)
state = assemble_frame_a_state(SINGLET, gaussian_packet(grid_B, 1.5, 0.2), gaussian_packet(grid_C, 2.0, 0.3), masses)
lab = transform_to_lab(state)

settings = BellSettings.optimal_singlet("coherent")
print("coherent observable     S =", chsh(lab, settings).S)
print("ancilla, perfect copy   S =", chsh_with_ancilla(lab, settings).S)

# an ancilla stuck at zero momentum gives Bob the wrong rotation
stale = AncillaRegister(np.zeros_like(lab.p_A), np.arange(len(lab.p_A)))
print("ancilla, stale record   S =", chsh_with_ancilla(lab, settings, stale).S)
print("naive fixed settings    S =", chsh(lab, settings.with_mode("naive")).S)
