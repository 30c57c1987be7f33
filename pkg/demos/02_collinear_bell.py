# Singlet with all motion along one axis: CHSH is the same in A's frame and the lab.
import numpy as np

from qrfbell import BellSettings, Masses, assemble_frame_a_state, build_grid, chsh, gaussian_packet, transform_to_lab
from qrfbell.state import SINGLET

masses = Masses(1.0, 1.0, 1000.0)
ex = np.array([1.0, 0, 0])
grid_B = build_grid(1.0, ex, -0.5, 1.5, 256)
grid_C = build_grid(1000.0, ex, -3000, -1000, 256)

state = assemble_frame_a_state(SINGLET, gaussian_packet(grid_B, 0.5, 0.1), gaussian_packet(grid_C, -2000, 100), masses)
settings = BellSettings.optimal_singlet()

print("frame A  S =", chsh(state, settings).S)
lab = transform_to_lab(state)
print("frame C  S =", chsh(lab, settings).S)
print("2 sqrt 2   =", 2 * np.sqrt(2))
