# Naive CHSH against C's speed, for the sharp perpendicular singlet.
import numpy as np

from qrfbell import BellSettings, Masses, assemble_frame_a_state, build_grid, chsh, transform_to_lab
from qrfbell.state import SINGLET, sharp_packet

naive = BellSettings.optimal_singlet("naive")
p_B = 1.0
grid_B = build_grid(1.0, np.array([1.0, 0, 0]), p_B, p_B + 1, 2)

print(f"{'beta_C':>8} {'cos W':>12} {'naive |S|':>12}")
for beta in np.linspace(0.0, 0.99, 12):
    p = max(beta / np.sqrt(1 - beta**2), 1e-9)
    grid_C = build_grid(1.0, np.array([0, 1.0, 0]), p, p + 1, 2)
    state = assemble_frame_a_state(SINGLET, sharp_packet(grid_B, 0), sharp_packet(grid_C, 0), Masses(1, 1, 1))
    lab = transform_to_lab(state)
    print(f"{beta:8.3f} {lab.wigner_cos[0, 0]:12.8f} {abs(chsh(lab, naive).S):12.8f}")
