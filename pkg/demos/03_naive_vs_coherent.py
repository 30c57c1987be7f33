# C moves perpendicular to B.  Fixed settings lose violation; rotated ones recover it.
import numpy as np

from qrfbell import BellSettings, Masses, assemble_frame_a_state, build_grid, chsh, gaussian_packet, transform_to_lab
from qrfbell.bell import mean_wigner_cosine
from qrfbell.state import SINGLET, direction_at_angle, superpose

masses = Masses(1.0, 1.0, 1.0)
grid_B = build_grid(1.0, np.array([1.0, 0, 0]), 0.0, 3.0, 128)
grid_C = build_grid(1.0, direction_at_angle(np.pi / 2), 0.0, 4.0, 128)

eta = gaussian_packet(grid_B, 1.5, 0.2)
# two peaks for C: slow and fast
phi = superpose([gaussian_packet(grid_C, 0.8, 0.15), gaussian_packet(grid_C, 2.6, 0.2)])
state = assemble_frame_a_state(SINGLET, eta, phi, masses)
lab = transform_to_lab(state)

naive = chsh(lab, BellSettings.optimal_singlet("naive")).S
coherent = chsh(lab, BellSettings.optimal_singlet("coherent")).S
c = mean_wigner_cosine(lab)

print(f"<cos W>           = {c:.6f}")
print(f"naive |S|         = {abs(naive):.10f}")
print(f"sqrt2 (1 + <cos>) = {np.sqrt(2) * (1 + c):.10f}")
print(f"coherent |S|      = {abs(coherent):.10f}")
