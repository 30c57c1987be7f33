# Compose two perpendicular boosts and look at the leftover rotation.
import numpy as np

from qrfbell.lorentz import pure_boost_matrix, wigner_angle_closed_form, wigner_from_composition

beta = 0.6
p = beta / np.sqrt(1 - beta**2)          # momentum for unit mass

L_C = pure_boost_matrix([0, -p, 0], 1.0)  # lab boost, C moving along +y
L_B = pure_boost_matrix([p, 0, 0], 1.0)   # B moving along +x in A's frame
total = L_C @ L_B
print("composite boost is not symmetric:", not np.allclose(total.entries, total.entries.T))

p_lab, rot = wigner_from_composition([0, -p, 0], 1.0, [p, 0, 0], 1.0)
print("B's lab momentum:", p_lab.momentum)
print("axis:", rot.axis, " angle (rad):", rot.angle)
print("cos W =", rot.cos, " (40/41 =", 40 / 41, ")")

# the closed form needs only the two momenta
print("closed form cos W =", wigner_angle_closed_form(np.array([p, 0, 0]), 1.0, np.array([0, p, 0]), 1.0))

# angle grows with speed
for b in (0.1, 0.5, 0.9, 0.99, 0.999):
    q = b / np.sqrt(1 - b**2)
    _, r = wigner_from_composition([0, -q, 0], 1.0, [q, 0, 0], 1.0)
    print(f"beta = {b:<6} |W| = {abs(r.angle):.6f} rad")
