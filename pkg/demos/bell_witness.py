"""The Bell state seen through gambles.

A gamble built from H is desirable for an agent holding the Bell state, yet
negative on every product state: in the classical reading this agent is
sure to lose, while in the quantum one they are rational.
"""

import numpy as np

from pcoherent import entanglement, linalg, quantum

rho_e = 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]])
H = np.array([[0, 0, 0, 1], [0, -2, 1, 0], [0, 1, -2, 0], [1, 0, 0, 0]])
h = quantum.HermitianGamble(H, (2, 2))

print("spectrum of H:", np.round(linalg.eigvalsh(H), 12))
print("Tr(H rho_e) =", np.trace(H @ rho_e))

r = entanglement.witness_check(h, rho_e, epsilon=0.5)
print(f"H - I/2: expectation {r.trace_value:.6f}, best product value {r.product_max:.6f}")
print("  desirable yet negative on product states:", r.condition_holds)

# the agent who knows only the Bell state prices H at exactly 1
pinned = quantum.pin_state_assessments(rho_e, (2, 2))
print("lower price of H given the state:", round(quantum.lower_prevision_sdp(pinned, H), 7))

# a witness from the partial transpose
ppt = entanglement.ppt_check(rho_e, (2, 2))
W = entanglement.witness_from_ppt(rho_e, (2, 2))
print("partial transpose min eigenvalue:", ppt.min_eigenvalue, " Tr(rho_e W) =", np.trace(rho_e @ W.G).real)

# CHSH: product states stay at sqrt2, the Bell state reaches 2 sqrt2
b = entanglement.bell_gap_report(entanglement.BOX2_ANGLES, rho_e)
print(f"CHSH: product max {b.product_max:.6f} <= {b.classical_bound} < quantum {b.quantum_value:.6f}")
