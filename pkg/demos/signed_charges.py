"""Representing states as mixtures of product states.

The maximally mixed state is an ordinary mixture. The Bell state has only
signed representations: some weight is always negative.
"""

import numpy as np

from pcoherent import quasiprob

rho_e = 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]])

box = quasiprob.box1_charge()
print("shipped charge: weights", np.round(box.weights, 4))
print("  largest moment error", np.abs(quasiprob.charge_moment_matrix(box) - rho_e).max())

mins = [quasiprob.fit_signed_charge(rho_e, (2, 2), 20, seed).min_weight for seed in range(50)]
print(f"least-squares fits of the Bell state: min weight ranges over [{min(mins):.3f}, {max(mins):.3f}]")

mixed = np.eye(4) / 4
hits = sum(quasiprob.nonnegative_charge(mixed, (2, 2), 64, seed) is not None for seed in range(100))
print("nonnegative charges found for I/4:", hits, "of 100 samples")
print("nonnegative charge for the Bell state:", quasiprob.nonnegative_charge(rho_e, (2, 2), 64, 0))
