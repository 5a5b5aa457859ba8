"""A real-polynomial analogue of entanglement.

The Motzkin-type polynomial m is positive but no sum of squares, so a PSD
moment matrix can price the negative gamble -m above zero.
"""

from pcoherent import sos

m = sos.motzkin()
Z = sos.ze_matrix()

print("grid minimum of m:", sos.grid_min(m), "(26/27 =", 26 / 27, ")")
print("L(-m) under Z_e:", sos.lb_evaluate(Z, -m))

w = sos.exact_non_sos_witness(m)
print(f"exact argument: Gram entry for x1^{w.monomial[0]} x2^{w.monomial[1]} is forced to {w.value}")

r = sos.gram_sos_feasible(m)
print("SDP: sum of squares?", r.sos, " margin", r.margin)
print("marginal moment matrix of x1:\n", sos.marginal_moment_matrix(Z, 1))
