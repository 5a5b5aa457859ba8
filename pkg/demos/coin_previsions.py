"""Buying and selling prices for a coin toss, and a Dutch book.

Outcomes are (heads, tails); the query gamble pays 1 on tails.
"""

import numpy as np

from pcoherent import classical

f = np.array([0.0, 1.0])

# accepting "even odds either way" pins the price of tails at 1/2
even = classical.AssessmentSet([[-1, 1], [1, -1]], labels=["heads", "tails"])
print("even odds:", classical.lower_prevision(even, f), classical.upper_prevision(even, f))

# accepting only 10:1 odds leaves an interval of prices
wide = classical.AssessmentSet([[-0.1, 1], [1, -0.1]], labels=["heads", "tails"])
lo = classical.solve_lower_prevision(wide, f)
print("10:1 odds: lower", lo.value, "upper", classical.upper_prevision(wide, f))
print("  lower price attained by the pmf", lo.pmf)

# three assessments that together lose money whatever happens
bad = classical.AssessmentSet([[-1, 1], [1.5, -1], [-2, 0.5]], labels=["heads", "tails"])
book = classical.dutch_book(bad)
print("incoherent:", not bad.is_coherent)
print("  stakes", book.coefficients, "combined payoff", book.combined)
