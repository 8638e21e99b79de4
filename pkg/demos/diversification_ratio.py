"""The diversification ratio of 1/N portfolios under simple covariance models."""

import numpy as np

from divmetrics import CovarianceMatrix, diversification_ratio, equal_weights

# DR = weighted average volatility / portfolio volatility. It is 1 when
# nothing diversifies (one asset, or perfect correlation) and sqrt(n)
# when n equal-volatility assets are uncorrelated.

single = CovarianceMatrix(("A",), np.array([[0.04]]))
print("single asset:", diversification_ratio(equal_weights(("A",)), single))

print("\nuncorrelated equal-vol universes")
for n in (2, 4, 9, 16):
    tickers = tuple(f"T{j}" for j in range(n))
    s = CovarianceMatrix(tickers, 0.04 * np.eye(n))
    dr = diversification_ratio(equal_weights(tickers), s)
    print(f"  n={n:2d}: DR = {dr:.6f}  (sqrt(n) = {np.sqrt(n):.6f})")

# Perfect correlation gives no diversification regardless of vol levels:
# sigma = 10% and 30%, rho = 1.
s = CovarianceMatrix(("A", "B"), np.array([[0.01, 0.03], [0.03, 0.09]]))
print("\nperfectly correlated pair:",
      diversification_ratio(equal_weights(("A", "B")), s))

# In between: equal vols at correlation rho give DR = sqrt(2 / (1 + rho)).
print("\nequal-vol pair by correlation")
for rho in (0.0, 0.25, 0.5, 0.75, 1.0 - 1e-12):
    s = CovarianceMatrix(("A", "B"),
                         0.04 * np.array([[1.0, rho], [rho, 1.0]]))
    dr = diversification_ratio(equal_weights(("A", "B")), s)
    print(f"  rho={rho:.2f}: DR = {dr:.6f}")
