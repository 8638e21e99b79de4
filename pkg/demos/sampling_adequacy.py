"""The KMO statistic as a co-movement gauge on panels with known structure."""

import numpy as np

from divmetrics import (
    CorrelationMatrix,
    correlation_matrix,
    equicorrelated_returns,
    kmo,
    partial_correlations,
)

# KMO compares squared correlations against squared partial correlations:
# near 1 when a few common factors drive everything (partials vanish),
# near 0 when each pair's correlation is idiosyncratic.

# Two variables first. Whatever the correlation r, the only partial
# correlation equals r itself, so KMO is exactly 1/2.
for r in (0.1, 0.5, 0.9):
    m = CorrelationMatrix(("A", "B"), np.array([[1.0, r], [r, 1.0]]))
    print(f"p=2, r={r}: KMO = {kmo(m):.6f}")

# Equicorrelated matrices have a closed form. For p=3 the statistic is
# 9/13 = 0.6923 at every rho, because correlations and partials scale
# together.
for rho in (0.2, 0.5, 0.8):
    values = np.full((3, 3), rho)
    np.fill_diagonal(values, 1.0)
    m = CorrelationMatrix(("A", "B", "C"), values)
    q = partial_correlations(m)
    print(f"p=3, rho={rho}: partial = {q.values[0, 1]:.4f}, KMO = {kmo(m):.6f}")

# On sampled data the statistic grows with the panel dimension when a
# single factor is at work: partials shrink as more variables explain
# each pair's link.
for n in (3, 10, 30):
    panel = equicorrelated_returns(n, 2000, rho=0.4, vol=0.02, seed=5)
    print(f"sampled n={n:2d}, rho=0.4: KMO = {kmo(correlation_matrix(panel)):.4f}")
