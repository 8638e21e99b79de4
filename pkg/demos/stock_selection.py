"""Pruning near-duplicate stocks with low-eigenvalue principal components."""

import numpy as np

from divmetrics import CorrelationMatrix, SelectionCriteria, select_stocks

# A principal component with a small eigenvalue is a combination of stocks
# that barely moves: its members duplicate each other. Each such component
# (eigenvalue < 0.7) marks its largest-loading stock for deletion, rounds
# repeat until the smallest eigenvalue reaches 0.5.

# Two independent pairs of near-duplicates. Each pair contributes one
# low eigenvalue (1 - 0.9 = 0.1), so one member of each pair is deleted
# in a single round and the survivors are uncorrelated.
values = np.array([
    [1.0, 0.9, 0.0, 0.0],
    [0.9, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.9],
    [0.0, 0.0, 0.9, 1.0],
])
matrix = CorrelationMatrix(("BHP", "RIO", "CBA", "WBC"), values)
result = select_stocks(matrix, SelectionCriteria())
print("two pairs -> retained:", result.retained)
for i, deleted in enumerate(result.deleted_per_round, start=1):
    print(f"  round {i} deleted {deleted}")
print("  final smallest eigenvalue:", round(result.final_min_eigenvalue, 4))

# Larger blocks work the same way: a block of s near-duplicates carries
# s - 1 small eigenvalues and ends up represented by a single survivor.
sizes = (2, 3, 4)
p = sum(sizes)
values = np.eye(p)
j = 0
for s in sizes:
    values[j:j + s, j:j + s] = 0.95
    j += s
np.fill_diagonal(values, 1.0)
tickers = tuple(f"S{i}" for i in range(p))
result = select_stocks(CorrelationMatrix(tickers, values), SelectionCriteria())
print(f"\nblocks of sizes {sizes} -> retained {result.retained}")
print("  rounds:", result.rounds)

# A weakly correlated universe is left untouched: no eigenvalue falls
# below the deletion threshold.
values = np.full((5, 5), 0.1)
np.fill_diagonal(values, 1.0)
result = select_stocks(CorrelationMatrix(tuple("ABCDE"), values),
                       SelectionCriteria())
print("\nweakly correlated -> retained:", result.retained,
      "(nothing deleted)")
