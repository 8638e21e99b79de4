"""Iterative PCA-based stock selection.

Each round decomposes the correlation matrix of the currently retained
stocks. Every principal component whose eigenvalue falls below the
deletion threshold points at one redundant stock (the one with the
largest absolute loading on it); all stocks so marked are deleted
together and the procedure repeats until the smallest eigenvalue reaches
the stop threshold or the retained set hits the floor. What is left is a
subset whose members carry close to independent information.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .matrix_stats import CorrelationMatrix
from .pca import Spectrum, correlation_spectrum

__all__ = [
    "SelectionCriteria",
    "SelectionResult",
    "marked_for_deletion",
    "select_stocks",
    "result_to_json",
]


@dataclass(frozen=True)
class SelectionCriteria:
    """Eigenvalue thresholds and the retained-set floor.

    A component with eigenvalue below ``deletion_threshold`` marks a
    stock for deletion; the loop stops once the smallest eigenvalue is at
    least ``stop_threshold``. Requiring stop <= deletion guarantees every
    non-stopping round deletes at least one stock, so the loop terminates.
    """

    deletion_threshold: float = 0.7
    stop_threshold: float = 0.5
    min_retained: int = 2

    def __post_init__(self):
        if not (0.0 < self.stop_threshold <= self.deletion_threshold):
            raise ValidationError(
                f"need 0 < stop_threshold <= deletion_threshold, got "
                f"stop={self.stop_threshold}, deletion={self.deletion_threshold}"
            )
        if self.min_retained < 2:
            raise ValidationError("min_retained must be at least 2")


@dataclass(frozen=True)
class SelectionResult:
    retained: tuple[str, ...]
    deleted_per_round: tuple[tuple[str, ...], ...]
    rounds: int
    final_min_eigenvalue: float

    def __post_init__(self):
        object.__setattr__(self, "retained", tuple(self.retained))
        object.__setattr__(
            self, "deleted_per_round",
            tuple(tuple(r) for r in self.deleted_per_round),
        )
        if self.rounds != len(self.deleted_per_round):
            raise ValidationError("rounds must equal len(deleted_per_round)")
        deleted = [t for r in self.deleted_per_round for t in r]
        everything = list(self.retained) + deleted
        if len(set(everything)) != len(everything):
            raise ValidationError("retained and deleted tickers must be disjoint")

    @property
    def n_selected(self) -> int:
        return len(self.retained)


def marked_for_deletion(
    spectrum: Spectrum,
    tickers: tuple[str, ...],
    deletion_threshold: float,
) -> tuple[str, ...]:
    """Tickers marked by components with eigenvalue below the threshold.

    Components are scanned from the smallest eigenvalue upward, so the
    most redundant component marks first; a stock marked by several
    components appears once. On an exact |loading| tie within a component
    the highest-index ticker is marked, which keeps the lowest-index one.
    """
    if spectrum.p != len(tickers):
        raise ValidationError(
            f"spectrum is {spectrum.p}-dimensional but there are {len(tickers)} tickers"
        )
    marked: list[str] = []
    seen = set()
    for k in range(spectrum.p - 1, -1, -1):
        if not spectrum.eigenvalues[k] < deletion_threshold:
            break
        loadings = np.abs(spectrum.eigenvectors[:, k])
        tied = np.nonzero(loadings == loadings.max())[0]
        ticker = tickers[int(tied[-1])]
        if ticker not in seen:
            seen.add(ticker)
            marked.append(ticker)
    return tuple(marked)


def select_stocks(
    r: CorrelationMatrix,
    criteria: SelectionCriteria = SelectionCriteria(),
    initial_spectrum: Spectrum | None = None,
) -> SelectionResult:
    """Run the deletion loop to convergence and record every round.

    ``initial_spectrum`` may pass in a precomputed spectrum of ``r`` to
    avoid decomposing the same matrix twice.

    When a round marks more stocks than the min_retained floor allows,
    the marked list is truncated in marking order (most redundant
    component first), so the floor is reached rather than crossed.
    """
    working = r
    spectrum = initial_spectrum
    if spectrum is None:
        spectrum = correlation_spectrum(working)
    elif spectrum.p != r.p:
        raise ValidationError("initial_spectrum does not match the matrix")
    deleted_rounds: list[tuple[str, ...]] = []
    while True:
        if float(spectrum.eigenvalues[-1]) >= criteria.stop_threshold:
            break
        if working.p <= criteria.min_retained:
            break
        marked = marked_for_deletion(
            spectrum, working.tickers, criteria.deletion_threshold
        )
        marked = marked[: working.p - criteria.min_retained]
        if not marked:  # unreachable while stop <= deletion; guards the loop
            break
        position = {t: i for i, t in enumerate(working.tickers)}
        deleted_rounds.append(tuple(sorted(marked, key=position.__getitem__)))
        dropped = set(marked)
        keep = [i for i, t in enumerate(working.tickers) if t not in dropped]
        working = working.restrict(keep)
        spectrum = correlation_spectrum(working)
    return SelectionResult(
        retained=working.tickers,
        deleted_per_round=tuple(deleted_rounds),
        rounds=len(deleted_rounds),
        final_min_eigenvalue=float(spectrum.eigenvalues[-1]),
    )


def result_to_json(result: SelectionResult) -> str:
    """Serialize a SelectionResult to its JSON interchange form."""
    return json.dumps(
        {
            "retained": list(result.retained),
            "rounds": result.rounds,
            "deleted_per_round": [list(r) for r in result.deleted_per_round],
            "final_min_eigenvalue": result.final_min_eigenvalue,
        }
    )
