"""Symmetric eigendecomposition and the PC1 variance-explained measure.

The decomposition is a cyclic Jacobi sweep, compiled with numba. Jacobi
is slower than Householder-based solvers for large matrices but has
excellent orthogonality and is simple to audit; window sizes here are a
few hundred at most, where it is more than fast enough.

A correlation matrix of p variables has trace p, so the share of total
variation carried by the first principal component is 100 * E1 / p.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from .errors import ConvergenceError, NumericError, ValidationError
from .matrix_stats import CorrelationMatrix

__all__ = [
    "Spectrum",
    "eigendecompose",
    "correlation_spectrum",
    "pc1_variance_explained",
    "write_spectrum_csv",
]

# Eigenvalues of a correlation matrix this far below zero are rounding
# noise and get clamped; anything lower is a real numeric problem.
NEGATIVE_EIGENVALUE_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Full eigensystem: eigenvalues descending, column k of eigenvectors
    paired with eigenvalue k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.eigenvalues, dtype=np.float64).copy()
        vectors = np.ascontiguousarray(self.eigenvectors, dtype=np.float64).copy()
        values.flags.writeable = False
        vectors.flags.writeable = False
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "eigenvectors", vectors)
        p = values.shape[0]
        if values.ndim != 1 or p == 0 or vectors.shape != (p, p):
            raise ValidationError("spectrum needs p eigenvalues and a p x p basis")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
            raise ValidationError("spectrum entries must be finite")
        if np.any(np.diff(values) > 0):
            raise ValidationError("eigenvalues must be sorted descending")

    @property
    def p(self) -> int:
        return self.eigenvalues.shape[0]


@njit(cache=True, nogil=True)
def _jacobi(a, v, max_sweeps):  # pragma: no cover - exercised via eigendecompose
    n = a.shape[0]
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    fro = np.sqrt(fro)
    tol = 1e-15 * fro
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if np.sqrt(off) <= tol:
            return sweep, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    if r != p and r != q:
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = arp - s * (arq + tau * arp)
                        a[p, r] = a[r, p]
                        a[r, q] = arq + s * (arp - tau * arq)
                        a[q, r] = a[r, q]
                # Plain (c, s) column rotation: symmetric 2x2 blocks then
                # yield exactly tied |loadings|, which the stock-selection
                # tie rule depends on.
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = c * vrp - s * vrq
                    v[r, q] = s * vrp + c * vrq
    off = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            off += 2.0 * a[i, j] * a[i, j]
    return max_sweeps, np.sqrt(off) <= tol


def eigendecompose(m: np.ndarray, max_sweeps: int = 50) -> Spectrum:
    """Full eigensystem of a symmetric matrix via cyclic Jacobi rotations.

    Eigenvalues come back sorted descending. Each eigenvector's sign is
    fixed so its largest-magnitude component (lowest index on ties) is
    positive, making loadings reproducible across runs and platforms.
    """
    a = np.array(m, dtype=np.float64, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix entries must be finite")
    if np.abs(a - a.T).max() > 1e-10:
        raise ValidationError("matrix must be symmetric within 1e-10")
    a = (a + a.T) / 2.0
    n = a.shape[0]
    v = np.eye(n)
    sweeps, converged = _jacobi(a, v, max_sweeps)
    if not converged:
        raise ConvergenceError(int(sweeps))
    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    for k in range(n):
        col = vectors[:, k]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            vectors[:, k] = -col
    return Spectrum(eigenvalues, vectors)


def correlation_spectrum(r: CorrelationMatrix) -> Spectrum:
    """Spectrum of a correlation matrix with tiny negative eigenvalues
    clamped to zero.

    Correlation matrices from complete data are positive semidefinite up
    to rounding; an eigenvalue below -1e-10 means something upstream went
    wrong and raises instead of being hidden.
    """
    spectrum = eigendecompose(r.values)
    eigenvalues = spectrum.eigenvalues
    smallest = float(eigenvalues[-1])
    if smallest < 0.0:
        if smallest < -NEGATIVE_EIGENVALUE_TOL:
            raise NumericError(
                f"correlation matrix has eigenvalue {smallest}, "
                f"below -{NEGATIVE_EIGENVALUE_TOL}"
            )
        eigenvalues = np.where(eigenvalues < 0.0, 0.0, eigenvalues)
        return Spectrum(eigenvalues, spectrum.eigenvectors)
    return spectrum


def pc1_variance_explained(spectrum: Spectrum, p: int) -> float:
    """Percent of total variation explained by the first component.

    ``p`` is the number of variables in the source correlation matrix,
    which is also its total variance (trace).
    """
    if p < 1:
        raise ValidationError("p must be at least 1")
    if spectrum.p == 0:
        raise ValidationError("empty spectrum")
    return 100.0 * float(spectrum.eigenvalues[0]) / p


def write_spectrum_csv(spectrum: Spectrum, destination) -> None:
    """Write the eigenvalue row, then the eigenvector matrix, as CSV."""
    close_after = isinstance(destination, (str, Path))
    stream = open(destination, "w", encoding="utf-8", newline="") if close_after \
        else destination
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(format(x, ".17g") for x in spectrum.eigenvalues)
        for row in spectrum.eigenvectors:
            writer.writerow(format(x, ".17g") for x in row)
    finally:
        if close_after:
            stream.close()
