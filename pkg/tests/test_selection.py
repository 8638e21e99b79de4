"""Eigenvalue-guided stock selection."""

import json
from datetime import date, timedelta

import numpy as np
import pytest

from divmetrics import (
    CorrelationMatrix,
    ReturnPanel,
    SelectionCriteria,
    SelectionResult,
    Spectrum,
    ValidationError,
    correlation_matrix,
    correlation_spectrum,
    marked_for_deletion,
    result_to_json,
    select_stocks,
)


def matrix_from(tickers, values) -> CorrelationMatrix:
    return CorrelationMatrix(tuple(tickers), np.asarray(values, dtype=float))


def equicorrelated(p: int, rho: float) -> CorrelationMatrix:
    values = np.full((p, p), rho)
    np.fill_diagonal(values, 1.0)
    return matrix_from((f"T{j}" for j in range(p)), values)


def panel_from(tickers, columns) -> ReturnPanel:
    x = np.column_stack(columns)
    dates = tuple(date(2020, 1, 1) + timedelta(days=i) for i in range(x.shape[0]))
    return ReturnPanel(dates, tuple(tickers), x)


def block_tickers(sizes) -> tuple[tuple[str, ...], ...]:
    blocks, j = [], 0
    for s in sizes:
        blocks.append(tuple(f"T{j + i}" for i in range(s)))
        j += s
    return tuple(blocks)


def block_diagonal(sizes, rho: float) -> CorrelationMatrix:
    p = sum(sizes)
    values = np.eye(p)
    j = 0
    for s in sizes:
        values[j:j + s, j:j + s] = rho
        j += s
    np.fill_diagonal(values, 1.0)
    return matrix_from((f"T{j}" for j in range(p)), values)


class TestCriteria:
    def test_defaults(self):
        c = SelectionCriteria()
        assert c.deletion_threshold == 0.7
        assert c.stop_threshold == 0.5
        assert c.min_retained == 2

    def test_stop_above_deletion_rejected(self):
        with pytest.raises(ValidationError):
            SelectionCriteria(deletion_threshold=0.7, stop_threshold=0.9)

    def test_stop_equal_deletion_allowed(self):
        SelectionCriteria(deletion_threshold=0.7, stop_threshold=0.7)

    def test_min_retained_floor(self):
        with pytest.raises(ValidationError):
            SelectionCriteria(min_retained=1)

    def test_nonpositive_stop_rejected(self):
        with pytest.raises(ValidationError):
            SelectionCriteria(stop_threshold=0.0)


class TestMarkedForDeletion:
    def test_no_low_components_marks_nothing(self):
        spectrum = correlation_spectrum(equicorrelated(2, 0.1))
        assert spectrum.eigenvalues[-1] == pytest.approx(0.9)
        marked = marked_for_deletion(spectrum, ("A", "B"), 0.7)
        assert marked == ()

    def test_threshold_is_strict(self):
        spectrum = Spectrum(np.array([1.3, 0.7]),
                            np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert marked_for_deletion(spectrum, ("A", "B"), 0.7) == ()

    def test_ascending_eigenvalue_order(self):
        # distinct argmax rows per column so the order is unambiguous
        spectrum = Spectrum(
            np.array([2.1, 0.5, 0.4]),
            np.array([
                [0.9, 0.1, 0.2],
                [0.3, 0.9, 0.3],
                [0.3, 0.4, 0.9],
            ]),
        )
        marked = marked_for_deletion(spectrum, ("A", "B", "C"), 0.7)
        assert marked == ("C", "B")

    def test_duplicate_argmax_collapses(self):
        # orthogonal basis whose two low-eigenvalue columns both have their
        # largest absolute loading on row 1; such a spectrum cannot come from
        # a correlation matrix, but marked_for_deletion only sees the spectrum
        q = np.array([
            [-0.71729835, 0.49051316, 0.49485343],
            [0.00372011, -0.70750831, 0.70669524],
            [0.69675622, 0.50875224, 0.50566978],
        ])
        q[:, 0] /= np.linalg.norm(q[:, 0])
        q[:, 1] -= q[:, 0] * (q[:, 0] @ q[:, 1])
        q[:, 1] /= np.linalg.norm(q[:, 1])
        q[:, 2] -= q[:, 0] * (q[:, 0] @ q[:, 2]) + q[:, 1] * (q[:, 1] @ q[:, 2])
        q[:, 2] /= np.linalg.norm(q[:, 2])
        assert np.argmax(np.abs(q[:, 1])) == 1
        assert np.argmax(np.abs(q[:, 2])) == 1
        spectrum = Spectrum(np.array([2.0, 0.6, 0.4]), q)
        marked = marked_for_deletion(spectrum, ("A", "B", "C"), 0.7)
        assert marked == ("B",)

    def test_exact_tie_marks_highest_index(self):
        # 2x2 blocks produce bitwise-equal loadings on both members
        spectrum = correlation_spectrum(equicorrelated(2, 0.8))
        low = np.abs(spectrum.eigenvectors[:, 1])
        assert low[0] == low[1]
        marked = marked_for_deletion(spectrum, ("A", "B"), 0.7)
        assert marked == ("B",)


class TestSelectStocks:
    def test_two_correlated_pairs(self):
        values = [
            [1.0, 0.9, 0.0, 0.0],
            [0.9, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.9],
            [0.0, 0.0, 0.9, 1.0],
        ]
        result = select_stocks(matrix_from("ABCD", values), SelectionCriteria())
        assert result.retained == ("A", "C")
        assert result.rounds == 1
        assert result.deleted_per_round == (("B", "D"),)
        assert result.final_min_eigenvalue == pytest.approx(1.0)

    def test_high_min_eigenvalue_keeps_everything(self):
        result = select_stocks(equicorrelated(5, 0.05), SelectionCriteria())
        assert result.retained == tuple(f"T{j}" for j in range(5))
        assert result.rounds == 0
        assert result.deleted_per_round == ()

    def test_equicorrelated_runs_to_floor(self):
        # every equicorrelated sub-matrix keeps min eigenvalue 1 - rho, so
        # deletion only stops at the retained-set floor
        result = select_stocks(equicorrelated(10, 0.95), SelectionCriteria())
        assert result.n_selected == 2
        deleted = [t for r in result.deleted_per_round for t in r]
        assert sorted(result.retained + tuple(deleted)) == [
            f"T{j}" for j in range(10)
        ]
        assert result.final_min_eigenvalue == pytest.approx(0.05)

    def test_perfect_pair_stops_at_floor(self):
        values = [[1.0, 1.0], [1.0, 1.0]]
        result = select_stocks(matrix_from("AB", values), SelectionCriteria())
        assert result.retained == ("A", "B")
        assert result.rounds == 0
        assert result.final_min_eigenvalue == pytest.approx(0.0)

    def test_retained_plus_deleted_partition_universe(self):
        rng = np.random.default_rng(11)
        x = rng.normal(0, 0.02, size=(80, 8))
        x[:, 4] = x[:, 0] * 0.98 + rng.normal(0, 0.002, size=80)
        panel = panel_from((f"T{j}" for j in range(8)), x.T)
        result = select_stocks(correlation_matrix(panel), SelectionCriteria())
        deleted = [t for r in result.deleted_per_round for t in r]
        assert sorted(result.retained + tuple(deleted)) == sorted(panel.tickers)
        assert result.rounds == len(result.deleted_per_round)
        assert result.rounds <= 8

    def test_retained_preserves_input_order(self):
        values = [
            [1.0, 0.1, 0.97],
            [0.1, 1.0, 0.1],
            [0.97, 0.1, 1.0],
        ]
        result = select_stocks(matrix_from(("Z", "M", "A"), values),
                               SelectionCriteria())
        assert result.retained == ("Z", "M")

    def test_permutation_invariant_when_tie_free(self):
        rng = np.random.default_rng(12)
        x = rng.normal(0, 0.02, size=(120, 6))
        x[:, 3] = x[:, 1] * 0.9 + rng.normal(0, 0.004, size=120)
        x[:, 5] = x[:, 2] * 0.9 + rng.normal(0, 0.004, size=120)
        tickers = tuple(f"T{j}" for j in range(6))
        base = select_stocks(correlation_matrix(panel_from(tickers, x.T)),
                             SelectionCriteria())
        perm = [4, 0, 5, 2, 1, 3]
        shuffled = select_stocks(
            correlation_matrix(panel_from([tickers[j] for j in perm],
                                          [x[:, j] for j in perm])),
            SelectionCriteria())
        assert sorted(base.retained) == sorted(shuffled.retained)

    def test_block_structure_keeps_one_per_block(self):
        # independent equicorrelated blocks: low components are within-block
        # contrasts, so exactly one member of each block survives
        sizes = (2, 3, 4)
        result = select_stocks(block_diagonal(sizes, 0.95), SelectionCriteria())
        blocks = block_tickers(sizes)
        assert result.n_selected == len(sizes)
        for block in blocks:
            assert sum(t in result.retained for t in block) == 1

    def test_min_retained_truncates_marks(self):
        result = select_stocks(equicorrelated(4, 0.99),
                               SelectionCriteria(min_retained=3))
        assert result.n_selected == 3

    def test_initial_spectrum_matches_fresh_run(self):
        matrix = equicorrelated(6, 0.9)
        fresh = select_stocks(matrix, SelectionCriteria())
        seeded = select_stocks(matrix, SelectionCriteria(),
                               initial_spectrum=correlation_spectrum(matrix))
        assert fresh.retained == seeded.retained
        assert fresh.deleted_per_round == seeded.deleted_per_round
        assert fresh.final_min_eigenvalue == seeded.final_min_eigenvalue


class TestResultSerialization:
    def test_json_shape(self):
        values = [
            [1.0, 0.9, 0.0, 0.0],
            [0.9, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.9],
            [0.0, 0.0, 0.9, 1.0],
        ]
        result = select_stocks(matrix_from("ABCD", values), SelectionCriteria())
        payload = json.loads(result_to_json(result))
        assert payload["retained"] == ["A", "C"]
        assert payload["rounds"] == 1
        assert payload["deleted_per_round"] == [["B", "D"]]
        assert payload["final_min_eigenvalue"] == pytest.approx(1.0)

    def test_overlapping_retained_and_deleted_rejected(self):
        with pytest.raises(ValidationError):
            SelectionResult(retained=("A",), deleted_per_round=(("A",),),
                            rounds=1, final_min_eigenvalue=1.0)
