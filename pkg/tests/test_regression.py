import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convpanel.errors import EstimationError, RankDeficientError
from convpanel.regression import DesignMatrix, durbin_watson, least_squares, t_critical


def design(X, labels=None, regions=None, years=None):
    X = np.asarray(X, dtype=float)
    n, k = X.shape
    labels = labels or tuple(f"c{i}" for i in range(k))
    regions = regions or ("r",) * n
    years = years or tuple(range(n))
    return DesignMatrix(X, tuple(labels), tuple(regions), tuple(years))


def exact_normal_equations(X_int, y_int, scale):
    """Exact-rational least squares for dyadic inputs (independent oracle)."""
    n, k = len(X_int), len(X_int[0])
    X = [[Fraction(v, scale) for v in row] for row in X_int]
    y = [Fraction(v, scale) for v in y_int]
    A = [[sum(X[i][a] * X[i][b] for i in range(n)) for b in range(k)] for a in range(k)]
    rhs = [sum(X[i][a] * y[i] for i in range(n)) for a in range(k)]
    for col in range(k):
        piv = max(range(col, k), key=lambda r: abs(A[r][col]))
        A[col], A[piv] = A[piv], A[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for r in range(col + 1, k):
            f = A[r][col] / A[col][col]
            for c in range(col, k):
                A[r][c] -= f * A[col][c]
            rhs[r] -= f * rhs[col]
    beta = [Fraction(0)] * k
    for r in range(k - 1, -1, -1):
        s = rhs[r] - sum(A[r][c] * beta[c] for c in range(r + 1, k))
        beta[r] = s / A[r][r]
    return beta


def random_dyadic_design(rng, max_n=50, max_k=8, scale=4096):
    k = rng.randint(1, max_k)
    n = rng.randint(k + 1, max_n)
    X_int = [[rng.randint(-(2**20), 2**20) for _ in range(k)] for _ in range(n)]
    y_int = [rng.randint(-(2**20), 2**20) for _ in range(n)]
    return X_int, y_int, scale


class TestLeastSquares:
    def test_exact_linear_data(self):
        X = [[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]
        fit = least_squares(design(X, ("Const.", "x")), [2.0, 4.0, 6.0])
        assert fit.coef("Const.") == pytest.approx(0.0, abs=1e-12)
        assert fit.coef("x") == pytest.approx(2.0, abs=1e-12)
        assert fit.sse == pytest.approx(0.0, abs=1e-15)
        assert fit.r_squared == 1.0
        assert fit.df_residual == 1

    def test_orthogonal_response_gives_zero_slope(self):
        x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])  # centered regressor
        y = np.array([1.0, -1.0, 0.0, -1.0, 1.0])  # orthogonal to x
        fit = least_squares(design(x[:, None], ("x",)), y)
        assert fit.coef("x") == pytest.approx(0.0, abs=1e-14)

    def test_matches_exact_normal_equations_12x3(self):
        rng = random.Random(12)
        X_int = [[rng.randint(-(2**20), 2**20) for _ in range(3)] for _ in range(12)]
        y_int = [rng.randint(-(2**20), 2**20) for _ in range(12)]
        scale = 4096
        oracle = exact_normal_equations(X_int, y_int, scale)
        X = np.array(X_int, dtype=float) / scale
        y = np.array(y_int, dtype=float) / scale
        fit = least_squares(design(X), y)
        for b_hat, b_star in zip(fit.coefficients, oracle):
            assert abs(b_hat - float(b_star)) <= 1e-10 * max(1.0, abs(float(b_star)))

    def test_rank_deficient_names_offending_column(self):
        X = np.column_stack([np.ones(6), np.arange(6.0), 2.0 * np.arange(6.0)])
        with pytest.raises(RankDeficientError) as err:
            least_squares(design(X, ("Const.", "x", "x2")), np.arange(6.0))
        assert err.value.column_label in ("x", "x2")

    def test_n_not_greater_than_k_errors(self):
        X = np.eye(3)
        with pytest.raises(EstimationError, match="more rows than columns"):
            least_squares(design(X), [1.0, 2.0, 3.0])

    def test_residuals_orthogonal_to_columns(self):
        rng = np.random.default_rng(3)
        X = np.column_stack([np.ones(30), rng.standard_normal((30, 3))])
        y = rng.standard_normal(30)
        fit = least_squares(design(X), y)
        norm_y = np.linalg.norm(y)
        for j in range(X.shape[1]):
            bound = 1e-8 * norm_y * np.linalg.norm(X[:, j])
            assert abs(float(fit.residuals @ X[:, j])) <= bound

    def test_residuals_sum_to_zero_with_intercept(self):
        rng = np.random.default_rng(4)
        X = np.column_stack([np.ones(25), rng.standard_normal((25, 2))])
        y = rng.standard_normal(25)
        fit = least_squares(design(X), y)
        assert abs(float(fit.residuals.sum())) <= 1e-8 * np.linalg.norm(y)

    def test_standard_errors_match_normal_equations_formula(self):
        rng = np.random.default_rng(5)
        X = np.column_stack([np.ones(20), rng.standard_normal((20, 2))])
        y = rng.standard_normal(20)
        fit = least_squares(design(X), y)
        resid = y - X @ np.linalg.solve(X.T @ X, X.T @ y)
        s2 = (resid @ resid) / (20 - 3)
        se = np.sqrt(s2 * np.diag(np.linalg.inv(X.T @ X)))
        assert fit.std_errors == pytest.approx(tuple(se), rel=1e-9)
        assert fit.t_stats == pytest.approx(tuple(np.array(fit.coefficients) / se), rel=1e-9)

    def test_row_permutation_leaves_fit_invariant(self):
        rng = np.random.default_rng(6)
        n = 24
        X = np.column_stack([np.ones(n), rng.standard_normal(n)])
        y = rng.standard_normal(n)
        regions = tuple(f"r{i % 4}" for i in range(n))
        years = tuple(2000 + i // 4 for i in range(n))
        base = least_squares(DesignMatrix(X, ("Const.", "x"), regions, years), y)
        perm = rng.permutation(n)
        shuffled = least_squares(
            DesignMatrix(
                X[perm],
                ("Const.", "x"),
                tuple(regions[i] for i in perm),
                tuple(years[i] for i in perm),
            ),
            y[perm],
        )
        assert shuffled.coefficients == pytest.approx(base.coefficients, rel=1e-12)
        assert shuffled.dw == pytest.approx(base.dw, rel=1e-12)

    def test_r_squared_can_go_negative_without_intercept(self):
        X = np.array([[1.0], [1.0], [1.0], [1.0]])
        y = np.array([10.0, 10.5, 9.5, 10.0]) * -1.0
        fit = least_squares(design(X, ("x",)), y)
        assert fit.r_squared <= 1.0

    def test_as_dict_accessor(self):
        X = [[1.0, 1.0], [1.0, 2.0], [1.0, 3.0], [1.0, 4.0]]
        fit = least_squares(design(X, ("Const.", "x")), [2.1, 3.9, 6.2, 7.8])
        table = fit.as_dict()
        assert set(table) == {"Const.", "x"}
        assert table["x"] == (fit.coef("x"), fit.se("x"), fit.t_stat("x"))


class TestDurbinWatson:
    def test_alternating_residuals(self):
        assert durbin_watson([1.0, -1.0, 1.0, -1.0], ["a"] * 4, [1, 2, 3, 4]) == pytest.approx(3.0)

    def test_constant_residuals(self):
        assert durbin_watson([0.7, 0.7, 0.7], ["a"] * 3, [1, 2, 3]) == pytest.approx(0.0)

    def test_two_regions_differenced_separately(self):
        value = durbin_watson([1.0, -1.0, 1.0, -1.0], ["a", "a", "b", "b"], [1, 2, 1, 2])
        assert value == pytest.approx(2.0)

    def test_all_zero_residuals_undefined(self):
        assert durbin_watson([0.0, 0.0], ["a", "a"], [1, 2]) is None

    def test_no_region_with_two_rows_undefined(self):
        assert durbin_watson([1.0, 2.0], ["a", "b"], [1, 1]) is None

    def test_year_order_not_row_order(self):
        # same residual-year pairs, scrambled row order
        ordered = durbin_watson([1.0, -1.0, 2.0], ["a"] * 3, [1, 2, 3])
        scrambled = durbin_watson([2.0, 1.0, -1.0], ["a"] * 3, [3, 1, 2])
        assert scrambled == pytest.approx(ordered, rel=1e-12)

    def test_white_noise_near_two(self):
        rng = np.random.default_rng(42)
        res = rng.standard_normal(5000)
        value = durbin_watson(res, ["a"] * 5000, list(range(5000)))
        assert abs(value - 2.0) <= 0.1

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=2,
            max_size=40,
        ),
        st.integers(1, 4),
    )
    def test_range_zero_to_four(self, residuals, n_regions):
        if all(r == 0.0 for r in residuals):
            return
        regions = [f"g{i % n_regions}" for i in range(len(residuals))]
        years = list(range(len(residuals)))
        value = durbin_watson(residuals, regions, years)
        if value is not None:
            assert 0.0 <= value <= 4.0 + 1e-12


class TestTCritical:
    def test_normal_limit(self):
        assert t_critical(10**6, 0.05) == pytest.approx(1.959966, abs=1e-6)

    def test_df_38(self):
        assert t_critical(38, 0.05) == pytest.approx(2.024394, abs=1e-6)

    def test_df_1_closed_form(self):
        assert t_critical(1, 0.10) == pytest.approx(math.tan(math.pi * 0.45), abs=1e-6)

    def test_df_2_closed_form(self):
        # t*(2, a) = sqrt(2/(a(2-a)) - 2)
        for level in (0.05, 0.10):
            expected = math.sqrt(2.0 / (level * (2.0 - level)) - 2.0)
            assert t_critical(2, level) == pytest.approx(expected, abs=1e-9)

    def test_invalid_df(self):
        with pytest.raises(EstimationError):
            t_critical(0, 0.05)

    def test_decreasing_in_df(self):
        values = [t_critical(df, 0.05) for df in (1, 2, 5, 10, 30, 100, 1000)]
        assert values == sorted(values, reverse=True)


def test_oracle_equivalence_batch():
    rng = random.Random(2024)
    for _ in range(150):
        X_int, y_int, scale = random_dyadic_design(rng)
        oracle = exact_normal_equations(X_int, y_int, scale)
        X = np.array(X_int, dtype=float) / scale
        y = np.array(y_int, dtype=float) / scale
        fit = least_squares(design(X), y)
        for b_hat, b_star in zip(fit.coefficients, oracle):
            assert abs(b_hat - float(b_star)) <= 1e-10 * max(1.0, abs(float(b_star)))
