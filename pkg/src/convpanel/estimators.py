"""The three panel estimators for the growth equation.

Pooled OLS stacks all transitions behind a single intercept; LSDV
replaces the intercept with one indicator column per region (fixed
effects); the random-effects estimator is feasible GLS via Swamy-Arora
quasi-demeaning. Column labels follow the reporting convention:
"Const.", region dummies "D1".."DR", the convergence coefficient
"Coef.1", and structural regressors "Coef.2", "Coef.3", ...

LSDV on this equation carries the usual dynamic-panel (Nickell) bias
toward faster convergence for small T; it is estimated as-is, without
correction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import EstimationError, PanelDataError
from .panel import GrowthSample
from .regression import DesignMatrix, FitResult, least_squares

METHODS = ("pooled", "lsdv", "gls")


@dataclass(frozen=True)
class ModelSpec:
    """What to regress growth on: always the lagged log level, plus an
    ordered list of structural variable names for conditional
    convergence (empty for absolute convergence)."""

    method: str = "pooled"
    structural: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise EstimationError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if len(set(self.structural)) != len(self.structural):
            raise EstimationError("structural regressor names must be unique")

    @property
    def slope_count(self) -> int:
        """Number of slope coefficients (lagged level + structural)."""
        return 1 + len(self.structural)

    @property
    def slope_labels(self) -> tuple[str, ...]:
        return tuple(f"Coef.{i + 1}" for i in range(self.slope_count))


@dataclass(frozen=True)
class VarianceComponents:
    """Swamy-Arora variance components behind the GLS transform.

    ``theta`` maps each region to its quasi-demeaning weight
    theta_i = 1 - sqrt(sigma2_e / (T_i sigma2_u + sigma2_e)), which is 0
    when the region-effect variance estimate is 0 and approaches 1 as
    T_i sigma2_u dominates. ``truncated`` records that the moment
    estimator of sigma2_u came out negative and was clipped to zero;
    ``between_df`` of 0 means the between regression fit its region
    means exactly, leaving no information about sigma2_u (which is then
    set to 0 and GLS collapses to pooled OLS).
    """

    sigma2_e: float
    sigma2_u: float
    theta: dict[str, float]
    truncated: bool = False
    between_df: int = 1

    def __post_init__(self):
        if not self.sigma2_e > 0.0:
            raise EstimationError(
                f"idiosyncratic variance must be positive, got {self.sigma2_e!r}"
            )
        if self.sigma2_u < 0.0:
            raise EstimationError(f"region-effect variance cannot be negative: {self.sigma2_u!r}")
        for region, value in self.theta.items():
            if not 0.0 <= value < 1.0:
                raise EstimationError(f"theta for region {region!r} outside [0, 1): {value!r}")


def _check_sample(sample: GrowthSample, spec: ModelSpec) -> None:
    if sample.row_count == 0:
        raise PanelDataError("growth sample is empty")
    if spec.structural and sample.structural_names != spec.structural:
        raise PanelDataError(
            f"sample carries structural variables {sample.structural_names}, "
            f"spec asks for {spec.structural}"
        )
    if not spec.structural and sample.structural_names:
        raise PanelDataError(
            "absolute-convergence spec on a sample built with structural regressors"
        )


def _slope_columns(sample: GrowthSample) -> np.ndarray:
    cols = [np.array([row.x for row in sample.rows])]
    for j in range(len(sample.structural_names)):
        cols.append(np.array([row.structural[j] for row in sample.rows]))
    return np.column_stack(cols)


def _response(sample: GrowthSample) -> np.ndarray:
    return np.array([row.y for row in sample.rows])


def _metadata(sample: GrowthSample) -> tuple[tuple[str, ...], tuple[int, ...]]:
    return (
        tuple(row.region for row in sample.rows),
        tuple(row.year for row in sample.rows),
    )


def fit_pooled(sample: GrowthSample, spec: ModelSpec) -> FitResult:
    """Pooled OLS: common intercept plus the slope block.

    Residual degrees of freedom are n - (1 + slopes), which reproduces
    the "G.L." arithmetic of the source tables (e.g. 40 rows, absolute
    spec -> 38).
    """
    _check_sample(sample, spec)
    regions, years = _metadata(sample)
    slopes = _slope_columns(sample)
    X = np.column_stack([np.ones(sample.row_count), slopes])
    design = DesignMatrix(X, ("Const.",) + spec.slope_labels, regions, years)
    return least_squares(design, _response(sample), method="pooled")


def fit_lsdv(sample: GrowthSample, spec: ModelSpec) -> FitResult:
    """Least squares with region dummies and no common intercept.

    One indicator column per contributing region, labeled "D1".."DR" in
    the sample's region order; residual degrees of freedom are
    n - R - slopes. A region contributing a single row gets its dummy
    fitted to that row exactly; the fit proceeds with a warning flag.
    """
    _check_sample(sample, spec)
    regions, years = _metadata(sample)
    region_index = {region: i for i, region in enumerate(sample.regions)}
    dummies = np.zeros((sample.row_count, len(sample.regions)))
    for i, row in enumerate(sample.rows):
        dummies[i, region_index[row.region]] = 1.0
    slopes = _slope_columns(sample)
    X = np.column_stack([dummies, slopes])
    dummy_labels = tuple(f"D{i + 1}" for i in range(len(sample.regions)))
    design = DesignMatrix(X, dummy_labels + spec.slope_labels, regions, years)

    flags = []
    for region in sample.regions:
        if sum(1 for row in sample.rows if row.region == region) == 1:
            flags.append(f"single_row_region:{region}")
            warnings.warn(
                f"region {region!r} contributes a single row; its dummy absorbs it",
                stacklevel=2,
            )
    fit = least_squares(design, _response(sample), method="lsdv")
    return replace(fit, flags=fit.flags + tuple(flags)) if flags else fit


def region_means(sample: GrowthSample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-region means of (y, slope columns) and the region row counts."""
    slopes = _slope_columns(sample)
    y = _response(sample)
    means_y = np.empty(len(sample.regions))
    means_x = np.empty((len(sample.regions), slopes.shape[1]))
    counts = np.empty(len(sample.regions))
    for i, region in enumerate(sample.regions):
        mask = np.array([row.region == region for row in sample.rows])
        counts[i] = mask.sum()
        means_y[i] = y[mask].mean()
        means_x[i] = slopes[mask].mean(axis=0)
    return means_y, means_x, counts


def estimate_variance_components(sample: GrowthSample, spec: ModelSpec) -> VarianceComponents:
    """Swamy-Arora variance components from the within and between fits.

    sigma2_e is the within (LSDV) residual variance on n - R - slopes
    degrees of freedom. The between regression runs on the R region
    means with an intercept; its residual variance estimates
    sigma2_u + sigma2_e / T, so sigma2_u is recovered by subtracting
    sigma2_e over the harmonic mean of the region sizes (exact for
    balanced panels) and truncating at zero.
    """
    within = fit_lsdv(sample, replace(spec, method="lsdv"))
    sigma2_e = within.sse / within.df_residual
    y = _response(sample)
    if sigma2_e <= 1e-24 * (1.0 + float(np.mean(y * y))):
        raise EstimationError(
            "degenerate panel: within fit is (numerically) exact, "
            "idiosyncratic variance is zero"
        )

    means_y, means_x, counts = region_means(sample)
    r = len(sample.regions)
    k_between = means_x.shape[1] + 1
    if r < k_between:
        raise EstimationError(
            f"between regression infeasible: {r} regions for {k_between} parameters"
        )
    between_df = r - k_between
    if between_df == 0:
        # exact between fit: no information about the region-effect
        # variance, so the GLS transform degenerates to pooled OLS
        sigma2_between = 0.0
    else:
        Xb = np.column_stack([np.ones(r), means_x])
        beta, *_ = np.linalg.lstsq(Xb, means_y, rcond=None)
        resid = means_y - Xb @ beta
        sigma2_between = float(resid @ resid) / between_df
    t_harmonic = r / float((1.0 / counts).sum())
    sigma2_u = sigma2_between - sigma2_e / t_harmonic
    truncated = sigma2_u < 0.0
    sigma2_u = max(sigma2_u, 0.0)

    theta = {
        region: float(1.0 - np.sqrt(sigma2_e / (counts[i] * sigma2_u + sigma2_e)))
        for i, region in enumerate(sample.regions)
    }
    return VarianceComponents(float(sigma2_e), float(sigma2_u), theta, truncated, between_df)


def fit_gls_random_effects(
    sample: GrowthSample,
    spec: ModelSpec,
    theta_override: float | None = None,
) -> FitResult:
    """Feasible GLS (random effects) via quasi-demeaning.

    Every row of region i has theta_i times the region mean removed from
    the response and each slope column, and the intercept column becomes
    1 - theta_i; OLS on the transformed data is the GLS estimate, with
    degrees of freedom n - (1 + slopes). With sigma2_u estimated at 0
    the transform is the identity and the fit equals pooled OLS.

    ``theta_override`` is a test hook that fixes a common theta for all
    regions, skipping the variance-component step. Overriding with 1.0
    is full demeaning: the intercept column vanishes and is dropped, and
    the slopes reproduce the within (LSDV) estimator.
    """
    _check_sample(sample, spec)
    if len(sample.regions) < 2:
        raise EstimationError("random effects need at least 2 regions with rows")

    flags: tuple[str, ...] = ()
    if theta_override is None:
        components = estimate_variance_components(sample, spec)
        theta = components.theta
        if components.truncated:
            flags += ("sigma2_u_truncated",)
        if components.between_df == 0:
            flags += ("between_zero_df",)
    else:
        if not 0.0 <= theta_override <= 1.0:
            raise EstimationError(f"theta override outside [0, 1]: {theta_override!r}")
        theta = {region: theta_override for region in sample.regions}
        flags = ("theta_override",)

    regions, years = _metadata(sample)
    slopes = _slope_columns(sample)
    y = _response(sample)
    means_y, means_x, _ = region_means(sample)
    index = {region: i for i, region in enumerate(sample.regions)}
    theta_rows = np.array([theta[row.region] for row in sample.rows])
    mean_rows_y = np.array([means_y[index[row.region]] for row in sample.rows])
    mean_rows_x = np.vstack([means_x[index[row.region]] for row in sample.rows])

    y_star = y - theta_rows * mean_rows_y
    slopes_star = slopes - theta_rows[:, None] * mean_rows_x
    intercept_star = 1.0 - theta_rows

    if np.all(intercept_star == 0.0):
        X = slopes_star
        labels = spec.slope_labels
        flags = flags + ("intercept_dropped",)
    else:
        X = np.column_stack([intercept_star, slopes_star])
        labels = ("Const.",) + spec.slope_labels
    design = DesignMatrix(X, labels, regions, years)
    fit = least_squares(design, y_star, method="gls")
    return replace(fit, flags=fit.flags + flags) if flags else fit
