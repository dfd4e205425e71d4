"""Panel data model and growth-sample construction.

A :class:`PanelDataset` holds output-per-worker observations for one
sector on a region x year grid (cells may be missing). From it we build
the regression sample for the growth equation

    dlog(P_it) = c + b * log(P_i,t-1) + v_it

one row per region-transition between consecutive years, and the
per-year cross-sectional dispersion of log productivity used for
sigma-convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import PanelDataError

Cell = tuple[str, int]


@dataclass(frozen=True)
class PanelDataset:
    """Region x year x value observations for one sector.

    Parameters
    ----------
    regions : tuple of str
        Region identifiers (opaque strings, order fixes dummy numbering).
    periods : tuple of int
        Strictly increasing years, at least two.
    sector : str
        Sector label.
    values : mapping (region, year) -> float
        Output per worker; every stored value must be positive. Cells may
        be absent (unbalanced panels are fine).
    structural : mapping name -> {(region, year) -> float}
        Optional named structural variables (capital/output ratio,
        goods-flow/output ratio, location quotient, employment).

    The dataset is treated as immutable after construction and is safe to
    share across threads.
    """

    regions: tuple[str, ...]
    periods: tuple[int, ...]
    sector: str
    values: Mapping[Cell, float]
    structural: Mapping[str, Mapping[Cell, float]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.regions) < 2:
            raise PanelDataError("panel needs at least 2 regions")
        if len(set(self.regions)) != len(self.regions):
            raise PanelDataError("duplicate region identifiers")
        if len(self.periods) < 2:
            raise PanelDataError("panel needs at least 2 periods")
        if any(b <= a for a, b in zip(self.periods, self.periods[1:])):
            raise PanelDataError("periods must be strictly increasing")
        grid = {(r, t) for r in self.regions for t in self.periods}
        for cell, value in self.values.items():
            if cell not in grid:
                raise PanelDataError(f"value cell {cell} outside the region/period grid")
            if not (value > 0.0) or not math.isfinite(value):
                raise PanelDataError(
                    f"output per worker must be positive and finite, got {value!r} at {cell}"
                )
        for name, column in self.structural.items():
            for cell in column:
                if cell not in grid:
                    raise PanelDataError(
                        f"structural cell {cell} of {name!r} outside the region/period grid"
                    )

    @property
    def cell_count(self) -> int:
        """Number of stored productivity cells (raw observation count)."""
        return len(self.values)

    def log_value(self, region: str, year: int) -> float:
        return math.log(self.values[(region, year)])


@dataclass(frozen=True)
class GrowthRow:
    """One transition observation: region, end year t, response and regressors."""

    region: str
    year: int
    y: float
    x: float
    structural: tuple[float, ...] = ()


@dataclass(frozen=True)
class GrowthSample:
    """Stacked regression rows for the growth equation.

    Rows are grouped by region and ordered by year within each region.
    ``regions`` lists only regions that contribute at least one row;
    ``panel_regions`` keeps the full region list of the source panel so
    reports can render empty dummy slots. ``source_cell_count`` is the
    raw number of productivity cells in the source panel (reported as
    metadata; estimation always runs on the transition rows).
    """

    rows: tuple[GrowthRow, ...]
    structural_names: tuple[str, ...]
    regions: tuple[str, ...]
    panel_regions: tuple[str, ...]
    sector: str
    dropped_transitions: int
    source_cell_count: int

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def region_count(self) -> int:
        return len(self.regions)


@dataclass(frozen=True)
class SigmaSeries:
    """Per-year cross-sectional standard deviation of log productivity."""

    sector: str
    years: tuple[int, ...]
    dispersion: tuple[float, ...]
    region_counts: tuple[int, ...]

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.years, self.dispersion))


def build_growth_sample(
    panel: PanelDataset,
    structural_names: Iterable[str] = (),
) -> GrowthSample:
    """Construct the growth regression sample from a panel.

    A row exists for every (region, year t) such that both P_{i,t} and
    P_{i,t-1} are present and t-1 is the preceding year in the panel's
    period list (annual transitions only). The response is
    log(P_{i,t}) - log(P_{i,t-1}), the regressor is log(P_{i,t-1}), and
    structural regressors are dated t-1 (start of transition).

    Raises
    ------
    PanelDataError
        If no usable transition exists, or a requested structural value
        is missing on a usable transition.
    """
    names = tuple(structural_names)
    if len(set(names)) != len(names):
        raise PanelDataError("structural variable names must be unique")
    for name in names:
        if name not in panel.structural:
            raise PanelDataError(f"panel has no structural variable {name!r}")

    rows: list[GrowthRow] = []
    contributing: list[str] = []
    dropped = 0
    for region in panel.regions:
        n_before = len(rows)
        for prev, year in zip(panel.periods, panel.periods[1:]):
            if year != prev + 1:
                # gap in the period list: not an annual transition
                continue
            has_prev = (region, prev) in panel.values
            has_cur = (region, year) in panel.values
            if not (has_prev and has_cur):
                if has_prev or has_cur:
                    dropped += 1
                continue
            x = panel.log_value(region, prev)
            y = panel.log_value(region, year) - x
            extras = []
            for name in names:
                column = panel.structural[name]
                if (region, prev) not in column:
                    raise PanelDataError(
                        f"missing structural value {name!r} for region {region!r} "
                        f"at year {prev} (needed by the {prev}->{year} transition)"
                    )
                extras.append(column[(region, prev)])
            rows.append(GrowthRow(region, year, y, x, tuple(extras)))
        if len(rows) > n_before:
            contributing.append(region)

    if not rows:
        raise PanelDataError(
            f"no usable transitions in sector {panel.sector!r}: "
            "every consecutive-year pair is missing at least one endpoint"
        )
    return GrowthSample(
        rows=tuple(rows),
        structural_names=names,
        regions=tuple(contributing),
        panel_regions=panel.regions,
        sector=panel.sector,
        dropped_transitions=dropped,
        source_cell_count=panel.cell_count,
    )


def sigma_dispersion(panel: PanelDataset) -> SigmaSeries:
    """Per-year sample standard deviation (divisor n-1) of log productivity.

    Years with fewer than two observed regions are omitted.

    Raises
    ------
    PanelDataError
        If no year has at least two regions present.
    """
    years: list[int] = []
    dispersion: list[float] = []
    counts: list[int] = []
    for year in panel.periods:
        logs = [
            math.log(panel.values[(region, year)])
            for region in panel.regions
            if (region, year) in panel.values
        ]
        n = len(logs)
        if n < 2:
            continue
        mean = sum(logs) / n
        var = sum((v - mean) ** 2 for v in logs) / (n - 1)
        years.append(year)
        dispersion.append(math.sqrt(var))
        counts.append(n)
    if not years:
        raise PanelDataError("sigma dispersion undefined: no year has >= 2 regions")
    return SigmaSeries(
        sector=panel.sector,
        years=tuple(years),
        dispersion=tuple(dispersion),
        region_counts=tuple(counts),
    )
