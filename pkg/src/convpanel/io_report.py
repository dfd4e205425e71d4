"""CSV ingestion of regional panels and publication-style result tables.

Input files are long-format CSV, one row per (region, year, sector):

    region,year,sector,output_per_worker[,capital_output_ratio]
        [,goods_flow_output_ratio][,employment]

UTF-8, comma delimited, decimal point. A pseudo-region ``NATIONAL`` may
carry national employment totals for location-quotient construction; it
never enters estimation. Reports render one row per method (Pooling,
LSDV, GLS), estimates printed to 3 decimals (ties away from zero) with
t-statistics in parentheses and stars per the significance classes;
the JSON format keeps full precision.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .convergence import ConvergenceReport, LocationQuotientInputs, location_quotient
from .errors import PanelDataError
from .montecarlo import RecoveryStats
from .panel import Cell, PanelDataset, SigmaSeries

NATIONAL_REGION = "NATIONAL"

REQUIRED_COLUMNS = ("region", "year", "sector", "output_per_worker")
OPTIONAL_COLUMNS = ("capital_output_ratio", "goods_flow_output_ratio", "employment")

METHOD_TITLES = {"pooled": "Pooling", "lsdv": "LSDV", "gls": "GLS"}
METHOD_ORDER = ("pooled", "lsdv", "gls")

FORMATS = ("md", "tsv", "json")


@dataclass(frozen=True)
class PanelRow:
    """One validated CSV row; optional fields are None when the cell is empty."""

    region: str
    year: int
    sector: str
    output_per_worker: float | None
    capital_output_ratio: float | None
    goods_flow_output_ratio: float | None
    employment: float | None
    line: int


def _parse_optional(raw: str | None, column: str, line: int) -> float | None:
    if raw is None or raw.strip() == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise PanelDataError(f"line {line}: cannot parse {column} value {raw!r}") from None


def read_rows(source: str | Path | TextIO) -> list[PanelRow]:
    """Parse and validate every row of a long-format panel CSV.

    Raises
    ------
    PanelDataError
        On a missing header column, an unparsable cell (with its line
        number), a duplicate (region, year, sector) key, or nonpositive
        productivity.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise PanelDataError(f"input file not found: {path}")
        with path.open(newline="", encoding="utf-8") as handle:
            return read_rows(handle)

    reader = csv.DictReader(source)
    header = reader.fieldnames
    if header is None:
        raise PanelDataError("empty file: header row required")
    missing = [column for column in REQUIRED_COLUMNS if column not in header]
    if missing:
        raise PanelDataError(f"header is missing required columns: {', '.join(missing)}")

    rows: list[PanelRow] = []
    seen: dict[tuple[str, int, str], int] = {}
    for record in reader:
        line = reader.line_num
        region = (record.get("region") or "").strip()
        sector = (record.get("sector") or "").strip()
        if not region or not sector:
            raise PanelDataError(f"line {line}: region and sector must be nonempty")
        raw_year = (record.get("year") or "").strip()
        try:
            year = int(raw_year)
        except ValueError:
            raise PanelDataError(f"line {line}: cannot parse year {raw_year!r}") from None

        key = (region, year, sector)
        if key in seen:
            raise PanelDataError(
                f"line {line}: duplicate (region, year, sector) key {key}, "
                f"first seen on line {seen[key]}"
            )
        seen[key] = line

        value = _parse_optional(record.get("output_per_worker"), "output_per_worker", line)
        if value is not None and value <= 0.0:
            raise PanelDataError(f"line {line}: output_per_worker must be positive, got {value}")
        employment = _parse_optional(record.get("employment"), "employment", line)
        if employment is not None and employment <= 0.0:
            raise PanelDataError(f"line {line}: employment must be positive, got {employment}")
        rows.append(
            PanelRow(
                region=region,
                year=year,
                sector=sector,
                output_per_worker=value,
                capital_output_ratio=_parse_optional(
                    record.get("capital_output_ratio"), "capital_output_ratio", line
                ),
                goods_flow_output_ratio=_parse_optional(
                    record.get("goods_flow_output_ratio"), "goods_flow_output_ratio", line
                ),
                employment=employment,
                line=line,
            )
        )
    return rows


def _select(
    rows: Iterable[PanelRow],
    sector: str,
    start: int | None,
    end: int | None,
) -> list[PanelRow]:
    return [
        row
        for row in rows
        if row.sector == sector
        and (start is None or row.year >= start)
        and (end is None or row.year <= end)
    ]


def panel_from_rows(
    rows: Sequence[PanelRow],
    sector: str,
    start: int | None = None,
    end: int | None = None,
) -> PanelDataset:
    """Build a PanelDataset from parsed rows, restricted to one sector
    and an inclusive year window. NATIONAL rows are excluded (they only
    feed location-quotient totals)."""
    selected = [row for row in _select(rows, sector, start, end) if row.region != NATIONAL_REGION]
    if not selected:
        raise PanelDataError(
            f"empty selection: no rows for sector {sector!r}"
            + (f" in {start}-{end}" if start is not None or end is not None else "")
        )
    regions = tuple(sorted({row.region for row in selected}))
    periods = tuple(sorted({row.year for row in selected}))
    values: dict[Cell, float] = {}
    structural: dict[str, dict[Cell, float]] = {}
    for row in selected:
        cell = (row.region, row.year)
        if row.output_per_worker is not None:
            values[cell] = row.output_per_worker
        for name in OPTIONAL_COLUMNS:
            field = getattr(row, name)
            if field is not None:
                structural.setdefault(name, {})[cell] = field
    return PanelDataset(
        regions=regions,
        periods=periods,
        sector=sector,
        values=values,
        structural=structural,
    )


def read_panel(
    source: str | Path | TextIO,
    sector: str,
    start: int | None = None,
    end: int | None = None,
) -> PanelDataset:
    """Read one sector's panel from a long-format CSV file."""
    return panel_from_rows(read_rows(source), sector, start, end)


def derive_location_quotients(
    panel: PanelDataset,
    total_employment: Mapping[Cell, float],
    national_sector: Mapping[int, float] | None = None,
    national_total: Mapping[int, float] | None = None,
) -> PanelDataset:
    """Attach a location_quotient structural column to the panel.

    Sectoral employment comes from the panel's ``employment`` column;
    ``total_employment`` maps (region, year) to all-sector employment.
    National totals default to the sum over the panel's regions;
    explicit per-year overrides (from NATIONAL rows) win. A quotient is
    computed for every (region, year) holding a productivity value.

    Raises
    ------
    PanelDataError
        If employment or totals are missing for any such cell.
    """
    sector_emp = panel.structural.get("employment")
    if not sector_emp:
        raise PanelDataError(
            f"panel for sector {panel.sector!r} has no employment column; "
            "location quotients need employment data"
        )

    def _year_sum(column: Mapping[Cell, float], year: int) -> float:
        return sum(column[(r, year)] for r in panel.regions if (r, year) in column)

    quotients: dict[Cell, float] = {}
    for cell in sorted(panel.values):
        region, year = cell
        if cell not in sector_emp:
            raise PanelDataError(
                f"missing employment for region {region!r}, year {year}, "
                f"sector {panel.sector!r}"
            )
        if cell not in total_employment:
            raise PanelDataError(f"missing total employment for region {region!r}, year {year}")
        nat_sector = (
            national_sector[year]
            if national_sector is not None and year in national_sector
            else _year_sum(sector_emp, year)
        )
        nat_total = (
            national_total[year]
            if national_total is not None and year in national_total
            else _year_sum(total_employment, year)
        )
        quotients[cell] = location_quotient(
            LocationQuotientInputs(
                regional_sector=sector_emp[cell],
                national_sector=nat_sector,
                regional_total=total_employment[cell],
                national_total=nat_total,
            )
        )
    structural = dict(panel.structural)
    structural["location_quotient"] = quotients
    return replace(panel, structural=structural)


def location_quotients_from_rows(
    rows: Sequence[PanelRow],
    sector: str,
    start: int | None = None,
    end: int | None = None,
) -> PanelDataset:
    """Panel for ``sector`` with location quotients derived from a whole
    file's employment data.

    Regional totals sum employment across the file's sectors; national
    figures come from NATIONAL rows when present, otherwise from summing
    the regions.
    """
    panel = panel_from_rows(rows, sector, start, end)
    selected = _select(rows, sector, start, end)
    window = [
        row
        for row in rows
        if row.employment is not None
        and (start is None or row.year >= start)
        and (end is None or row.year <= end)
    ]
    totals: dict[Cell, float] = {}
    national_total: dict[int, float] = {}
    for row in window:
        if row.region == NATIONAL_REGION:
            national_total[row.year] = national_total.get(row.year, 0.0) + row.employment
        else:
            cell = (row.region, row.year)
            totals[cell] = totals.get(cell, 0.0) + row.employment
    national_sector = {
        row.year: row.employment
        for row in selected
        if row.region == NATIONAL_REGION and row.employment is not None
    }
    return derive_location_quotients(
        panel,
        totals,
        national_sector=national_sector or None,
        national_total=national_total or None,
    )


def write_panel(panel: PanelDataset, destination: str | Path | TextIO) -> None:
    """Write a panel back to long-format CSV.

    Emits the schema columns only (derived location quotients are not
    persisted). Values are written with shortest round-trip formatting,
    so read_panel(write_panel(p)) reproduces every cell exactly.
    """
    if isinstance(destination, (str, Path)):
        with Path(destination).open("w", newline="", encoding="utf-8") as handle:
            write_panel(panel, handle)
            return
    columns = [name for name in OPTIONAL_COLUMNS if name in panel.structural]
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(list(REQUIRED_COLUMNS) + columns)
    for region in panel.regions:
        for year in panel.periods:
            cell = (region, year)
            value = panel.values.get(cell)
            extras = [panel.structural[name].get(cell) for name in columns]
            if value is None and all(extra is None for extra in extras):
                continue
            writer.writerow(
                [
                    region,
                    year,
                    panel.sector,
                    "" if value is None else repr(float(value)),
                ]
                + ["" if extra is None else repr(float(extra)) for extra in extras]
            )


# ---------------------------------------------------------------------------
# rendering


def _fmt3(value: float | None) -> str:
    """Three decimals, ties rounded away from zero; blank for undefined."""
    if value is None:
        return ""
    value = float(value)
    if not math.isfinite(value):
        return "inf" if value > 0 else "-inf" if value < 0 else "nan"
    if value == 0.0:
        value = 0.0
    return str(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def _estimate_cell(report: ConvergenceReport, label: str) -> str:
    i = report.fit.labels.index(label)
    value = report.fit.coefficients[i]
    t = report.fit.t_stats[i]
    return f"{_fmt3(value)}{report.stars(label)} ({_fmt3(t)})"


def _check_reports(reports: Sequence[ConvergenceReport]) -> None:
    if not reports:
        raise PanelDataError("nothing to render: empty report list")
    first = reports[0]
    for report in reports[1:]:
        if (
            report.spec.structural != first.spec.structural
            or report.sector != first.sector
            or report.panel_regions != first.panel_regions
        ):
            raise PanelDataError("mixed specs: reports disagree on sector or regressors")


def _ordered(reports: Sequence[ConvergenceReport]) -> list[ConvergenceReport]:
    return sorted(reports, key=lambda r: METHOD_ORDER.index(r.fit.method))


def _table(header: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "tsv":
        lines = ["\t".join(header)] + ["\t".join(row) for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "md":
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join(" --- " for _ in header) + "|",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise PanelDataError(f"unknown format {fmt!r}, expected one of {FORMATS}")


def render_report(reports: Sequence[ConvergenceReport], fmt: str = "md") -> str:
    """Publication-style result table, one row per method.

    Columns: Method, Const. (when a pooled or GLS row is present), one
    dummy column per panel region (when an LSDV row is present; regions
    absent from a sub-panel render "---"), the slope coefficients, T.C.,
    DW, R2 and G.L. The json format carries full precision.
    """
    _check_reports(reports)
    ordered = _ordered(reports)
    first = ordered[0]
    slope_labels = first.spec.slope_labels
    panel_regions = first.panel_regions
    has_const = any(r.fit.method in ("pooled", "gls") for r in ordered)
    has_dummies = any(r.fit.method == "lsdv" for r in ordered)

    if fmt == "json":
        return _report_json(ordered)

    header = ["Method"]
    if has_const:
        header.append("Const.")
    if has_dummies:
        header += [f"D{i + 1}" for i in range(len(panel_regions))]
    header += list(slope_labels) + ["T.C.", "DW", "R2", "G.L."]

    rows = []
    for report in ordered:
        fit = report.fit
        cells = [METHOD_TITLES[fit.method]]
        if has_const:
            cells.append(_estimate_cell(report, "Const.") if "Const." in fit.labels else "")
        if has_dummies:
            if fit.method == "lsdv":
                present = {region: f"D{i + 1}" for i, region in enumerate(report.regions)}
                for region in panel_regions:
                    cells.append(
                        _estimate_cell(report, present[region]) if region in present else "---"
                    )
            else:
                cells += ["" for _ in panel_regions]
        for label in slope_labels:
            cells.append(_estimate_cell(report, label) if label in fit.labels else "")
        cells += [
            _fmt3(report.tc),
            _fmt3(fit.dw),
            _fmt3(fit.r_squared),
            str(fit.df_residual),
        ]
        rows.append(cells)
    return _table(header, rows, fmt)


def _report_json(ordered: Sequence[ConvergenceReport]) -> str:
    first = ordered[0]
    payload = {
        "spec": {
            "sector": first.sector,
            "structural": list(first.spec.structural),
            "regions": list(first.panel_regions),
        },
        "rows": [],
    }
    for report in ordered:
        fit = report.fit
        estimates = {}
        for i, label in enumerate(fit.labels):
            estimates[label] = {
                "value": fit.coefficients[i],
                "t": fit.t_stats[i],
                "stars": report.stars(label),
            }
        row = {
            "method": fit.method,
            "estimates": estimates,
            "dummy_regions": (
                {f"D{i + 1}": region for i, region in enumerate(report.regions)}
                if fit.method == "lsdv"
                else {}
            ),
            "tc": report.tc,
            "half_life": report.half_life,
            "verdict": report.verdict,
            "dw": fit.dw,
            "r2": fit.r_squared,
            "df": fit.df_residual,
            "rows": report.row_count,
            "cells": report.source_cell_count,
            "dropped_transitions": report.dropped_transitions,
        }
        payload["rows"].append(row)
    return json.dumps(payload, indent=2) + "\n"


def render_sigma(series: SigmaSeries, fmt: str = "md") -> str:
    """Per-year dispersion table of log productivity."""
    if fmt == "json":
        payload = {
            "sector": series.sector,
            "rows": [
                {"year": year, "regions": count, "sigma": sigma}
                for year, sigma, count in zip(series.years, series.dispersion, series.region_counts)
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    header = ["Year", "Regions", "Sigma"]
    rows = [
        [str(year), str(count), f"{sigma:.6f}"]
        for year, sigma, count in zip(series.years, series.dispersion, series.region_counts)
    ]
    return _table(header, rows, fmt)


def render_location_quotients(
    panel: PanelDataset,
    fmt: str = "md",
) -> str:
    """Per-(region, year) location quotient table."""
    quotients = panel.structural.get("location_quotient")
    if not quotients:
        raise PanelDataError("panel has no location_quotient column")
    cells = sorted(quotients)
    if fmt == "json":
        payload = {
            "sector": panel.sector,
            "rows": [
                {"region": region, "year": year, "lq": quotients[(region, year)]}
                for region, year in cells
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    header = ["Region", "Year", "LQ"]
    rows = [[region, str(year), f"{quotients[(region, year)]:.6f}"] for region, year in cells]
    return _table(header, rows, fmt)


def render_recovery(stats: RecoveryStats, fmt: str = "md") -> str:
    """Monte Carlo recovery summary, one row per estimation method."""
    if fmt == "json":
        payload = {
            "b_true": stats.b_true,
            "replications": stats.replications,
            "rows": [
                {
                    "method": method,
                    "mean_estimate": stats.mean_estimate[method],
                    "mean_bias": stats.mean_bias[method],
                    "sd": stats.sd[method],
                    "coverage95": stats.coverage[method],
                }
                for method in stats.methods
            ],
        }
        return json.dumps(payload, indent=2) + "\n"
    header = ["Method", "Mean b", "Bias", "SD", "Coverage95"]
    rows = [
        [
            METHOD_TITLES[method],
            f"{stats.mean_estimate[method]:.6f}",
            f"{stats.mean_bias[method]:.6f}",
            f"{stats.sd[method]:.6f}",
            f"{stats.coverage[method]:.3f}",
        ]
        for method in stats.methods
    ]
    return _table(header, rows, fmt)


def render_panel_csv(panel: PanelDataset) -> str:
    """The CSV text write_panel would produce (for stdout use)."""
    buffer = io.StringIO()
    write_panel(panel, buffer)
    return buffer.getvalue()
