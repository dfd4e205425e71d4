import numpy as np
import pytest

from convpanel.panel import PanelDataset


def make_panel(
    regions=("north", "center", "south"),
    years=range(2000, 2006),
    sector="industry",
    seed=0,
    structural_names=(),
    base=100.0,
):
    """Balanced panel with lognormal-ish productivity and filled structural columns."""
    rng = np.random.default_rng(seed)
    years = tuple(years)
    values = {
        (region, year): float(base * np.exp(0.3 * rng.standard_normal()))
        for region in regions
        for year in years
    }
    structural = {
        name: {
            (region, year): float(rng.normal(1.0, 0.2))
            for region in regions
            for year in years
        }
        for name in structural_names
    }
    return PanelDataset(
        regions=tuple(regions),
        periods=years,
        sector=sector,
        values=values,
        structural=structural,
    )


@pytest.fixture
def small_panel():
    return make_panel()
