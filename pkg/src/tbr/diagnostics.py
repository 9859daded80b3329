"""Validation views over residuals and estimates: home/away residual splits,
cross-season index stability, and the league-intercept time series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baseline import Residuals
from .standardize import CenteredEstimates, IndexTable


@dataclass(frozen=True)
class HomeAwaySplit:
    """Mean residual for one team-season, split four ways.

    ``team_*`` quadrants cover the team's own batted balls, ``opp_*`` the
    balls it defended; home means the team's own park.  Quadrants are
    disjoint and together cover every ball the team was involved in.
    Quadrant means are NaN when empty (counted in the matching n_*).
    """

    team: int
    season: int
    team_home: float
    team_away: float
    opp_home: float
    opp_away: float
    n_team_home: int
    n_team_away: int
    n_opp_home: int
    n_opp_away: int

    @property
    def empty_quadrants(self) -> tuple[str, ...]:
        return tuple(
            name
            for name in ("team_home", "team_away", "opp_home", "opp_away")
            if getattr(self, "n_" + name) == 0
        )


def _mean(values: np.ndarray) -> float:
    return float(values.mean()) if len(values) else float("nan")


def home_away_split(
    residuals: Residuals, team: int, season: int, home_park: int
) -> HomeAwaySplit:
    """Four-way split of a team-season's residuals by side and venue."""
    sub = residuals.for_season(season)
    balls, r = sub.balls, sub.r
    batted = balls.bat_team == team
    fielded = balls.def_team == team
    at_home = balls.park == home_park
    quads = {
        "team_home": batted & at_home,
        "team_away": batted & ~at_home,
        "opp_home": fielded & at_home,
        "opp_away": fielded & ~at_home,
    }
    return HomeAwaySplit(
        team=team,
        season=season,
        **{name: _mean(r[mask]) for name, mask in quads.items()},
        **{"n_" + name: int(mask.sum()) for name, mask in quads.items()},
    )


def home_away_table(
    residuals: Residuals, home_parks: dict[int, int], season: int
) -> list[HomeAwaySplit]:
    """Splits for every team in ``home_parks``, sorted by team id."""
    return [
        home_away_split(residuals, team, season, park)
        for team, park in sorted(home_parks.items())
    ]


@dataclass(frozen=True)
class StabilityRow:
    entity_id: int | None  # None marks the cross-entity average row
    sd: float
    n_seasons: int


def stability_report(
    tables: list[IndexTable], sd_mode: str = "sample"
) -> list[StabilityRow]:
    """Per-entity standard deviation of the index across seasons.

    The final row (entity_id None) is the plain average of the per-entity
    SDs.  ``sd_mode`` "sample" divides by n-1 (the convention used for
    published multi-season variability tables); "population" divides by n.
    """
    if sd_mode not in ("population", "sample"):
        raise ValueError(f"bad sd_mode {sd_mode!r}")
    ddof = 0 if sd_mode == "population" else 1
    series: dict[int, list[float]] = {}
    for table in tables:
        for row in table:
            series.setdefault(row.entity_id, []).append(row.index)
    rows = []
    for entity in sorted(series):
        values = np.asarray(series[entity])
        if len(values) < 2:
            raise ValueError(
                f"entity {entity} appears in {len(values)} season(s); "
                "need at least 2 for a stability report"
            )
        rows.append(StabilityRow(entity, float(values.std(ddof=ddof)), len(values)))
    rows.append(StabilityRow(
        None,
        float(np.mean([row.sd for row in rows])),
        min(row.n_seasons for row in rows),
    ))
    return rows


def intercept_series(
    centered_by_season: dict[int, CenteredEstimates]
) -> list[tuple[int, float]]:
    """(season, centered intercept) pairs in season order."""
    return [
        (season, centered_by_season[season].intercept)
        for season in sorted(centered_by_season)
    ]


def pearson(x, y) -> float:
    """Plain Pearson correlation; NaN pairs are dropped."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ok = ~(np.isnan(x) | np.isnan(y))
    x, y = x[ok], y[ok]
    if len(x) < 2:
        return float("nan")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return float("nan")
    return float(xc @ yc) / denom


def reference_correlation(
    ours: IndexTable, reference: dict[int, float]
) -> tuple[float, int]:
    """Correlation between our per-entity indices and an external metric.

    Returns (r, number of entities compared); entities missing from either
    side are skipped.
    """
    shared = sorted(set(row.entity_id for row in ours) & set(reference))
    by_entity = ours.by_entity()
    x = [by_entity[e].index for e in shared]
    y = [reference[e] for e in shared]
    return pearson(x, y), len(shared)
