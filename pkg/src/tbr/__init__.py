"""Ballpark and team-defense effect estimation from batted-ball data.

Pipeline: parse batted-ball events, build the league expected-total-bases
grid over exit velocity and launch angle, score per-ball residuals, fit the
simultaneous park/defense fixed-effects model per season, then center and
standardize the effects into 100-based indices.
"""

__version__ = "0.1.0"

from .baseline import BaselineGrid, GridSpec, Residuals, build_baseline, cell_of, residuals
from .diagnostics import (
    HomeAwaySplit,
    home_away_split,
    home_away_table,
    intercept_series,
    pearson,
    stability_report,
)
from .estimator import (
    CellAggregate,
    EffectEstimates,
    aggregate_cells,
    check_identifiable,
    fit_ols_ball_level,
    fit_wls,
)
from .ingest import BattedBalls, IngestReport, parse_events, total_bases
from .rosters import TeamRoster
from .standardize import (
    CenteredEstimates,
    IndexTable,
    center,
    index_tables,
    normal_upper_tail,
    zscore_index,
)
from .synthetic import EvLaSampler, GroundTruth, SyntheticConfig, generate_events, generate_residuals

__all__ = [
    "BaselineGrid",
    "BattedBalls",
    "CellAggregate",
    "CenteredEstimates",
    "EffectEstimates",
    "EvLaSampler",
    "GridSpec",
    "GroundTruth",
    "HomeAwaySplit",
    "IndexTable",
    "IngestReport",
    "Residuals",
    "SyntheticConfig",
    "TeamRoster",
    "aggregate_cells",
    "build_baseline",
    "cell_of",
    "center",
    "check_identifiable",
    "fit_ols_ball_level",
    "fit_wls",
    "generate_events",
    "generate_residuals",
    "home_away_split",
    "home_away_table",
    "index_tables",
    "intercept_series",
    "normal_upper_tail",
    "parse_events",
    "pearson",
    "residuals",
    "stability_report",
    "total_bases",
    "zscore_index",
]
