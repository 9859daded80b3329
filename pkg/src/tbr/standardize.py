"""League-centered effects, z-scores, and the 100-based index.

Centering subtracts each group's mean (taken over every entity, including
the zero-pinned reference) and folds the means into the intercept, so
fitted values are unchanged.  The index maps a z-score to 100 + 20z: 100 is
league average, 120 one standard deviation above, 140 two above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistributionError, IncompleteRosterError
from .estimator import EffectEstimates

SD_MODES = ("population", "sample")

# Convention note: standardizing fitted effects reproduces the published
# index tables with population SD, while externally published factor tables
# were standardized with sample SD.  Both paths tag their outputs with the
# mode used.
DEFAULT_SD_MODE = "population"


@dataclass(frozen=True)
class CenteredEstimates:
    """Effects re-expressed relative to the league average.

    Both effect maps are mean-zero over their full entity set; the adjusted
    intercept preserves every fitted value of the reference-based form.
    """

    intercept: float
    park_effects: dict[int, float]
    def_effects: dict[int, float]
    n_cells: int
    n_balls: int
    season: int | None = None

    def fitted_value(self, park: int, def_team: int) -> float:
        return self.intercept + self.park_effects[park] - self.def_effects[def_team]


def center(
    est: EffectEstimates,
    expected_parks: int | None = None,
    expected_teams: int | None = None,
) -> CenteredEstimates:
    """Center park and defense effects at their group means.

    park~ = park - mean(park); def~ = def - mean(def);
    b0~ = b0 + mean(park) - mean(def).  Means run over the full entity set
    including the reference zeros.
    """
    if expected_parks is not None and len(est.park_effects) != expected_parks:
        raise IncompleteRosterError(
            f"expected {expected_parks} parks, estimate covers "
            f"{len(est.park_effects)}"
        )
    if expected_teams is not None and len(est.def_effects) != expected_teams:
        raise IncompleteRosterError(
            f"expected {expected_teams} teams, estimate covers "
            f"{len(est.def_effects)}"
        )
    park_mean = float(np.mean(list(est.park_effects.values())))
    def_mean = float(np.mean(list(est.def_effects.values())))
    return CenteredEstimates(
        intercept=est.intercept + park_mean - def_mean,
        park_effects={p: v - park_mean for p, v in est.park_effects.items()},
        def_effects={d: v - def_mean for d, v in est.def_effects.items()},
        n_cells=est.n_cells,
        n_balls=est.n_balls,
        season=est.season,
    )


@dataclass(frozen=True)
class IndexRow:
    entity_id: int
    effect: float
    z: float
    index: float

    @property
    def index_rounded(self) -> int:
        return int(round(self.index))


@dataclass(frozen=True)
class IndexTable:
    """Per-entity z-scores and 100-based indices for one effect group."""

    entity_type: str  # "park" or "defense"
    rows: tuple[IndexRow, ...]
    sd_mode: str
    season: int | None = None

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def by_entity(self) -> dict[int, IndexRow]:
        return {row.entity_id: row for row in self.rows}

    @property
    def index_values(self) -> np.ndarray:
        return np.asarray([row.index for row in self.rows])


def zscore_index(
    effects: dict[int, float],
    sd_mode: str = DEFAULT_SD_MODE,
    entity_type: str = "park",
    season: int | None = None,
) -> IndexTable:
    """z = (effect - mean) / sd and index = 100 + 20z for each entity.

    ``sd_mode`` selects the divisor: "population" (n) or "sample" (n - 1).
    """
    if sd_mode not in SD_MODES:
        raise ValueError(f"sd_mode must be one of {SD_MODES}, got {sd_mode!r}")
    if len(effects) < 2:
        raise ValueError("need at least two entities to standardize")
    ids = sorted(effects)
    values = np.asarray([effects[i] for i in ids], dtype=np.float64)
    sd = float(values.std(ddof=0 if sd_mode == "population" else 1))
    if sd == 0.0:
        raise DegenerateDistributionError(
            "effects have zero spread; z-scores are undefined"
        )
    z = (values - values.mean()) / sd
    rows = tuple(
        IndexRow(entity_id=i, effect=float(v), z=float(zz), index=float(100 + 20 * zz))
        for i, v, zz in zip(ids, values, z)
    )
    return IndexTable(entity_type=entity_type, rows=rows, sd_mode=sd_mode,
                      season=season)


def index_tables(
    centered: CenteredEstimates, sd_mode: str = DEFAULT_SD_MODE
) -> tuple[IndexTable, IndexTable]:
    """(park, defense) index tables from centered estimates."""
    return (
        zscore_index(centered.park_effects, sd_mode, "park", centered.season),
        zscore_index(centered.def_effects, sd_mode, "defense", centered.season),
    )


def normal_upper_tail(z: float) -> float:
    """Pr(Z > z) for standard normal Z."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))
