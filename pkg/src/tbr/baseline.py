"""League-wide expected total bases on an exit-velocity x launch-angle grid,
and per-ball residuals against it.

The grid holds the empirical mean of total bases per (EV, LA) cell, pooled
over every season it was built from.  A ball's residual is its observed
total bases minus the cell mean: positive means the ball beat the league
average outcome for comparable contact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import artifacts, kernels
from .errors import EmptyCellError, SchemaError

GRID_MAGIC = "TBR-BASELINE-GRID"
GRID_FORMAT_VERSION = 1

EMPTY_CELL_POLICIES = ("drop", "nearest", "global_mean", "abort")


@dataclass(frozen=True)
class GridSpec:
    """Regular 2-D binning of the EV x LA plane.

    Defaults: 3 mph bins over [0, 120] mph and 3 degree bins over
    [-90, 90] degrees, i.e. a 40 x 60 grid.
    """

    ev_min: float = 0.0
    ev_max: float = 120.0
    ev_width: float = 3.0
    la_min: float = -90.0
    la_max: float = 90.0
    la_width: float = 3.0

    def __post_init__(self):
        for lo, hi, width, axis in (
            (self.ev_min, self.ev_max, self.ev_width, "ev"),
            (self.la_min, self.la_max, self.la_width, "la"),
        ):
            if width <= 0 or hi <= lo:
                raise ValueError(f"invalid {axis} axis: [{lo}, {hi}] width {width}")
            n = (hi - lo) / width
            if abs(n - round(n)) > 1e-9:
                raise ValueError(
                    f"{axis} range [{lo}, {hi}] is not an integer number of "
                    f"bins of width {width}"
                )

    @property
    def n_ev(self) -> int:
        return int(round((self.ev_max - self.ev_min) / self.ev_width))

    @property
    def n_la(self) -> int:
        return int(round((self.la_max - self.la_min) / self.la_width))

    @property
    def n_cells(self) -> int:
        return self.n_ev * self.n_la

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_ev, self.n_la)

    def contains(self, ev, la):
        """Vectorized in-range mask."""
        ev = np.asarray(ev)
        la = np.asarray(la)
        return (
            (ev >= self.ev_min)
            & (ev <= self.ev_max)
            & (la >= self.la_min)
            & (la <= self.la_max)
        )

    def flat_index(self, ev, la):
        """Row-major flat cell indices for in-range arrays (unchecked)."""
        return kernels.flat_bin_index(
            np.asarray(ev, dtype=np.float64),
            np.asarray(la, dtype=np.float64),
            self.ev_min, self.ev_width, self.n_ev,
            self.la_min, self.la_width, self.n_la,
        )

    def as_dict(self) -> dict:
        return {
            "ev_min": self.ev_min, "ev_max": self.ev_max, "ev_width": self.ev_width,
            "la_min": self.la_min, "la_max": self.la_max, "la_width": self.la_width,
        }


def cell_of(ev: float, la: float, spec: GridSpec) -> tuple[int, int]:
    """(ev bin, la bin) for a single ball; bins are [lo, lo+width), the top
    edge of each axis maps into the last bin.  Raises on out-of-range input.
    """
    if not (spec.ev_min <= ev <= spec.ev_max):
        raise ValueError(f"ev={ev} outside [{spec.ev_min}, {spec.ev_max}]")
    if not (spec.la_min <= la <= spec.la_max):
        raise ValueError(f"la={la} outside [{spec.la_min}, {spec.la_max}]")
    flat = int(spec.flat_index(np.array([ev]), np.array([la]))[0])
    return divmod(flat, spec.n_la)


@dataclass(frozen=True)
class BaselineGrid:
    """Expected total bases (mu) and observation counts per grid cell.

    ``mu`` is NaN in cells with no observations.
    """

    spec: GridSpec
    mu: np.ndarray
    count: np.ndarray
    seasons_pooled: tuple[int, ...] = ()

    @property
    def n_balls(self) -> int:
        return int(self.count.sum())

    @property
    def populated(self) -> np.ndarray:
        return self.count > 0

    @property
    def global_mean(self) -> float:
        total = float((np.where(self.populated, self.mu, 0.0) * self.count).sum())
        return total / self.n_balls

    def save(self, path, config: dict | None = None) -> None:
        meta = artifacts.meta_block(
            config,
            magic=GRID_MAGIC,
            format_version=GRID_FORMAT_VERSION,
            spec=self.spec.as_dict(),
            seasons_pooled=list(self.seasons_pooled),
        )
        artifacts.save_npz_deterministic(
            path,
            {
                "meta_json": np.frombuffer(
                    artifacts.canonical_json(meta).encode(), dtype=np.uint8
                ),
                "mu": self.mu,
                "count": self.count,
            },
        )

    @classmethod
    def load(cls, path) -> "BaselineGrid":
        import json

        with np.load(path) as data:
            try:
                meta = json.loads(bytes(data["meta_json"]))
                mu = data["mu"]
                count = data["count"]
            except KeyError as exc:
                raise SchemaError(f"{path} is not a baseline grid artifact: {exc}")
        if meta.get("magic") != GRID_MAGIC:
            raise SchemaError(f"{path}: bad magic {meta.get('magic')!r}")
        if meta.get("format_version") != GRID_FORMAT_VERSION:
            raise SchemaError(
                f"{path}: unsupported format version {meta.get('format_version')}"
            )
        spec = GridSpec(**meta["spec"])
        return cls(spec, mu, count, tuple(meta.get("seasons_pooled", ())))


def build_baseline(balls, spec: GridSpec | None = None) -> BaselineGrid:
    """Empirical per-cell mean of total bases over ``balls``.

    Deterministic and order-independent: every permutation of the input
    yields identical mu and count arrays.
    """
    spec = spec or GridSpec()
    if len(balls.ev) == 0:
        raise ValueError("cannot build a baseline from zero batted balls")
    idx = spec.flat_index(balls.ev, balls.la)
    sums, counts = kernels.accumulate(idx, balls.tb.astype(np.float64), spec.n_cells)
    with np.errstate(invalid="ignore"):
        mu = sums / counts
    mu[counts == 0] = np.nan
    seasons = tuple(sorted({int(s) for s in np.unique(balls.season)}))
    return BaselineGrid(
        spec,
        mu.reshape(spec.shape),
        counts.reshape(spec.shape),
        seasons,
    )


@dataclass(frozen=True)
class Residuals:
    """Per-ball total bases residuals, with the balls that produced them.

    ``empty_cell_balls`` counts input balls that landed in unpopulated grid
    cells; how they were handled is recorded in ``empty_cell_policy``.
    """

    balls: "BattedBalls"  # noqa: F821 - structural; see tbr.ingest
    r: np.ndarray
    empty_cell_policy: str = "drop"
    empty_cell_balls: int = 0

    def __len__(self):
        return len(self.r)

    def take(self, mask) -> "Residuals":
        return replace(self, balls=self.balls.take(mask), r=self.r[mask])

    def for_season(self, season: int) -> "Residuals":
        return self.take(self.balls.season == season)

    @property
    def seasons(self) -> tuple[int, ...]:
        return tuple(sorted({int(s) for s in np.unique(self.balls.season)}))


RESIDUALS_MAGIC = "TBR-RESIDUALS"
RESIDUALS_FORMAT_VERSION = 1


def save_residuals(res: Residuals, path, config: dict | None = None) -> None:
    """Persist scored residuals with their attribution columns.

    EV/LA/TB are not stored; downstream diagnostics only need park, teams,
    season, and the residual value.
    """
    meta = artifacts.meta_block(
        config,
        magic=RESIDUALS_MAGIC,
        format_version=RESIDUALS_FORMAT_VERSION,
        empty_cell_policy=res.empty_cell_policy,
        empty_cell_balls=res.empty_cell_balls,
    )
    artifacts.save_npz_deterministic(
        path,
        {
            "meta_json": np.frombuffer(
                artifacts.canonical_json(meta).encode(), dtype=np.uint8
            ),
            "r": res.r,
            "park": res.balls.park.astype(np.int16),
            "def_team": res.balls.def_team.astype(np.int16),
            "bat_team": res.balls.bat_team.astype(np.int16),
            "season": res.balls.season.astype(np.int16),
        },
    )


def load_residuals(path) -> Residuals:
    import json

    from .ingest import BattedBalls

    with np.load(path) as data:
        try:
            meta = json.loads(bytes(data["meta_json"]))
            r = data["r"]
            park = data["park"].astype(np.int64)
            def_team = data["def_team"].astype(np.int64)
            bat_team = data["bat_team"].astype(np.int64)
            season = data["season"].astype(np.int64)
        except KeyError as exc:
            raise SchemaError(f"{path} is not a residuals artifact: {exc}")
    if meta.get("magic") != RESIDUALS_MAGIC:
        raise SchemaError(f"{path}: bad magic {meta.get('magic')!r}")
    if meta.get("format_version") != RESIDUALS_FORMAT_VERSION:
        raise SchemaError(
            f"{path}: unsupported format version {meta.get('format_version')}"
        )
    n = len(r)
    balls = BattedBalls(
        ev=np.zeros(n), la=np.zeros(n), tb=np.zeros(n, dtype=np.int64),
        park=park, def_team=def_team, bat_team=bat_team, season=season,
    )
    return Residuals(
        balls, r, meta.get("empty_cell_policy", "drop"),
        int(meta.get("empty_cell_balls", 0)),
    )


def _nearest_populated(grid: BaselineGrid) -> np.ndarray:
    """mu with empty cells filled from the nearest populated cell (Euclidean
    distance in bin-index space; ties resolved deterministically)."""
    from scipy import ndimage

    empty = ~grid.populated
    if not empty.any():
        return grid.mu
    _, (inear, jnear) = ndimage.distance_transform_edt(empty, return_indices=True)
    return grid.mu[inear, jnear]


def residuals(balls, grid: BaselineGrid, empty_cell_policy: str = "drop") -> Residuals:
    """Total bases residual r = tb - mu[cell] for every ball.

    Balls in cells the grid never observed are handled per
    ``empty_cell_policy``: "drop" removes them (counted), "nearest" scores
    against the nearest populated cell, "global_mean" against the grid-wide
    mean, "abort" raises EmptyCellError naming the first offending cell.
    """
    if empty_cell_policy not in EMPTY_CELL_POLICIES:
        raise ValueError(
            f"empty_cell_policy must be one of {EMPTY_CELL_POLICIES}, "
            f"got {empty_cell_policy!r}"
        )
    spec = grid.spec
    inside = spec.contains(balls.ev, balls.la)
    if not inside.all():
        bad = int((~inside).sum())
        raise ValueError(f"{bad} balls fall outside the grid ranges")

    idx = spec.flat_index(balls.ev, balls.la)
    empty_mask = ~grid.populated.ravel()[idx]
    n_empty = int(empty_mask.sum())

    if n_empty and empty_cell_policy == "abort":
        first = int(idx[empty_mask][0])
        cell = divmod(first, spec.n_la)
        raise EmptyCellError(
            f"{n_empty} balls landed in unpopulated cells; first is cell {cell}",
            cell,
        )

    if empty_cell_policy == "nearest":
        table = _nearest_populated(grid).ravel()
    elif empty_cell_policy == "global_mean":
        table = np.where(grid.populated, grid.mu, grid.global_mean).ravel()
    else:
        table = grid.mu.ravel()

    r = kernels.subtract_lookup(idx, balls.tb.astype(np.float64), table)

    if empty_cell_policy == "drop" and n_empty:
        keep = ~empty_mask
        return Residuals(balls.take(keep), r[keep], empty_cell_policy, n_empty)
    return Residuals(balls, r, empty_cell_policy, n_empty)
