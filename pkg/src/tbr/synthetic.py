"""Synthetic batted-ball data with known ground truth.

Two generation modes share one additive model (residual = intercept +
park - defense + noise):

* residual mode emits scored residuals directly, isolating the estimator;
* event mode emits a CSV-shaped table in the ingest schema, with integer
  total bases encoded so each ball's expected TB is a per-cell base value
  shifted by the model residual, exercising ingest and the baseline grid.

Generation is deterministic per seed and parallel-safe: every (season,
schedule entry) pair draws from its own counter-based stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .baseline import GridSpec, Residuals
from .errors import TbrError
from .estimator import check_identifiable
from .ingest import BattedBalls
from .rosters import DEFAULT_TEAMS

TB_EVENT = {0: "field_out", 1: "single", 2: "double", 3: "triple", 4: "home_run"}


@dataclass(frozen=True)
class EvLaSampler:
    """Exit velocity / launch angle distribution for event mode."""

    kind: str = "gaussian"
    ev_mean: float = 88.0
    ev_sd: float = 14.0
    la_mean: float = 12.0
    la_sd: float = 22.0

    def draw(self, rng, n, spec: GridSpec):
        if self.kind == "gaussian":
            ev = rng.normal(self.ev_mean, self.ev_sd, n)
            la = rng.normal(self.la_mean, self.la_sd, n)
        elif self.kind == "uniform":
            ev = rng.uniform(spec.ev_min, spec.ev_max, n)
            la = rng.uniform(spec.la_min, spec.la_max, n)
        else:
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        return (
            np.clip(ev, spec.ev_min, spec.ev_max),
            np.clip(la, spec.la_min, spec.la_max),
        )

    def as_dict(self):
        return {
            "kind": self.kind,
            "ev_mean": self.ev_mean, "ev_sd": self.ev_sd,
            "la_mean": self.la_mean, "la_sd": self.la_sd,
        }


@dataclass(frozen=True)
class SyntheticConfig:
    """Ground-truth parameters and schedule for one synthetic dataset.

    ``schedule`` lists (park, visiting team, balls) triples; each entry's
    balls are split evenly between the home side batting (visitor fields)
    and the visitor batting (home team fields).  Park p is the home park of
    team p.  ``true_park`` and ``true_def`` are stored mean-zero so
    recovered centered estimates compare to them directly.
    """

    seed: int
    n_teams: int
    schedule: tuple[tuple[int, int, int], ...]
    true_intercept: float = 0.0
    true_park: dict[int, float] = field(default_factory=dict)
    true_def: dict[int, float] = field(default_factory=dict)
    noise_sd: float = 0.0
    seasons: tuple[int, ...] = (2024,)
    season_offsets: dict[int, float] = field(default_factory=dict)
    sampler: EvLaSampler = EvLaSampler()

    def __post_init__(self):
        for name, effects in (("true_park", self.true_park),
                              ("true_def", self.true_def)):
            if effects:
                if set(effects) != set(range(1, self.n_teams + 1)):
                    raise ValueError(f"{name} must cover ids 1..{self.n_teams}")
                mean = float(np.mean(list(effects.values())))
                if abs(mean) > 1e-9:
                    raise ValueError(f"{name} must be mean-zero, mean={mean:g}")
        if not self.schedule:
            raise ValueError("empty schedule")
        for park, away, n in self.schedule:
            if not (1 <= park <= self.n_teams and 1 <= away <= self.n_teams):
                raise ValueError(
                    f"schedule entry ({park}, {away}, {n}) out of range")
            if away == park:
                raise ValueError(f"team {away} cannot visit its own park")
            if n <= 0:
                raise ValueError("schedule ball counts must be positive")

    @property
    def park_ids(self):
        return tuple(range(1, self.n_teams + 1))

    @property
    def team_ids(self):
        return tuple(range(1, self.n_teams + 1))

    @property
    def n_balls(self):
        return sum(n for _, _, n in self.schedule) * len(self.seasons)

    @staticmethod
    def balanced_schedule(n_teams: int, balls_per_matchup: int):
        """Every team visits every other park once."""
        return tuple(
            (park, away, balls_per_matchup)
            for park in range(1, n_teams + 1)
            for away in range(1, n_teams + 1)
            if away != park
        )

    @classmethod
    def random(
        cls,
        seed: int,
        n_teams: int = 30,
        balls_per_matchup: int = 100,
        true_intercept: float = 0.0,
        effect_sd: float = 0.02,
        noise_sd: float = 0.0,
        seasons=(2024,),
        season_offsets=None,
        schedule=None,
    ) -> "SyntheticConfig":
        """Config with effects drawn Normal(0, effect_sd), then centered."""
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(seed, spawn_key=(0xEFFEC7,)))
        )
        ids = range(1, n_teams + 1)
        park = rng.normal(0.0, effect_sd, n_teams)
        dfx = rng.normal(0.0, effect_sd, n_teams)
        park -= park.mean()
        dfx -= dfx.mean()
        return cls(
            seed=seed,
            n_teams=n_teams,
            schedule=tuple(schedule) if schedule is not None
            else cls.balanced_schedule(n_teams, balls_per_matchup),
            true_intercept=true_intercept,
            true_park={i: float(v) for i, v in zip(ids, park)},
            true_def={i: float(v) for i, v in zip(ids, dfx)},
            noise_sd=noise_sd,
            seasons=tuple(seasons),
            season_offsets=dict(season_offsets or {}),
        )

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_teams": self.n_teams,
            "schedule": [list(e) for e in self.schedule],
            "true_intercept": self.true_intercept,
            "true_park": {str(k): v for k, v in self.true_park.items()},
            "true_def": {str(k): v for k, v in self.true_def.items()},
            "noise_sd": self.noise_sd,
            "seasons": list(self.seasons),
            "season_offsets": {str(k): v for k, v in self.season_offsets.items()},
            "sampler": self.sampler.as_dict(),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SyntheticConfig":
        try:
            return cls(
                seed=int(raw["seed"]),
                n_teams=int(raw["n_teams"]),
                schedule=tuple(tuple(int(x) for x in e) for e in raw["schedule"]),
                true_intercept=float(raw.get("true_intercept", 0.0)),
                true_park={int(k): float(v)
                           for k, v in raw.get("true_park", {}).items()},
                true_def={int(k): float(v)
                          for k, v in raw.get("true_def", {}).items()},
                noise_sd=float(raw.get("noise_sd", 0.0)),
                seasons=tuple(int(s) for s in raw.get("seasons", [2024])),
                season_offsets={int(k): float(v)
                                for k, v in raw.get("season_offsets", {}).items()},
                sampler=EvLaSampler(**raw["sampler"]) if "sampler" in raw
                else EvLaSampler(),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TbrError(f"malformed synthetic config: {exc}") from exc


@dataclass(frozen=True)
class GroundTruth:
    """What the generator injected; the recovery target."""

    intercept: float
    park: dict[int, float]
    defense: dict[int, float]
    season_offsets: dict[int, float]
    noise_sd: float
    config: dict

    def as_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "park": {str(k): v for k, v in self.park.items()},
            "defense": {str(k): v for k, v in self.defense.items()},
            "season_offsets": {str(k): v for k, v in self.season_offsets.items()},
            "noise_sd": self.noise_sd,
            "config": self.config,
        }


def _effects_or_zero(cfg: SyntheticConfig):
    park = cfg.true_park or {i: 0.0 for i in cfg.park_ids}
    dfx = cfg.true_def or {i: 0.0 for i in cfg.team_ids}
    return park, dfx


def _entry_rng(cfg: SyntheticConfig, season_i: int, entry_i: int):
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(season_i, entry_i))
    return np.random.Generator(np.random.Philox(ss))


def _check_schedule(cfg: SyntheticConfig):
    """Refuse schedules the estimator could not fit, with its diagnostic."""
    pairs = set()
    for park, away, _ in cfg.schedule:
        pairs.add((park, away))       # visitor defends the home half
        pairs.add((park, park))       # home team defends the visitor half
    check_identifiable(sorted(pairs), cfg.park_ids, cfg.team_ids)


def _entry_attribution(park: int, away: int, n: int):
    """(def_team, bat_team) arrays for one schedule entry; home team owns
    the park, balls split between the two batting sides."""
    n_home_bat = n // 2
    home = park
    def_team = np.concatenate([
        np.full(n_home_bat, away, dtype=np.int64),
        np.full(n - n_home_bat, home, dtype=np.int64),
    ])
    bat_team = np.concatenate([
        np.full(n_home_bat, home, dtype=np.int64),
        np.full(n - n_home_bat, away, dtype=np.int64),
    ])
    return def_team, bat_team


def generate_residuals(cfg: SyntheticConfig) -> tuple[Residuals, GroundTruth]:
    """Draw model residuals directly (estimator-oriented mode).

    EV/LA/TB columns are filled with placeholder zeros; only attribution
    and the residual value are meaningful here.
    """
    _check_schedule(cfg)
    park_fx, def_fx = _effects_or_zero(cfg)
    parts, r_parts = [], []
    for si, season in enumerate(cfg.seasons):
        offset = cfg.season_offsets.get(season, 0.0)
        for ei, (park, away, n) in enumerate(cfg.schedule):
            def_team, bat_team = _entry_attribution(park, away, n)
            mean_r = (cfg.true_intercept + offset + park_fx[park]
                      - np.array([def_fx[d] for d in def_team]))
            if cfg.noise_sd > 0:
                rng = _entry_rng(cfg, si, ei)
                r = mean_r + rng.normal(0.0, cfg.noise_sd, n)
            else:
                r = mean_r
            parts.append(BattedBalls(
                ev=np.zeros(n), la=np.zeros(n), tb=np.zeros(n, dtype=np.int64),
                park=np.full(n, park, dtype=np.int64),
                def_team=def_team, bat_team=bat_team,
                season=np.full(n, season, dtype=np.int64),
            ))
            r_parts.append(r)
    balls = BattedBalls.concat(parts)
    res = Residuals(balls, np.concatenate(r_parts), "drop", 0)
    truth = GroundTruth(cfg.true_intercept, park_fx, def_fx,
                        dict(cfg.season_offsets), cfg.noise_sd, cfg.as_dict())
    return res, truth


def _cell_base_tb(flat_idx, spec: GridSpec):
    """Deterministic per-cell expected TB in [0.5, 3.5]: varies smoothly
    across the grid so the baseline lookup is actually exercised."""
    i = flat_idx // spec.n_la
    j = flat_idx % spec.n_la
    u = (i + 0.5) / spec.n_ev
    v = (j + 0.5) / spec.n_la
    return 0.5 + 3.0 * (0.5 - 0.5 * np.cos(np.pi * u)) * (1.0 - np.abs(2 * v - 1))


def generate_events(
    cfg: SyntheticConfig, spec: GridSpec | None = None
) -> tuple[pd.DataFrame, GroundTruth]:
    """Emit an ingest-schema event table (end-to-end mode).

    Each ball's TB is an integer draw whose conditional mean is the cell
    base value plus the model residual, so a baseline built from the output
    recovers the base values and the scored residuals carry the effects.
    """
    _check_schedule(cfg)
    spec = spec or GridSpec()
    if cfg.n_teams > len(DEFAULT_TEAMS):
        raise ValueError(f"event mode supports at most {len(DEFAULT_TEAMS)} teams")
    codes = {i + 1: code for i, (code, _) in enumerate(DEFAULT_TEAMS[: cfg.n_teams])}
    park_fx, def_fx = _effects_or_zero(cfg)

    frames = []
    for si, season in enumerate(cfg.seasons):
        offset = cfg.season_offsets.get(season, 0.0)
        for ei, (park, away, n) in enumerate(cfg.schedule):
            rng = _entry_rng(cfg, si, ei)
            def_team, bat_team = _entry_attribution(park, away, n)
            ev, la = cfg.sampler.draw(rng, n, spec)
            # round before binning so the emitted values land in the same
            # cells the TB encoding was computed from
            ev = np.round(ev, 2)
            la = np.round(la, 2)
            r = (cfg.true_intercept + offset + park_fx[park]
                 - np.array([def_fx[d] for d in def_team]))
            if cfg.noise_sd > 0:
                r = r + rng.normal(0.0, cfg.noise_sd, n)
            target = _cell_base_tb(spec.flat_index(ev, la), spec) + r
            np.clip(target, 0.0, 4.0, out=target)
            lo = np.floor(target)
            tb = (lo + (rng.random(n) < (target - lo))).astype(np.int64)
            frames.append(pd.DataFrame({
                "launch_speed": ev,
                "launch_angle": la,
                "events": [TB_EVENT[t] for t in tb],
                "home_team": codes[park],
                "away_team": codes[away],
                "inning_topbot": np.where(bat_team == park, "Bot", "Top"),
                "game_date": f"{season}-07-01",
                "game_year": season,
                "game_type": "R",
            }))
    table = pd.concat(frames, ignore_index=True)
    truth = GroundTruth(cfg.true_intercept, park_fx, def_fx,
                        dict(cfg.season_offsets), cfg.noise_sd, cfg.as_dict())
    return table, truth
