"""Parse raw batted-ball CSV exports into validated, columnar event data.

Input format follows the common Statcast export naming: ``launch_speed``,
``launch_angle``, ``events``, ``home_team``, ``away_team``,
``inning_topbot``, ``game_date`` (plus optional ``game_year`` and
``game_type``).  Rows are kept only for in-play batted balls with measured
EV/LA inside the grid ranges; everything else is dropped and tallied by
reason in the IngestReport.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from typing import Iterable

import numpy as np
import pandas as pd

from .baseline import GridSpec
from .errors import NotBattedBallError, SchemaError, UnknownEventError
from .rosters import TeamRoster

REQUIRED_COLUMNS = (
    "launch_speed",
    "launch_angle",
    "events",
    "home_team",
    "away_team",
    "inning_topbot",
    "game_date",
)

# Total bases credited per in-play event code.  Errors and fielder's-choice
# plays stay in the sample at 0 bases: they are defensive outcomes, and the
# residual is meant to charge them to the defense (drop_error_plays opts out).
EVENT_TOTAL_BASES = {
    "single": 1,
    "double": 2,
    "triple": 3,
    "home_run": 4,
    "field_out": 0,
    "force_out": 0,
    "grounded_into_double_play": 0,
    "double_play": 0,
    "triple_play": 0,
    "sac_fly": 0,
    "sac_fly_double_play": 0,
    "sac_bunt": 0,
    "sac_bunt_double_play": 0,
    "field_error": 0,
    "fielders_choice": 0,
    "fielders_choice_out": 0,
}

ERROR_PLAY_EVENTS = frozenset(
    {"field_error", "fielders_choice", "fielders_choice_out"}
)

# Plate appearance outcomes that do not put a ball in play.
NON_BATTED_EVENTS = frozenset(
    {
        "strikeout",
        "strikeout_double_play",
        "walk",
        "intent_walk",
        "hit_by_pitch",
        "catcher_interf",
        "interf_def",
        "balk",
        "wild_pitch",
        "passed_ball",
        "caught_stealing_2b",
        "caught_stealing_3b",
        "caught_stealing_home",
        "pickoff_1b",
        "pickoff_2b",
        "pickoff_3b",
        "pickoff_caught_stealing_2b",
        "pickoff_caught_stealing_3b",
        "pickoff_caught_stealing_home",
        "pickoff_error_1b",
        "pickoff_error_2b",
        "pickoff_error_3b",
        "stolen_base_2b",
        "stolen_base_3b",
        "stolen_base_home",
        "runner_double_play",
        "other_out",
        "other_advance",
        "sac_bunt_strikeout",
        "truncated_pa",
        "game_advisory",
        "ejection",
        "",
    }
)


def total_bases(event_code: str) -> int:
    """Total bases for an in-play event code.

    Raises NotBattedBallError for valid non-batted-ball codes (strikeouts,
    walks, steals, ...) and UnknownEventError for anything unrecognized.
    """
    code = (event_code or "").strip().lower()
    if code in EVENT_TOTAL_BASES:
        return EVENT_TOTAL_BASES[code]
    if code in NON_BATTED_EVENTS:
        raise NotBattedBallError(f"{event_code!r} is not a batted-ball event")
    raise UnknownEventError(f"unrecognized event code {event_code!r}")


@dataclass(frozen=True)
class BattedBalls:
    """Column-oriented batted-ball sample.

    All arrays share one length.  ``park`` is always the home team's
    registered park, ``def_team`` is the home team in the top half of an
    inning and the away team in the bottom half, and ``bat_team`` is the
    other one.
    """

    ev: np.ndarray
    la: np.ndarray
    tb: np.ndarray
    park: np.ndarray
    def_team: np.ndarray
    bat_team: np.ndarray
    season: np.ndarray

    def __post_init__(self):
        n = len(self.ev)
        for f in fields(self):
            if len(getattr(self, f.name)) != n:
                raise ValueError("all BattedBalls columns must share one length")

    def __len__(self):
        return len(self.ev)

    def take(self, mask_or_index) -> "BattedBalls":
        return BattedBalls(
            *(getattr(self, f.name)[mask_or_index] for f in fields(self))
        )

    @classmethod
    def from_records(cls, records: Iterable[tuple]) -> "BattedBalls":
        """Build from (ev, la, tb, park, def_team, bat_team, season) tuples."""
        rows = list(records)
        cols = list(zip(*rows)) if rows else [[]] * 7
        return cls(
            np.asarray(cols[0], dtype=np.float64),
            np.asarray(cols[1], dtype=np.float64),
            np.asarray(cols[2], dtype=np.int64),
            np.asarray(cols[3], dtype=np.int64),
            np.asarray(cols[4], dtype=np.int64),
            np.asarray(cols[5], dtype=np.int64),
            np.asarray(cols[6], dtype=np.int64),
        )

    @classmethod
    def concat(cls, parts: Iterable["BattedBalls"]) -> "BattedBalls":
        parts = list(parts)
        if not parts:
            return cls.from_records([])
        return cls(
            *(
                np.concatenate([getattr(p, f.name) for p in parts])
                for f in fields(cls)
            )
        )


@dataclass
class IngestReport:
    """Row accounting for one parse run; kept + dropped always equals total."""

    rows_total: int = 0
    rows_kept: int = 0
    not_batted_ball: int = 0
    unknown_event: int = 0
    unknown_team: int = 0
    null_ev: int = 0
    null_la: int = 0
    out_of_range: int = 0
    out_of_season: int = 0
    non_regular_season: int = 0
    error_plays_dropped: int = 0
    drop_reasons: tuple[str, ...] = field(
        default=(
            "not_batted_ball",
            "unknown_event",
            "unknown_team",
            "null_ev",
            "null_la",
            "out_of_range",
            "out_of_season",
            "non_regular_season",
            "error_plays_dropped",
        ),
        repr=False,
    )

    @property
    def rows_dropped(self) -> int:
        return sum(getattr(self, reason) for reason in self.drop_reasons)

    def merge(self, other: "IngestReport") -> None:
        self.rows_total += other.rows_total
        self.rows_kept += other.rows_kept
        for reason in self.drop_reasons:
            setattr(self, reason, getattr(self, reason) + getattr(other, reason))

    def as_dict(self) -> dict:
        d = {"rows_total": self.rows_total, "rows_kept": self.rows_kept,
             "rows_dropped": self.rows_dropped}
        d.update({reason: getattr(self, reason) for reason in self.drop_reasons})
        return d


def _check_header(columns) -> None:
    missing = [c for c in REQUIRED_COLUMNS if c not in columns]
    if missing:
        raise SchemaError(
            "input is missing required columns: " + ", ".join(missing), missing
        )


def _parse_chunk(chunk, roster, spec, seasons, regular_season_only,
                 drop_error_plays, on_unknown_event, report):
    n = len(chunk)
    report.rows_total += n
    keep = np.ones(n, dtype=bool)

    def drop(mask, reason):
        mask = mask & keep
        setattr(report, reason, getattr(report, reason) + int(mask.sum()))
        keep[mask] = False

    events = chunk["events"].fillna("").astype(str).str.strip().str.lower()
    known_inplay = events.isin(EVENT_TOTAL_BASES).to_numpy()
    non_batted = events.isin(NON_BATTED_EVENTS).to_numpy()
    unknown = ~known_inplay & ~non_batted
    if unknown.any() and on_unknown_event == "abort":
        bad = sorted(set(events.to_numpy()[unknown]))
        raise UnknownEventError(f"unrecognized event codes: {bad}")
    drop(non_batted, "not_batted_ball")
    drop(unknown, "unknown_event")
    if drop_error_plays:
        drop(events.isin(ERROR_PLAY_EVENTS).to_numpy(), "error_plays_dropped")

    if regular_season_only and "game_type" in chunk.columns:
        game_type = chunk["game_type"].fillna("R").astype(str).str.upper()
        drop((game_type != "R").to_numpy(), "non_regular_season")

    if "game_year" in chunk.columns:
        season = pd.to_numeric(chunk["game_year"], errors="coerce")
    else:
        season = pd.to_numeric(
            chunk["game_date"].astype(str).str.slice(0, 4), errors="coerce"
        )
    season = season.to_numpy(dtype=np.float64)
    drop(np.isnan(season), "out_of_season")
    if seasons is not None:
        wanted = np.isin(season, np.asarray(sorted(seasons), dtype=np.float64))
        drop(~wanted, "out_of_season")

    home = chunk["home_team"].fillna("").astype(str).map(
        lambda c: roster.resolve(c) or 0
    ).to_numpy(dtype=np.int64)
    away = chunk["away_team"].fillna("").astype(str).map(
        lambda c: roster.resolve(c) or 0
    ).to_numpy(dtype=np.int64)
    drop((home == 0) | (away == 0), "unknown_team")

    ev = pd.to_numeric(chunk["launch_speed"], errors="coerce").to_numpy()
    la = pd.to_numeric(chunk["launch_angle"], errors="coerce").to_numpy()
    drop(np.isnan(ev), "null_ev")
    drop(np.isnan(la), "null_la")
    drop(~spec.contains(ev, la), "out_of_range")

    report.rows_kept += int(keep.sum())
    if not keep.any():
        return None

    events_kept = events.to_numpy()[keep]
    tb = np.asarray([EVENT_TOTAL_BASES[e] for e in events_kept], dtype=np.int64)
    topbot = (
        chunk["inning_topbot"].fillna("").astype(str).str.strip().str.lower()
        .to_numpy()[keep]
    )
    is_top = np.asarray([s.startswith("t") for s in topbot], dtype=bool)
    home_k, away_k = home[keep], away[keep]
    def_team = np.where(is_top, home_k, away_k)
    bat_team = np.where(is_top, away_k, home_k)
    season_k = season[keep].astype(np.int64)
    park = np.asarray(
        [roster.park_of(int(t), int(s)) for t, s in zip(home_k, season_k)],
        dtype=np.int64,
    )
    return BattedBalls(
        ev[keep].astype(np.float64),
        la[keep].astype(np.float64),
        tb,
        park,
        def_team,
        bat_team,
        season_k,
    )


def parse_events(
    source,
    roster: TeamRoster | None = None,
    *,
    spec: GridSpec | None = None,
    seasons: Iterable[int] | None = None,
    regular_season_only: bool = True,
    drop_error_plays: bool = False,
    on_unknown_event: str = "drop",
    chunksize: int = 200_000,
) -> tuple[BattedBalls, IngestReport]:
    """Parse a batted-ball CSV into a BattedBalls sample plus a row report.

    ``source`` is a path or file-like object.  Unknown team codes and
    unrecognized event codes drop the row (counted), unless
    ``on_unknown_event="abort"``.
    """
    if on_unknown_event not in ("drop", "abort"):
        raise ValueError("on_unknown_event must be 'drop' or 'abort'")
    roster = roster or TeamRoster.default()
    spec = spec or GridSpec()
    report = IngestReport()
    parts = []

    def handle(chunk):
        part = _parse_chunk(
            chunk, roster, spec, seasons, regular_season_only,
            drop_error_plays, on_unknown_event, report,
        )
        if part is not None:
            parts.append(part)

    if isinstance(source, (str, os.PathLike)):
        _check_header(pd.read_csv(source, nrows=0).columns)
        with pd.read_csv(source, dtype=str, chunksize=chunksize) as reader:
            for chunk in reader:
                handle(chunk)
    else:
        df = pd.read_csv(source, dtype=str)
        _check_header(df.columns)
        if len(df):
            handle(df)
    balls = BattedBalls.concat(parts)
    return balls, report
