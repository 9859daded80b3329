"""Team and ballpark roster: code <-> id mapping with home-park assignment.

Ids are small contiguous integers (1..30 for the default MLB roster, codes in
alphabetical order).  Each team's home park carries the same id as the team,
so park 1 is the home park of team 1, and so on.  Neutral-site games are
attributed to the listed home team's registered park; that is a known,
documented bias of the attribution rule, not a data error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import RosterError

# (code, home park) in alphabetical code order; ids are assigned 1..30 in
# this order, so ATL/Truist Park is entity 1 on both axes.
DEFAULT_TEAMS = (
    ("ATL", "Truist Park"),
    ("AZ", "Chase Field"),
    ("BAL", "Oriole Park at Camden Yards"),
    ("BOS", "Fenway Park"),
    ("CHC", "Wrigley Field"),
    ("CIN", "Great American Ball Park"),
    ("CLE", "Progressive Field"),
    ("COL", "Coors Field"),
    ("CWS", "Rate Field"),
    ("DET", "Comerica Park"),
    ("HOU", "Minute Maid Park"),
    ("KC", "Kauffman Stadium"),
    ("LAA", "Angel Stadium"),
    ("LAD", "Dodger Stadium"),
    ("MIA", "loanDepot park"),
    ("MIL", "American Family Field"),
    ("MIN", "Target Field"),
    ("NYM", "Citi Field"),
    ("NYY", "Yankee Stadium"),
    ("OAK", "Oakland Coliseum"),
    ("PHI", "Citizens Bank Park"),
    ("PIT", "PNC Park"),
    ("SD", "Petco Park"),
    ("SEA", "T-Mobile Park"),
    ("SF", "Oracle Park"),
    ("STL", "Busch Stadium"),
    ("TB", "Tropicana Field"),
    ("TEX", "Globe Life Field"),
    ("TOR", "Rogers Centre"),
    ("WSH", "Nationals Park"),
)

# Alternate team codes seen in common export formats.
DEFAULT_ALIASES = {
    "ARI": "AZ",
    "ANA": "LAA",
    "CHW": "CWS",
    "FLA": "MIA",
    "KCR": "KC",
    "SDP": "SD",
    "SFG": "SF",
    "TBR": "TB",
    "WSN": "WSH",
}


@dataclass(frozen=True)
class TeamRoster:
    """Bijective team-code -> (team id, home park id) mapping.

    ``season_parks`` optionally overrides a team's park id for specific
    seasons (park relocations); the default roster has none.
    """

    team_ids: dict[str, int]
    home_parks: dict[int, int]
    park_names: dict[int, str]
    aliases: dict[str, str] = field(default_factory=dict)
    season_parks: dict[int, dict[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        ids = sorted(self.team_ids.values())
        if len(set(ids)) != len(ids):
            raise RosterError("duplicate team ids in roster")
        parks = sorted(self.home_parks.values())
        if len(set(parks)) != len(parks):
            raise RosterError("a park is assigned to more than one home team")
        if set(self.team_ids.values()) != set(self.home_parks):
            raise RosterError("every team needs exactly one home park")

    @property
    def n_teams(self):
        return len(self.team_ids)

    @property
    def team_id_list(self):
        return sorted(self.team_ids.values())

    @property
    def park_id_list(self):
        return sorted(self.home_parks.values())

    def resolve(self, code: str, season: int | None = None) -> int | None:
        """Team id for ``code`` (accepting aliases), or None if unknown."""
        code = code.strip().upper()
        code = self.aliases.get(code, code)
        return self.team_ids.get(code)

    def park_of(self, team_id: int, season: int | None = None) -> int:
        if season is not None and season in self.season_parks:
            override = self.season_parks[season].get(team_id)
            if override is not None:
                return override
        return self.home_parks[team_id]

    def code_of(self, team_id: int) -> str:
        for code, tid in self.team_ids.items():
            if tid == team_id:
                return code
        raise RosterError(f"no team with id {team_id}")

    def park_label(self, park_id: int) -> str:
        """Park name if known, else the owning team's code."""
        name = self.park_names.get(park_id)
        if name:
            return name
        for tid, pid in self.home_parks.items():
            if pid == park_id:
                return self.code_of(tid)
        return str(park_id)

    def codes_by_id(self) -> dict[int, str]:
        return {tid: code for code, tid in self.team_ids.items()}

    @classmethod
    def default(cls) -> "TeamRoster":
        team_ids = {code: i + 1 for i, (code, _) in enumerate(DEFAULT_TEAMS)}
        home_parks = {i + 1: i + 1 for i in range(len(DEFAULT_TEAMS))}
        park_names = {i + 1: name for i, (_, name) in enumerate(DEFAULT_TEAMS)}
        return cls(team_ids, home_parks, park_names, dict(DEFAULT_ALIASES))

    @classmethod
    def from_file(cls, path) -> "TeamRoster":
        """Load a roster from JSON or TOML.

        Expected shape::

            {"teams": {"ATL": {"team_id": 1, "park_id": 1,
                               "park_name": "Truist Park"}, ...},
             "aliases": {"ARI": "AZ"},
             "season_parks": {"2020": {"29": 12}}}
        """
        path = Path(path)
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        elif path.suffix.lower() == ".json":
            raw = json.loads(path.read_text())
        else:
            raise RosterError(f"unsupported roster format: {path.suffix!r}")
        try:
            teams = raw["teams"]
            team_ids = {code: int(spec["team_id"]) for code, spec in teams.items()}
            home_parks = {
                int(spec["team_id"]): int(spec["park_id"]) for spec in teams.values()
            }
            park_names = {
                int(spec["park_id"]): spec.get("park_name", code)
                for code, spec in teams.items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise RosterError(f"malformed roster file {path}: {exc}") from exc
        aliases = {k.upper(): v.upper() for k, v in raw.get("aliases", {}).items()}
        season_parks = {
            int(season): {int(t): int(p) for t, p in overrides.items()}
            for season, overrides in raw.get("season_parks", {}).items()
        }
        return cls(team_ids, home_parks, park_names, aliases, season_parks)
