import io

import numpy as np
import pytest

from tbr import BattedBalls, SyntheticConfig, TeamRoster

CSV_HEADER = ("launch_speed,launch_angle,events,home_team,away_team,"
              "inning_topbot,game_date,game_year,game_type")

# Hand-counted 10-row fixture: 7 valid batted balls, 1 null EV, 1 null LA,
# 1 strikeout.  Row order matters to tests that check attribution.
TEN_ROW_FIXTURE = "\n".join([
    CSV_HEADER,
    "105.0,28.0,home_run,ATL,NYM,Top,2024-04-01,2024,R",     # valid, ATL fields
    ",15.0,single,ATL,NYM,Top,2024-04-01,2024,R",            # null EV
    "92.3,12.0,strikeout,ATL,NYM,Bot,2024-04-01,2024,R",     # not a batted ball
    "101.5,18.5,double,BOS,NYY,Bot,2024-05-02,2024,R",       # valid, NYY fields
    "88.0,,field_out,BOS,NYY,Top,2024-05-02,2024,R",         # null LA
    "75.2,-12.0,field_out,COL,SF,Top,2024-06-03,2024,R",     # valid
    "95.5,14.2,single,COL,SF,Bot,2024-06-03,2024,R",         # valid
    "82.4,45.0,sac_fly,CIN,CHC,Top,2024-07-04,2024,R",       # valid
    "110.1,22.9,triple,CIN,CHC,Bot,2024-07-04,2024,R",       # valid
    "67.9,3.3,field_error,SEA,TEX,Top,2024-08-05,2024,R",    # valid
]) + "\n"


@pytest.fixture
def roster():
    return TeamRoster.default()


@pytest.fixture
def ten_row_csv():
    return io.StringIO(TEN_ROW_FIXTURE)


def make_balls(n, seed=0, n_teams=4, season=2024):
    """Random but valid batted-ball sample for grid/residual tests."""
    rng = np.random.default_rng(seed)
    park = rng.integers(1, n_teams + 1, n)
    bat = rng.integers(1, n_teams + 1, n)
    # fielding team differs from batting team; home team owns the park
    def_team = np.where(bat == park, rng.integers(1, n_teams + 1, n), park)
    def_team = np.where(def_team == bat, (bat % n_teams) + 1, def_team)
    return BattedBalls(
        ev=rng.uniform(0.0, 120.0, n),
        la=rng.uniform(-90.0, 90.0, n),
        tb=rng.integers(0, 5, n),
        park=park,
        def_team=def_team,
        bat_team=bat,
        season=np.full(n, season, dtype=np.int64),
    )


def connected_schedule(rng, n_teams, max_balls=60):
    """Random schedule guaranteed connected: a visiting cycle through every
    park plus random extra matchups."""
    entries = []
    for park in range(1, n_teams + 1):
        away = park % n_teams + 1
        entries.append((park, away, int(rng.integers(2, max_balls))))
    for _ in range(int(rng.integers(0, 3 * n_teams))):
        park = int(rng.integers(1, n_teams + 1))
        away = int(rng.integers(1, n_teams + 1))
        if away != park:
            entries.append((park, away, int(rng.integers(2, max_balls))))
    return tuple(entries)


def random_instance(seed, n_teams=None, noise_sd=0.5, intercept=0.02):
    """Randomized synthetic estimation instance with a connected schedule."""
    rng = np.random.default_rng(seed)
    n_teams = n_teams or int(rng.integers(4, 31))
    return SyntheticConfig.random(
        seed=seed,
        n_teams=n_teams,
        true_intercept=intercept,
        effect_sd=0.04,
        noise_sd=noise_sd,
        schedule=connected_schedule(rng, n_teams),
    )
