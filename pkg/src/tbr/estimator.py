"""Simultaneous park and team-defense effect estimation.

Ball-level model: the residual of ball i is

    r_i = b0 + park[p(i)] - defense[d(i)] + noise,

so a larger defense coefficient means fewer bases allowed (bases saved).
Estimation runs on (park, defense) cell aggregates by weighted least
squares, which reproduces the ball-level ordinary least squares fit
coefficient-for-coefficient: all balls in a cell share one design row, so
the two objectives differ only by a constant.

One park and one team are pinned to zero for identifiability (entity 1 on
both axes by default: the alphabetically first team and its home park).
Before solving we check that the park-team incidence multigraph is
connected; a disconnected schedule cannot be fit and raises
IdentifiabilityError naming the components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from . import kernels
from .baseline import Residuals
from .errors import IdentifiabilityError, UnderdeterminedError

DEFAULT_REF_PARK = 1
DEFAULT_REF_TEAM = 1
DEFAULT_PARK_IDS = tuple(range(1, 31))
DEFAULT_TEAM_IDS = tuple(range(1, 31))


@dataclass(frozen=True)
class CellAggregate:
    """One (park, defensive team) cell: ball count and mean residual."""

    park: int
    def_team: int
    n: int
    y: float


@dataclass(frozen=True)
class EffectEstimates:
    """Fitted effects in reference-based form.

    ``park_effects`` and ``def_effects`` cover the full entity universe the
    fit was run over; the reference entries are exactly 0.  Defense is in
    bases-saved orientation: larger is better defense.
    """

    intercept: float
    park_effects: dict[int, float]
    def_effects: dict[int, float]
    ref_park: int
    ref_team: int
    n_cells: int
    n_balls: int
    season: int | None = None
    stderr: dict | None = None

    @property
    def park_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.park_effects))

    @property
    def team_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.def_effects))

    def fitted_value(self, park: int, def_team: int) -> float:
        return self.intercept + self.park_effects[park] - self.def_effects[def_team]

    def coefficient_vector(self) -> np.ndarray:
        """Intercept, then park effects, then defense effects, ids sorted."""
        return np.concatenate((
            [self.intercept],
            [self.park_effects[p] for p in self.park_ids],
            [self.def_effects[d] for d in self.team_ids],
        ))


def aggregate_cells(residuals: Residuals) -> list[CellAggregate]:
    """Group residuals into (park, def_team) cells with count and mean.

    The sum of cell counts equals the number of residuals; output is sorted
    by (park, def_team).
    """
    balls = residuals.balls
    if len(residuals) == 0:
        raise ValueError("cannot aggregate zero residuals")
    parks = np.unique(balls.park)
    teams = np.unique(balls.def_team)
    p_pos = np.searchsorted(parks, balls.park)
    d_pos = np.searchsorted(teams, balls.def_team)
    flat = p_pos * len(teams) + d_pos
    sums, counts = kernels.accumulate(flat, residuals.r, len(parks) * len(teams))
    occupied = np.flatnonzero(counts)
    return [
        CellAggregate(
            park=int(parks[k // len(teams)]),
            def_team=int(teams[k % len(teams)]),
            n=int(counts[k]),
            y=float(sums[k] / counts[k]),
        )
        for k in occupied
    ]


def _components(pairs, park_ids, team_ids):
    """Connected components of the bipartite park-team incidence graph.

    Returns a list of (frozenset of parks, frozenset of teams), including
    singleton components for entities never observed in ``pairs``.
    """
    parent = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    nodes = [("park", p) for p in park_ids] + [("team", d) for d in team_ids]
    for node in nodes:
        parent[node] = node
    for p, d in pairs:
        union(("park", p), ("team", d))

    groups = {}
    for node in nodes:
        groups.setdefault(find(node), []).append(node)
    comps = []
    for members in groups.values():
        comps.append((
            frozenset(i for kind, i in members if kind == "park"),
            frozenset(i for kind, i in members if kind == "team"),
        ))
    comps.sort(key=lambda c: (min(c[0], default=0), min(c[1], default=0)))
    return comps


def check_identifiable(pairs, park_ids, team_ids) -> None:
    """Raise IdentifiabilityError unless the incidence graph is connected."""
    comps = _components(pairs, park_ids, team_ids)
    if len(comps) > 1:
        desc = "; ".join(
            f"component {k + 1}: parks {sorted(parks)}, teams {sorted(teams)}"
            for k, (parks, teams) in enumerate(comps)
        )
        raise IdentifiabilityError(
            f"park-team incidence graph has {len(comps)} disconnected "
            f"components; effects are not jointly identifiable ({desc})",
            comps,
        )


def _design(park_arr, def_arr, park_ids, team_ids, ref_park, ref_team):
    """Design matrix rows: intercept, +1 park indicators, -1 defense
    indicators, reference columns omitted."""
    park_ids = tuple(park_ids)
    team_ids = tuple(team_ids)
    if ref_park not in park_ids:
        raise ValueError(f"reference park {ref_park} not in park ids")
    if ref_team not in team_ids:
        raise ValueError(f"reference team {ref_team} not in team ids")
    stray_parks = set(park_arr) - set(park_ids)
    stray_teams = set(def_arr) - set(team_ids)
    if stray_parks or stray_teams:
        raise ValueError(
            f"observations reference entities outside the declared universe: "
            f"parks {sorted(stray_parks)}, teams {sorted(stray_teams)}"
        )
    park_cols = [p for p in park_ids if p != ref_park]
    def_cols = [d for d in team_ids if d != ref_team]
    n = len(park_arr)
    X = np.zeros((n, 1 + len(park_cols) + len(def_cols)))
    X[:, 0] = 1.0
    pcol = {p: 1 + k for k, p in enumerate(park_cols)}
    dcol = {d: 1 + len(park_cols) + k for k, d in enumerate(def_cols)}
    for k in range(n):
        p, d = park_arr[k], def_arr[k]
        if p != ref_park:
            X[k, pcol[p]] = 1.0
        if d != ref_team:
            X[k, dcol[d]] = -1.0
    return X, park_cols, def_cols


def _solve(X, y, w, pairs, park_ids, team_ids, ref_park, ref_team,
           n_balls, season, compute_stderr):
    n_params = X.shape[1]
    if X.shape[0] < n_params:
        raise UnderdeterminedError(
            f"{X.shape[0]} observations cannot determine {n_params} parameters"
        )
    check_identifiable(pairs, park_ids, team_ids)

    if w is None:
        Xs, ys = X, y
    else:
        sw = np.sqrt(w)
        Xs, ys = X * sw[:, None], y * sw
    beta, _, rank, _ = sla.lstsq(Xs, ys, lapack_driver="gelsy")
    if rank < n_params:
        # connectivity passed, so this is numerical (wildly scaled weights)
        raise IdentifiabilityError(
            f"design rank {rank} < {n_params} parameters despite a connected "
            "incidence graph; weights may be degenerate",
            [],
        )

    park_cols = [p for p in park_ids if p != ref_park]
    def_cols = [d for d in team_ids if d != ref_team]
    park_effects = {ref_park: 0.0}
    park_effects.update({p: float(beta[1 + k]) for k, p in enumerate(park_cols)})
    def_effects = {ref_team: 0.0}
    off = 1 + len(park_cols)
    def_effects.update({d: float(beta[off + k]) for k, d in enumerate(def_cols)})

    stderr = None
    if compute_stderr:
        resid = ys - Xs @ beta
        dof = max(Xs.shape[0] - n_params, 1)
        sigma2 = float(resid @ resid) / dof
        XtX_inv = np.linalg.inv(Xs.T @ Xs)
        se = np.sqrt(np.diag(sigma2 * XtX_inv))
        stderr = {
            "intercept": float(se[0]),
            "park": {p: float(se[1 + k]) for k, p in enumerate(park_cols)},
            "defense": {d: float(se[off + k]) for k, d in enumerate(def_cols)},
        }

    return EffectEstimates(
        intercept=float(beta[0]),
        park_effects=dict(sorted(park_effects.items())),
        def_effects=dict(sorted(def_effects.items())),
        ref_park=ref_park,
        ref_team=ref_team,
        n_cells=len(pairs),
        n_balls=n_balls,
        season=season,
        stderr=stderr,
    )


def fit_wls(
    cells: list[CellAggregate],
    ref_park: int = DEFAULT_REF_PARK,
    ref_team: int = DEFAULT_REF_TEAM,
    park_ids=None,
    team_ids=None,
    season: int | None = None,
    compute_stderr: bool = False,
) -> EffectEstimates:
    """Weighted least squares on cell aggregates, weight = cell ball count.

    ``park_ids`` / ``team_ids`` define the entity universe (default: the
    30-team roster).  Every universe entity must appear in the cells, or the
    incidence graph has isolated vertices and the fit is refused.
    """
    park_ids = tuple(park_ids) if park_ids is not None else DEFAULT_PARK_IDS
    team_ids = tuple(team_ids) if team_ids is not None else DEFAULT_TEAM_IDS
    if not cells:
        raise ValueError("no cells to fit")
    park_arr = [c.park for c in cells]
    def_arr = [c.def_team for c in cells]
    y = np.asarray([c.y for c in cells], dtype=np.float64)
    w = np.asarray([c.n for c in cells], dtype=np.float64)
    if (w <= 0).any():
        raise ValueError("cell weights must be positive")
    X, _, _ = _design(park_arr, def_arr, park_ids, team_ids, ref_park, ref_team)
    pairs = list(zip(park_arr, def_arr))
    return _solve(X, y, w, pairs, park_ids, team_ids, ref_park, ref_team,
                  int(w.sum()), season, compute_stderr)


def fit_ols_ball_level(
    residuals: Residuals,
    ref_park: int = DEFAULT_REF_PARK,
    ref_team: int = DEFAULT_REF_TEAM,
    park_ids=None,
    team_ids=None,
    season: int | None = None,
    compute_stderr: bool = False,
) -> EffectEstimates:
    """Unweighted least squares directly on per-ball residual rows.

    Exists as the equivalence oracle for fit_wls(aggregate_cells(...)): the
    two agree on every coefficient up to floating-point solve error.
    """
    park_ids = tuple(park_ids) if park_ids is not None else DEFAULT_PARK_IDS
    team_ids = tuple(team_ids) if team_ids is not None else DEFAULT_TEAM_IDS
    balls = residuals.balls
    if len(residuals) == 0:
        raise ValueError("no residuals to fit")
    park_arr = balls.park.tolist()
    def_arr = balls.def_team.tolist()
    X, _, _ = _design(park_arr, def_arr, park_ids, team_ids, ref_park, ref_team)
    pairs = sorted({(int(p), int(d)) for p, d in zip(park_arr, def_arr)})
    return _solve(X, np.asarray(residuals.r, dtype=np.float64), None, pairs,
                  park_ids, team_ids, ref_park, ref_team, len(residuals),
                  season, compute_stderr)
