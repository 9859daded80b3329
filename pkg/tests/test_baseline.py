import numpy as np
import pytest

from tbr import BattedBalls, GridSpec, build_baseline, cell_of, residuals
from tbr.baseline import BaselineGrid, load_residuals, save_residuals
from tbr.errors import EmptyCellError, SchemaError
from conftest import make_balls

SPEC = GridSpec()


def brute_force_grid(balls, spec):
    """Independent oracle: pure-python group-by over floor-arithmetic bins."""
    sums, counts = {}, {}
    for ev, la, tb in zip(balls.ev, balls.la, balls.tb):
        i = min(int((ev - spec.ev_min) / spec.ev_width), spec.n_ev - 1)
        j = min(int((la - spec.la_min) / spec.la_width), spec.n_la - 1)
        sums[(i, j)] = sums.get((i, j), 0.0) + float(tb)
        counts[(i, j)] = counts.get((i, j), 0) + 1
    return sums, counts


class TestCellOf:
    def test_lower_corner(self):
        assert cell_of(0.0, -90.0, SPEC) == (0, 0)

    def test_top_edges_close_into_last_bin(self):
        assert cell_of(120.0, 90.0, SPEC) == (39, 59)

    def test_interior_point(self):
        assert cell_of(95.5, 14.2, SPEC) == (31, 34)

    def test_matches_bin_edge_scan(self):
        # oracle: scan the explicit bin edge lists
        ev_edges = [SPEC.ev_min + k * SPEC.ev_width for k in range(SPEC.n_ev + 1)]
        la_edges = [SPEC.la_min + k * SPEC.la_width for k in range(SPEC.n_la + 1)]
        rng = np.random.default_rng(7)
        for ev, la in zip(rng.uniform(0, 120, 300), rng.uniform(-90, 90, 300)):
            i = max(k for k in range(SPEC.n_ev) if ev_edges[k] <= ev)
            j = max(k for k in range(SPEC.n_la) if la_edges[k] <= la)
            assert cell_of(ev, la, SPEC) == (i, j)

    def test_out_of_range_raises(self):
        with pytest.raises(ValueError):
            cell_of(121.0, 0.0, SPEC)
        with pytest.raises(ValueError):
            cell_of(50.0, -90.5, SPEC)


class TestGridSpec:
    def test_default_shape(self):
        assert SPEC.shape == (40, 60)
        assert SPEC.n_cells == 2400

    def test_non_integral_bins_rejected(self):
        with pytest.raises(ValueError):
            GridSpec(ev_min=0, ev_max=100, ev_width=3)


class TestBuildBaseline:
    def test_all_zero_tb(self):
        balls = make_balls(200, seed=1)
        balls = BattedBalls(balls.ev, balls.la, np.zeros(200, dtype=np.int64),
                            balls.park, balls.def_team, balls.bat_team,
                            balls.season)
        grid = build_baseline(balls, SPEC)
        assert np.all(grid.mu[grid.populated] == 0.0)

    def test_two_ball_cell_mean(self):
        balls = BattedBalls.from_records([
            (50.0, 10.0, 1, 1, 2, 1, 2024),
            (50.5, 10.5, 3, 2, 1, 2, 2024),
        ])
        grid = build_baseline(balls, SPEC)
        i, j = cell_of(50.0, 10.0, SPEC)
        assert grid.mu[i, j] == 2.0
        assert grid.count[i, j] == 2

    def test_matches_brute_force_group_by_exactly(self):
        balls = make_balls(1000, seed=3)
        grid = build_baseline(balls, SPEC)
        sums, counts = brute_force_grid(balls, SPEC)
        assert int(grid.count.sum()) == 1000
        for (i, j), c in counts.items():
            assert grid.count[i, j] == c
            assert grid.mu[i, j] == sums[(i, j)] / c  # identical float ops
        assert int(grid.populated.sum()) == len(counts)

    def test_permutation_invariance(self):
        balls = make_balls(500, seed=4)
        grid1 = build_baseline(balls, SPEC)
        perm = np.random.default_rng(0).permutation(500)
        grid2 = build_baseline(balls.take(perm), SPEC)
        np.testing.assert_allclose(grid1.mu, grid2.mu, rtol=0, atol=1e-15,
                                   equal_nan=True)
        np.testing.assert_array_equal(grid1.count, grid2.count)

    def test_mu_bounded_by_cell_extremes(self):
        balls = make_balls(800, seed=5)
        grid = build_baseline(balls, SPEC)
        idx = SPEC.flat_index(balls.ev, balls.la)
        for cell in np.unique(idx):
            cell_tb = balls.tb[idx == cell]
            mu = grid.mu.ravel()[cell]
            assert cell_tb.min() <= mu <= cell_tb.max()

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            build_baseline(BattedBalls.from_records([]), SPEC)


class TestResiduals:
    def test_simple_subtraction(self):
        balls = BattedBalls.from_records([
            (50.0, 10.0, 0, 1, 2, 1, 2024),
            (50.0, 10.0, 1, 1, 2, 1, 2024),
            (50.2, 10.4, 4, 2, 1, 2, 2024),  # same cell
        ])
        grid = build_baseline(balls, SPEC)  # cell mean 5/3
        scored = residuals(balls, grid)
        np.testing.assert_allclose(scored.r, [-5 / 3, 1 - 5 / 3, 4 - 5 / 3])

    def test_known_mu_gives_expected_residual(self):
        base = make_balls(400, seed=6)
        grid = build_baseline(base, SPEC)
        probe = BattedBalls.from_records([(base.ev[0], base.la[0], 4,
                                           1, 2, 1, 2024)])
        i, j = cell_of(base.ev[0], base.la[0], SPEC)
        scored = residuals(probe, grid)
        assert scored.r[0] == pytest.approx(4.0 - grid.mu[i, j], abs=1e-12)

    def test_self_baseline_single_ball_is_zero(self):
        ball = BattedBalls.from_records([(88.0, 12.0, 3, 1, 2, 1, 2024)])
        scored = residuals(ball, build_baseline(ball, SPEC))
        assert scored.r[0] == 0.0

    def test_fifty_ball_oracle_subtraction(self):
        balls = make_balls(50, seed=8)
        grid = build_baseline(balls, SPEC)
        scored = residuals(balls, grid)
        sums, counts = brute_force_grid(balls, SPEC)
        for k in range(50):
            i = min(int(balls.ev[k] / 3.0), 39)
            j = min(int((balls.la[k] + 90.0) / 3.0), 59)
            expect = balls.tb[k] - sums[(i, j)] / counts[(i, j)]
            assert scored.r[k] == pytest.approx(expect, abs=1e-12)

    def test_self_baseline_zero_mean_per_cell(self):
        balls = make_balls(5000, seed=9)
        grid = build_baseline(balls, SPEC)
        scored = residuals(balls, grid)
        assert abs(scored.r.mean()) < 1e-9
        idx = SPEC.flat_index(balls.ev, balls.la)
        for cell in np.unique(idx):
            assert abs(scored.r[idx == cell].sum()) < 1e-9

    def test_residual_range_invariant(self):
        balls = make_balls(2000, seed=10)
        scored = residuals(balls, build_baseline(balls, SPEC))
        assert ((scored.r >= -4.0) & (scored.r <= 4.0)).all()


class TestEmptyCellPolicies:
    @pytest.fixture
    def grid_and_orphan(self):
        # grid built away from the orphan's cell
        base = BattedBalls.from_records([
            (30.0, 0.0, 1, 1, 2, 1, 2024),
            (33.5, 0.0, 3, 1, 2, 1, 2024),
        ])
        grid = build_baseline(base, SPEC)
        orphan = BattedBalls.from_records([(90.0, 45.0, 2, 1, 2, 1, 2024)])
        return grid, orphan

    def test_drop_policy_counts(self, grid_and_orphan):
        grid, orphan = grid_and_orphan
        scored = residuals(orphan, grid, "drop")
        assert len(scored) == 0
        assert scored.empty_cell_balls == 1

    def test_abort_policy_names_cell(self, grid_and_orphan):
        grid, orphan = grid_and_orphan
        with pytest.raises(EmptyCellError) as err:
            residuals(orphan, grid, "abort")
        assert err.value.cell == (30, 45)

    def test_global_mean_policy(self, grid_and_orphan):
        grid, orphan = grid_and_orphan
        scored = residuals(orphan, grid, "global_mean")
        assert scored.r[0] == pytest.approx(2.0 - 2.0)  # global mean (1+3)/2

    def test_nearest_policy_uses_closest_populated_cell(self, grid_and_orphan):
        grid, orphan = grid_and_orphan
        scored = residuals(orphan, grid, "nearest")
        # both populated cells share la bin 30; ev bins 10 and 11; the
        # orphan sits in ev bin 30 so bin 11 (mu=3) is nearer
        assert scored.r[0] == pytest.approx(2.0 - 3.0)
        assert scored.empty_cell_balls == 1

    def test_unknown_policy_rejected(self, grid_and_orphan):
        grid, orphan = grid_and_orphan
        with pytest.raises(ValueError):
            residuals(orphan, grid, "interpolate")


class TestGridArtifact:
    def test_roundtrip(self, tmp_path):
        balls = make_balls(300, seed=11)
        grid = build_baseline(balls, SPEC)
        path = tmp_path / "grid.npz"
        grid.save(path, config={"origin": "test"})
        loaded = BaselineGrid.load(path)
        np.testing.assert_array_equal(grid.count, loaded.count)
        np.testing.assert_allclose(grid.mu, loaded.mu, rtol=0, atol=0,
                                   equal_nan=True)
        assert loaded.spec == SPEC
        assert loaded.seasons_pooled == (2024,)

    def test_rewrite_is_byte_identical(self, tmp_path):
        grid = build_baseline(make_balls(300, seed=11), SPEC)
        a, b = tmp_path / "a.npz", tmp_path / "b.npz"
        grid.save(a, config={"k": 1})
        grid.save(b, config={"k": 1})
        assert a.read_bytes() == b.read_bytes()

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "notagrid.npz"
        np.savez(path, mu=np.zeros(3), count=np.zeros(3),
                 meta_json=np.frombuffer(b'{"magic":"nope"}', dtype=np.uint8))
        with pytest.raises(SchemaError):
            BaselineGrid.load(path)

    def test_residuals_artifact_roundtrip(self, tmp_path):
        balls = make_balls(200, seed=12)
        scored = residuals(balls, build_baseline(balls, SPEC))
        path = tmp_path / "res.npz"
        save_residuals(scored, path, config={"x": 2})
        loaded = load_residuals(path)
        np.testing.assert_array_equal(scored.r, loaded.r)
        np.testing.assert_array_equal(scored.balls.park, loaded.balls.park)
        np.testing.assert_array_equal(scored.balls.bat_team,
                                      loaded.balls.bat_team)
        assert loaded.empty_cell_policy == "drop"
