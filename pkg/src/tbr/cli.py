"""Command-line pipeline: build-baseline, estimate, diagnose, simulate.

Exit codes: 0 success, 1 runtime/data error, 2 usage or schema error.  On
failure a machine-readable JSON error object is printed to stderr.  All
outputs are written atomically and embed the tool version plus a hash of
the run configuration; identical inputs and configuration produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, artifacts, reports
from .baseline import (
    EMPTY_CELL_POLICIES,
    BaselineGrid,
    GridSpec,
    build_baseline,
    load_residuals,
    residuals as score_residuals,
    save_residuals,
)
from .diagnostics import home_away_table, pearson, stability_report
from .errors import RosterError, SchemaError, TbrError
from .estimator import aggregate_cells, fit_wls
from .ingest import BattedBalls, IngestReport, parse_events
from .rosters import TeamRoster
from .standardize import (
    SD_MODES,
    IndexRow,
    IndexTable,
    center,
    index_tables,
    zscore_index,
)
from .synthetic import SyntheticConfig, generate_events, generate_residuals

FORMATS = ("csv", "json", "md")


def _parse_seasons(text):
    if text is None or text == "all":
        return None
    seasons = set()
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            seasons.update(range(int(lo), int(hi) + 1))
        elif part:
            seasons.add(int(part))
    return sorted(seasons)


def _parse_grid_spec(text):
    if not text:
        return GridSpec()
    try:
        kwargs = {}
        for item in text.split(","):
            key, _, value = item.partition("=")
            kwargs[key.strip()] = float(value)
        return GridSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad --grid-spec: {exc}")


def _load_roster(path):
    return TeamRoster.from_file(path) if path else TeamRoster.default()


def _require_paths(*paths):
    missing = [str(p) for p in paths if p and not Path(p).exists()]
    if missing:
        raise TbrError("input path(s) do not exist: " + ", ".join(missing))


def _out_dir(args):
    out = args.out or os.environ.get("TBR_OUT_DIR")
    if not out:
        raise SchemaError("no output location: pass --out or set TBR_OUT_DIR")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_all(data_paths, roster, spec, seasons, args):
    report = IngestReport()
    parts = []
    for path in data_paths:
        balls, part_report = parse_events(
            path,
            roster,
            spec=spec,
            seasons=seasons,
            regular_season_only=not args.include_postseason,
            drop_error_plays=args.drop_error_plays,
            on_unknown_event="abort" if args.abort_on_unknown_event else "drop",
        )
        parts.append(balls)
        report.merge(part_report)
    return BattedBalls.concat(parts), report


def _ingest_args(parser):
    parser.add_argument("--include-postseason", action="store_true",
                        help="keep non-regular-season rows (dropped by default)")
    parser.add_argument("--drop-error-plays", action="store_true",
                        help="drop error/fielder's-choice batted balls instead "
                             "of keeping them at 0 bases")
    parser.add_argument("--abort-on-unknown-event", action="store_true",
                        help="fail on unrecognized event codes instead of "
                             "dropping the row")


# ---------------------------------------------------------------- build-baseline


def cmd_build_baseline(args):
    _require_paths(*args.data, args.roster)
    roster = _load_roster(args.roster)
    spec = _parse_grid_spec(args.grid_spec)
    seasons = _parse_seasons(args.seasons)
    config = {
        "command": "build-baseline",
        "data": [str(p) for p in args.data],
        "roster": args.roster,
        "grid_spec": spec.as_dict(),
        "seasons": seasons,
        "include_postseason": args.include_postseason,
        "drop_error_plays": args.drop_error_plays,
    }
    balls, report = _parse_all(args.data, roster, spec, seasons, args)
    if len(balls) == 0:
        raise TbrError("no batted balls survived ingest; cannot build a baseline")
    grid = build_baseline(balls, spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    grid.save(out, config)
    report_path = out.with_name(out.stem + "_ingest_report.json")
    artifacts.write_json_atomic(
        report_path,
        {"meta": artifacts.meta_block(config), "ingest": report.as_dict()},
    )
    print(f"baseline grid: {out} ({grid.n_balls} balls, "
          f"{int(grid.populated.sum())}/{spec.n_cells} cells populated)")
    print(f"ingest report: {report_path}")
    return 0


# ---------------------------------------------------------------------- estimate


def _resolve_refs(roster, args):
    ref_team = roster.resolve(args.ref_team)
    if ref_team is None:
        raise RosterError(f"unknown --ref-team {args.ref_team!r}")
    if args.ref_park:
        owner = roster.resolve(args.ref_park)
        if owner is None:
            raise RosterError(f"unknown --ref-park {args.ref_park!r}")
        ref_park = roster.park_of(owner)
    else:
        ref_park = roster.park_of(ref_team)
    return ref_park, ref_team


def _season_payload(season, res, roster, ref_park, ref_team, args):
    sub = res.for_season(season)
    est = fit_wls(
        aggregate_cells(sub),
        ref_park=ref_park,
        ref_team=ref_team,
        park_ids=roster.park_id_list,
        team_ids=roster.team_id_list,
        season=season,
        compute_stderr=args.stderr,
    )
    cen = center(est)
    park_idx, def_idx = index_tables(cen, args.sd_mode)
    return est, cen, park_idx, def_idx


def _emit_season(outdir, formats, season, est, cen, park_idx, def_idx,
                 codes, config):
    meta = artifacts.meta_block(config, season=season)
    if "json" in formats:
        payload = {
            "meta": meta,
            "season": season,
            "ref_park": est.ref_park,
            "ref_team": est.ref_team,
            "n_cells": est.n_cells,
            "n_balls": est.n_balls,
            "sd_mode": park_idx.sd_mode,
            "intercept": est.intercept,
            "park_effects": {codes[p]: v for p, v in est.park_effects.items()},
            "def_effects": {codes[d]: v for d, v in est.def_effects.items()},
            "centered_intercept": cen.intercept,
            "centered_park_effects": {
                codes[p]: v for p, v in cen.park_effects.items()
            },
            "centered_def_effects": {
                codes[d]: v for d, v in cen.def_effects.items()
            },
            "park_index": [
                {"entity": codes[r.entity_id], "effect": r.effect, "z": r.z,
                 "index": r.index, "index_rounded": r.index_rounded}
                for r in park_idx
            ],
            "defense_index": [
                {"entity": codes[r.entity_id], "effect": r.effect, "z": r.z,
                 "index": r.index, "index_rounded": r.index_rounded}
                for r in def_idx
            ],
        }
        if est.stderr is not None:
            payload["stderr"] = {
                "intercept": est.stderr["intercept"],
                "park": {codes[p]: v for p, v in est.stderr["park"].items()},
                "defense": {codes[d]: v for d, v in est.stderr["defense"].items()},
            }
        artifacts.write_json_atomic(outdir / f"effects_{season}.json", payload)
    if "csv" in formats:
        header = ("season", "entity_type", "entity", "estimate")
        artifacts.write_text_atomic(
            outdir / f"effects_{season}.csv",
            reports.csv_document(
                header,
                reports.effects_long_rows(
                    season,
                    {"park": est.park_effects, "defense": est.def_effects},
                    est.intercept, codes,
                ),
                meta,
            ),
        )
        artifacts.write_text_atomic(
            outdir / f"centered_{season}.csv",
            reports.csv_document(
                header,
                reports.effects_long_rows(
                    season,
                    {"park": cen.park_effects, "defense": cen.def_effects},
                    cen.intercept, codes,
                ),
                {**meta, "sd_mode": park_idx.sd_mode},
            ),
        )
        artifacts.write_text_atomic(
            outdir / f"index_{season}.csv",
            reports.csv_document(
                reports.INDEX_HEADER,
                reports.index_rows(park_idx, codes)
                + reports.index_rows(def_idx, codes),
                {**meta, "sd_mode": park_idx.sd_mode},
            ),
        )
    if "md" in formats:
        artifacts.write_text_atomic(
            outdir / f"effects_{season}.md",
            reports.markdown_table(
                reports.INDEX_HEADER,
                reports.index_rows(park_idx, codes)
                + reports.index_rows(def_idx, codes),
                {**meta, "sd_mode": park_idx.sd_mode},
                title=f"Standardized effects, {season}",
            ),
        )


def _emit_wide(outdir, formats, seasons, by_season, codes, config):
    meta = artifacts.meta_block(config)
    groups = {
        "park_effects_wide": lambda cen, idx: (
            {codes[p]: v for p, v in cen.park_effects.items()}),
        "defense_effects_wide": lambda cen, idx: (
            {codes[d]: v for d, v in cen.def_effects.items()}),
        "park_index_wide": lambda cen, idx: (
            {codes[r.entity_id]: r.index_rounded for r in idx[0]}),
        "defense_index_wide": lambda cen, idx: (
            {codes[r.entity_id]: r.index_rounded for r in idx[1]}),
    }
    for name, pick in groups.items():
        values: dict[str, dict[int, float]] = {}
        for season in seasons:
            est, cen, park_idx, def_idx = by_season[season]
            for code, v in pick(cen, (park_idx, def_idx)).items():
                values.setdefault(code, {})[season] = v
        header = ["entity"] + [str(s) for s in seasons]
        rows = reports.wide_rows(values, seasons)
        if "csv" in formats:
            artifacts.write_text_atomic(
                outdir / f"{name}.csv",
                reports.csv_document(header, rows, meta),
            )
        if "md" in formats:
            artifacts.write_text_atomic(
                outdir / f"{name}.md",
                reports.markdown_table(header, rows, meta, title=name),
            )


def cmd_estimate(args):
    _require_paths(args.baseline, *args.data, args.roster)
    roster = _load_roster(args.roster)
    grid = BaselineGrid.load(args.baseline)
    seasons_filter = _parse_seasons(args.seasons)
    ref_park, ref_team = _resolve_refs(roster, args)
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise SchemaError(f"unknown --format value(s): {bad}")
    config = {
        "command": "estimate",
        "baseline": str(args.baseline),
        "data": [str(p) for p in args.data],
        "roster": args.roster,
        "seasons": seasons_filter,
        "ref_park": args.ref_park or args.ref_team,
        "ref_team": args.ref_team,
        "empty_cell_policy": args.empty_cell_policy,
        "sd_mode": args.sd_mode,
        "format": formats,
        "stderr": args.stderr,
        "include_postseason": args.include_postseason,
        "drop_error_plays": args.drop_error_plays,
    }
    outdir = _out_dir(args)

    balls, report = _parse_all(args.data, roster, grid.spec, seasons_filter, args)
    if len(balls) == 0:
        raise TbrError("no batted balls survived ingest")
    res = score_residuals(balls, grid, args.empty_cell_policy)
    save_residuals(res, outdir / "residuals.npz", config)
    artifacts.write_json_atomic(
        outdir / "ingest_report.json",
        {"meta": artifacts.meta_block(config), "ingest": report.as_dict(),
         "empty_cell_balls": res.empty_cell_balls},
    )

    seasons = list(res.seasons)
    codes = roster.codes_by_id()
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        fitted = dict(zip(
            seasons,
            pool.map(
                lambda s: _season_payload(s, res, roster, ref_park, ref_team, args),
                seasons,
            ),
        ))
    for season in seasons:
        _emit_season(outdir, formats, season, *fitted[season], codes, config)
    if seasons:
        _emit_wide(outdir, formats, seasons, fitted, codes, config)
    artifacts.write_json_atomic(
        outdir / "run.json",
        {"meta": artifacts.meta_block(config), "seasons": seasons,
         "n_residuals": len(res), "kernel_backend": _backend_name()},
    )
    print(f"estimated {len(seasons)} season(s) -> {outdir}")
    return 0


def _backend_name():
    from . import kernels

    return kernels.backend_name()


# ---------------------------------------------------------------------- diagnose


def _load_estimates_dir(path):
    files = sorted(Path(path).glob("effects_*.json"))
    if not files:
        raise TbrError(f"no effects_<season>.json files under {path}")
    payloads = {}
    for f in files:
        data = json.loads(f.read_text())
        payloads[int(data["season"])] = data
    return payloads


def cmd_diagnose(args):
    _require_paths(args.residuals, args.estimates, args.roster)
    roster = _load_roster(args.roster)
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    config = {
        "command": "diagnose",
        "residuals": str(args.residuals),
        "estimates": str(args.estimates),
        "roster": args.roster,
        "reference": list(args.reference or ()),
        "svg": args.svg,
        "format": formats,
    }
    outdir = _out_dir(args)
    meta = artifacts.meta_block(config)
    res = load_residuals(args.residuals)
    payloads = _load_estimates_dir(args.estimates)
    codes = roster.codes_by_id()
    code_to_id = {c: i for i, c in codes.items()}
    home_parks = {t: roster.park_of(t) for t in roster.team_id_list}

    for season in res.seasons:
        splits = home_away_table(res, home_parks, season)
        rows = reports.home_away_rows(splits, codes)
        if "csv" in formats:
            artifacts.write_text_atomic(
                outdir / f"home_away_{season}.csv",
                reports.csv_document(reports.HOME_AWAY_HEADER, rows, meta),
            )
        if "md" in formats:
            artifacts.write_text_atomic(
                outdir / f"home_away_{season}.md",
                reports.markdown_table(
                    reports.HOME_AWAY_HEADER, rows, meta,
                    title=f"Home/away residual splits, {season}",
                ),
            )

    summary = {"seasons": sorted(payloads), "stability": None}

    # stability over the standardized park indices
    park_tables = []
    for season, payload in sorted(payloads.items()):
        rows = tuple(
            IndexRow(code_to_id[r["entity"]], r["effect"], r["z"], r["index"])
            for r in payload["park_index"]
        )
        park_tables.append(IndexTable("park", rows, payload["sd_mode"], season))
    if len(park_tables) >= 2:
        stab = stability_report(park_tables, sd_mode=args.stability_sd_mode)
        reference = _load_reference_wide(args.stability_reference) \
            if args.stability_reference else None
        rows = reports.stability_rows(stab, codes, reference)
        header = ("entity", "index_sd", "reference_sd", "n_seasons") \
            if reference else ("entity", "index_sd", "n_seasons")
        if "csv" in formats:
            artifacts.write_text_atomic(
                outdir / "stability_park_index.csv",
                reports.csv_document(
                    header, rows,
                    {**meta, "sd_mode": args.stability_sd_mode},
                ),
            )
        if "md" in formats:
            artifacts.write_text_atomic(
                outdir / "stability_park_index.md",
                reports.markdown_table(
                    header, rows, {**meta, "sd_mode": args.stability_sd_mode},
                    title="Cross-season stability of the park index",
                ),
            )
        summary["stability"] = {
            "n_entities": len(stab) - 1,
            "average_sd": stab[-1].sd,
        }

    series = [
        (season, payload["centered_intercept"])
        for season, payload in sorted(payloads.items())
    ]
    artifacts.write_text_atomic(
        outdir / "intercept_series.csv",
        reports.csv_document(
            ("season", "centered_intercept"),
            reports.intercept_rows(series), meta,
        ),
    )
    if args.svg:
        artifacts.write_text_atomic(
            outdir / "intercept_series.svg",
            reports.intercept_svg(series, meta),
        )

    for spec_text in args.reference or ():
        name, _, path = spec_text.partition("=")
        if not path:
            raise SchemaError(
                f"--reference must look like NAME=PATH, got {spec_text!r}"
            )
        _require_paths(path)
        _emit_reference(outdir, formats, name, path, payloads, code_to_id,
                        codes, meta, args)

    artifacts.write_json_atomic(outdir / "run.json",
                                {"meta": meta, "summary": summary})
    print(f"diagnostics -> {outdir}")
    return 0


def _load_reference_long(path):
    """CSV with header team,season,value -> {season: {team_code: value}}."""
    import csv as csvmod

    out: dict[int, dict[str, float]] = {}
    with open(path, newline="") as fh:
        for row in csvmod.DictReader(
            r for r in fh if not r.startswith("#")
        ):
            try:
                out.setdefault(int(row["season"]), {})[row["team"].strip()] = \
                    float(row["value"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(
                    f"{path}: expected columns team,season,value ({exc})"
                )
    return out


def _load_reference_wide(path):
    """CSV with header entity,sd -> {entity_code: sd}."""
    import csv as csvmod

    out = {}
    with open(path, newline="") as fh:
        for row in csvmod.DictReader(r for r in fh if not r.startswith("#")):
            try:
                out[row["entity"].strip()] = float(row["sd"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"{path}: expected columns entity,sd ({exc})")
    return out


def _emit_reference(outdir, formats, name, path, payloads, code_to_id, codes,
                    meta, args):
    reference = _load_reference_long(path)
    side_rows = []
    corr_rows = []
    for season, payload in sorted(payloads.items()):
        if season not in reference:
            continue
        ref_values = {
            code_to_id[team]: value
            for team, value in reference[season].items()
            if team in code_to_id
        }
        try:
            ref_idx = zscore_index(ref_values, args.reference_sd_mode,
                                   "reference", season)
        except (TbrError, ValueError):
            continue
        kind = "defense_index" if args.reference_kind == "defense" \
            else "park_index"
        ours = {code_to_id[r["entity"]]: r for r in payload[kind]}
        ref_by_entity = ref_idx.by_entity()
        shared = sorted(set(ours) & set(ref_by_entity))
        for e in shared:
            side_rows.append((
                season, codes[e], ours[e]["index"], ref_by_entity[e].index,
            ))
        corr_rows.append((
            season,
            pearson([ours[e]["index"] for e in shared],
                    [ref_by_entity[e].index for e in shared]),
            len(shared),
        ))
    ref_meta = {**meta, "reference_sd_mode": args.reference_sd_mode,
                "reference_kind": args.reference_kind}
    if "csv" in formats:
        artifacts.write_text_atomic(
            outdir / f"reference_{name}_side_by_side.csv",
            reports.csv_document(
                ("season", "entity", "ours_index", f"{name}_index"),
                side_rows, ref_meta,
            ),
        )
        artifacts.write_text_atomic(
            outdir / f"reference_{name}_correlation.csv",
            reports.csv_document(
                ("season", "pearson_r", "n"), corr_rows, ref_meta,
            ),
        )


# ---------------------------------------------------------------------- simulate


def cmd_simulate(args):
    _require_paths(args.config)
    cfg = SyntheticConfig.from_dict(json.loads(Path(args.config).read_text()))
    config = {"command": "simulate", "config_path": str(args.config),
              "mode": args.mode, "synthetic": cfg.as_dict()}
    outdir = _out_dir(args)
    meta = artifacts.meta_block(config)

    if args.mode == "events":
        table, truth = generate_events(cfg)
        data_path = outdir / "events.csv"
        buf = table.to_csv(index=False)
        artifacts.write_text_atomic(data_path, buf)
    else:
        res, truth = generate_residuals(cfg)
        data_path = outdir / "residuals.npz"
        save_residuals(res, data_path, config)
    artifacts.write_json_atomic(
        outdir / "truth.json", {"meta": meta, "truth": truth.as_dict()}
    )
    print(f"synthetic data -> {data_path} ({cfg.n_balls} balls)")

    if args.check:
        result = _recovery_check(cfg, args.mode, data_path)
        artifacts.write_json_atomic(outdir / "check.json",
                                    {"meta": meta, "recovery": result})
        print(json.dumps({"recovery": result}, indent=2, sort_keys=True))
    return 0


def _recovery_check(cfg, mode, data_path):
    """Run the estimation pipeline over freshly generated data and compare
    centered estimates to the injected truth."""
    if mode == "events":
        roster = TeamRoster.default()
        balls, _ = parse_events(str(data_path), roster)
        grid = build_baseline(balls)
        res = score_residuals(balls, grid)
    else:
        res = load_residuals(data_path)
    _, truth = generate_residuals(cfg)

    per_season = {}
    for season in res.seasons:
        est = fit_wls(
            aggregate_cells(res.for_season(season)),
            park_ids=cfg.park_ids,
            team_ids=cfg.team_ids,
            season=season,
        )
        cen = center(est)
        park_err = max(
            abs(cen.park_effects[p] - truth.park[p]) for p in cfg.park_ids
        )
        def_err = max(
            abs(cen.def_effects[d] - truth.defense[d]) for d in cfg.team_ids
        )
        per_season[str(season)] = {
            "max_abs_park_error": park_err,
            "max_abs_defense_error": def_err,
            "centered_intercept": cen.intercept,
        }
    return per_season


# -------------------------------------------------------------------------- main


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tbr",
        description="Park and team-defense effects from batted-ball "
                    "total-bases residuals",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-baseline",
                       help="build the pooled expected-total-bases grid")
    p.add_argument("data", nargs="+", help="batted-ball CSV file(s)")
    p.add_argument("--out", required=True, help="output .npz path")
    p.add_argument("--roster", help="roster JSON/TOML (default: MLB 30)")
    p.add_argument("--seasons", help="e.g. 2015-2024 or 2021,2022 (default all)")
    p.add_argument("--grid-spec", help="e.g. ev_min=0,ev_max=120,ev_width=3,"
                                       "la_min=-90,la_max=90,la_width=3")
    _ingest_args(p)
    p.set_defaults(func=cmd_build_baseline)

    p = sub.add_parser("estimate",
                       help="fit per-season park and defense effects")
    p.add_argument("data", nargs="+", help="batted-ball CSV file(s)")
    p.add_argument("--baseline", required=True, help="grid .npz from build-baseline")
    p.add_argument("--out", help="output directory (or TBR_OUT_DIR)")
    p.add_argument("--roster", help="roster JSON/TOML (default: MLB 30)")
    p.add_argument("--seasons", "--season", help="season filter, e.g. 2024 "
                   "or 2015-2024 (default: all in data)")
    p.add_argument("--ref-team", default="ATL",
                   help="reference team code pinned to zero (default ATL)")
    p.add_argument("--ref-park",
                   help="reference park, as its home team code "
                        "(default: the reference team's park)")
    p.add_argument("--empty-cell-policy", default="drop",
                   choices=EMPTY_CELL_POLICIES)
    p.add_argument("--sd-mode", default="population", choices=SD_MODES,
                   help="z-score divisor convention (default population)")
    p.add_argument("--format", default="csv,json",
                   help="comma-separated subset of csv,json,md")
    p.add_argument("--stderr", action="store_true",
                   help="include diagnostic standard errors")
    p.add_argument("--jobs", type=int, default=4,
                   help="parallel per-season fits (default 4)")
    _ingest_args(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("diagnose",
                       help="home/away splits, stability, intercept series")
    p.add_argument("--residuals", required=True,
                   help="residuals.npz written by estimate")
    p.add_argument("--estimates", required=True,
                   help="directory of effects_<season>.json from estimate")
    p.add_argument("--out", help="output directory (or TBR_OUT_DIR)")
    p.add_argument("--roster", help="roster JSON/TOML (default: MLB 30)")
    p.add_argument("--format", default="csv",
                   help="comma-separated subset of csv,md")
    p.add_argument("--svg", action="store_true",
                   help="also render the intercept series as SVG")
    p.add_argument("--reference", action="append", metavar="NAME=PATH",
                   help="external metric CSV (team,season,value) to "
                        "standardize and correlate; repeatable")
    p.add_argument("--reference-kind", default="defense",
                   choices=("park", "defense"),
                   help="which of our index groups to compare against "
                        "(default defense)")
    p.add_argument("--reference-sd-mode", default="sample", choices=SD_MODES,
                   help="convention for standardizing the external metric "
                        "(default sample)")
    p.add_argument("--stability-sd-mode", default="sample", choices=SD_MODES,
                   help="convention for cross-season SDs (default sample)")
    p.add_argument("--stability-reference", metavar="PATH",
                   help="CSV (entity,sd) shown beside our stability column")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("simulate", help="generate synthetic data, optionally "
                                        "verify recovery end-to-end")
    p.add_argument("--config", required=True, help="synthetic config JSON")
    p.add_argument("--out", help="output directory (or TBR_OUT_DIR)")
    p.add_argument("--mode", default="events", choices=("events", "residuals"))
    p.add_argument("--check", action="store_true",
                   help="run the pipeline on the output and report recovery "
                        "error")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, RosterError) as exc:
        _emit_error(exc)
        return 2
    except TbrError as exc:
        _emit_error(exc)
        return 1
    except (ValueError, OSError) as exc:
        _emit_error(exc)
        return 1


def _emit_error(exc):
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    extra = getattr(exc, "missing", None)
    if extra:
        payload["error"]["missing_columns"] = list(extra)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
