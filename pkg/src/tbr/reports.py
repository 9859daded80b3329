"""Text artifact emitters: CSV, markdown, and SVG renderings of estimates,
index tables, and diagnostic reports.

Every emitter returns a string; callers write it atomically.  CSV files
carry leading ``#`` comment lines with the tool version, config hash, and
the verbatim run configuration; markdown and SVG carry the same block as a
comment.  Emitters never embed wall-clock time, so identical inputs yield
identical bytes.
"""

from __future__ import annotations

import io
from typing import Iterable, Sequence

from . import artifacts
from .diagnostics import HomeAwaySplit, StabilityRow
from .standardize import IndexTable


def _meta_lines(meta: dict) -> list[str]:
    lines = [f"tool={meta['tool']} version={meta['version']}"]
    if "config_hash" in meta:
        lines.append(f"config_hash={meta['config_hash']}")
    if "config" in meta:
        lines.append("config=" + artifacts.canonical_json(meta["config"]))
    for key, value in meta.items():
        if key not in ("tool", "version", "config_hash", "config"):
            lines.append(f"{key}={value}")
    return lines


def csv_document(header: Sequence[str], rows: Iterable[Sequence], meta: dict) -> str:
    out = io.StringIO()
    for line in _meta_lines(meta):
        out.write(f"# {line}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_cell(v) for v in row) + "\n")
    return out.getvalue()


def markdown_table(header: Sequence[str], rows: Iterable[Sequence], meta: dict,
                   title: str | None = None) -> str:
    out = io.StringIO()
    if title:
        out.write(f"## {title}\n\n")
    out.write("| " + " | ".join(header) + " |\n")
    out.write("|" + "|".join(" --- " for _ in header) + "|\n")
    for row in rows:
        out.write("| " + " | ".join(_cell(v) for v in row) + " |\n")
    out.write("\n<!-- " + "; ".join(_meta_lines(meta)) + " -->\n")
    return out.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if value != value:  # NaN
            return ""
        return format(value, ".10g")
    return str(value)


def effects_long_rows(season, kind_values: dict[str, dict[int, float]],
                      intercept: float, codes: dict[int, str]):
    """Rows of (season, entity_type, entity, estimate); Table-style long
    format with the intercept as its own entity type."""
    rows = [(season, "intercept", "", intercept)]
    for entity_type, values in kind_values.items():
        for entity_id in sorted(values):
            rows.append((
                season, entity_type, codes.get(entity_id, str(entity_id)),
                values[entity_id],
            ))
    return rows


def index_rows(table: IndexTable, codes: dict[int, str]):
    return [
        (
            table.season, table.entity_type,
            codes.get(row.entity_id, str(row.entity_id)),
            row.effect, row.z, row.index, row.index_rounded,
        )
        for row in table
    ]


INDEX_HEADER = ("season", "entity_type", "entity", "effect", "z", "index",
                "index_rounded")


def wide_rows(values_by_entity: dict[str, dict[int, float]], seasons: Sequence[int]):
    """One row per entity code, one column per season."""
    rows = []
    for code in sorted(values_by_entity):
        per_season = values_by_entity[code]
        rows.append([code] + [per_season.get(s) for s in seasons])
    return rows


def home_away_rows(splits: Iterable[HomeAwaySplit], codes: dict[int, str]):
    return [
        (
            codes.get(s.team, str(s.team)), s.season,
            s.opp_home, s.opp_away, s.team_home, s.team_away,
            s.n_opp_home, s.n_opp_away, s.n_team_home, s.n_team_away,
        )
        for s in splits
    ]


HOME_AWAY_HEADER = (
    "team", "season", "opp_tbr_home", "opp_tbr_away", "team_tbr_home",
    "team_tbr_away", "n_opp_home", "n_opp_away", "n_team_home", "n_team_away",
)


def stability_rows(rows: Iterable[StabilityRow], codes: dict[int, str],
                   reference: dict[str, float] | None = None):
    out = []
    for row in rows:
        label = "Average" if row.entity_id is None else codes.get(
            row.entity_id, str(row.entity_id)
        )
        if reference is not None:
            out.append((label, row.sd, reference.get(label), row.n_seasons))
        else:
            out.append((label, row.sd, row.n_seasons))
    return out


def intercept_rows(series: Iterable[tuple[int, float]]):
    return [(season, value) for season, value in series]


def intercept_svg(series: Sequence[tuple[int, float]], meta: dict,
                  width: int = 640, height: int = 320) -> str:
    """Minimal self-contained bar chart of the per-season intercepts."""
    margin = 50
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    values = [v for _, v in series]
    vmax = max(max(values, default=0.0), 0.0)
    vmin = min(min(values, default=0.0), 0.0)
    span = (vmax - vmin) or 1.0

    def ypix(v):
        return margin + (vmax - v) / span * plot_h

    n = max(len(series), 1)
    bar_w = plot_w / n * 0.7
    out = io.StringIO()
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n'
    )
    out.write("<!-- " + "; ".join(_meta_lines(meta)) + " -->\n")
    out.write(f'<rect width="{width}" height="{height}" fill="white"/>\n')
    y0 = ypix(0.0)
    out.write(
        f'<line x1="{margin}" y1="{y0:.2f}" x2="{width - margin}" '
        f'y2="{y0:.2f}" stroke="black" stroke-width="1"/>\n'
    )
    for k, (season, value) in enumerate(series):
        x = margin + plot_w * (k + 0.15) / n
        top = min(ypix(value), y0)
        h = abs(ypix(value) - y0)
        fill = "#4878a8" if value >= 0 else "#b04a4a"
        out.write(
            f'<rect x="{x:.2f}" y="{top:.2f}" width="{bar_w:.2f}" '
            f'height="{h:.2f}" fill="{fill}"/>\n'
        )
        out.write(
            f'<text x="{x + bar_w / 2:.2f}" y="{height - margin + 16}" '
            f'font-size="11" text-anchor="middle">{season}</text>\n'
        )
        vy = top - 4 if value >= 0 else top + h + 12
        out.write(
            f'<text x="{x + bar_w / 2:.2f}" y="{vy:.2f}" font-size="10" '
            f'text-anchor="middle">{value:.4f}</text>\n'
        )
    out.write(
        f'<text x="{width / 2}" y="{margin / 2}" font-size="13" '
        f'text-anchor="middle">League-average residual by season '
        f'(centered intercept)</text>\n'
    )
    out.write("</svg>\n")
    return out.getvalue()
