"""Render fdnoma CSV output into the four standard figures.

Consumes the simulator's CSV schemas only; inputs are never modified. Each
figure id fixes its own styling: sweep figures (fig2, fig4) draw mean curves
with 95% confidence bars against SNR, region figures (fig5b, fig6) draw the
strong-user rate against the weak-user target, fig6 adding the time-sharing
segments.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURE_IDS = ("fig2", "fig4", "fig5b", "fig6")
SWEEP_COLUMNS = ["scenario", "mode", "x_name", "x_value", "metric", "value",
                 "ci_half", "trials", "seed"]
REGION_COLUMNS = ["scenario", "scheme", "r2_target", "r1_max", "feasible", "ith",
                  "trials", "seed"]


class SchemaError(ValueError):
    """Input CSV does not match the expected column schema or holds no data."""


@dataclass
class FigureSpec:
    figure_id: str
    csv_paths: list[Path]
    out_path: Path
    title: str | None = None

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise SchemaError(f"unknown figure id {self.figure_id!r}")
        missing = [str(p) for p in self.csv_paths if not Path(p).is_file()]
        if missing:
            raise SchemaError(f"missing input CSV: {', '.join(missing)}")


def read_rows(path: Path, expected_columns: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != expected_columns:
            raise SchemaError(
                f"{path}: expected columns {expected_columns}, got {reader.fieldnames}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _sweep_series(paths):
    """(label, x, y, ci) per mode, keyed by file stem when several files mix."""
    series = []
    for path in paths:
        rows = read_rows(path, SWEEP_COLUMNS)
        prefix = f"{Path(path).stem}:" if len(paths) > 1 else ""
        modes = sorted({r["mode"] for r in rows})
        for mode in modes:
            pts = [(float(r["x_value"]), float(r["value"]), float(r["ci_half"]))
                   for r in rows if r["mode"] == mode]
            pts.sort()
            series.append((prefix + mode,
                           [p[0] for p in pts], [p[1] for p in pts], [p[2] for p in pts]))
    return series


def _region_series(paths):
    """Feasible region points per (file, scheme); infeasible rows are omitted."""
    curves, tdm_segments = [], []
    for path in paths:
        rows = read_rows(path, REGION_COLUMNS)
        prefix = f"{Path(path).stem}:" if len(paths) > 1 else ""
        schemes = sorted({r["scheme"] for r in rows})
        for scheme in schemes:
            pts = [(float(r["r2_target"]), float(r["r1_max"]))
                   for r in rows
                   if r["scheme"] == scheme and r["feasible"] == "true" and r["r1_max"] != ""]
            pts.sort()
            if not pts:
                continue
            if scheme == "tdm":
                tdm_segments.append((prefix + scheme, pts))
            else:
                curves.append((prefix + scheme, pts))
    return curves, tdm_segments


def render_figure(spec: FigureSpec):
    """Draw the figure and write the image; returns the matplotlib Figure."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    if spec.figure_id in ("fig2", "fig4"):
        for label, x, y, ci in _sweep_series(spec.csv_paths):
            ax.errorbar(x, y, yerr=ci, marker="o", markersize=4, capsize=3, label=label)
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("Ergodic sum capacity (bits/s/Hz)")
        default_title = ("Uplink/downlink ergodic sum capacity" if spec.figure_id == "fig2"
                         else "Cooperative ergodic sum capacity")
    else:
        curves, tdm_segments = _region_series(spec.csv_paths)
        if not curves:
            raise SchemaError("no feasible region points to plot")
        for label, pts in curves:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                    markersize=4, label=label)
        if spec.figure_id == "fig6":
            for label, pts in tdm_segments:
                ax.plot([p[0] for p in pts], [p[1] for p in pts], linestyle="--",
                        marker="s", markersize=4, label=label)
        ax.set_xlabel("Weak-user rate target (bits/s/Hz)")
        ax.set_ylabel("Strong-user rate (bits/s/Hz)")
        default_title = ("Cognitive achievable rate regions" if spec.figure_id == "fig5b"
                         else "Superposition-coding rate regions vs time sharing")
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title(spec.title or default_title)
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    return fig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdnoma-render",
                                     description="Render fdnoma CSVs into figures")
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render one figure from CSV inputs")
    render.add_argument("--csv", action="append", required=True,
                        help="input CSV (repeatable)")
    render.add_argument("--figure", required=True, choices=FIGURE_IDS)
    render.add_argument("--out", required=True, help="output image path")
    render.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(figure_id=args.figure,
                          csv_paths=[Path(p) for p in args.csv],
                          out_path=Path(args.out), title=args.title)
        fig = render_figure(spec)
        plt.close(fig)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
