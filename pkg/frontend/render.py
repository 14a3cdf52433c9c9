#!/usr/bin/env python3
"""Render solution snapshots from solver CSV output.

Reads ``levels.csv`` and the per-level ``solution_t<idx>.csv`` files written
by the solver CLI and draws one panel per requested time: the solution curve
with a marker at every collocation point, titled with the level time.  The
tool is read-only over its inputs.

    render.py --in out/ --times 1.4,1.8,2.2,2.6 --layout 1x4 --out fig.png

Times are matched to the nearest time level; pass ``--indices`` to address
levels by row index instead.  Exit codes: 0 success, 1 missing/malformed
input (the message names the file and, for parse errors, the line), 2 usage
error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class RenderError(Exception):
    """Input problem; message is already user-facing."""


@dataclass(frozen=True)
class PlotSpec:
    input_dir: Path
    times: tuple[float, ...]
    rows: int
    cols: int
    output: Path
    times_are_indices: bool = False


def read_levels(input_dir: Path) -> list[float]:
    """Level times from levels.csv, in row order (row order is the index)."""
    path = input_dir / "levels.csv"
    if not path.exists():
        raise RenderError(f"missing file: {path}")
    times = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1:
                if not row or row[0] != "t":
                    raise RenderError(f"{path}: line 1: expected a 't' header column")
                continue
            try:
                times.append(float(row[0]))
            except (IndexError, ValueError):
                raise RenderError(f"{path}: line {lineno}: malformed level row")
    if not times:
        raise RenderError(f"{path}: no level rows")
    return times


def read_solution(input_dir: Path, idx: int):
    """(x, u_hat) arrays for one level's snapshot CSV."""
    path = input_dir / f"solution_t{idx}.csv"
    if not path.exists():
        raise RenderError(f"missing file: {path}")
    xs, us = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1:
                if row[:2] != ["x", "u_hat"]:
                    raise RenderError(f"{path}: line 1: expected x,u_hat columns")
                continue
            try:
                xs.append(float(row[0]))
                us.append(float(row[1]))
            except (IndexError, ValueError):
                raise RenderError(f"{path}: line {lineno}: malformed solution row")
    if not xs:
        raise RenderError(f"{path}: no data rows")
    return xs, us


def resolve_levels(spec: PlotSpec) -> list[int]:
    """Map each requested time (or index) to exactly one level index."""
    level_times = read_levels(spec.input_dir)
    indices = []
    for tok in spec.times:
        if spec.times_are_indices:
            idx = int(tok)
            if not 0 <= idx < len(level_times):
                raise RenderError(
                    f"level index {idx} out of range (have {len(level_times)} levels)"
                )
        else:
            gaps = [abs(t - tok) for t in level_times]
            idx = gaps.index(min(gaps))
            if gaps.count(min(gaps)) > 1:
                raise RenderError(f"time {tok:g} is equidistant from two levels")
        indices.append(idx)
    return indices


def build_figure(spec: PlotSpec):
    """Assemble the multi-panel figure; returns the matplotlib Figure."""
    level_times = read_levels(spec.input_dir)
    indices = resolve_levels(spec)
    fig, axes = plt.subplots(spec.rows, spec.cols, squeeze=False,
                             figsize=(3.2 * spec.cols, 2.8 * spec.rows))
    flat = axes.ravel()
    for ax in flat[len(indices):]:
        ax.set_axis_off()
    for ax, idx in zip(flat, indices):
        xs, us = read_solution(spec.input_dir, idx)
        ax.plot(xs, us, "-", color="tab:blue", lw=1.2)
        ax.plot(xs, us, "o", color="tab:red", ms=2.5)
        ax.set_title(f"t={level_times[idx]:g}")
        ax.set_xlabel("x")
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> None:
    fig = build_figure(spec)
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="render.py",
        description="Plot solver solution snapshots (curve + collocation markers).",
    )
    p.add_argument("--in", dest="input_dir", required=True, help="solver output directory")
    p.add_argument("--times", required=True,
                   help="comma list of times (or level indices with --indices)")
    p.add_argument("--layout", default=None, help="RxC panel grid, e.g. 1x4")
    p.add_argument("--indices", action="store_true",
                   help="interpret --times as level row indices")
    p.add_argument("--out", required=True, help="output image path")
    return p


def parse_spec(argv=None) -> PlotSpec:
    args = build_parser().parse_args(argv)
    tokens = [tok.strip() for tok in args.times.split(",") if tok.strip()]
    if not tokens:
        raise SystemExit(build_parser().error("--times is empty"))
    try:
        times = tuple(float(tok) for tok in tokens)
    except ValueError:
        build_parser().error(f"could not parse --times {args.times!r}")
    if args.layout is None:
        rows, cols = 1, len(times)
    else:
        try:
            rows_s, cols_s = args.layout.lower().split("x")
            rows, cols = int(rows_s), int(cols_s)
        except ValueError:
            build_parser().error(f"--layout must look like 1x4, got {args.layout!r}")
        if rows < 1 or cols < 1 or rows * cols < len(times):
            build_parser().error(
                f"layout {args.layout} cannot hold {len(times)} panels")
    return PlotSpec(input_dir=Path(args.input_dir), times=times, rows=rows,
                    cols=cols, output=Path(args.out),
                    times_are_indices=args.indices)


def main(argv=None) -> int:
    spec = parse_spec(argv)
    try:
        render(spec)
    except RenderError as err:
        print(f"render.py: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
