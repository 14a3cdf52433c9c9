"""S1: render a 1x4 figure from a real benchmark run's CSV output.

Runs the solver CLI at the shock-benchmark configuration (burgers-shock,
tau=1e-4) and renders panels at four report times.  The solver side never
imports this package; the coupling is the CSV file contract only.
"""

import subprocess
import sys
from pathlib import Path

import pytest

FRONTEND = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(FRONTEND))

import render  # noqa: E402

REQUESTED_TIMES = (1.4, 1.8, 2.2, 2.6)


@pytest.fixture(scope="module")
def benchmark_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("p4_run")
    res = subprocess.run(
        [sys.executable, "-m", "kernmol.cli", "--problem", "burgers-shock",
         "--tau", "1e-4", "--out", str(out)],
        capture_output=True, text=True, timeout=300,
    )
    assert res.returncode == 0, res.stderr
    return out


def test_s1_renders_one_by_four_panel_figure(benchmark_run, tmp_path):
    out_png = tmp_path / "shock_panels.png"
    res = subprocess.run(
        [sys.executable, str(FRONTEND / "render.py"), "--in", str(benchmark_run),
         "--times", ",".join(str(t) for t in REQUESTED_TIMES),
         "--layout", "1x4", "--out", str(out_png)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert out_png.exists() and out_png.stat().st_size > 0

    # panel count and titles match the requested times (each request resolves
    # to the nearest level; with 51 levels over [1,3] that is within half a step)
    spec = render.PlotSpec(input_dir=benchmark_run, times=REQUESTED_TIMES,
                           rows=1, cols=4, output=out_png)
    level_times = render.read_levels(benchmark_run)
    fig = render.build_figure(spec)
    panels = [ax for ax in fig.axes if ax.axison]
    assert len(panels) == 4
    half_step = 0.5 * (level_times[1] - level_times[0])
    for ax, requested in zip(panels, REQUESTED_TIMES):
        resolved = render.resolve_levels(
            render.PlotSpec(input_dir=benchmark_run, times=(requested,),
                            rows=1, cols=1, output=out_png))[0]
        assert ax.get_title() == f"t={level_times[resolved]:g}"
        assert abs(level_times[resolved] - requested) <= half_step + 1e-12
