from gridauction.costs import StrategyParams
from gridauction.engine import run
from gridauction.figures import (render_group_sweep_figure, render_run_figures,
                                 render_sweep_figure, render_variance_figure,
                                 variance_points)

from test_engine import NO_FAILURES, tiny_scenario


def test_run_figures_are_written(tmp_path):
    report = run(tiny_scenario(), StrategyParams(), NO_FAILURES, max_ticks=20)
    paths = render_run_figures(report, tmp_path)
    assert [p.name for p in paths] == ["fig_loading.png", "fig_outcomes.png"]
    for path in paths:
        assert path.stat().st_size > 1000


def test_sweep_figure(tmp_path):
    path = render_sweep_figure("sp", [0, 1, 2], [5.0, 6.0, 6.5],
                               "mean_assigned_raw_cost", tmp_path / "f.png")
    assert path.exists() and path.stat().st_size > 1000


def test_group_sweep_figure(tmp_path):
    path = render_group_sweep_figure(
        "qp", [0, 1], {"max qos": [10, 20], "min qos": [20, 10]},
        tmp_path / "g.png")
    assert path.exists()


def test_variance_figure_and_points(tmp_path):
    report = run(tiny_scenario(), StrategyParams(), NO_FAILURES, max_ticks=10)
    ticks, variances = variance_points(report)
    assert len(ticks) == len(variances) > 0
    path = render_variance_figure(ticks, {"on": variances, "off": variances},
                                  tmp_path / "v.png")
    assert path.exists()
