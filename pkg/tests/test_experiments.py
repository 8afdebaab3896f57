import math

import numpy as np
import pytest

from qwsearch.experiments import (
    COLUMNS,
    FIGURES,
    ResultTable,
    SweepPlan,
    emit_results,
    figure_plans,
    format_results,
    read_results,
    run_sweep,
)
from qwsearch.metrics import monte_carlo
from qwsearch.noise import NoiseKind, NoiseSpec, derive_seed
from qwsearch.state_space import Family, WalkSpec


def same_table(a: ResultTable, b: ResultTable):
    assert a.columns == b.columns
    assert a.types == b.types
    assert a.meta == b.meta
    assert len(a.rows) == len(b.rows)
    for ra, rb in zip(a.rows, b.rows):
        for x, y in zip(ra, rb):
            if isinstance(x, float) and math.isnan(x):
                assert math.isnan(y)
            else:
                assert x == y and type(x) is type(y)


def sample_table():
    t = ResultTable.for_mode("cost", {"walk": "hypercube-n3", "note": "a,b \"q\""})
    t.rows += [
        ("ideal", 1, 0.1, 10.0),
        ("gaussian-0.3", 2, 1 / 3, math.inf),
        ("x,y", 3, 0.0, math.nan),
        ("ideal", 4, 5e-324, 1.7976931348623157e308),
    ]
    return t


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_round_trip_exact(tmp_path, fmt):
    t = sample_table()
    path = emit_results(t, tmp_path / f"out.{fmt}", fmt)
    same_table(read_results(path), t)


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_empty_table_is_header_only(tmp_path, fmt):
    t = ResultTable.for_mode("trajectory", {"k": 1})
    text = format_results(t, fmt, timestamp=False)
    if fmt == "csv":
        assert text.splitlines()[-1] == "series,s,p_marked,stderr"
        assert all(line.startswith("#") for line in text.splitlines()[:-1])
    else:
        assert len(text.splitlines()) == 1
    same_table(read_results(emit_results(t, tmp_path / "e", fmt)), t)


def test_csv_layout():
    text = format_results(sample_table(), "csv")
    lines = text.splitlines()
    assert lines[0].startswith("# created: ")
    assert lines[1] == '# walk: "hypercube-n3"'
    assert lines[-5] == "series,s,p_marked,cost"
    assert lines[-4] == "ideal,1,0.10000000000000001,10"


def test_unknown_format():
    with pytest.raises(ValueError):
        format_results(sample_table(), "xml")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(mode="nope"),
        dict(sizes=()),
        dict(mode="strength", strengths=()),
        dict(mode="strength", strengths=(math.nan,)),
        dict(kinds=(NoiseKind.NONE, NoiseKind.GAUSSIAN), strengths=(0.0,)),
        dict(realizations=0),
        dict(sizes=(1,)),
    ],
)
def test_invalid_plans(kwargs):
    with pytest.raises(ValueError):
        SweepPlan(**kwargs)


def test_presets_fill_every_field():
    assert FIGURES == tuple(f"fig{i}" for i in range(1, 9))
    for fig in FIGURES:
        for plan in figure_plans(fig):
            assert plan.figure == fig
            assert plan.sizes and plan.kinds and plan.realizations >= 1
            assert all(plan.horizon(s) >= 1 for s in plan.sizes)
    with pytest.raises(ValueError):
        figure_plans("fig9")


def test_fig1_schema_and_series():
    (plan,) = figure_plans("fig1", realizations=4)
    table = run_sweep(plan)
    assert table.columns == ("series", "s", "p_marked", "stderr")
    series = sorted(set(table.column("series")))
    assert series == ["broken-link-0.02", "gaussian-0.3", "ideal", "systematic-0.3"]
    assert len(table.rows) == 4 * 61
    ideal = table.select(series="ideal")
    assert ideal[18]["p_marked"] == pytest.approx(0.43447149924737977, abs=1e-12)


def test_fig2_interior_minimum():
    (plan,) = figure_plans("fig2", realizations=4)
    rows = run_sweep(plan).select(series="systematic-0.3")
    cost = [r["cost"] for r in rows]
    s_star = rows[int(np.argmin(cost))]["s"]
    assert 8 <= s_star <= 12


def test_rows_reproducible_from_metadata():
    plan = SweepPlan("strength", Family.HYPERCUBE, (5, 6), (NoiseKind.GAUSSIAN,), (0.0, 0.4), realizations=6, seed=17)
    table = run_sweep(plan)
    assert table.meta["seed"] == 17 and table.meta["realizations"] == 6
    for k, row in enumerate(table.select()):
        assert row["seed"] == derive_seed(17, k)
        walk = WalkSpec.hypercube(row["dimension"])
        agg = monte_carlo(walk, NoiseSpec(NoiseKind.GAUSSIAN, row["strength"], row["seed"]), table.meta["horizons"][walk.label()], 6)
        assert agg.p_marked.max() == row["max_p_marked"]


def test_delta_rows():
    plan = SweepPlan("delta", Family.HYPERCUBE, (6,), (NoiseKind.GAUSSIAN,), deltas=(0.0, 1.0), realizations=5)
    rows = run_sweep(plan).select()
    assert [r["delta"] for r in rows] == [0.0, 1.0]
    assert rows[1]["strength"] == pytest.approx(1 / 64)
    for r in rows:
        assert r["cost_stop"] == pytest.approx(r["s_stop"] / r["p_stop"])
        assert r["scaled_cost"] == pytest.approx(math.log(r["cost_stop"]) / math.log(64))
        assert r["scaled_cost_min"] <= r["scaled_cost"]


def test_workers_do_not_change_results():
    plan = SweepPlan("strength", Family.GRID, (4, 5), (NoiseKind.BROKEN_LINK,), (0.0, 0.1), realizations=5, seed=2)
    a = format_results(run_sweep(plan, workers=1), timestamp=False)
    b = format_results(run_sweep(plan, workers=2), timestamp=False)
    assert a == b


def test_rerun_is_byte_identical(tmp_path):
    plan = figure_plans("fig4", sizes=(6,), realizations=5)[0]
    a = emit_results(run_sweep(plan), tmp_path / "a.csv", timestamp=False).read_bytes()
    b = emit_results(run_sweep(plan), tmp_path / "b.csv", timestamp=False).read_bytes()
    assert a == b


def test_columns_cover_every_mode():
    assert set(COLUMNS) == {"trajectory", "cost", "strength", "delta"}
