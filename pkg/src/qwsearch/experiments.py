"""Sweep harness, figure presets and result files.

Each sweep point runs a Monte Carlo ensemble and reduces it to table rows.
Point ``k`` of a plan draws from ``derive_seed(plan.seed, k)`` and its
realization ``i`` from ``realization_rng(point_seed, i)``; the point seed is
written into every row, so any row can be regenerated from the file alone.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .metrics import cost_curve, max_unmarked, monte_carlo, scaled_cost, stopping_step
from .noise import NoiseKind, NoiseSpec, derive_seed, strength_from_delta
from .state_space import Family, WalkSpec
from .walks import default_horizon

__all__ = [
    "MODES",
    "SweepPlan",
    "ResultTable",
    "FIGURES",
    "figure_plans",
    "run_sweep",
    "run_figure",
    "emit_results",
    "format_results",
    "read_results",
    "series_name",
]

MODES = ("trajectory", "cost", "strength", "delta")

DEFAULT_DELTAS = tuple(round(-0.3 + 0.1 * k, 10) for k in range(19))
STRENGTH_GRID = tuple(round(0.1 * k, 10) for k in range(11))
RATE_GRID = tuple(round(0.01 * k, 10) for k in range(11))

COLUMNS = {
    "trajectory": (("series", str), ("s", int), ("p_marked", float), ("stderr", float)),
    "cost": (("series", str), ("s", int), ("p_marked", float), ("cost", float)),
    "strength": (
        ("series", str),
        ("dimension", int),
        ("strength", float),
        ("max_p_marked", float),
        ("s_marked", int),
        ("stderr_marked", float),
        ("max_p_unmarked", float),
        ("s_unmarked", int),
        ("stderr_unmarked", float),
        ("seed", int),
    ),
    "delta": (
        ("series", str),
        ("dimension", int),
        ("N", int),
        ("delta", float),
        ("strength", float),
        ("s_stop", int),
        ("p_stop", float),
        ("cost_stop", float),
        ("scaled_cost", float),
        ("s_star", int),
        ("c_star", float),
        ("scaled_cost_min", float),
        ("seed", int),
    ),
}

HORIZON_CONVENTION = (
    "hypercube: s_max = 2 * round(pi/2 * sqrt(2**(n-1))); "
    "grid: s_max = ceil(2 * sqrt(N ln N)); unless s_max is given"
)
COST_CONVENTION = (
    "cost c(s) = s / p_s on the Monte Carlo mean p_s; "
    "s_stop = argmax of the first lobe of p_s (lobe ends where p_s < half its running max); "
    "scaled_cost = log_N c(s_stop); scaled_cost_min = log_N min_s c(s)"
)
STRENGTH_CONVENTION = "strength = N**(-delta), N = number of vertices"


@dataclass
class SweepPlan:
    """What to run.

    ``trajectory``/``cost`` pair ``kinds[i]`` with ``strengths[i]`` (one series
    each). ``strength`` runs every kind at every strength. ``delta`` runs
    ``kinds[0]`` at strength N**(-delta) for each delta.
    """

    mode: str = "trajectory"
    family: Family = Family.HYPERCUBE
    sizes: tuple[int, ...] = (8,)
    kinds: tuple[NoiseKind, ...] = (NoiseKind.NONE,)
    strengths: tuple[float, ...] = (0.0,)
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    s_max: int | None = None
    realizations: int = 200
    seed: int = 0
    marked: int = 0
    figure: str = "custom"
    panel: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        self.family = Family(self.family)
        self.kinds = tuple(NoiseKind(k) for k in self.kinds)
        self.sizes = tuple(int(s) for s in self.sizes)
        self.strengths = tuple(float(s) for s in self.strengths)
        self.deltas = tuple(float(d) for d in self.deltas)
        if not self.sizes or not self.kinds:
            raise ValueError("plan needs at least one size and one noise kind")
        grid = self.deltas if self.mode == "delta" else self.strengths
        if not grid or not all(math.isfinite(x) for x in grid):
            raise ValueError("sweep grid must be nonempty and finite")
        if self.mode in ("trajectory", "cost") and len(self.kinds) != len(self.strengths):
            raise ValueError("trajectory/cost plans pair kinds with strengths one to one")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.s_max is not None and self.s_max < 1:
            raise ValueError("s_max must be >= 1")
        for size in self.sizes:
            self.walk(size)

    def walk(self, size: int) -> WalkSpec:
        if self.family is Family.HYPERCUBE:
            return WalkSpec.hypercube(size, self.marked)
        return WalkSpec.grid(size, self.marked)

    def horizon(self, size: int) -> int:
        return self.s_max if self.s_max is not None else default_horizon(self.walk(size))

    def points(self) -> list[tuple[int, NoiseKind, float]]:
        """(size, kind, strength-or-delta) for every sweep point, in emission order."""
        out = []
        for size in self.sizes:
            if self.mode in ("trajectory", "cost"):
                out += [(size, k, s) for k, s in zip(self.kinds, self.strengths)]
            elif self.mode == "strength":
                out += [(size, k, s) for k in self.kinds for s in self.strengths]
            else:
                out += [(size, self.kinds[0], d) for d in self.deltas]
        return out


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    types: tuple[type, ...]
    rows: list[tuple] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @classmethod
    def for_mode(cls, mode: str, meta: dict | None = None) -> ResultTable:
        cols, types = zip(*COLUMNS[mode])
        return cls(cols, types, [], dict(meta or {}))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def select(self, **where) -> list[dict]:
        """Rows (as dicts) whose columns equal the given values."""
        out = []
        for r in self.rows:
            d = dict(zip(self.columns, r))
            if all(d[k] == v for k, v in where.items()):
                out.append(d)
        return out


def series_name(kind: NoiseKind, strength: float) -> str:
    if kind is NoiseKind.NONE:
        return "ideal"
    return f"{kind.value}-{strength:g}"


def _run_point(mode: str, walk: WalkSpec, kind: NoiseKind, x: float, s_max: int, R: int, seed: int):
    if mode == "delta":
        strength = strength_from_delta(walk.vertex_count, x)
    else:
        strength = x
    noise = NoiseSpec(kind, strength, seed)
    agg = monte_carlo(walk, noise, s_max, R)
    pm = agg.p_marked
    size = walk.size

    if mode == "trajectory":
        name = series_name(kind, strength)
        return [(name, s, float(pm[s]), float(agg.stderr_marked[s])) for s in range(s_max + 1)]
    if mode == "cost":
        name = series_name(kind, strength)
        c = cost_curve(agg).c
        return [(name, s, float(pm[s]), float(c[s])) for s in range(1, s_max + 1)]
    if mode == "strength":
        s_m = int(np.argmax(pm))
        u, s_u = max_unmarked(agg)
        return [(
            kind.value, size, strength,
            float(pm[s_m]), s_m, float(agg.stderr_marked[s_m]),
            u, s_u, float(agg.stderr_unmarked_max[s_u]),
            seed,
        )]
    N = walk.vertex_count
    s_stop = stopping_step(pm)
    cc = cost_curve(agg)
    if s_stop > 0 and pm[s_stop] > 0:
        cost_stop = s_stop / float(pm[s_stop])
        scaled = scaled_cost(cost_stop, N)
    else:
        cost_stop = scaled = math.inf
    return [(
        kind.value, size, N, x, strength,
        s_stop, float(pm[s_stop]), cost_stop, scaled,
        cc.s_star, cc.c_star, cc.scaled,
        seed,
    )]


def _plan_meta(plan: SweepPlan) -> dict:
    meta = {
        "tool": "qwsearch",
        "version": __version__,
        "figure": plan.figure,
        "panel": plan.panel,
        "mode": plan.mode,
        "walks": [plan.walk(s).label() for s in plan.sizes],
        "marked": plan.marked,
        "noise_kinds": [k.value for k in plan.kinds],
        "realizations": plan.realizations,
        "seed": plan.seed,
        "horizons": {plan.walk(s).label(): plan.horizon(s) for s in plan.sizes},
        "horizon_convention": HORIZON_CONVENTION,
        "rng": "point seed = SeedSequence(seed, spawn_key=(point,)); realization i = PCG64(SeedSequence(point_seed, spawn_key=(i,)))",
    }
    if plan.mode == "delta":
        meta["deltas"] = list(plan.deltas)
        meta["strength_convention"] = STRENGTH_CONVENTION
        meta["cost_convention"] = COST_CONVENTION
    else:
        meta["strengths"] = list(plan.strengths)
    if plan.mode == "strength":
        meta["statistic"] = (
            "max over s of mean p_marked and of mean max-unmarked probability, taken independently"
        )
    return meta


def run_sweep(plan: SweepPlan, workers: int = 1) -> ResultTable:
    """Run every sweep point of ``plan``; rows come out in :meth:`SweepPlan.points` order."""
    table = ResultTable.for_mode(plan.mode, _plan_meta(plan))
    tasks = [
        (plan.mode, plan.walk(size), kind, x, plan.horizon(size), plan.realizations, derive_seed(plan.seed, k))
        for k, (size, kind, x) in enumerate(plan.points())
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, *zip(*tasks)))
    else:
        results = [_run_point(*t) for t in tasks]
    for rows in results:
        table.rows.extend(rows)
    return table


def _figure_presets() -> dict[str, list[SweepPlan]]:
    H, G = Family.HYPERCUBE, Family.GRID
    K = NoiseKind
    four = dict(
        kinds=(K.NONE, K.SYSTEMATIC, K.GAUSSIAN, K.BROKEN_LINK),
        strengths=(0.0, 0.3, 0.3, 0.02),
    )
    # grid sides match hypercube vertex counts: 16x16 ~ n=8, 32x32 ~ n=10, 64x64 ~ n=12
    sides = (16, 32, 64)
    return {
        "fig1": [SweepPlan("trajectory", H, (8,), s_max=60, **four)],
        "fig2": [SweepPlan("cost", H, (8,), s_max=60, **four)],
        "fig3": [SweepPlan("strength", H, (8, 9, 10), (K.SYSTEMATIC, K.GAUSSIAN), STRENGTH_GRID)],
        "fig4": [
            SweepPlan("strength", H, (8, 9, 10), (K.BROKEN_LINK,), RATE_GRID, panel="rate"),
            SweepPlan("strength", H, (6, 7, 8, 9, 10), (K.BROKEN_LINK,), (0.05,), panel="dimension"),
        ],
        "fig5": [SweepPlan("delta", H, (8, 9, 10, 11), (K.GAUSSIAN,), (0.0,), DEFAULT_DELTAS)],
        "fig6": [SweepPlan("strength", G, sides, (K.SYSTEMATIC, K.GAUSSIAN), STRENGTH_GRID)],
        "fig7": [
            SweepPlan("strength", G, sides, (K.BROKEN_LINK,), RATE_GRID, panel="rate"),
            SweepPlan("strength", G, (8, 16, 32, 64), (K.BROKEN_LINK,), (0.05,), panel="dimension"),
        ],
        "fig8": [SweepPlan("delta", G, sides, (K.GAUSSIAN,), (0.0,), DEFAULT_DELTAS)],
    }


FIGURES = tuple(_figure_presets())


def figure_plans(figure: str, **overrides) -> list[SweepPlan]:
    """Preset plans (one per panel) for ``fig1`` .. ``fig8``; keyword overrides
    (``realizations``, ``seed``, ``s_max``, ``sizes``, ``deltas`` ...) apply to every panel."""
    presets = _figure_presets()
    if figure not in presets:
        raise ValueError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return [replace(p, figure=figure, **overrides) for p in presets[figure]]


def run_figure(figure: str, workers: int = 1, **overrides) -> list[ResultTable]:
    return [run_sweep(plan, workers) for plan in figure_plans(figure, **overrides)]


def _fmt(value, typ, for_json: bool = False) -> str:
    if typ is float:
        v = float(value)
        if math.isnan(v):
            return "NaN" if for_json else "nan"
        if math.isinf(v):
            if for_json:
                return "Infinity" if v > 0 else "-Infinity"
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if typ is int:
        return str(int(value))
    return json.dumps(str(value)) if for_json else str(value)


_TYPE_NAMES = {int: "int", float: "float", str: "str"}
_NAME_TYPES = {v: k for k, v in _TYPE_NAMES.items()}


def format_results(table: ResultTable, fmt: str = "csv", timestamp: bool = True) -> str:
    """Serialize a table. Floats carry 17 significant digits so parsing is exact."""
    created = time.strftime("%Y-%m-%dT%H:%M:%S%z") if timestamp else None
    types = [_TYPE_NAMES[t] for t in table.types]
    if fmt == "csv":
        buf = io.StringIO()
        if created:
            buf.write(f"# created: {json.dumps(created)}\n")
        for key, value in table.meta.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        buf.write(f"# types: {json.dumps(types)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_fmt(v, t) for v, t in zip(row, table.types)])
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        if created:
            lines.append(json.dumps({"created": created}))
        header = {"meta": table.meta, "columns": list(table.columns), "types": types}
        lines.append(json.dumps(header, sort_keys=True))
        for row in table.rows:
            items = (
                f"{json.dumps(c)}: {_fmt(v, t, for_json=True)}"
                for c, v, t in zip(table.columns, row, table.types)
            )
            lines.append("{" + ", ".join(items) + "}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected csv or jsonl")


def emit_results(table: ResultTable, path, fmt: str = "csv", timestamp: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_results(table, fmt, timestamp), encoding="utf-8")
    return path


def _parse_text(text: str) -> ResultTable:
    first = text.lstrip()[:1]
    if first == "{":
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        if "created" in lines[0] and len(lines[0]) == 1:
            lines = lines[1:]
        header, body = lines[0], lines[1:]
        types = tuple(_NAME_TYPES[t] for t in header["types"])
        cols = tuple(header["columns"])
        rows = [tuple(t(obj[c]) for c, t in zip(cols, types)) for obj in body]
        return ResultTable(cols, types, rows, header["meta"])

    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
        elif line.strip():
            body.append(line)
    meta.pop("created", None)
    types = tuple(_NAME_TYPES[t] for t in meta.pop("types"))
    reader = csv.reader(body)
    cols = tuple(next(reader))
    rows = [tuple(t(v) for v, t in zip(r, types)) for r in reader]
    return ResultTable(cols, types, rows, meta)


def read_results(path) -> ResultTable:
    """Parse a file written by :func:`emit_results` (CSV or JSON lines)."""
    return _parse_text(Path(path).read_text(encoding="utf-8"))
