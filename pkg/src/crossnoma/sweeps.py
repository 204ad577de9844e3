"""Sweep protocols, analytic-vs-simulation comparison and CSV tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .analytic import outage_o1, outage_o2, outage_oma
from .config import ScenarioConfig, build_config, resolved_items
from .errors import ConfigError
from .geometry import Position
from .montecarlo import PROV_EXACT, PROV_MC, PROV_PAPER, estimate

VARIABLES = (
    "lambda_common",
    "source_destination_distance",
    "distance_to_intersection",
    "rate_pair",
)

COLUMNS = (
    "variable",
    "value",
    "value2",
    "scheme",
    "scenario",
    "source",
    "destination",
    "probability",
    "std_err",
    "trials",
)


@dataclass(frozen=True, slots=True)
class SweepSpec:
    """One sweep: a variable, its grid, and which outputs to produce."""

    variable: str
    grid: tuple
    base: ScenarioConfig
    schemes: tuple[str, ...] = ("noma",)
    scenarios: tuple[str, ...] = ("mixed",)
    sources: tuple[str, ...] = (PROV_EXACT, PROV_MC)

    def __post_init__(self) -> None:
        if self.variable not in VARIABLES:
            raise ConfigError(f"variable: expected one of {VARIABLES}, got {self.variable!r}")
        if not self.grid:
            raise ConfigError("grid: must not be empty")
        for a, b in zip(self.grid, self.grid[1:]):
            if not (a < b):
                raise ConfigError("grid: values must be strictly increasing")
        for s in self.schemes:
            if s not in ("noma", "oma"):
                raise ConfigError(f"schemes: unknown scheme {s!r}")
        for s in self.scenarios:
            if s not in ("mixed", "los", "nlos"):
                raise ConfigError(f"scenarios: unknown scenario {s!r}")
        for s in self.sources:
            if s not in (PROV_PAPER, PROV_EXACT, PROV_MC):
                raise ConfigError(f"sources: unknown source {s!r}")


@dataclass(frozen=True, slots=True)
class ComparisonRecord:
    """Closed-form vs simulated outage for one event."""

    scheme: str
    event: str
    analytic_paper: float
    analytic_exact: float
    mc_p_hat: float
    mc_std_err: float
    z_score_exact: float
    gap_paper_exact: float


def _zscore(analytic: float, p_hat: float, std_err: float) -> float:
    diff = analytic - p_hat
    if std_err == 0.0:
        if diff == 0.0:
            return 0.0
        return math.copysign(math.inf, diff)
    return diff / std_err


def reposition(cfg: ScenarioConfig, variable: str, value) -> ScenarioConfig:
    """Apply one grid point of a sweep variable to a config.

    Distance sweeps own the geometry: the layout is rebuilt from the
    protocol, not nudged from whatever the base had.
    """
    if variable == "lambda_common":
        v = float(value)
        return replace(
            cfg,
            ppp=replace(
                cfg.ppp,
                lambda_x_los=v,
                lambda_x_nlos=v,
                lambda_y_los=v,
                lambda_y_nlos=v,
            ),
        )
    if variable == "source_destination_distance":
        # Source at the intersection, relay mid-way along the road,
        # destinations at the swept road distance with a 10 m lateral split.
        v = float(value)
        return replace(
            cfg,
            s=Position(0.0, 0.0),
            r=Position(v / 2.0, 0.0),
            d1=Position(v, 10.0),
            d2=Position(v, -10.0),
        )
    if variable == "distance_to_intersection":
        # Rigid translation along the X road; the swept value is the lead
        # node's distance to the intersection, inter-node geometry fixed.
        v = float(value)
        shift = v - min(cfg.s.x, cfg.r.x, cfg.d1.x, cfg.d2.x)
        move = lambda pos: Position(pos.x + shift, pos.y)
        return replace(cfg, s=move(cfg.s), r=move(cfg.r), d1=move(cfg.d1), d2=move(cfg.d2))
    if variable == "rate_pair":
        r1, r2 = (float(value[0]), float(value[1]))
        return replace(cfg, noma=replace(cfg.noma, rate1=r1, rate2=r2))
    raise ConfigError(f"unknown sweep variable {variable!r}")


def _analytic_pair(cfg: ScenarioConfig, scheme: str, kernel: str) -> tuple[float, float]:
    if scheme == "noma":
        return outage_o1(cfg, kernel), outage_o2(cfg, kernel)
    return outage_oma(cfg, "D1", kernel), outage_oma(cfg, "D2", kernel)


def run_sweep(
    spec: SweepSpec,
    trials: int | None = None,
    master_seed: int | None = None,
    workers: int = 1,
) -> list[dict]:
    """Evaluate a sweep; one row per grid point, scenario, scheme, source
    and destination, in deterministic order."""
    rows: list[dict] = []
    for value in spec.grid:
        if spec.variable == "rate_pair":
            v1, v2 = float(value[0]), float(value[1])
        else:
            v1, v2 = float(value), 0.0
        point = reposition(spec.base, spec.variable, value)
        for scenario in spec.scenarios:
            cfg = replace(point, link_class=scenario)
            for scheme in spec.schemes:
                results: dict[str, tuple] = {}
                if PROV_PAPER in spec.sources:
                    d1, d2 = _analytic_pair(cfg, scheme, "paper")
                    results[PROV_PAPER] = ((d1, 0.0, 0), (d2, 0.0, 0))
                if PROV_EXACT in spec.sources:
                    d1, d2 = _analytic_pair(cfg, scheme, "exact")
                    results[PROV_EXACT] = ((d1, 0.0, 0), (d2, 0.0, 0))
                if PROV_MC in spec.sources:
                    est1, est2 = estimate(
                        cfg, scheme, trials=trials, master_seed=master_seed, workers=workers
                    )
                    results[PROV_MC] = (
                        (est1.p_hat, est1.std_err, est1.trials),
                        (est2.p_hat, est2.std_err, est2.trials),
                    )
                for source in spec.sources:
                    for dest, (prob, se, n) in zip(("d1", "d2"), results[source]):
                        rows.append(
                            {
                                "variable": spec.variable,
                                "value": v1,
                                "value2": v2,
                                "scheme": scheme,
                                "scenario": scenario,
                                "source": source,
                                "destination": dest,
                                "probability": prob,
                                "std_err": se,
                                "trials": n,
                            }
                        )
    return rows


def compare(
    cfg: ScenarioConfig,
    trials: int | None = None,
    master_seed: int | None = None,
    workers: int = 1,
) -> list[ComparisonRecord]:
    """Closed forms (both kernels) against the simulator, per event."""
    schemes = ("noma", "oma") if cfg.scheme == "both" else (cfg.scheme,)
    records: list[ComparisonRecord] = []
    for scheme in schemes:
        paper = _analytic_pair(cfg, scheme, "paper")
        exact = _analytic_pair(cfg, scheme, "exact")
        ests = estimate(cfg, scheme, trials=trials, master_seed=master_seed, workers=workers)
        for idx, event in enumerate(("d1", "d2")):
            est = ests[idx]
            records.append(
                ComparisonRecord(
                    scheme=scheme,
                    event=event,
                    analytic_paper=paper[idx],
                    analytic_exact=exact[idx],
                    mc_p_hat=est.p_hat,
                    mc_std_err=est.std_err,
                    z_score_exact=_zscore(exact[idx], est.p_hat, est.std_err),
                    gap_paper_exact=paper[idx] - exact[idx],
                )
            )
    return records


def figure_sweep_spec(figure: int, base: ScenarioConfig, sources=None) -> SweepSpec:
    """Built-in sweep protocols, selected by number.

    2: outage vs source-destination road distance, relay mid-way,
       both schemes.
    3: outage vs common interferer density for the mixed and forced-class
       scenarios.
    4: outage vs density at the high rate pair (1.2, 4.0), both schemes;
       the power split is moved to 0.9/0.1 so the strong flow stays inside
       its feasible-rate region at these rates.
    5: outage vs distance of the node chain to the intersection, both
       schemes, all scenarios.
    """
    sources = tuple(sources) if sources else (PROV_PAPER, PROV_EXACT, PROV_MC)
    if figure == 2:
        return SweepSpec(
            variable="source_destination_distance",
            grid=tuple(float(v) for v in np.linspace(25.0, 300.0, 12)),
            base=base,
            schemes=("noma", "oma"),
            scenarios=("mixed",),
            sources=sources,
        )
    if figure == 3:
        return SweepSpec(
            variable="lambda_common",
            grid=tuple(float(v) for v in np.logspace(-4.0, -2.0, 10)),
            base=base,
            schemes=("noma",),
            scenarios=("mixed", "los", "nlos"),
            sources=sources,
        )
    if figure == 4:
        noma = replace(base.noma, a1=0.9, a2=0.1, rate1=1.2, rate2=4.0)
        return SweepSpec(
            variable="lambda_common",
            grid=tuple(float(v) for v in np.logspace(-5.0, math.log10(5.0e-4), 10)),
            base=replace(base, noma=noma),
            schemes=("noma", "oma"),
            scenarios=("mixed",),
            sources=sources,
        )
    if figure == 5:
        return SweepSpec(
            variable="distance_to_intersection",
            grid=tuple(float(v) for v in np.linspace(0.0, 1000.0, 11)),
            base=base,
            schemes=("noma", "oma"),
            scenarios=("mixed", "los", "nlos"),
            sources=sources,
        )
    raise ConfigError(f"--figure must be 2, 3, 4 or 5, got {figure}")


def parse_sweep_spec(text: str, base: ScenarioConfig) -> SweepSpec:
    """Parse an explicit sweep description (flat key = value format).

    grid entries are comma separated; rate pairs use '/', e.g.
    ``grid = 0.5/1.0, 1.2/4.0``.
    """
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        fields[key.lower()] = raw

    variable = fields.pop("variable", None)
    if variable is None:
        raise ConfigError("variable: required in a sweep spec")
    raw_grid = fields.pop("grid", None)
    if raw_grid is None:
        raise ConfigError("grid: required in a sweep spec")
    entries = [piece.strip() for piece in raw_grid.split(",") if piece.strip()]
    if variable == "rate_pair":
        grid = tuple(
            tuple(float(part) for part in entry.split("/")) for entry in entries
        )
    else:
        grid = tuple(float(entry) for entry in entries)

    def split_list(key: str, default: tuple[str, ...]) -> tuple[str, ...]:
        raw = fields.pop(key, None)
        if raw is None:
            return default
        return tuple(piece.strip().lower() for piece in raw.split(",") if piece.strip())

    schemes = split_list("schemes", ("noma",))
    scenarios = split_list("scenarios", ("mixed",))
    sources = split_list("sources", (PROV_EXACT, PROV_MC))
    if fields:
        raise ConfigError(f"unknown sweep spec keys: {sorted(fields)}")
    return SweepSpec(
        variable=variable,
        grid=grid,
        base=base,
        schemes=schemes,
        scenarios=scenarios,
        sources=sources,
    )


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(
    rows: list[dict],
    path: str | Path,
    cfg: ScenarioConfig,
    columns: tuple[str, ...],
    extras: list[tuple[str, object]] | None = None,
) -> None:
    """Write rows as CSV with a reproducibility header.

    The comment block carries the fully resolved configuration and any
    run-level settings, so the file alone is enough to recreate itself.
    """
    lines = [f"# crossnoma {_version}"]
    for key, value in resolved_items(cfg):
        lines.append(f"# {key} = {value}")
    for key, value in extras or []:
        lines.append(f"# {key} = {value}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_value(row[col]) for col in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_table(
    rows: list[dict],
    path: str | Path,
    cfg: ScenarioConfig,
    extras: list[tuple[str, object]] | None = None,
) -> None:
    """Write sweep rows in the standard column layout."""
    write_csv(rows, path, cfg, COLUMNS, extras)


def read_table(path: str | Path) -> tuple[dict[str, str], list[dict]]:
    """Read back a CSV written by write_table: (header entries, typed rows)."""
    header: dict[str, str] = {}
    rows: list[dict] = []
    columns: list[str] | None = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = (part.strip() for part in body.split("=", 1))
                header[key] = value
            continue
        parts = line.split(",")
        if columns is None:
            columns = parts
            continue
        row: dict = dict(zip(columns, parts))
        for col in (
            "value",
            "value2",
            "probability",
            "std_err",
            "analytic_paper",
            "analytic_exact",
            "mc_p_hat",
            "mc_std_err",
            "z_score_exact",
            "gap_paper_exact",
        ):
            if col in row:
                row[col] = float(row[col])
        if "trials" in row:
            row["trials"] = int(row["trials"])
        rows.append(row)
    return header, rows
