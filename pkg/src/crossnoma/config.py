"""Scenario configuration: defaults, flat-file loading and validation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .analytic import NomaParams
from .channel import BeamParams, BlockageParams, FadingParams, PathLossParams, los_probability
from .errors import ConfigError
from .geometry import Position, distance
from .pointprocess import PppConfig

log = logging.getLogger("crossnoma")

SCHEMES = ("noma", "oma", "both")
KERNELS = ("paper", "exact", "both")
LINK_CLASSES = ("mixed", "los", "nlos")

# Flat-file schema: key -> parser tag. Positions take "x, y" pairs.
_POSITION_KEYS = ("s", "r", "d1", "d2")
_FLOAT_KEYS = (
    "a1",
    "a2",
    "rate1",
    "rate2",
    "alpha_los",
    "alpha_nlos",
    "mu",
    "beta",
    "g_max",
    "g_min",
    "phi",
    "carrier_freq",
    "lambda_x_los",
    "lambda_x_nlos",
    "lambda_y_los",
    "lambda_y_nlos",
    "p",
    "window",
)
_INT_KEYS = ("m_los", "m_nlos", "trials", "master_seed")
_CHOICE_KEYS = {"scheme": SCHEMES, "kernel": KERNELS, "link_class": LINK_CLASSES}

DEFAULTS: dict[str, object] = {
    "s": (0.0, 0.0),
    "r": (50.0, 0.0),
    "d1": (100.0, 10.0),
    "d2": (100.0, -10.0),
    "a1": 0.8,
    "a2": 0.2,
    "rate1": 0.5,
    "rate2": 1.0,
    "alpha_los": 2.0,
    "alpha_nlos": 4.0,
    "m_los": 2,
    "m_nlos": 1,
    "mu": 1.0,
    # Blockage rate in 1/m; flagged at load time when defaulted.
    "beta": 9.5e-3,
    "g_max": 10.0**1.8,  # 18 dBi
    "g_min": 1.0,
    "phi": math.pi / 6.0,
    # 30 GHz carrier; flagged at load time when defaulted.
    "carrier_freq": 30.0e9,
    "lambda_x_los": 1.0e-3,
    "lambda_x_nlos": 1.0e-3,
    "lambda_y_los": 1.0e-3,
    "lambda_y_nlos": 1.0e-3,
    "p": 1.0,
    "window": 5.0e4,
    "scheme": "noma",
    "trials": 100_000,
    "master_seed": 42,
    "kernel": "exact",
    "link_class": "mixed",
}


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Full parameter record for one scenario."""

    s: Position
    r: Position
    d1: Position
    d2: Position
    noma: NomaParams
    path: PathLossParams
    fading: FadingParams
    blockage: BlockageParams
    beam: BeamParams
    ppp: PppConfig
    scheme: str
    trials: int
    master_seed: int
    kernel: str
    link_class: str

    @property
    def r_sr(self) -> float:
        return distance(self.s, self.r)

    @property
    def r_rd1(self) -> float:
        return distance(self.r, self.d1)

    @property
    def r_rd2(self) -> float:
        return distance(self.r, self.d2)


def effective_ppp(cfg: ScenarioConfig) -> PppConfig:
    """Interferer processes after the scenario switch.

    The forced-class scenarios zero the opposite class intensities so each
    curve is exactly one model rather than a blockage limit.
    """
    ppp = cfg.ppp
    if cfg.link_class == "los":
        return replace(ppp, lambda_x_nlos=0.0, lambda_y_nlos=0.0)
    if cfg.link_class == "nlos":
        return replace(ppp, lambda_x_los=0.0, lambda_y_los=0.0)
    return ppp


def link_weights(cfg: ScenarioConfig, r_link: float) -> tuple[float, float]:
    """(P(LOS), P(NLOS)) of a link, honoring the scenario switch."""
    if cfg.link_class == "los":
        return 1.0, 0.0
    if cfg.link_class == "nlos":
        return 0.0, 1.0
    w = los_probability(r_link, cfg.blockage)
    return w, 1.0 - w


def _parse_position(key: str, raw: str) -> tuple[float, float]:
    parts = [piece.strip() for piece in raw.replace(";", ",").split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected 'x, y', got {raw!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _parse_int(key: str, raw: str) -> int:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    if key.startswith("m_") and value != int(value):
        raise ConfigError(f"{key}: integer Nakagami parameter required, got {raw}")
    if value != int(value):
        raise ConfigError(f"{key}: integer required, got {raw}")
    return int(value)


def parse_config_text(text: str) -> dict[str, object]:
    """Parse the flat key = value format into typed raw values."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in values:
            raise ConfigError(f"{key}: duplicate assignment on line {lineno}")
        if key in _POSITION_KEYS:
            values[key] = _parse_position(key, raw)
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
        elif key in _INT_KEYS:
            values[key] = _parse_int(key, raw)
        elif key in _CHOICE_KEYS:
            choice = raw.lower()
            if choice not in _CHOICE_KEYS[key]:
                raise ConfigError(
                    f"{key}: expected one of {_CHOICE_KEYS[key]}, got {raw!r}"
                )
            values[key] = choice
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return values


def build_config(overrides: dict[str, object] | None = None) -> ScenarioConfig:
    """Assemble and validate a ScenarioConfig from raw key/value overrides."""
    overrides = dict(overrides or {})
    given = set(overrides)

    # Power-split closure: filling in the missing coefficient is fine,
    # a contradictory explicit pair is not.
    if "a1" in given and "a2" not in given:
        overrides["a2"] = 1.0 - float(overrides["a1"])  # type: ignore[arg-type]
    elif "a2" in given and "a1" not in given:
        overrides["a1"] = 1.0 - float(overrides["a2"])  # type: ignore[arg-type]

    vals = dict(DEFAULTS)
    vals.update(overrides)

    errors: list[str] = []
    if "a1" in given and "a2" in given:
        if abs(float(vals["a1"]) + float(vals["a2"]) - 1.0) > 1e-12:
            errors.append("a2: a1 + a2 must equal 1")

    def attempt(factory, *args):
        try:
            return factory(*args)
        except (ValueError, TypeError) as exc:
            errors.append(str(exc))
            return None

    positions = {key: attempt(Position, *vals[key]) for key in _POSITION_KEYS}
    noma = attempt(
        NomaParams, float(vals["a1"]), float(vals["a2"]), float(vals["rate1"]), float(vals["rate2"])
    )
    path = attempt(PathLossParams, float(vals["alpha_los"]), float(vals["alpha_nlos"]))
    fading = attempt(FadingParams, int(vals["m_los"]), int(vals["m_nlos"]), float(vals["mu"]))
    blockage = attempt(BlockageParams, float(vals["beta"]))
    beam = attempt(
        BeamParams,
        float(vals["g_max"]),
        float(vals["g_min"]),
        float(vals["phi"]),
        float(vals["carrier_freq"]),
    )
    ppp = attempt(
        PppConfig,
        float(vals["lambda_x_los"]),
        float(vals["lambda_x_nlos"]),
        float(vals["lambda_y_los"]),
        float(vals["lambda_y_nlos"]),
        float(vals["p"]),
        float(vals["window"]),
    )
    if int(vals["trials"]) < 1:
        errors.append("trials: must be >= 1")
    if int(vals["master_seed"]) < 0:
        errors.append("master_seed: must be a non-negative 64-bit integer")

    if errors:
        raise ConfigError("; ".join(errors))

    cfg = ScenarioConfig(
        s=positions["s"],
        r=positions["r"],
        d1=positions["d1"],
        d2=positions["d2"],
        noma=noma,
        path=path,
        fading=fading,
        blockage=blockage,
        beam=beam,
        ppp=ppp,
        scheme=str(vals["scheme"]),
        trials=int(vals["trials"]),
        master_seed=int(vals["master_seed"]),
        kernel=str(vals["kernel"]),
        link_class=str(vals["link_class"]),
    )

    for name, r_link in (("r", cfg.r_sr), ("d1", cfg.r_rd1), ("d2", cfg.r_rd2)):
        if r_link <= 0.0:
            raise ConfigError(f"{name}: link distance must be positive")

    if "beta" not in given:
        log.info("beta not set; using default %.4g 1/m", cfg.blockage.beta)
    if "carrier_freq" not in given:
        log.info("carrier_freq not set; using default %.4g Hz", cfg.beam.carrier_freq)
    return cfg


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Load a flat key = value scenario file; None or empty file gives defaults."""
    if path is None:
        return build_config({})
    text = Path(path).read_text(encoding="utf-8")
    return build_config(parse_config_text(text))


def resolved_items(cfg: ScenarioConfig) -> list[tuple[str, object]]:
    """Flatten a config back to the file schema, e.g. for output headers."""
    fmt = lambda v: f"{v:.17g}" if isinstance(v, float) else v
    items: list[tuple[str, object]] = []
    for key in _POSITION_KEYS:
        pos: Position = getattr(cfg, key)
        items.append((key, f"{fmt(pos.x)}, {fmt(pos.y)}"))
    items += [
        ("a1", fmt(cfg.noma.a1)),
        ("a2", fmt(cfg.noma.a2)),
        ("rate1", fmt(cfg.noma.rate1)),
        ("rate2", fmt(cfg.noma.rate2)),
        ("alpha_los", fmt(cfg.path.alpha_los)),
        ("alpha_nlos", fmt(cfg.path.alpha_nlos)),
        ("m_los", cfg.fading.m_los),
        ("m_nlos", cfg.fading.m_nlos),
        ("mu", fmt(cfg.fading.mu)),
        ("beta", fmt(cfg.blockage.beta)),
        ("g_max", fmt(cfg.beam.g_max)),
        ("g_min", fmt(cfg.beam.g_min)),
        ("phi", fmt(cfg.beam.phi)),
        ("carrier_freq", fmt(cfg.beam.carrier_freq)),
        ("lambda_x_los", fmt(cfg.ppp.lambda_x_los)),
        ("lambda_x_nlos", fmt(cfg.ppp.lambda_x_nlos)),
        ("lambda_y_los", fmt(cfg.ppp.lambda_y_los)),
        ("lambda_y_nlos", fmt(cfg.ppp.lambda_y_nlos)),
        ("p", fmt(cfg.ppp.p)),
        ("window", fmt(cfg.ppp.window)),
        ("scheme", cfg.scheme),
        ("trials", cfg.trials),
        ("master_seed", cfg.master_seed),
        ("kernel", cfg.kernel),
        ("link_class", cfg.link_class),
    ]
    return items
