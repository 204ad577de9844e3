"""Independent simulation of the outage events, trial by trial.

Each trial gets its own counter-derived random stream (Philox keyed by the
master seed and the trial index), so estimates are bit-identical for a given
seed and trial count no matter how trials are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .analytic import psi_values, threshold
from .channel import PathLossParams, upsilon
from .config import ScenarioConfig, effective_ppp, link_weights
from .errors import NumericalError
from .geometry import NodePolar, to_polar
from .pointprocess import (
    InterferenceRealization,
    PppConfig,
    _ReusablePhilox,
    draw_realization,
)

PROV_MC = "monte-carlo"
PROV_EXACT = "analytic-exact"
PROV_PAPER = "analytic-paper"


class InterfererCollision(Exception):
    """An interferer landed exactly on a receiver; the draw is retried."""


@dataclass(frozen=True, slots=True)
class TrialOutcome:
    """Per-trial outage indicators plus the drawn link classes."""

    o1: bool
    o2: bool
    o_r1: bool
    o_d1: bool
    o_r2: bool
    o_d2: bool
    z_sr_los: bool
    z_rd1_los: bool
    z_rd2_los: bool


@dataclass(frozen=True, slots=True)
class OutageEstimate:
    p_hat: float
    trials: int
    std_err: float
    seed: int
    provenance: str


class Phase1Sirs(NamedTuple):
    r1: float
    r2: float


class Phase2Sirs(NamedTuple):
    d1: float
    d2_1: float
    d2: float


def _attenuation(d: np.ndarray, alpha: float) -> np.ndarray:
    """d**(-alpha) with cheap paths for the common integer exponents."""
    if alpha == 2.0:
        return 1.0 / (d * d)
    if alpha == 4.0:
        q = d * d
        return 1.0 / (q * q)
    return d ** (-alpha)


def aggregate_interference(
    receiver: str,
    polar: NodePolar,
    realization: InterferenceRealization,
    path: PathLossParams,
    ups: float,
) -> tuple[float, float]:
    """Aggregate interference power (X road, Y road) at one receiver."""
    if realization.size == 0:
        return 0.0, 0.0
    mx = polar.m * math.cos(polar.theta)
    my = polar.m * math.sin(polar.theta)
    t = realization.t
    off = realization.offsets
    x_end = off[2]
    d_x = np.abs(t[:x_end] - mx) if my == 0.0 else np.hypot(my, t[:x_end] - mx)
    d_y = np.abs(t[x_end:] - my) if mx == 0.0 else np.hypot(mx, t[x_end:] - my)
    if (d_x.size and d_x.min() == 0.0) or (d_y.size and d_y.min() == 0.0):
        raise InterfererCollision(receiver)
    active = realization.active
    w = realization.fading[receiver]
    if not active.all():
        w = w * active
    total_x = (
        float(np.dot(w[off[0] : off[1]], _attenuation(d_x[off[0] : off[1]], path.alpha_los)))
        + float(np.dot(w[off[1] : off[2]], _attenuation(d_x[off[1] : off[2]], path.alpha_nlos)))
    ) * ups
    total_y = (
        float(
            np.dot(
                w[off[2] : off[3]],
                _attenuation(d_y[off[2] - x_end : off[3] - x_end], path.alpha_los),
            )
        )
        + float(
            np.dot(
                w[off[3] : off[4]],
                _attenuation(d_y[off[3] - x_end : off[4] - x_end], path.alpha_nlos),
            )
        )
    ) * ups
    return total_x, total_y


def compute_phase1_sirs(signal_sr: float, a1: float, a2: float, interference: float) -> Phase1Sirs:
    """Broadcast-phase SIRs at the relay (strong flow, then weak after SIC)."""
    if interference == 0.0:
        return Phase1Sirs(a1 / a2, math.inf)
    return Phase1Sirs(
        signal_sr * a1 / (signal_sr * a2 + interference),
        signal_sr * a2 / interference,
    )


def compute_phase2_sirs(
    signal_rd1: float,
    signal_rd2: float,
    a1: float,
    a2: float,
    i_d1: float,
    i_d2: float,
) -> Phase2Sirs:
    """Relay-phase SIRs at the two destinations."""
    d1 = a1 / a2 if i_d1 == 0.0 else signal_rd1 * a1 / (signal_rd1 * a2 + i_d1)
    if i_d2 == 0.0:
        return Phase2Sirs(d1, a1 / a2, math.inf)
    return Phase2Sirs(
        d1,
        signal_rd2 * a1 / (signal_rd2 * a2 + i_d2),
        signal_rd2 * a2 / i_d2,
    )


def evaluate_outage_events(
    phase1: Phase1Sirs,
    phase2: Phase2Sirs,
    theta1: float,
    theta2: float,
    z_sr_los: bool = True,
    z_rd1_los: bool = True,
    z_rd2_los: bool = True,
) -> TrialOutcome:
    """Outage indicators from the drawn SIRs.

    The weak-flow events keep the SIC coupling: failing the strong message
    anywhere fails the weak flow there too.
    """
    o_r1 = phase1.r1 < theta1
    o_d1 = phase2.d1 < theta1
    o_r2 = o_r1 or (phase1.r2 < theta2)
    o_d2 = (phase2.d2_1 < theta1) or (phase2.d2 < theta2)
    return TrialOutcome(
        o1=o_r1 or o_d1,
        o2=o_r2 or o_d2,
        o_r1=o_r1,
        o_d1=o_d1,
        o_r2=o_r2,
        o_d2=o_d2,
        z_sr_los=z_sr_los,
        z_rd1_los=z_rd1_los,
        z_rd2_los=z_rd2_los,
    )


@dataclass(frozen=True, slots=True)
class _Runtime:
    """Scenario quantities fixed across trials."""

    ppp: PppConfig
    path: PathLossParams
    ups: float
    a1: float
    a2: float
    theta1: float
    theta2: float
    theta_oma_d1: float
    theta_oma_d2: float
    mu: float
    m_los: int
    m_nlos: int
    polars: dict[str, NodePolar]
    r_sr: float
    r_rd1: float
    r_rd2: float
    p_los_sr: float
    p_los_rd1: float
    p_los_rd2: float


def _runtime(cfg: ScenarioConfig) -> _Runtime:
    th = psi_values(cfg.noma)
    return _Runtime(
        ppp=effective_ppp(cfg),
        path=cfg.path,
        ups=upsilon(cfg.beam),
        a1=cfg.noma.a1,
        a2=cfg.noma.a2,
        theta1=th.theta1,
        theta2=th.theta2,
        theta_oma_d1=threshold(cfg.noma.rate1, "oma"),
        theta_oma_d2=threshold(cfg.noma.rate2, "oma"),
        mu=cfg.fading.mu,
        m_los=cfg.fading.m_los,
        m_nlos=cfg.fading.m_nlos,
        polars={"R": to_polar(cfg.r), "D1": to_polar(cfg.d1), "D2": to_polar(cfg.d2)},
        r_sr=cfg.r_sr,
        r_rd1=cfg.r_rd1,
        r_rd2=cfg.r_rd2,
        p_los_sr=link_weights(cfg, cfg.r_sr)[0],
        p_los_rd1=link_weights(cfg, cfg.r_rd1)[0],
        p_los_rd2=link_weights(cfg, cfg.r_rd2)[0],
    )


def _link_signal(rt: _Runtime, rng: np.random.Generator, los: bool, r_link: float) -> float:
    m = rt.m_los if los else rt.m_nlos
    alpha = rt.path.alpha_for(los)
    h = rng.gamma(shape=float(m), scale=rt.mu / m)
    return h * r_link ** (-alpha) * rt.ups


def _link_signals(
    rt: _Runtime, rng: np.random.Generator, classes: tuple[bool, bool, bool]
) -> tuple[float, float, float]:
    """Fading-weighted received powers of the three links in one batch draw."""
    z_sr, z_rd1, z_rd2 = classes
    shapes = np.array(
        [
            rt.m_los if z_sr else rt.m_nlos,
            rt.m_los if z_rd1 else rt.m_nlos,
            rt.m_los if z_rd2 else rt.m_nlos,
        ],
        dtype=np.float64,
    )
    h = rng.gamma(shape=shapes, scale=rt.mu / shapes)
    sig_sr = h[0] * rt.r_sr ** (-rt.path.alpha_for(z_sr)) * rt.ups
    sig_rd1 = h[1] * rt.r_rd1 ** (-rt.path.alpha_for(z_rd1)) * rt.ups
    sig_rd2 = h[2] * rt.r_rd2 ** (-rt.path.alpha_for(z_rd2)) * rt.ups
    return sig_sr, sig_rd1, sig_rd2


def _phase_interference(
    rt: _Runtime, rng: np.random.Generator, receivers: tuple[str, ...]
) -> dict[str, float]:
    for _ in range(8):
        real = draw_realization(rt.ppp, rng, receivers)
        try:
            return {
                name: sum(aggregate_interference(name, rt.polars[name], real, rt.path, rt.ups))
                for name in receivers
            }
        except InterfererCollision:
            continue  # measure-zero event: redraw the slot
    raise NumericalError("repeated interferer collisions; geometry looks degenerate")


def _draw_classes(rt: _Runtime, rng: np.random.Generator) -> tuple[bool, bool, bool]:
    u = rng.random(3)
    return (
        bool(u[0] < rt.p_los_sr),
        bool(u[1] < rt.p_los_rd1),
        bool(u[2] < rt.p_los_rd2),
    )


def simulate_noma_trial(rt: _Runtime, rng: np.random.Generator) -> TrialOutcome:
    z_sr, z_rd1, z_rd2 = _draw_classes(rt, rng)
    sig_sr, sig_rd1, sig_rd2 = _link_signals(rt, rng, (z_sr, z_rd1, z_rd2))
    i1 = _phase_interference(rt, rng, ("R",))
    i2 = _phase_interference(rt, rng, ("D1", "D2"))
    phase1 = compute_phase1_sirs(sig_sr, rt.a1, rt.a2, i1["R"])
    phase2 = compute_phase2_sirs(sig_rd1, sig_rd2, rt.a1, rt.a2, i2["D1"], i2["D2"])
    return evaluate_outage_events(
        phase1, phase2, rt.theta1, rt.theta2, z_sr, z_rd1, z_rd2
    )


def simulate_oma_trial(rt: _Runtime, rng: np.random.Generator) -> tuple[bool, bool]:
    """Orthogonal baseline: each destination gets its own two dedicated slots."""
    z_sr, z_rd1, z_rd2 = _draw_classes(rt, rng)
    out = []
    for dest, z_rd, r_rd, theta in (
        ("D1", z_rd1, rt.r_rd1, rt.theta_oma_d1),
        ("D2", z_rd2, rt.r_rd2, rt.theta_oma_d2),
    ):
        sig_sr = _link_signal(rt, rng, z_sr, rt.r_sr)
        sig_rd = _link_signal(rt, rng, z_rd, r_rd)
        i_r = _phase_interference(rt, rng, ("R",))["R"]
        i_d = _phase_interference(rt, rng, (dest,))[dest]
        sir_sr = math.inf if i_r == 0.0 else sig_sr / i_r
        sir_rd = math.inf if i_d == 0.0 else sig_rd / i_d
        out.append(sir_sr < theta or sir_rd < theta)
    return out[0], out[1]


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream of one trial: Philox keyed (master_seed, trial)."""
    key = np.array([master_seed, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _count_chunk(args) -> np.ndarray:
    cfg, scheme, start, stop, master_seed = args
    rt = _runtime(cfg)
    pool = _ReusablePhilox()
    counts = np.zeros(2, dtype=np.int64)
    if scheme == "noma":
        for trial in range(start, stop):
            outcome = simulate_noma_trial(rt, pool.rekey(master_seed, trial))
            counts[0] += outcome.o1
            counts[1] += outcome.o2
    else:
        for trial in range(start, stop):
            first, second = simulate_oma_trial(rt, pool.rekey(master_seed, trial))
            counts[0] += first
            counts[1] += second
    return counts


def estimate(
    cfg: ScenarioConfig,
    scheme: str | None = None,
    trials: int | None = None,
    master_seed: int | None = None,
    workers: int = 1,
) -> tuple[OutageEstimate, OutageEstimate]:
    """Monte Carlo outage estimates for the two flows (or OMA destinations).

    Splitting the work over processes never changes the result: every trial
    owns its stream and the reduction is a plain count.
    """
    scheme = scheme or cfg.scheme
    if scheme not in ("noma", "oma"):
        raise ValueError(f"estimate needs scheme 'noma' or 'oma', got {scheme!r}")
    trials = cfg.trials if trials is None else int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    master_seed = cfg.master_seed if master_seed is None else int(master_seed)

    if workers <= 1:
        counts = _count_chunk((cfg, scheme, 0, trials, master_seed))
    else:
        n_chunks = min(trials, workers * 4)
        edges = np.linspace(0, trials, n_chunks + 1, dtype=int)
        jobs = [
            (cfg, scheme, int(a), int(b), master_seed)
            for a, b in zip(edges[:-1], edges[1:])
            if b > a
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = sum(pool.map(_count_chunk, jobs))

    def wrap(count: int) -> OutageEstimate:
        p_hat = count / trials
        std_err = math.sqrt(p_hat * (1.0 - p_hat) / trials)
        return OutageEstimate(p_hat, trials, std_err, master_seed, PROV_MC)

    return wrap(int(counts[0])), wrap(int(counts[1]))
