"""Sampling of the four road/class interferer processes with their marks.

Positions are generated outward from the intersection through exponential
gaps rather than a count-then-scatter draw. The gap construction has a
useful prefix property: enlarging the simulation window only appends points,
it never changes the ones already inside. ALOHA and fading marks are derived
by counter-style hashing of each point's coordinate bits, so a point keeps
its marks no matter the window or which receivers were requested. Together
these make window-sensitivity checks measure the truncation effect itself
instead of resampling noise.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .geometry import ROAD_X, ROAD_Y

# (road, is_los) in storage order: the X road first, LOS before NLOS.
COMPONENTS = ((ROAD_X, True), (ROAD_X, False), (ROAD_Y, True), (ROAD_Y, False))

RECEIVERS = ("R", "D1", "D2")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_GOLDEN_U64 = np.uint64(_GOLDEN)
# Purpose tags for mark hashing: ALOHA plus one tag per receiver.
_PURPOSE_ALOHA = 0x101
_PURPOSE_FADING = {"R": 0x202, "D1": 0x303, "D2": 0x404}


@dataclass(frozen=True, slots=True)
class PppConfig:
    """Intensities of the four 1D processes plus medium access and window."""

    lambda_x_los: float
    lambda_x_nlos: float
    lambda_y_los: float
    lambda_y_nlos: float
    p: float
    window: float

    def __post_init__(self) -> None:
        for name in ("lambda_x_los", "lambda_x_nlos", "lambda_y_los", "lambda_y_nlos"):
            if not (getattr(self, name) >= 0.0):
                raise ValueError(f"{name} must be >= 0")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")
        if not (self.window > 0.0):
            raise ValueError("window must be positive")

    @property
    def intensities(self) -> tuple[float, float, float, float]:
        return (
            self.lambda_x_los,
            self.lambda_x_nlos,
            self.lambda_y_los,
            self.lambda_y_nlos,
        )


@dataclass(frozen=True, slots=True)
class ComponentPoints:
    """One (road, class) process: coordinates with ALOHA and fading marks."""

    road: str
    los: bool
    t: np.ndarray
    active: np.ndarray
    fading: dict[str, np.ndarray]


@dataclass(frozen=True, slots=True)
class InterferenceRealization:
    """Flat marked point set of all four processes for one slot.

    Points are stored in COMPONENTS block order; `offsets` delimits the
    blocks, so every (road, class) group is a contiguous slice.
    """

    t: np.ndarray
    active: np.ndarray
    fading: dict[str, np.ndarray]
    offsets: tuple[int, int, int, int, int] = field(repr=False)

    def component(self, road: str, los: bool) -> ComponentPoints:
        idx = COMPONENTS.index((road, los))
        sl = slice(self.offsets[idx], self.offsets[idx + 1])
        return ComponentPoints(
            road,
            los,
            self.t[sl],
            self.active[sl],
            {k: v[sl] for k, v in self.fading.items()},
        )

    @property
    def size(self) -> int:
        return self.t.shape[0]

    @property
    def road_is_x(self) -> np.ndarray:
        flags = np.zeros(self.size, dtype=bool)
        flags[: self.offsets[2]] = True
        return flags

    @property
    def los(self) -> np.ndarray:
        flags = np.zeros(self.size, dtype=bool)
        flags[self.offsets[0] : self.offsets[1]] = True
        flags[self.offsets[2] : self.offsets[3]] = True
        return flags


def _mix64_int(x: int) -> int:
    """splitmix64 finalizer on a plain integer."""
    x &= _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    return x ^ (x >> 31)


def _mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64."""
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _hash_unit(bits: np.ndarray, salt: int) -> np.ndarray:
    """Deterministic uniform draws in (0, 1) keyed by coordinate bits."""
    h = _mix64((bits ^ np.uint64(salt)) * _GOLDEN_U64)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


# Per-process tags folded into the point bits so identical coordinates in
# different processes keep independent marks.
_PROC_TAGS = tuple(np.uint64(_mix64_int(i + 1)) for i in range(4))


class _ReusablePhilox:
    """One Philox/Generator pair re-keyed in place.

    Constructing a fresh bit generator costs tens of microseconds; swapping
    the key in an existing one is twenty times cheaper and yields the exact
    stream a fresh construction would.
    """

    __slots__ = ("_bg", "gen", "_state")

    def __init__(self) -> None:
        self._bg = np.random.Philox(key=np.zeros(2, dtype=np.uint64))
        self.gen = np.random.Generator(self._bg)
        self._state = self._bg.state

    def rekey(self, k0: int, k1: int) -> np.random.Generator:
        st = self._state
        inner = st["state"]
        inner["key"][0] = k0
        inner["key"][1] = k1
        inner["counter"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self.gen


_local = threading.local()


def _realization_pool() -> _ReusablePhilox:
    pool = getattr(_local, "pool", None)
    if pool is None:
        pool = _ReusablePhilox()
        _local.pool = pool
    return pool


def _gap_columns(
    rng: np.random.Generator, lam_per_stream: np.ndarray, window: float
) -> tuple[np.ndarray, np.ndarray]:
    """Positions of k independent PPPs on [0, window], one per stream.

    Draws a flat block of standard exponentials, deals it round-robin to the
    streams and scales each stream by its own rate. Drawing more rows only
    extends each stream's gap sequence, which is what gives the prefix
    property across window sizes. Returns the scaled (rows, k) position
    matrix and the per-stream point counts; column j's points are
    scaled[:counts[j], j].
    """
    k = lam_per_stream.shape[0]
    targets = lam_per_stream * window  # needed cumulated standard-exp mass
    top = float(targets.max(initial=0.0))
    rows = int(top + 4.0 * math.sqrt(top) + 16.0)
    block = rng.standard_exponential(rows * k).reshape(rows, k)
    csum = np.cumsum(block, axis=0)
    while bool((csum[-1] < targets).any()):
        extra = rng.standard_exponential(64 * k).reshape(64, k)
        block = np.concatenate([block, extra], axis=0)
        csum = np.concatenate([csum, csum[-1] + np.cumsum(extra, axis=0)], axis=0)
    counts = (csum <= targets).sum(axis=0)
    counts[lam_per_stream <= 0.0] = 0
    inv = np.divide(
        1.0, lam_per_stream, out=np.zeros(k, dtype=np.float64), where=lam_per_stream > 0.0
    )
    return csum * inv, counts


def _gap_positions(
    rng: np.random.Generator, lam_per_stream: np.ndarray, window: float
) -> list[np.ndarray]:
    scaled, counts = _gap_columns(rng, lam_per_stream, window)
    return [scaled[: counts[j], j] for j in range(lam_per_stream.shape[0])]


def sample_ppp_segment(lam: float, window: float, rng: np.random.Generator) -> np.ndarray:
    """One draw of a homogeneous PPP on [-window, window]."""
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    if not (window > 0.0):
        raise ValueError("window must be positive")
    if lam == 0.0:
        return np.empty(0, dtype=np.float64)
    plus, minus = _gap_positions(rng, np.array([lam, lam]), window)
    return np.concatenate([plus, -minus])


def aloha_thin(points: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(p) activity marks for a point sequence."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    return rng.random(len(points)) < p


def draw_realization(
    cfg: PppConfig,
    rng: np.random.Generator,
    receivers: tuple[str, ...] = RECEIVERS,
) -> InterferenceRealization:
    """Draw the four marked processes for one slot.

    Fading marks are produced for each requested receiver; marks at
    different receivers are independent. The parent rng only supplies the
    realization key, everything else is derived from it.
    """
    for name in receivers:
        if name not in RECEIVERS:
            raise ValueError(f"unknown receiver {name!r}")
    k0, k1 = (int(v) for v in np.frombuffer(rng.bytes(16), dtype=np.uint64))
    gen = _realization_pool().rekey(k0, k1)

    # Interleave the 8 (process, side) gap streams through one generator.
    lam8 = np.repeat(np.asarray(cfg.intensities, dtype=np.float64), 2)
    scaled, side_counts = _gap_columns(gen, lam8, cfg.window)
    counts = [int(side_counts[2 * i] + side_counts[2 * i + 1]) for i in range(4)]
    offsets = (
        0,
        counts[0],
        counts[0] + counts[1],
        counts[0] + counts[1] + counts[2],
        counts[0] + counts[1] + counts[2] + counts[3],
    )

    t = np.empty(offsets[4], dtype=np.float64)
    for i in range(4):
        n_plus = int(side_counts[2 * i])
        n_minus = int(side_counts[2 * i + 1])
        lo = offsets[i]
        t[lo : lo + n_plus] = scaled[:n_plus, 2 * i]
        np.negative(scaled[:n_minus, 2 * i + 1], out=t[lo + n_plus : lo + n_plus + n_minus])
    bits = t.view(np.uint64) ^ np.repeat(_PROC_TAGS, counts)

    salt_base = _mix64_int(k0 ^ _mix64_int(k1))
    if cfg.p == 1.0:
        active = np.ones(t.shape[0], dtype=bool)
    else:
        active = _hash_unit(bits, _mix64_int(salt_base ^ _PURPOSE_ALOHA)) < cfg.p
    fading = {
        name: -np.log(_hash_unit(bits, _mix64_int(salt_base ^ _PURPOSE_FADING[name])))
        for name in receivers
    }
    return InterferenceRealization(t, active, fading, offsets)
