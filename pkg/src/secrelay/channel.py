"""System configuration and seeded channel generation.

The network has two single-antenna source nodes exchanging messages through an
N-antenna amplify-and-forward relay, with a two-antenna eavesdropper listening
to both hops. Channels are reciprocal and quasi-static: one draw covers the
multiple-access hop and the broadcast hop.

Symbols:

* ``f1``, ``f2``: length-N source-to-relay channel vectors,
* ``fe``: length-N relay-to-eavesdropper channel vector,
* ``g1``, ``g2``: scalar source-to-eavesdropper gains.

Every coefficient is circularly symmetric complex Gaussian, CN(0, sigma^2),
drawn as two independent real normals with variance sigma^2/2 each. Powers and
noise levels are plain watts; the dB scale used throughout the CLI and plots
is dBW.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "DegenerateChannelError",
    "sample_channel",
    "power_split_from_total",
    "dbw_to_watts",
    "watts_to_dbw",
    "config_to_dict",
    "config_from_dict",
    "channel_to_dict",
    "channel_from_dict",
]


class DegenerateChannelError(ValueError):
    """A drawn realization has a zero source-to-relay channel.

    With ``f1 = 0`` or ``f2 = 0`` one source cannot reach the relay and no
    beamformer produces a positive rate, so the draw is rejected instead of
    silently yielding zeros.
    """


@dataclass(frozen=True)
class SystemConfig:
    """Static parameters of one network instance."""

    n_antennas: int  # relay antenna count N >= 2; N = 1 leaves no nulling freedom
    p1: float  # source 1 transmit power [W]
    p2: float  # source 2 transmit power [W]
    p_relay: float  # relay transmit power budget [W]
    sigma2_node1: float = 1.0  # receiver noise at source 1 [W]
    sigma2_node2: float = 1.0  # receiver noise at source 2 [W]
    sigma2_relay: float = 1.0  # relay receiver noise [W]
    sigma2_eve1: float = 1.0  # eavesdropper antenna-1 noise (hop 1) [W]
    sigma2_eve2: float = 1.0  # eavesdropper antenna-2 noise (hop 2) [W]
    var_f1: float = 1.0  # variance of each f1 entry
    var_f2: float = 1.0  # variance of each f2 entry
    var_fe: float = 1.0  # variance of each fe entry
    var_g1: float = 1.0  # variance of g1
    var_g2: float = 1.0  # variance of g2

    def __post_init__(self) -> None:
        if int(self.n_antennas) != self.n_antennas or self.n_antennas < 2:
            raise ValueError(f"n_antennas must be an integer >= 2, got {self.n_antennas}")
        for name in ("p1", "p2", "p_relay"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        for name in (
            "sigma2_node1",
            "sigma2_node2",
            "sigma2_relay",
            "sigma2_eve1",
            "sigma2_eve2",
        ):
            value = getattr(self, name)
            # sigma2_eve1 > 0 keeps the leakage ratios well defined; the rest
            # guard the rate denominators.
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        for name in ("var_f1", "var_f2", "var_fe", "var_g1", "var_g2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    def with_powers(self, p1: float, p2: float, p_relay: float) -> "SystemConfig":
        return replace(self, p1=p1, p2=p2, p_relay=p_relay)


@dataclass(frozen=True)
class ChannelRealization:
    """One quasi-static draw of all channel coefficients."""

    f1: np.ndarray  # (N,) complex
    f2: np.ndarray  # (N,) complex
    fe: np.ndarray  # (N,) complex
    g1: complex
    g2: complex

    @property
    def n_antennas(self) -> int:
        return self.f1.shape[0]


def dbw_to_watts(x: float) -> float:
    """Convert a power in dBW to watts."""
    return 10.0 ** (x / 10.0)


def watts_to_dbw(x: float) -> float:
    """Convert a power in watts to dBW. Requires ``x > 0``."""
    if x <= 0:
        raise ValueError(f"watts_to_dbw requires a positive power, got {x}")
    return 10.0 * math.log10(x)


def power_split_from_total(pt_dbw: float) -> tuple[float, float, float]:
    """Split a total power budget: each source gets a quarter, the relay half.

    Returns ``(p1, p2, p_relay)`` in watts for a total of ``pt_dbw`` dBW.
    """
    total = dbw_to_watts(pt_dbw)
    return total / 4.0, total / 4.0, total / 2.0


def _cn_vector(rng: np.random.Generator, n: int, variance: float) -> np.ndarray:
    # Draws are always consumed, even at zero variance, so that realizations
    # produced from the same seed stay paired across variance settings.
    scale = math.sqrt(variance / 2.0)
    re = rng.standard_normal(n)
    im = rng.standard_normal(n)
    return scale * (re + 1j * im)


def _draw(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    n = cfg.n_antennas
    f1 = _cn_vector(rng, n, cfg.var_f1)
    f2 = _cn_vector(rng, n, cfg.var_f2)
    fe = _cn_vector(rng, n, cfg.var_fe)
    g1 = complex(_cn_vector(rng, 1, cfg.var_g1)[0])
    g2 = complex(_cn_vector(rng, 1, cfg.var_g2)[0])
    return ChannelRealization(f1=f1, f2=f2, fe=fe, g1=g1, g2=g2)


def sample_channel(cfg: SystemConfig, seed: int) -> ChannelRealization:
    """Draw one channel realization, deterministically for a given seed.

    A draw with ``norm(f1) = 0`` or ``norm(f2) = 0`` is redrawn once from the
    continuing stream; a second failure raises ``DegenerateChannelError``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(2):
        ch = _draw(cfg, rng)
        if np.linalg.norm(ch.f1) > 0 and np.linalg.norm(ch.f2) > 0:
            return ch
    raise DegenerateChannelError(
        "source-to-relay channel vanished twice in a row; "
        "check var_f1/var_f2 in the configuration"
    )


# ---------------------------------------------------------------------------
# JSON-friendly serialization. Complex numbers are encoded as [re, im].


def _encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _encode_cvector(v: np.ndarray) -> list[list[float]]:
    return [_encode_complex(z) for z in v]


def _decode_complex(pair) -> complex:
    re, im = pair
    return complex(re, im)


def _decode_cvector(pairs) -> np.ndarray:
    return np.array([_decode_complex(p) for p in pairs], dtype=np.complex128)


def config_to_dict(cfg: SystemConfig) -> dict:
    out = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    out["n_antennas"] = int(out["n_antennas"])
    return out


def config_from_dict(data: dict) -> SystemConfig:
    known = {f.name for f in fields(SystemConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown SystemConfig fields: {sorted(unknown)}")
    return SystemConfig(**data)


def channel_to_dict(ch: ChannelRealization) -> dict:
    return {
        "f1": _encode_cvector(ch.f1),
        "f2": _encode_cvector(ch.f2),
        "fe": _encode_cvector(ch.fe),
        "g1": _encode_complex(ch.g1),
        "g2": _encode_complex(ch.g2),
    }


def channel_from_dict(data: dict) -> ChannelRealization:
    return ChannelRealization(
        f1=_decode_cvector(data["f1"]),
        f2=_decode_cvector(data["f2"]),
        fe=_decode_cvector(data["fe"]),
        g1=_decode_complex(data["g1"]),
        g2=_decode_complex(data["g2"]),
    )
