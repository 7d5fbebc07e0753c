"""Parameter records for the three random network families."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Union

TORUS = "torus"
SQUARE = "square"
METRICS = (TORUS, SQUARE)

TORUS_MAX_RANGE = 1.0 / math.sqrt(math.pi)


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _check_lattice(n: int, k: int) -> None:
    if k % 2:
        raise ValueError(f"k must be even, got {k}")
    if not 2 <= k <= n - 2:
        raise ValueError(f"k must satisfy 2 <= k <= n-2, got k={k}, n={n}")


@dataclass(frozen=True)
class SWS:
    """Ring lattice plus independent shortcuts."""

    n: int
    k: int
    p: float

    kind = "sws"

    def __post_init__(self):
        _check_lattice(self.n, self.k)
        _check_probability("p", self.p)

    def as_dict(self) -> dict:
        return {"model": self.kind, **asdict(self)}


@dataclass(frozen=True)
class SWR:
    """Ring lattice with independent edge removal and chord addition."""

    n: int
    k: int
    p: float

    kind = "swr"

    def __post_init__(self):
        _check_lattice(self.n, self.k)
        _check_probability("p", self.p)
        if self.chord_probability > 1.0:
            raise ValueError(f"chord probability pk/(n-k-1) = {self.chord_probability:.6g} exceeds 1")

    @property
    def chord_probability(self) -> float:
        return self.p * self.k / (self.n - self.k - 1)

    def as_dict(self) -> dict:
        return {"model": self.kind, **asdict(self)}


@dataclass(frozen=True)
class DRN:
    """Dual radio network on the unit torus or the unit square."""

    n: int
    p: float
    rS: float
    rL: float
    metric: str = TORUS

    kind = "drn"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        _check_probability("p", self.p)
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if not 0.0 < self.rS <= self.rL:
            raise ValueError(f"ranges must satisfy 0 < rS <= rL, got rS={self.rS}, rL={self.rL}")
        if self.metric == TORUS and self.rL > TORUS_MAX_RANGE:
            raise ValueError(
                f"torus metric requires rL <= 1/sqrt(pi) = {TORUS_MAX_RANGE:.6f}, got rL={self.rL}"
            )

    def as_dict(self) -> dict:
        return {"model": self.kind, **asdict(self)}


ModelParams = Union[SWS, SWR, DRN]
LATTICE_MODELS = (SWS, SWR)


def model_from_dict(data: dict) -> ModelParams:
    """Inverse of ``as_dict``; values may be strings (config files)."""
    kind = str(data["model"]).lower()
    if kind in ("sws", "swr"):
        cls = SWS if kind == "sws" else SWR
        return cls(int(data["n"]), int(data["k"]), float(data["p"]))
    if kind == "drn":
        return DRN(
            int(data["n"]),
            float(data["p"]),
            float(data["rS"]),
            float(data["rL"]),
            str(data.get("metric", TORUS)).lower(),
        )
    raise ValueError(f"unknown model {kind!r}")
