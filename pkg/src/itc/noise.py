"""I.i.d. qubit and measurement noise with counter-based random streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from itc.syndrome import REDUNDANT, Sector, SyndromeMaps

_SECTOR_ID = {Sector.Z: 0, Sector.X: 1}


@dataclass(frozen=True)
class NoiseModel:
    p: float
    q: float
    seed: int = 0
    include_boundary_measurement_noise: bool = True

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def stream(seed: int, trial: int, round_: int, sector: Sector | str = Sector.Z) -> np.random.Generator:
    """Independent generator for one (seed, trial, round, sector) cell.

    Philox is counter based, so any trial can be drawn without touching the
    others; this keeps results independent of scheduling.
    """
    counter = [0, int(round_), int(trial), _SECTOR_ID[Sector(sector)]]
    return np.random.Generator(np.random.Philox(key=int(seed), counter=counter))


def sample(
    model: NoiseModel, maps: SyndromeMaps, trial: int, round_: int
) -> tuple[np.ndarray, np.ndarray]:
    """(eps, mu) for one round."""
    rng = stream(model.seed, trial, round_, maps.sector)
    d = maps.dims
    eps = (rng.random(d["C_Q"]) < model.p).astype(np.uint8)
    mu = (rng.random(d["C_M"]) < model.q).astype(np.uint8)
    if not model.include_boundary_measurement_noise:
        mu[maps.family_mask(*REDUNDANT)] = 0
    return eps, mu
