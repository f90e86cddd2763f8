"""Reproducible exponential bootstrap weights on splittable random streams.

Every bootstrap draw owns one stream, keyed by ``(master_seed, stream_id)``
through a counter-based Philox generator, so draws can run in any order on
any number of workers and still reproduce bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .validation import check_option, check_positive_int

# Salts separate independent uses of the same (seed, stream) pair.
WEIGHT_SALT = 0
INIT_SALT = 1
FOLD_SALT = 2
SIM_SALT = 3

PRIOR_MODES = ("weighted", "fixed")

# Smallest/largest doubles strictly inside (0, 1); keeps log(1/u) finite.
_U_LO = np.nextafter(0.0, 1.0)
_U_HI = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class RngConfig:
    """Address of one random stream: master seed plus stream index."""

    master_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.master_seed < 0 or self.master_seed > 2**64 - 1:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be non-negative")

    def with_stream(self, stream_id: int) -> "RngConfig":
        return replace(self, stream_id=int(stream_id))

    def generator(self, salt: int = WEIGHT_SALT) -> np.random.Generator:
        """Counter-based generator keyed on (master_seed, stream_id, salt)."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, salt))
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class WeightDraw:
    """One realization of the observation weights and the prior weight."""

    obs_weights: np.ndarray
    prior_weight: float
    draw_id: int = 0

    def __post_init__(self):
        w = np.asarray(self.obs_weights, dtype=np.float64)
        object.__setattr__(self, "obs_weights", w)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("obs_weights must be a non-empty 1-d array")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("obs_weights must be finite and strictly positive")
        if not np.isfinite(self.prior_weight) or self.prior_weight <= 0:
            raise ValueError("prior_weight must be finite and strictly positive")
        if self.draw_id < 0:
            raise ValueError("draw_id must be non-negative")

    @property
    def n_obs(self) -> int:
        return self.obs_weights.size

    def scaled(self, c: float) -> "WeightDraw":
        """All weights multiplied by c > 0 (argmin-invariant rescaling)."""
        return WeightDraw(self.obs_weights * c, self.prior_weight * c, self.draw_id)


def ones_weight_draw(n: int, draw_id: int = 0) -> WeightDraw:
    """Degenerate draw with every weight equal to 1 (unweighted problem)."""
    return WeightDraw(np.ones(n), 1.0, draw_id)


def exp_from_uniform(u):
    """Map a uniform variate in (0, 1) to a standard exponential via log(1/u).

    Accepts a scalar or array; raises ValueError outside the open interval.
    """
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    out = -np.log(arr)
    return float(out) if np.isscalar(u) or arr.ndim == 0 else out


def sample_weights(n: int, rng: RngConfig, prior_mode: str = "weighted") -> WeightDraw:
    """Draw n i.i.d. Exp(1) observation weights plus the prior weight.

    The prior weight is Exp(1) in ``weighted`` mode and exactly 1.0 in
    ``fixed`` mode. Identical (master_seed, stream_id) reproduce the draw
    bit-exactly; the observation weights do not depend on the prior mode.
    """
    check_positive_int(n, "n")
    check_option(prior_mode, PRIOR_MODES, "prior_mode")
    gen = rng.generator(WEIGHT_SALT)
    u = np.clip(gen.random(n), _U_LO, _U_HI)
    obs = exp_from_uniform(u)
    if prior_mode == "weighted":
        prior = exp_from_uniform(float(np.clip(gen.random(), _U_LO, _U_HI)))
    else:
        prior = 1.0
    return WeightDraw(obs, prior, draw_id=rng.stream_id)
