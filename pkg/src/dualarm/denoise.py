"""Deterministic denoising recurrence over action vectors.

One step maps an action sample ``a`` and a noise prediction ``eps`` to
``alpha * (a - gamma * eps + noise)`` with ``noise ~ N(0, sigma^2 I)``,
iterated from a seeded Gaussian draw down to step 0. The noise-prediction
function is injected (networks are out of scope here), so the whole
recurrence is a pure, replayable computation.

Randomness contract: a PCG64 generator seeded with the given integer.
Uniform draws are 53-bit centered-lattice doubles,
``(integers(0, 2**53) + 0.5) / 2**53``, mapped through the exact inverse
normal CDF (``scipy.special.ndtri``). The stream is: ``dim`` draws for
the initial sample, then ``dim`` draws per step for the additive noise,
skipped entirely while ``sigma == 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtri

_LATTICE = float(2**53)

# (observation, action, step_index) -> predicted noise, same length as action.
NoisePredictor = Callable[[np.ndarray, np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class DenoiseParams:
    alpha: float
    gamma: float
    sigma: float
    steps: int
    rng_seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class ActionSample:
    """A flattened action vector at denoising step ``step`` (0 = final)."""

    values: np.ndarray
    step: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("non-finite action value")
        if self.step < 0:
            raise ValueError("step must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _standard_normals(gen: np.random.Generator, n: int) -> np.ndarray:
    u = (gen.integers(0, 2**53, size=n).astype(float) + 0.5) / _LATTICE
    return ndtri(u)


def denoise_step(
    sample: ActionSample,
    noise_prediction: np.ndarray,
    params: DenoiseParams,
    noise: np.ndarray,
) -> ActionSample:
    """One update: ``alpha * (values - gamma * prediction + noise)``."""
    if sample.step < 1:
        raise ValueError("cannot denoise below step 0")
    eps = np.asarray(noise_prediction, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if eps.shape != sample.values.shape:
        raise ValueError(
            f"noise prediction shape {eps.shape} does not match action {sample.values.shape}"
        )
    if noise.shape != sample.values.shape:
        raise ValueError(
            f"noise shape {noise.shape} does not match action {sample.values.shape}"
        )
    values = params.alpha * (sample.values - params.gamma * eps + noise)
    return ActionSample(values, sample.step - 1)


def run_denoising(
    observation: np.ndarray,
    predictor: NoisePredictor,
    params: DenoiseParams,
    dim: int,
    schedule: Callable[[int], tuple[float, float, float]] | None = None,
) -> ActionSample:
    """Run the full recurrence from a seeded Gaussian draw to step 0.

    ``schedule`` optionally overrides ``(alpha, gamma, sigma)`` per step
    index; by default the constants from ``params`` apply at every step.
    Bit-deterministic for fixed inputs and seed.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    observation = np.asarray(observation, dtype=float)
    gen = np.random.Generator(np.random.PCG64(params.rng_seed))
    sample = ActionSample(_standard_normals(gen, dim), params.steps)
    for step in range(params.steps, 0, -1):
        if schedule is not None:
            alpha, gamma, sigma = schedule(step)
            step_params = DenoiseParams(alpha, gamma, sigma, params.steps, params.rng_seed)
        else:
            step_params = params
        eps = np.asarray(predictor(observation, sample.values, step), dtype=float)
        if eps.shape != (dim,):
            raise ValueError(
                f"predictor returned shape {eps.shape}, expected ({dim},)"
            )
        if step_params.sigma > 0.0:
            noise = step_params.sigma * _standard_normals(gen, dim)
        else:
            noise = np.zeros(dim)
        sample = denoise_step(sample, eps, step_params, noise)
    return sample
