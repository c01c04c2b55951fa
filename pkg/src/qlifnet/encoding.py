"""Rate coding of intensities into binary spike trains, and decoding of
output trains into class scores.

Spike sampling is an independent Bernoulli draw per timestep with success
probability equal to the intensity (the discrete-time realization of a
Poisson rate code).  Randomness comes from a counter-based generator keyed
by (seed, stream) with one disjoint counter block per sample, so encoding a
sample is reproducible no matter how batches are composed, ordered, or
parallelized.  Stream 0 is reserved for evaluation; training epoch ``e``
uses stream ``e + 1`` so spike trains are re-sampled each epoch
deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EncoderConfig", "EVAL_STREAM", "rate_encode", "count_decode", "predict"]

EVAL_STREAM = 0


@dataclass(frozen=True)
class EncoderConfig:
    """Spike-train length and RNG seed."""

    timesteps: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.timesteps < 1:
            raise ValueError(f"timesteps must be >= 1, got {self.timesteps}")


def _sample_generator(seed: int, stream: int, sample_index: int) -> np.random.Generator:
    # Philox: 2x64-bit key = (seed, stream); each sample owns a 2^64-block
    # counter range, far beyond what one spike train consumes.
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    counter = np.array([0, int(sample_index), 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def rate_encode(values, cfg: EncoderConfig, sample_indices=None, stream: int = EVAL_STREAM):
    """Encode intensities in [0, 1] as a binary spike tensor.

    ``values`` has shape (batch, ...feature dims...); the result has shape
    (timesteps, batch, ...feature dims...) with float64 entries in {0, 1}.
    ``sample_indices`` are the dataset-global indices keying each sample's
    private random stream (defaults to 0..batch-1).
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim < 2:
        raise ValueError("values must have a leading batch dimension")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValueError("intensities must lie in [0, 1]")
    batch = values.shape[0]
    if sample_indices is None:
        sample_indices = np.arange(batch)
    sample_indices = np.asarray(sample_indices)
    if sample_indices.shape != (batch,):
        raise ValueError("sample_indices must match the batch dimension")

    out = np.empty((cfg.timesteps, batch) + values.shape[1:], dtype=np.float64)
    for b in range(batch):
        rng = _sample_generator(cfg.seed, stream, int(sample_indices[b]))
        u = rng.random((cfg.timesteps,) + values.shape[1:])
        out[:, b] = (u < values[b]).astype(np.float64)
    return out


def count_decode(spikes) -> np.ndarray:
    """Sum output spikes over time: (T, batch, classes) -> (batch, classes)."""
    spikes = np.asarray(spikes, dtype=np.float64)
    if spikes.ndim != 3:
        raise ValueError(f"expected (timesteps, batch, classes), got shape {spikes.shape}")
    return spikes.sum(axis=0)


def predict(scores) -> np.ndarray:
    """Argmax class per sample; ties break toward the smallest index."""
    return np.argmax(np.asarray(scores), axis=-1)
