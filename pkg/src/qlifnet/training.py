"""Backpropagation through time over recorded forward traces, with the
arctan surrogate standing in for the spike step, cross-entropy on output
spike counts, and Adam updates.

The loss gradient with respect to a plane entry is accumulated over every
timestep of the reverse sweep, mirroring the forward aggregation: the
rotation gradient is weighted by the presynaptic spikes, the delay gradient
by their complement over the fan-in.  The fire-and-reset discontinuity is
excluded from the differentiated path: gradients flow through the pre-reset
population, and neurons that fired contribute nothing through the stored
(reset) state.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .encoding import EncoderConfig, count_decode, predict, rate_encode
from .neuron import qlif_step_backward  # noqa: F401  (re-export: step partials)
from .network import SpikingModel
from .surrogate import surrogate_grad  # noqa: F401  (re-export)

__all__ = [
    "surrogate_grad",
    "qlif_step_backward",
    "cross_entropy_loss",
    "cross_entropy_batch",
    "bptt",
    "Adam",
    "TrainSettings",
    "train_epoch",
    "evaluate",
    "MICROBATCH",
]

# Work is always split into fixed-size micro-batches summed in index order,
# so results are identical for every worker-pool size.
MICROBATCH = 32


def cross_entropy_loss(scores, label: int):
    """Softmax cross-entropy of one score vector against a class index.

    Returns ``(loss, d_scores)`` with ``d_scores = softmax(scores) - onehot``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    shifted = scores - np.max(scores)
    log_z = np.log(np.sum(np.exp(shifted)))
    loss = float(log_z - shifted[label])
    d_scores = np.exp(shifted - log_z)
    d_scores[label] -= 1.0
    return loss, d_scores


def cross_entropy_batch(scores, labels):
    """Mean softmax cross-entropy over a batch: (batch, classes) scores.

    Returns ``(mean_loss, d_scores)`` where ``d_scores`` already carries the
    1/batch factor.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    batch = scores.shape[0]
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    loss = -float(log_probs[np.arange(batch), labels].mean())
    d_scores = np.exp(log_probs)
    d_scores[np.arange(batch), labels] -= 1.0
    return loss, d_scores / batch


def bptt(model: SpikingModel, trace, d_scores):
    """Reverse sweep through layers and time.

    ``d_scores`` is the loss gradient on per-class spike counts; by
    linearity of the count every timestep of the last layer receives it
    unchanged.  Returns one gradient object per layer (None for stateless
    layers), ordered like ``model.layers``.
    """
    T = trace.timesteps
    g_out = np.broadcast_to(d_scores, (T,) + d_scores.shape)
    grads = [None] * len(model.layers)
    for i in reversed(range(len(model.layers))):
        g_out, grads[i] = model.layers[i].backward(trace.layer_recs[i], g_out)
    return grads


def grad_arrays(model: SpikingModel, grads):
    """Flatten per-layer gradient objects to arrays aligned with
    ``model.param_arrays()``."""
    out = []
    for layer, g in zip(model.layers, grads):
        out.extend(layer.grad_arrays(g) if g is not None else [])
    return out


class Adam:
    """Standard bias-corrected Adam over a flat list of parameter arrays.

    Updates are applied in place.  Non-finite gradients abort the step.
    """

    def __init__(self, params, lr=5e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in self.params]
        self.v = [np.zeros_like(p) for p in self.params]

    def step(self, grads):
        if len(grads) != len(self.params):
            raise ValueError(f"expected {len(self.params)} gradients, got {len(grads)}")
        for i, g in enumerate(grads):
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(
                    f"non-finite gradient in parameter {i} at step {self.t + 1}; "
                    "update aborted"
                )
        self.t += 1
        for p, m, v, g in zip(self.params, self.m, self.v, grads):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1**self.t)
            v_hat = v / (1.0 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class TrainSettings:
    """Knobs of one training run."""

    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    epochs: int = 1
    batch_size: int = 128
    lr: float = 5e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    seed: int = 0
    threads: int = 1


def _forward_backward(model, values, labels, indices, encoder, stream):
    spikes = rate_encode(values, encoder, sample_indices=indices, stream=stream)
    counts, trace = model.forward(spikes, record=True)
    loss, d_scores = cross_entropy_batch(counts, labels)
    grads = grad_arrays(model, bptt(model, trace, d_scores))
    n_correct = int(np.sum(predict(counts) == labels))
    return loss, grads, n_correct, len(labels)


def _microbatches(n, size=MICROBATCH):
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def process_batch(model, values, labels, indices, encoder, stream, pool=None):
    """Forward/backward over one mini-batch in fixed micro-batch order.

    Micro-batches may be evaluated concurrently; losses and gradients are
    reduced in index order so the result does not depend on the pool size.
    Returns ``(mean_loss, grads, n_correct)``.
    """
    spans = _microbatches(len(labels))
    jobs = [
        (values[lo:hi], labels[lo:hi], indices[lo:hi]) for lo, hi in spans
    ]
    if pool is None:
        results = [
            _forward_backward(model, v, l, i, encoder, stream) for v, l, i in jobs
        ]
    else:
        futures = [
            pool.submit(_forward_backward, model, v, l, i, encoder, stream)
            for v, l, i in jobs
        ]
        results = [f.result() for f in futures]

    total = len(labels)
    grads = None
    loss_sum = 0.0
    n_correct = 0
    for part_loss, part_grads, part_correct, part_n in results:
        weight = part_n / total
        if grads is None:
            grads = [g * weight for g in part_grads]
        else:
            for acc, g in zip(grads, part_grads):
                acc += g * weight
        loss_sum += part_loss * part_n
        n_correct += part_correct
    return loss_sum / total, grads, n_correct


def train_epoch(
    model: SpikingModel,
    values: np.ndarray,
    labels: np.ndarray,
    optimizer: Adam,
    settings: TrainSettings,
    epoch: int,
    pool: ThreadPoolExecutor | None = None,
    on_batch=None,
):
    """One pass over the training set; returns per-batch metric rows.

    Samples are shuffled by a generator keyed on (seed, epoch); spike trains
    are re-sampled each epoch through the encoder's epoch stream.  Metric
    rows are ``(epoch, batch, loss, train_acc)`` with ``train_acc`` the
    running accuracy at the then-current weights.
    """
    n = len(labels)
    order = np.random.default_rng([settings.seed, epoch, 0xD1CE]).permutation(n)
    stream = epoch + 1  # stream 0 is reserved for evaluation
    rows = []
    seen = 0
    correct = 0
    for b, lo in enumerate(range(0, n, settings.batch_size)):
        idx = order[lo : lo + settings.batch_size]
        loss, grads, n_correct = process_batch(
            model, values[idx], labels[idx], idx, settings.encoder, stream, pool
        )
        optimizer.step(grads)
        seen += len(idx)
        correct += n_correct
        row = {
            "epoch": epoch,
            "batch": b,
            "loss": loss,
            "train_acc": correct / seen,
        }
        rows.append(row)
        if on_batch is not None:
            on_batch(row)
    return rows


def evaluate(
    model: SpikingModel,
    values: np.ndarray,
    labels: np.ndarray,
    encoder: EncoderConfig,
    pool: ThreadPoolExecutor | None = None,
):
    """Accuracy and confusion matrix on a labelled set (evaluation stream)."""
    n = len(labels)
    n_classes = model.n_classes
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)

    def eval_span(lo, hi):
        spikes = rate_encode(
            values[lo:hi],
            encoder,
            sample_indices=np.arange(lo, hi),
            stream=0,
        )
        counts, _ = model.forward(spikes, record=False)
        return predict(counts)

    spans = _microbatches(n)
    if pool is None:
        preds = [eval_span(lo, hi) for lo, hi in spans]
    else:
        preds = [f.result() for f in [pool.submit(eval_span, lo, hi) for lo, hi in spans]]
    pred = np.concatenate(preds) if preds else np.zeros(0, dtype=int)
    for y_true, y_pred in zip(labels, pred):
        confusion[int(y_true), int(y_pred)] += 1
    accuracy = float(np.mean(pred == labels)) if n else 0.0
    return accuracy, confusion


def timed(fn, *args, **kwargs):
    """Run ``fn`` and return (result, elapsed_seconds)."""
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start
