"""Quantum leaky integrate-and-fire spiking networks.

A closed-form single-qubit spiking neuron, trainable dense and
convolutional networks built from it, surrogate-gradient training through
time, and an exact density-matrix oracle that verifies the neuron kernel.
"""

__version__ = "0.1.0"

from .encoding import EncoderConfig, count_decode, predict, rate_encode
from .neuron import (
    DecayMode,
    LifConfig,
    LifState,
    QlifConfig,
    QlifInput,
    QlifState,
    decay_angle,
    lif_step,
    memory_angle,
    qlif_step,
    qlif_step_backward,
    run_lif_trace,
    run_qlif_trace,
)
from .network import (
    ConvQlifLayer,
    DenseLifLayer,
    DenseQlifLayer,
    SpikingModel,
    WeightPlanes,
    build_model,
    load_checkpoint,
    save_checkpoint,
)
from .surrogate import surrogate_grad
from .training import Adam, bptt, cross_entropy_batch, cross_entropy_loss

__all__ = [
    "__version__",
    "DecayMode",
    "QlifConfig",
    "QlifState",
    "QlifInput",
    "LifConfig",
    "LifState",
    "memory_angle",
    "decay_angle",
    "qlif_step",
    "qlif_step_backward",
    "lif_step",
    "run_qlif_trace",
    "run_lif_trace",
    "EncoderConfig",
    "rate_encode",
    "count_decode",
    "predict",
    "WeightPlanes",
    "DenseQlifLayer",
    "ConvQlifLayer",
    "DenseLifLayer",
    "SpikingModel",
    "build_model",
    "save_checkpoint",
    "load_checkpoint",
    "surrogate_grad",
    "cross_entropy_loss",
    "cross_entropy_batch",
    "bptt",
    "Adam",
]
