"""Spiking layers and model composition.

Quantum layers carry two trainable planes per synapse: a rotation plane
(spike intensity, radians) and a delay plane (relaxation time, seconds).
At each timestep the incoming binary spikes are aggregated into one scalar
drive pair per neuron: the rotation drive is the spike-weighted sum over the
rotation plane, the delay drive is the complement-weighted mean over the
delay plane (clamped non-negative), and the whole layer takes the spike
branch iff any presynaptic spike arrived.

Layers implement a per-timestep ``step`` and a full-sequence ``backward``;
the forward pass records exactly what the reverse sweep needs.  In soft
mode the propagated spike values are replaced by the antiderivative of the
arctan surrogate while every discrete decision (branch choice, reset mask,
pooling routes, delay clamp) stays hard; the reverse sweep then computes the
exact gradient of that soft map, which is what finite-difference checks
verify.
"""

from __future__ import annotations

import json
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .neuron import DecayMode, LifConfig, QlifConfig, qlif_step, qlif_step_backward
from .surrogate import soft_spike, soft_spike_centered, surrogate_grad

__all__ = [
    "WeightPlanes",
    "GradPlanes",
    "dense_forward",
    "conv_forward",
    "maxpool_forward",
    "DenseQlifLayer",
    "ConvQlifLayer",
    "DenseLifLayer",
    "MaxPool2dLayer",
    "FlattenLayer",
    "ForwardTrace",
    "SpikingModel",
    "build_model",
    "save_checkpoint",
    "load_checkpoint",
    "CHECKPOINT_VERSION",
]

CHECKPOINT_VERSION = 1


@dataclass
class WeightPlanes:
    """Paired rotation/delay parameter arrays of one quantum layer."""

    theta: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.tau = np.asarray(self.tau, dtype=np.float64)
        if self.theta.shape != self.tau.shape:
            raise ValueError(
                f"plane shapes differ: {self.theta.shape} vs {self.tau.shape}"
            )
        if not (np.all(np.isfinite(self.theta)) and np.all(np.isfinite(self.tau))):
            raise ValueError("weight planes must be finite")


@dataclass
class GradPlanes:
    """Gradient buffers matching a layer's weight planes."""

    d_theta: np.ndarray
    d_tau: np.ndarray


def dense_forward(s_in, planes: WeightPlanes):
    """Aggregate binary spikes into per-neuron drives.

    Returns ``(theta_hat, tau_hat, x_eff)`` where
    ``theta_hat[j] = sum_i theta[i, j] * x[i]``,
    ``tau_hat[j] = max(0, sum_i tau[i, j] * (1 - x[i]) / fan_in)`` and
    ``x_eff = 1`` iff any input spiked.  ``s_in`` is (batch, fan_in).
    """
    s_in = np.asarray(s_in, dtype=np.float64)
    fan_in = planes.theta.shape[0]
    if s_in.ndim != 2 or s_in.shape[1] != fan_in:
        raise ValueError(f"expected (batch, {fan_in}) spikes, got {s_in.shape}")
    theta_hat = s_in @ planes.theta
    tau_hat = np.maximum((1.0 - s_in) @ planes.tau / fan_in, 0.0)
    x_eff = (s_in.sum(axis=1) > 0.0).astype(np.float64)[:, None]
    return theta_hat, tau_hat, x_eff


def _conv_drives(s_in, planes: WeightPlanes):
    s_in = np.asarray(s_in, dtype=np.float64)
    n_filters, channels, kh, kw = planes.theta.shape
    if s_in.ndim != 4 or s_in.shape[1] != channels:
        raise ValueError(f"expected (batch, {channels}, H, W) spikes, got {s_in.shape}")
    if s_in.shape[2] < kh or s_in.shape[3] < kw:
        raise ValueError("input smaller than kernel")
    patches, out_hw = _im2col(s_in, kh, kw)
    k = channels * kh * kw
    batch = s_in.shape[0]

    def to_maps(flat):
        return flat.transpose(0, 2, 1).reshape(batch, n_filters, *out_hw)

    theta_hat = to_maps(patches @ planes.theta.reshape(n_filters, k).T)
    tau_pre = to_maps((1.0 - patches) @ planes.tau.reshape(n_filters, k).T / k)
    x_eff = (patches.sum(axis=2) > 0.0).astype(np.float64).reshape(batch, 1, *out_hw)
    return theta_hat, tau_pre, x_eff


def conv_forward(s_in, planes: WeightPlanes):
    """Valid cross-correlation drives for a convolutional quantum layer.

    ``s_in`` is (batch, channels, H, W); kernels are
    (filters, channels, kH, kW).  The rotation drive correlates the spikes
    with the rotation kernel; the delay drive correlates the spike
    complement with the delay kernel, normalized by the receptive-field
    size and clamped non-negative.  ``x_eff`` marks output pixels whose
    receptive field saw at least one spike and is shared by all filters.
    """
    theta_hat, tau_pre, x_eff = _conv_drives(s_in, planes)
    return theta_hat, np.maximum(tau_pre, 0.0), x_eff


def maxpool_forward(s_in, window: int = 2):
    """Per-window max (OR for binary spikes); H and W must be divisible."""
    out, _ = _maxpool_with_routing(np.asarray(s_in, dtype=np.float64), window)
    return out


def _im2col(x, kh, kw):
    # (B, C, H, W) -> patches (B, oh*ow, C*kh*kw) and (oh, ow)
    windows = sliding_window_view(x, (kh, kw), axis=(2, 3))  # (B, C, oh, ow, kh, kw)
    b, c, oh, ow = windows.shape[:4]
    patches = windows.transpose(0, 2, 3, 1, 4, 5).reshape(b, oh * ow, c * kh * kw)
    return np.ascontiguousarray(patches), (oh, ow)

def _col2im(g_patches, in_shape, kh, kw):
    # Scatter-add patch gradients back onto the input grid.
    b, c, h, w = in_shape
    oh, ow = h - kh + 1, w - kw + 1
    g = np.zeros(in_shape)
    gp = g_patches.reshape(b, oh, ow, c, kh, kw)
    for u in range(kh):
        for v in range(kw):
            g[:, :, u : u + oh, v : v + ow] += gp[:, :, :, :, u, v].transpose(0, 3, 1, 2)
    return g


def _maxpool_with_routing(x, window):
    b, c, h, w = x.shape
    if h % window or w % window:
        raise ValueError(f"pooling window {window} does not divide {h}x{w}")
    oh, ow = h // window, w // window
    tiles = x.reshape(b, c, oh, window, ow, window).transpose(0, 1, 2, 4, 3, 5)
    tiles = tiles.reshape(b, c, oh, ow, window * window)
    # argmax takes the first maximum, which makes gradient routing
    # deterministic for tied binary inputs.
    routes = np.argmax(tiles, axis=-1)
    out = np.take_along_axis(tiles, routes[..., None], axis=-1)[..., 0]
    return out, routes


def _maxpool_backward(g_out, routes, in_shape, window):
    b, c, h, w = in_shape
    oh, ow = h // window, w // window
    g_tiles = np.zeros((b, c, oh, ow, window * window))
    np.put_along_axis(g_tiles, routes[..., None], g_out[..., None], axis=-1)
    g = g_tiles.reshape(b, c, oh, ow, window, window).transpose(0, 1, 2, 4, 3, 5)
    return g.reshape(b, c, h, w)


class DenseQlifLayer:
    """Fully connected layer of quantum spiking neurons."""

    kind = "dense-qlif"

    def __init__(self, planes: WeightPlanes, cfg: QlifConfig):
        self.planes = planes
        self.cfg = cfg
        self.fan_in, self.fan_out = planes.theta.shape

    def init_state(self, batch):
        return np.zeros((batch, self.fan_out))

    def step(self, s_in, alpha, soft=False):
        theta_hat = s_in @ self.planes.theta
        tau_pre = (1.0 - s_in) @ self.planes.tau / self.fan_in
        tau_hat = np.maximum(tau_pre, 0.0)
        x_eff = (s_in.sum(axis=1) > 0.0).astype(np.float64)[:, None]
        alpha_new, spike, alpha_pre = qlif_step(alpha, x_eff, theta_hat, tau_hat, self.cfg)
        s_out = soft_spike(alpha_pre) if soft else spike
        rec = {
            "s_in": s_in,
            "theta_hat": theta_hat,
            "tau_pre": tau_pre,
            "alpha_in": alpha,
            "alpha_pre": alpha_pre,
            "spike": spike,
            "x_eff": x_eff,
        }
        return s_out, alpha_new, rec

    def backward(self, recs, g_out):
        """Reverse sweep over time; returns (g_s_in, GradPlanes)."""
        T = len(recs)
        d_theta = np.zeros_like(self.planes.theta)
        d_tau = np.zeros_like(self.planes.tau)
        g_s_in = [None] * T
        g_alpha = np.zeros_like(recs[0]["alpha_in"])
        for t in reversed(range(T)):
            rec = recs[t]
            # Spike output path via the surrogate; state path skips reset
            # neurons (their stored population is the constant 0).
            g_pre = g_out[t] * surrogate_grad(rec["alpha_pre"]) + g_alpha * (1.0 - rec["spike"])
            da, dth, dtau = qlif_step_backward(
                rec["alpha_in"], rec["x_eff"], rec["theta_hat"], rec["tau_pre"], self.cfg
            )
            g_theta_hat = g_pre * dth
            g_tau_hat = g_pre * dtau
            g_alpha = g_pre * da
            d_theta += rec["s_in"].T @ g_theta_hat
            d_tau += (1.0 - rec["s_in"]).T @ g_tau_hat / self.fan_in
            g_s_in[t] = g_theta_hat @ self.planes.theta.T - (
                g_tau_hat @ self.planes.tau.T
            ) / self.fan_in
        return np.stack(g_s_in), GradPlanes(d_theta, d_tau)

    def param_arrays(self):
        return [self.planes.theta, self.planes.tau]

    def grad_arrays(self, grads: GradPlanes):
        return [grads.d_theta, grads.d_tau]


class ConvQlifLayer:
    """2D convolutional layer of quantum spiking neurons (stride 1, valid)."""

    kind = "conv-qlif"

    def __init__(self, planes: WeightPlanes, cfg: QlifConfig, in_hw):
        self.planes = planes
        self.cfg = cfg
        self.n_filters, self.channels, self.kh, self.kw = planes.theta.shape
        self.in_hw = tuple(in_hw)
        self.out_hw = (self.in_hw[0] - self.kh + 1, self.in_hw[1] - self.kw + 1)
        self.k = self.channels * self.kh * self.kw

    def init_state(self, batch):
        return np.zeros((batch, self.n_filters) + self.out_hw)

    def step(self, s_in, alpha, soft=False):
        theta_hat, tau_pre, x_eff = _conv_drives(s_in, self.planes)
        tau_hat = np.maximum(tau_pre, 0.0)
        alpha_new, spike, alpha_pre = qlif_step(alpha, x_eff, theta_hat, tau_hat, self.cfg)
        s_out = soft_spike(alpha_pre) if soft else spike
        rec = {
            "s_in": s_in,
            "theta_hat": theta_hat,
            "tau_pre": tau_pre,
            "alpha_in": alpha,
            "alpha_pre": alpha_pre,
            "spike": spike,
            "x_eff": x_eff,
        }
        return s_out, alpha_new, rec

    def backward(self, recs, g_out):
        T = len(recs)
        w_theta = self.planes.theta.reshape(self.n_filters, self.k)
        w_tau = self.planes.tau.reshape(self.n_filters, self.k)
        d_theta = np.zeros_like(w_theta)
        d_tau = np.zeros_like(w_tau)
        g_s_in = [None] * T
        g_alpha = np.zeros_like(recs[0]["alpha_in"])
        batch = recs[0]["s_in"].shape[0]
        n_pix = self.out_hw[0] * self.out_hw[1]
        for t in reversed(range(T)):
            rec = recs[t]
            g_pre = g_out[t] * surrogate_grad(rec["alpha_pre"]) + g_alpha * (1.0 - rec["spike"])
            da, dth, dtau = qlif_step_backward(
                rec["alpha_in"], rec["x_eff"], rec["theta_hat"], rec["tau_pre"], self.cfg
            )
            g_theta_hat = g_pre * dth
            g_tau_hat = g_pre * dtau
            g_alpha = g_pre * da
            patches, _ = _im2col(rec["s_in"], self.kh, self.kw)
            gth = g_theta_hat.reshape(batch, self.n_filters, n_pix).transpose(0, 2, 1)
            gta = g_tau_hat.reshape(batch, self.n_filters, n_pix).transpose(0, 2, 1)
            d_theta += np.einsum("bpf,bpk->fk", gth, patches)
            d_tau += np.einsum("bpf,bpk->fk", gta, 1.0 - patches) / self.k
            g_patches = gth @ w_theta - (gta @ w_tau) / self.k
            g_s_in[t] = _col2im(g_patches, rec["s_in"].shape, self.kh, self.kw)
        return np.stack(g_s_in), GradPlanes(
            d_theta.reshape(self.planes.theta.shape),
            d_tau.reshape(self.planes.tau.shape),
        )

    def param_arrays(self):
        return [self.planes.theta, self.planes.tau]

    def grad_arrays(self, grads: GradPlanes):
        return [grads.d_theta, grads.d_tau]


class DenseLifLayer:
    """Fully connected layer of classical LIF neurons (single weight plane).

    Present as the classical reference network; the drive is the plain
    weighted spike sum, the reset is by threshold subtraction, and the
    surrogate is centered at the firing threshold.
    """

    kind = "dense-lif"

    def __init__(self, w: np.ndarray, cfg: LifConfig):
        self.w = np.asarray(w, dtype=np.float64)
        self.cfg = cfg
        self.fan_in, self.fan_out = self.w.shape

    def init_state(self, batch):
        return np.zeros((batch, self.fan_out)), np.zeros((batch, self.fan_out))

    def step(self, s_in, state, soft=False):
        u, s_prev = state
        drive = s_in @ self.w
        u_new = self.cfg.beta * u + drive - s_prev * self.cfg.u_thr
        spike = (u_new > self.cfg.u_thr).astype(np.float64)
        s_out = soft_spike_centered(u_new - self.cfg.u_thr) if soft else spike
        rec = {"s_in": s_in, "u_new": u_new}
        # The reset consumes the propagated spike value so soft runs stay
        # exactly differentiable.
        return s_out, (u_new, s_out), rec

    def backward(self, recs, g_out):
        T = len(recs)
        d_w = np.zeros_like(self.w)
        g_s_in = [None] * T
        g_u_next = np.zeros_like(recs[0]["u_new"])
        for t in reversed(range(T)):
            rec = recs[t]
            # s[t] feeds both the layer output and the next step's reset.
            g_spike = g_out[t] - g_u_next * self.cfg.u_thr
            g_u = g_spike * surrogate_grad(rec["u_new"] - self.cfg.u_thr) + g_u_next * self.cfg.beta
            d_w += rec["s_in"].T @ g_u
            g_s_in[t] = g_u @ self.w.T
            g_u_next = g_u
        return np.stack(g_s_in), GradPlanes(d_w, np.zeros_like(d_w))

    def param_arrays(self):
        return [self.w]

    def grad_arrays(self, grads: GradPlanes):
        return [grads.d_theta]


class MaxPool2dLayer:
    """Stateless 2x2 (or n x n) max pooling over binary spikes."""

    kind = "maxpool"

    def __init__(self, window: int = 2):
        self.window = window

    def init_state(self, batch):
        return None

    def step(self, s_in, state, soft=False):
        out, routes = _maxpool_with_routing(s_in, self.window)
        return out, None, {"routes": routes, "in_shape": s_in.shape}

    def backward(self, recs, g_out):
        g_s_in = [
            _maxpool_backward(g_out[t], rec["routes"], rec["in_shape"], self.window)
            for t, rec in enumerate(recs)
        ]
        return np.stack(g_s_in), None

    def param_arrays(self):
        return []

    def grad_arrays(self, grads):
        return []


class FlattenLayer:
    """Reshape (batch, C, H, W) spikes to (batch, features)."""

    kind = "flatten"

    def init_state(self, batch):
        return None

    def step(self, s_in, state, soft=False):
        return s_in.reshape(s_in.shape[0], -1), None, {"in_shape": s_in.shape}

    def backward(self, recs, g_out):
        g_s_in = [g_out[t].reshape(rec["in_shape"]) for t, rec in enumerate(recs)]
        return np.stack(g_s_in), None

    def param_arrays(self):
        return []

    def grad_arrays(self, grads):
        return []


@dataclass
class ForwardTrace:
    """Everything the reverse sweep needs: per-layer, per-timestep records
    plus the output spike values at every timestep."""

    layer_recs: list
    outputs: np.ndarray  # (T, batch, classes)
    timesteps: int
    batch: int


class SpikingModel:
    """An ordered stack of spiking layers evaluated over a spike tensor."""

    def __init__(self, layers, preset="custom", input_shape=None, n_classes=10):
        self.layers = list(layers)
        self.preset = preset
        self.input_shape = tuple(input_shape) if input_shape is not None else None
        self.n_classes = n_classes

    def forward(self, spikes, record=False, soft=False):
        """Run all timesteps; returns (counts, ForwardTrace | None).

        ``spikes`` is (T, batch, ...); neuron states start at zero and
        persist across timesteps within the call.
        """
        spikes = np.asarray(spikes, dtype=np.float64)
        T, batch = spikes.shape[0], spikes.shape[1]
        states = [layer.init_state(batch) for layer in self.layers]
        layer_recs = [[] for _ in self.layers] if record else None
        outputs = np.empty((T, batch, self.n_classes))
        for t in range(T):
            s = spikes[t]
            for i, layer in enumerate(self.layers):
                s, states[i], rec = layer.step(s, states[i], soft=soft)
                if record:
                    layer_recs[i].append(rec)
            if s.shape != (batch, self.n_classes):
                raise ValueError(
                    f"model output shape {s.shape} does not match "
                    f"(batch, {self.n_classes})"
                )
            outputs[t] = s
        counts = outputs.sum(axis=0)
        trace = ForwardTrace(layer_recs, outputs, T, batch) if record else None
        return counts, trace

    def param_arrays(self):
        out = []
        for layer in self.layers:
            out.extend(layer.param_arrays())
        return out


# Rotation-plane init half-widths, in units of pi / sqrt(fan_in).  Entries
# are zero-centered so aggregate drives land in the monotone first arch of
# sin^2 instead of wrapping; the classifier head starts tighter so initial
# class counts are near-uniform and the loss starts calibrated.
HIDDEN_INIT_SCALE = 1.5
HEAD_INIT_SCALE = 0.5


def _init_planes(rng, shape, fan_in, t1, scale=HIDDEN_INIT_SCALE):
    half_width = scale * np.pi / np.sqrt(fan_in)
    theta = rng.uniform(-half_width, half_width, size=shape)
    tau = rng.uniform(0.1, 1.0, size=shape) * t1
    return WeightPlanes(theta, tau)


def build_model(
    preset: str,
    input_shape,
    seed: int,
    neuron_cfg: QlifConfig | None = None,
    hidden: int = 1000,
    n_classes: int = 10,
    conv_filters: int = 12,
    conv_kernel: int = 5,
    pool_window: int = 2,
    lif_beta: float = 0.9,
    lif_u_thr: float = 1.0,
) -> SpikingModel:
    """Construct one of the supported model presets.

    ``qsnn-dense``: flattened input -> hidden quantum layer -> class layer.
    ``qscnn-conv``: conv quantum layer -> max pool -> flatten -> class layer.
    ``lif-dense``: the classical LIF twin of ``qsnn-dense``.
    """
    cfg = neuron_cfg or QlifConfig()
    rng = np.random.default_rng(seed)
    input_shape = tuple(input_shape)

    if preset == "qsnn-dense":
        (n_in,) = input_shape
        layers = [
            DenseQlifLayer(_init_planes(rng, (n_in, hidden), n_in, cfg.t1), cfg),
            DenseQlifLayer(
                _init_planes(rng, (hidden, n_classes), hidden, cfg.t1, HEAD_INIT_SCALE),
                cfg,
            ),
        ]
    elif preset == "qscnn-conv":
        channels, h, w = input_shape
        k = conv_kernel
        fan_in = channels * k * k
        conv = ConvQlifLayer(
            _init_planes(rng, (conv_filters, channels, k, k), fan_in, cfg.t1),
            cfg,
            in_hw=(h, w),
        )
        oh, ow = conv.out_hw
        if oh % pool_window or ow % pool_window:
            raise ValueError("conv output not divisible by pooling window")
        flat = conv_filters * (oh // pool_window) * (ow // pool_window)
        layers = [
            conv,
            MaxPool2dLayer(pool_window),
            FlattenLayer(),
            DenseQlifLayer(
                _init_planes(rng, (flat, n_classes), flat, cfg.t1, HEAD_INIT_SCALE),
                cfg,
            ),
        ]
    elif preset == "lif-dense":
        (n_in,) = input_shape
        lif_cfg = LifConfig(beta=lif_beta, u_thr=lif_u_thr)
        w1 = rng.uniform(0.0, 2.0 * lif_u_thr / np.sqrt(n_in), size=(n_in, hidden))
        w2 = rng.uniform(0.0, 2.0 * lif_u_thr / np.sqrt(hidden), size=(hidden, n_classes))
        layers = [DenseLifLayer(w1, lif_cfg), DenseLifLayer(w2, lif_cfg)]
    else:
        raise ValueError(f"unknown model preset {preset!r}")

    return SpikingModel(layers, preset=preset, input_shape=input_shape, n_classes=n_classes)


def _layer_manifest(layer):
    m = {"kind": layer.kind}
    if isinstance(layer, DenseQlifLayer):
        m.update(fan_in=layer.fan_in, fan_out=layer.fan_out, neuron=_qlif_cfg_dict(layer.cfg))
    elif isinstance(layer, ConvQlifLayer):
        m.update(
            filters=layer.n_filters,
            channels=layer.channels,
            kernel=[layer.kh, layer.kw],
            in_hw=list(layer.in_hw),
            neuron=_qlif_cfg_dict(layer.cfg),
        )
    elif isinstance(layer, DenseLifLayer):
        m.update(
            fan_in=layer.fan_in,
            fan_out=layer.fan_out,
            beta=layer.cfg.beta,
            u_thr=layer.cfg.u_thr,
        )
    elif isinstance(layer, MaxPool2dLayer):
        m.update(window=layer.window)
    return m


def _qlif_cfg_dict(cfg: QlifConfig):
    return {
        "threshold": cfg.threshold,
        "t1": cfg.t1,
        "decay_mode": cfg.decay_mode.value,
        "epsilon": cfg.epsilon,
    }


def save_checkpoint(path, model: SpikingModel, extra: dict | None = None):
    """Serialize a model to a single .npz container (atomic write).

    Weight arrays round-trip bit-exactly; the manifest carries layer specs,
    neuron configuration, and any caller-provided metadata.
    """
    manifest = {
        "version": CHECKPOINT_VERSION,
        "preset": model.preset,
        "input_shape": list(model.input_shape) if model.input_shape else None,
        "n_classes": model.n_classes,
        "layers": [_layer_manifest(layer) for layer in model.layers],
        "extra": extra or {},
    }
    arrays = {}
    for i, layer in enumerate(model.layers):
        for j, arr in enumerate(layer.param_arrays()):
            arrays[f"param_{i}_{j}"] = arr
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=path.parent, suffix=".tmp", delete=False) as tmp:
        np.savez(tmp, manifest=np.frombuffer(json.dumps(manifest).encode(), dtype=np.uint8), **arrays)
        tmp_path = Path(tmp.name)
    tmp_path.replace(path)


def load_checkpoint(path) -> tuple[SpikingModel, dict]:
    """Restore a model saved by ``save_checkpoint``; returns (model, extra)."""
    with np.load(path) as blob:
        manifest = json.loads(bytes(blob["manifest"]).decode())
        if manifest.get("version") != CHECKPOINT_VERSION:
            raise ValueError(
                f"unsupported checkpoint version {manifest.get('version')!r}"
            )
        layers = []
        for i, spec in enumerate(manifest["layers"]):
            kind = spec["kind"]
            if kind == "dense-qlif":
                planes = WeightPlanes(blob[f"param_{i}_0"], blob[f"param_{i}_1"])
                layers.append(DenseQlifLayer(planes, _qlif_cfg_from(spec["neuron"])))
            elif kind == "conv-qlif":
                planes = WeightPlanes(blob[f"param_{i}_0"], blob[f"param_{i}_1"])
                layers.append(
                    ConvQlifLayer(planes, _qlif_cfg_from(spec["neuron"]), in_hw=spec["in_hw"])
                )
            elif kind == "dense-lif":
                cfg = LifConfig(beta=spec["beta"], u_thr=spec["u_thr"])
                layers.append(DenseLifLayer(blob[f"param_{i}_0"], cfg))
            elif kind == "maxpool":
                layers.append(MaxPool2dLayer(spec["window"]))
            elif kind == "flatten":
                layers.append(FlattenLayer())
            else:
                raise ValueError(f"unknown layer kind {kind!r} in checkpoint")
    model = SpikingModel(
        layers,
        preset=manifest["preset"],
        input_shape=manifest["input_shape"],
        n_classes=manifest["n_classes"],
    )
    return model, manifest["extra"]


def _qlif_cfg_from(d):
    return QlifConfig(
        threshold=d["threshold"],
        t1=d["t1"],
        decay_mode=DecayMode(d["decay_mode"]),
        epsilon=d["epsilon"],
    )
