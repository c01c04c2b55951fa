"""End-to-end runs: training, evaluation, neuron traces, oracle
verification, and dataset fetching.

These functions are the single implementation behind both the HTTP service
and the CLI.  Every artifact (metrics CSV, reports, checkpoints, traces) is
written atomically — temp file in the target directory, then rename — so
interrupted runs never leave corrupt files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .data import default_cache_dir, fetch_dataset, train_val_split
from .encoding import EncoderConfig
from .neuron import (
    DecayMode,
    LifConfig,
    QlifConfig,
    run_lif_trace,
    run_qlif_trace,
)
from .network import build_model, load_checkpoint, save_checkpoint
from .oracle import verify_battery
from .schemas import (
    EpochSummary,
    EvalReport,
    EvalRequest,
    FetchedSplit,
    FetchReport,
    FetchRequest,
    ResidualRow,
    TraceReport,
    TraceRequest,
    TrainReport,
    TrainRequest,
    VerifyReport,
    VerifyRequest,
)
from .training import Adam, TrainSettings, evaluate, train_epoch

__all__ = [
    "run_train",
    "run_eval",
    "run_trace",
    "run_verify",
    "run_fetch",
    "atomic_write_text",
    "config_hash",
    "code_hash",
]


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(fieldnames, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def code_hash() -> str:
    """Content hash over the package's Python sources."""
    root = Path(__file__).parent
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*.py")):
        digest.update(str(path.relative_to(root)).encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()


def _resolve_threads(threads):
    return threads if threads else (os.cpu_count() or 1)


def _make_pool(threads):
    return ThreadPoolExecutor(max_workers=threads) if threads > 1 else None


def _neuron_config(req) -> QlifConfig:
    return QlifConfig(
        threshold=req.threshold, t1=req.t1, decay_mode=DecayMode(req.decay_mode)
    )


def _prepare_inputs(images: np.ndarray, preset: str):
    # Dense presets consume flattened intensities; the conv preset keeps a
    # single-channel image grid.
    if preset == "qscnn-conv":
        return images[:, None, :, :], images.shape[1:]
    flat = images.reshape(len(images), -1)
    return flat, (flat.shape[1],)


def run_train(req: TrainRequest) -> TrainReport:
    """Fetch, encode, train, evaluate; write metrics, report, checkpoint."""
    threads = _resolve_threads(req.threads)
    out_dir = Path(req.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    train_ds = fetch_dataset(req.dataset, req.data_dir, "train")
    test_ds = fetch_dataset(req.dataset, req.data_dir, "test")
    train_ds, val_ds = train_val_split(train_ds, req.val_fraction)
    if req.train_subset:
        train_ds.images = train_ds.images[: req.train_subset]
        train_ds.labels = train_ds.labels[: req.train_subset]
    if req.test_subset:
        test_ds.images = test_ds.images[: req.test_subset]
        test_ds.labels = test_ds.labels[: req.test_subset]

    train_values, input_shape = _prepare_inputs(train_ds.images, req.model)
    test_values, _ = _prepare_inputs(test_ds.images, req.model)

    encoder = EncoderConfig(timesteps=req.timesteps, seed=req.seed)
    model = build_model(
        req.model, input_shape, seed=req.seed, neuron_cfg=_neuron_config(req),
        hidden=req.hidden,
    )
    optimizer = Adam(
        model.param_arrays(), lr=req.lr, beta1=0.9, beta2=0.999, eps=1e-8
    )
    settings = TrainSettings(
        encoder=encoder,
        epochs=req.epochs,
        batch_size=req.batch_size,
        lr=req.lr,
        seed=req.seed,
        threads=threads,
    )

    pool = _make_pool(threads)
    try:
        rows = []
        epoch_summaries = []
        train_start = time.perf_counter()
        for epoch in range(req.epochs):
            epoch_rows = train_epoch(
                model, train_values, train_ds.labels, optimizer, settings, epoch, pool
            )
            rows.extend(epoch_rows)
            epoch_summaries.append(
                EpochSummary(
                    epoch=epoch,
                    mean_loss=float(np.mean([r["loss"] for r in epoch_rows])),
                    train_acc=epoch_rows[-1]["train_acc"],
                )
            )
        train_time = time.perf_counter() - train_start

        eval_start = time.perf_counter()
        test_accuracy, _ = evaluate(model, test_values, test_ds.labels, encoder, pool)
        val_accuracy = None
        if val_ds is not None:
            val_values, _ = _prepare_inputs(val_ds.images, req.model)
            val_accuracy, _ = evaluate(model, val_values, val_ds.labels, encoder, pool)
        eval_time = time.perf_counter() - eval_start
    finally:
        if pool is not None:
            pool.shutdown()

    metrics_csv = out_dir / "metrics.csv"
    atomic_write_text(
        metrics_csv,
        _csv_text(
            ["epoch", "batch", "loss", "train_acc"],
            [
                {
                    "epoch": r["epoch"],
                    "batch": r["batch"],
                    "loss": repr(r["loss"]),
                    "train_acc": repr(r["train_acc"]),
                }
                for r in rows
            ],
        ),
    )

    resolved = req.model_dump()
    resolved["threads"] = threads
    checkpoint_path = out_dir / "checkpoint.npz"
    save_checkpoint(
        checkpoint_path,
        model,
        extra={
            "dataset": req.dataset,
            "encoder": {"timesteps": encoder.timesteps, "seed": encoder.seed},
            "config": resolved,
        },
    )

    report = TrainReport(
        test_accuracy=test_accuracy,
        val_accuracy=val_accuracy,
        final_train_accuracy=rows[-1]["train_acc"] if rows else 0.0,
        final_loss=rows[-1]["loss"] if rows else float("nan"),
        train_time_seconds=train_time,
        eval_time_seconds=eval_time,
        epochs=epoch_summaries,
        metrics_csv=str(metrics_csv),
        report_json=str(out_dir / "report.json"),
        checkpoint=str(checkpoint_path),
        config=resolved,
        config_hash=config_hash(resolved),
        code_hash=code_hash(),
    )
    atomic_write_text(
        report.report_json,
        json.dumps(
            {**report.model_dump(), "package_version": __version__}, indent=2
        )
        + "\n",
    )
    return report


def run_eval(req: EvalRequest) -> EvalReport:
    """Evaluate a checkpoint on a dataset split; write confusion CSV."""
    model, extra = load_checkpoint(req.checkpoint)
    ds = fetch_dataset(req.dataset, req.data_dir, req.split)
    if req.subset:
        ds.images = ds.images[: req.subset]
        ds.labels = ds.labels[: req.subset]
    values, input_shape = _prepare_inputs(ds.images, model.preset)
    if tuple(model.input_shape) != tuple(input_shape):
        raise ValueError(
            f"checkpoint expects input shape {tuple(model.input_shape)}, "
            f"dataset provides {tuple(input_shape)}"
        )
    enc = extra.get("encoder", {})
    encoder = EncoderConfig(
        timesteps=int(enc.get("timesteps", 25)),
        seed=int(req.seed if req.seed is not None else enc.get("seed", 0)),
    )
    threads = _resolve_threads(req.threads)
    pool = _make_pool(threads)
    try:
        accuracy, confusion = evaluate(model, values, ds.labels, encoder, pool)
    finally:
        if pool is not None:
            pool.shutdown()

    out_dir = Path(req.out_dir)
    confusion_csv = out_dir / "confusion.csv"
    fieldnames = ["true_class"] + [f"pred_{c}" for c in range(model.n_classes)]
    atomic_write_text(
        confusion_csv,
        _csv_text(
            fieldnames,
            [
                {
                    "true_class": c,
                    **{f"pred_{j}": int(confusion[c, j]) for j in range(model.n_classes)},
                }
                for c in range(model.n_classes)
            ],
        ),
    )
    report = EvalReport(
        accuracy=accuracy,
        n_samples=len(ds.labels),
        confusion_csv=str(confusion_csv),
        report_json=str(out_dir / "eval_report.json"),
    )
    atomic_write_text(report.report_json, json.dumps(report.model_dump(), indent=2) + "\n")
    return report


def run_trace(req: TraceRequest) -> TraceReport:
    """Side-by-side quantum/classical single-neuron traces over one train."""
    cfg = QlifConfig(
        threshold=req.threshold, t1=req.t1, decay_mode=DecayMode(req.decay_mode)
    )
    rng = np.random.default_rng(req.seed)
    if req.all_zero_input:
        xs = np.zeros(req.timesteps)
    else:
        xs = (rng.random(req.timesteps) < req.spike_prob).astype(np.float64)

    tau = req.tau_ratio * req.t1
    qlif = run_qlif_trace(xs, req.theta, tau, cfg)

    # Classical twin: match the per-step decay factor and the ground-state
    # spike jump so the traces are visually comparable.
    beta = req.lif_beta if req.lif_beta is not None else float(
        np.clip(np.exp(-req.tau_ratio), 1e-9, 1.0 - 1e-9)
    )
    weight = req.lif_weight if req.lif_weight is not None else float(
        np.sin(req.theta / 2.0) ** 2
    )
    lif = run_lif_trace(xs, weight, LifConfig(beta=beta, u_thr=req.threshold))

    out_dir = Path(req.out_dir)
    rows = [
        {
            "t": int(t),
            "x": int(x),
            "qlif_alpha_pre_reset": repr(float(qa)),
            "qlif_spike": int(qs),
            "lif_u": repr(float(lu)),
            "lif_spike": int(ls),
        }
        for t, x, qa, qs, lu, ls in zip(
            qlif.t, qlif.x, qlif.value, qlif.spike, lif.value, lif.spike
        )
    ]
    csv_path = out_dir / "trace.csv"
    atomic_write_text(
        csv_path,
        _csv_text(
            ["t", "x", "qlif_alpha_pre_reset", "qlif_spike", "lif_u", "lif_spike"],
            rows,
        ),
    )
    json_path = out_dir / "trace.json"
    atomic_write_text(
        json_path,
        json.dumps(
            {
                "config": req.model_dump(),
                "qlif": qlif.records(),
                "lif": lif.records(),
            },
            indent=2,
        )
        + "\n",
    )
    return TraceReport(
        csv=str(csv_path),
        json_path=str(json_path),
        n_steps=req.timesteps,
        qlif_spikes=int(qlif.spike.sum()),
        lif_spikes=int(lif.spike.sum()),
    )


def run_verify(req: VerifyRequest) -> VerifyReport:
    """Residual battery of the kernel against the density-matrix oracle."""
    rows = [ResidualRow(**row) for row in verify_battery(req.samples, req.seed)]
    max_residual = max(row.max_residual for row in rows)
    report = VerifyReport(
        rows=rows,
        max_residual=max_residual,
        passed=max_residual <= req.residual_threshold,
    )
    if req.out_dir:
        csv_path = Path(req.out_dir) / "residuals.csv"
        atomic_write_text(
            csv_path,
            _csv_text(
                ["branch", "mode", "samples", "max_residual", "mean_residual"],
                [r.model_dump() for r in rows],
            ),
        )
        report.csv = str(csv_path)
    return report


def run_fetch(req: FetchRequest) -> FetchReport:
    """Populate the dataset cache; idempotent when files are present."""
    fetched = []
    for name in req.datasets:
        for split in req.splits:
            ds = fetch_dataset(name, req.data_dir, split)
            fetched.append(FetchedSplit(dataset=name, split=split, count=len(ds)))
    cache = Path(req.data_dir) if req.data_dir else default_cache_dir()
    return FetchReport(fetched=fetched, cache_dir=str(cache))
