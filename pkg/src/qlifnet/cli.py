"""Command-line client for the spiking-network toolkit.

The CLI is a thin shell over the same request/response models the HTTP
service uses: flags are parsed into a request model and executed in-process
by default, or posted to a running service with ``--server``.  Option
precedence is defaults < config file (``key = value`` lines) < flags.
"""

from __future__ import annotations

import argparse
import json
import sys

from pydantic import ValidationError

from . import __version__
from .data import DownloadError
from .schemas import (
    EvalRequest,
    FetchRequest,
    TraceRequest,
    TrainRequest,
    VerifyRequest,
)

ENDPOINTS = {
    "train": ("/train", TrainRequest),
    "eval": ("/eval", EvalRequest),
    "trace": ("/trace", TraceRequest),
    "verify": ("/verify", VerifyRequest),
    "fetch": ("/fetch", FetchRequest),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        request = _build_request(args)
        report = _execute(args, request)
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DownloadError as exc:
        print(f"download error: {exc}", file=sys.stderr)
        return 3
    return _render(args.command, report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlifnet",
        description="Quantum spiking networks: train, evaluate, trace, verify, fetch.",
    )
    parser.add_argument("--version", action="version", version=f"qlifnet {__version__}")
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (overridden by flags)")
    common.add_argument("--server", help="base URL of a running service; run remotely")

    p = sub.add_parser("train", parents=[common], help="train a model preset")
    p.add_argument("--dataset", choices=["mnist", "fashion-mnist", "kmnist"])
    p.add_argument("--model", choices=["qsnn-dense", "qscnn-conv", "lif-dense"])
    p.add_argument("--timesteps", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--override-epoch-cap", action="store_true", default=None)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--decay-mode", choices=["rotation", "exponential"])
    p.add_argument("--threshold", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--hidden", type=int)
    p.add_argument("--train-subset", type=int)
    p.add_argument("--test-subset", type=int)
    p.add_argument("--val-fraction", type=float)
    p.add_argument("--out-dir")
    p.add_argument("--data-dir")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("eval", parents=[common], help="evaluate a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("--dataset", choices=["mnist", "fashion-mnist", "kmnist"])
    p.add_argument("--split", choices=["train", "test"])
    p.add_argument("--subset", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--data-dir")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("trace", parents=[common], help="side-by-side neuron traces")
    p.add_argument("--theta", type=float)
    p.add_argument("--tau-ratio", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--timesteps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--decay-mode", choices=["rotation", "exponential"])
    p.add_argument("--spike-prob", type=float)
    p.add_argument("--all-zero-input", action="store_true", default=None)
    p.add_argument("--lif-beta", type=float)
    p.add_argument("--lif-weight", type=float)
    p.add_argument("--out-dir")

    p = sub.add_parser("verify", parents=[common], help="oracle residual battery")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--residual-threshold", type=float)
    p.add_argument("--out-dir")

    p = sub.add_parser("fetch", parents=[common], help="download datasets to cache")
    p.add_argument("--datasets", nargs="+", choices=["mnist", "fashion-mnist", "kmnist"])
    p.add_argument("--splits", nargs="+", choices=["train", "test"])
    p.add_argument("--data-dir")

    return parser


def parse_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _build_request(args):
    path, request_cls = ENDPOINTS[args.command]
    fields = set(request_cls.model_fields)
    merged = {}
    if getattr(args, "config", None):
        file_values = parse_config_file(args.config)
        unknown = set(file_values) - fields
        if unknown:
            raise ValueError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        merged.update(file_values)
    for name in fields:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    return request_cls(**merged)


def _execute(args, request):
    path, _ = ENDPOINTS[args.command]
    if getattr(args, "server", None):
        import httpx

        response = httpx.post(
            args.server.rstrip("/") + path,
            json=request.model_dump(mode="json"),
            timeout=None,
        )
        if response.status_code != 200:
            raise ValueError(f"server returned {response.status_code}: {response.text}")
        return response.json()
    from .experiments import run_eval, run_fetch, run_trace, run_train, run_verify

    runner = {
        "train": run_train,
        "eval": run_eval,
        "trace": run_trace,
        "verify": run_verify,
        "fetch": run_fetch,
    }[args.command]
    return runner(request).model_dump()


def _render(command: str, report: dict) -> int:
    if command == "train":
        print(f"test accuracy: {report['test_accuracy']:.4f}")
        print(f"training time: {report['train_time_seconds']:.2f}s")
        print(f"report: {report['report_json']}")
        print(f"checkpoint: {report['checkpoint']}")
        return 0
    if command == "eval":
        print(f"accuracy: {report['accuracy']:.4f} on {report['n_samples']} samples")
        print(f"confusion matrix: {report['confusion_csv']}")
        return 0
    if command == "trace":
        print(f"trace CSV: {report['csv']}")
        print(f"trace JSON: {report['json_path']}")
        print(
            f"spikes emitted: qlif={report['qlif_spikes']} lif={report['lif_spikes']}"
            f" over {report['n_steps']} steps"
        )
        return 0
    if command == "verify":
        print("branch,mode,samples,max_residual,mean_residual")
        for row in report["rows"]:
            print(
                f"{row['branch']},{row['mode']},{row['samples']},"
                f"{row['max_residual']:.3e},{row['mean_residual']:.3e}"
            )
        if not report["passed"]:
            print(
                f"FAIL: max residual {report['max_residual']:.3e} above threshold",
                file=sys.stderr,
            )
            return 1
        return 0
    if command == "fetch":
        for item in report["fetched"]:
            print(f"{item['dataset']}/{item['split']}: {item['count']} samples")
        print(f"cache: {report['cache_dir']}")
        return 0
    print(json.dumps(report, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
