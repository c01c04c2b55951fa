"""Dataset acquisition and IDX parsing for the three 28x28 benchmark sets
(MNIST, Fashion-MNIST, Kuzushiji-MNIST).

Files are fetched over HTTPS through an injectable transport (tests use a
stub and never touch the network), cached under
``<cache_dir>/<dataset>/<original-filename>`` next to a small manifest of
byte sizes, gunzipped, parsed from the big-endian IDX layout, and
normalized to [0, 1] intensities.
"""

from __future__ import annotations

import gzip
import json
import os
import struct
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from filelock import FileLock

__all__ = [
    "IdxFormatError",
    "BadMagicError",
    "TruncatedPayloadError",
    "SizeOverflowError",
    "DownloadError",
    "parse_idx",
    "serialize_idx",
    "Dataset",
    "DATASETS",
    "HttpxTransport",
    "StubTransport",
    "fetch_dataset",
    "default_cache_dir",
]

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

# Largest element count accepted before declaring the header corrupt.
MAX_ELEMENTS = 1 << 32


class IdxFormatError(ValueError):
    """Malformed IDX payload."""


class BadMagicError(IdxFormatError):
    pass


class TruncatedPayloadError(IdxFormatError):
    pass


class SizeOverflowError(IdxFormatError):
    pass


class DownloadError(RuntimeError):
    """Dataset file could not be retrieved."""


def parse_idx(data: bytes) -> np.ndarray:
    """Decode an IDX byte string into a uint8 tensor.

    Magic 0x00000803 yields a rank-3 image tensor, 0x00000801 a rank-1
    label vector.  Dimension sizes are 4-byte big-endian integers following
    the magic; the payload is row-major uint8.
    """
    if len(data) < 4:
        raise TruncatedPayloadError("fewer than 4 bytes; missing magic")
    (magic,) = struct.unpack(">I", data[:4])
    if magic == IMAGES_MAGIC:
        rank = 3
    elif magic == LABELS_MAGIC:
        rank = 1
    else:
        raise BadMagicError(f"unsupported IDX magic 0x{magic:08x}")
    header_end = 4 + 4 * rank
    if len(data) < header_end:
        raise TruncatedPayloadError("header truncated before dimension sizes")
    dims = struct.unpack(f">{rank}I", data[4:header_end])
    count = 1
    for d in dims:
        count *= d
    if count > MAX_ELEMENTS:
        raise SizeOverflowError(f"declared element count {count} exceeds {MAX_ELEMENTS}")
    payload = data[header_end:]
    if len(payload) < count:
        raise TruncatedPayloadError(
            f"payload truncated: expected {count} bytes, got {len(payload)}"
        )
    if len(payload) > count:
        raise IdxFormatError(
            f"trailing data: expected {count} payload bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(dims)


def serialize_idx(arr: np.ndarray) -> bytes:
    """Inverse of ``parse_idx`` for uint8 tensors of rank 1 or 3."""
    arr = np.asarray(arr)
    if arr.dtype != np.uint8:
        raise ValueError("IDX serialization requires uint8 data")
    if arr.ndim == 3:
        magic = IMAGES_MAGIC
    elif arr.ndim == 1:
        magic = LABELS_MAGIC
    else:
        raise ValueError(f"rank {arr.ndim} not representable (need 1 or 3)")
    header = struct.pack(">I", magic) + b"".join(struct.pack(">I", d) for d in arr.shape)
    return header + arr.tobytes()


@dataclass
class Dataset:
    """Normalized images, integer labels, and provenance."""

    name: str
    split: str
    images: np.ndarray  # (count, 28, 28) float32 in [0, 1]
    labels: np.ndarray  # (count,) int64

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ValueError("image/label count mismatch")

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class DatasetSource:
    base_url: str
    env_var: str


DATASETS = {
    "mnist": DatasetSource(
        "https://ossci-datasets.s3.amazonaws.com/mnist/", "QLIFNET_MNIST_BASE_URL"
    ),
    "fashion-mnist": DatasetSource(
        "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/",
        "QLIFNET_FASHION_MNIST_BASE_URL",
    ),
    "kmnist": DatasetSource(
        "http://codh.rois.ac.jp/kmnist/dataset/kmnist/", "QLIFNET_KMNIST_BASE_URL"
    ),
}

SPLIT_FILES = {
    "train": ("train-images-idx3-ubyte.gz", "train-labels-idx1-ubyte.gz"),
    "test": ("t10k-images-idx3-ubyte.gz", "t10k-labels-idx1-ubyte.gz"),
}

EXPECTED_COUNTS = {"train": 60000, "test": 10000}


class HttpxTransport:
    """Real HTTPS transport with bounded retries and backoff."""

    def __init__(self, attempts=3, backoff=1.0, timeout=60.0):
        self.attempts = attempts
        self.backoff = backoff
        self.timeout = timeout

    def get(self, url: str) -> bytes:
        import httpx

        last_error = None
        for attempt in range(self.attempts):
            try:
                response = httpx.get(url, timeout=self.timeout, follow_redirects=True)
                response.raise_for_status()
                return response.content
            except Exception as exc:  # noqa: BLE001 - network errors vary widely
                last_error = exc
                if attempt + 1 < self.attempts:
                    time.sleep(self.backoff * (2**attempt))
        raise DownloadError(f"failed to fetch {url}: {last_error}")


class StubTransport:
    """In-memory transport for hermetic tests; records every request."""

    def __init__(self, responses: dict[str, bytes]):
        self.responses = dict(responses)
        self.requests: list[str] = []

    def get(self, url: str) -> bytes:
        self.requests.append(url)
        if url not in self.responses:
            raise DownloadError(f"stub has no response for {url}")
        return self.responses[url]


def default_cache_dir() -> Path:
    env = os.environ.get("QLIFNET_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "qlifnet" / "datasets"


def _base_url(name: str) -> str:
    source = DATASETS[name]
    url = os.environ.get(source.env_var, source.base_url)
    return url if url.endswith("/") else url + "/"


def _quarantine(path: Path):
    stamp = time.strftime("%Y%m%d-%H%M%S")
    path.rename(path.with_name(path.name + f".corrupt-{stamp}"))


def _load_file(path: Path) -> np.ndarray:
    try:
        raw = gzip.decompress(path.read_bytes())
    except (OSError, EOFError) as exc:
        _quarantine(path)
        raise DownloadError(f"corrupted gzip quarantined: {path} ({exc})") from exc
    try:
        return parse_idx(raw)
    except IdxFormatError:
        _quarantine(path)
        raise


def fetch_dataset(
    name: str,
    cache_dir=None,
    split: str = "train",
    transport=None,
) -> Dataset:
    """Load one split of a benchmark dataset, downloading files if absent.

    Idempotent on a warm cache: no transport calls are made when both files
    already exist.  Downloads are guarded by a file lock so concurrent
    fetchers do not clobber each other; a byte-size manifest is kept next to
    the files for debuggability.
    """
    if name not in DATASETS:
        raise ValueError(f"unknown dataset {name!r}; expected one of {sorted(DATASETS)}")
    if split not in SPLIT_FILES:
        raise ValueError(f"unknown split {split!r}")
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    dataset_dir = cache_dir / name
    dataset_dir.mkdir(parents=True, exist_ok=True)

    images_name, labels_name = SPLIT_FILES[split]
    arrays = {}
    with FileLock(str(dataset_dir / ".lock")):
        for filename in (images_name, labels_name):
            path = dataset_dir / filename
            if not path.exists():
                url = _base_url(name) + filename
                payload = (transport or HttpxTransport()).get(url)
                tmp = path.with_suffix(path.suffix + ".tmp")
                tmp.write_bytes(payload)
                tmp.replace(path)
                _update_manifest(dataset_dir, filename, len(payload))
            arrays[filename] = _load_file(path)

    images = arrays[images_name]
    labels = arrays[labels_name]
    expected = EXPECTED_COUNTS[split]
    if len(images) != expected or len(labels) != expected:
        raise DownloadError(
            f"{name}/{split}: expected {expected} samples, "
            f"got {len(images)} images / {len(labels)} labels"
        )
    if labels.max() > 9:
        raise DownloadError(f"{name}/{split}: labels outside 0..9")
    return Dataset(
        name=name,
        split=split,
        images=(images.astype(np.float32) / 255.0),
        labels=labels.astype(np.int64),
    )


def _update_manifest(dataset_dir: Path, filename: str, size: int):
    manifest_path = dataset_dir / "manifest.json"
    manifest = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
    manifest[filename] = {"bytes": size}
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def train_val_split(dataset: Dataset, val_fraction: float):
    """Carve the tail of the training set off as a validation set."""
    if not 0.0 <= val_fraction < 1.0:
        raise ValueError("val_fraction must lie in [0, 1)")
    n_val = int(len(dataset) * val_fraction)
    if n_val == 0:
        return dataset, None
    cut = len(dataset) - n_val
    head = Dataset(dataset.name, dataset.split, dataset.images[:cut], dataset.labels[:cut])
    tail = Dataset(dataset.name, "val", dataset.images[cut:], dataset.labels[cut:])
    return head, tail
