"""Request/response models shared by the HTTP service and the CLI.

Every operation of the toolkit takes one request model and returns one
report model, so the in-process path and the HTTP path run exactly the same
code with the same validation.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

DatasetName = Literal["mnist", "fashion-mnist", "kmnist"]
ModelPreset = Literal["qsnn-dense", "qscnn-conv", "lif-dense"]
DecayModeName = Literal["rotation", "exponential"]

# Convergence is expected within a handful of epochs; longer runs must be
# requested explicitly.
DEFAULT_EPOCH_CAP = 5


class TrainRequest(BaseModel):
    dataset: DatasetName = "mnist"
    model: ModelPreset = "qsnn-dense"
    timesteps: int = Field(25, ge=1)
    epochs: int = Field(1, ge=1)
    override_epoch_cap: bool = False
    batch_size: int = Field(128, ge=1)
    lr: float = Field(5e-3, ge=0.0)
    seed: int = 0
    decay_mode: DecayModeName = "rotation"
    threshold: float = Field(0.5, gt=0.0, lt=1.0)
    t1: float = Field(1.0, gt=0.0)
    hidden: int = Field(1000, ge=1)
    train_subset: Optional[int] = Field(None, ge=1)
    test_subset: Optional[int] = Field(None, ge=1)
    val_fraction: float = Field(0.0, ge=0.0, lt=1.0)
    out_dir: str = "runs/train"
    data_dir: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _check_epoch_cap(self):
        if self.epochs > DEFAULT_EPOCH_CAP and not self.override_epoch_cap:
            raise ValueError(
                f"epochs > {DEFAULT_EPOCH_CAP} requires override_epoch_cap=true"
            )
        return self


class EpochSummary(BaseModel):
    epoch: int
    mean_loss: float
    train_acc: float


class TrainReport(BaseModel):
    test_accuracy: float
    val_accuracy: Optional[float] = None
    final_train_accuracy: float
    final_loss: float
    train_time_seconds: float
    eval_time_seconds: float
    epochs: list[EpochSummary]
    metrics_csv: str
    report_json: str
    checkpoint: str
    config: dict
    config_hash: str
    code_hash: str


class EvalRequest(BaseModel):
    checkpoint: str
    dataset: DatasetName = "mnist"
    split: Literal["train", "test"] = "test"
    subset: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    out_dir: str = "runs/eval"
    data_dir: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)


class EvalReport(BaseModel):
    accuracy: float
    n_samples: int
    confusion_csv: str
    report_json: str


class TraceRequest(BaseModel):
    theta: float = 1.5707963267948966  # pi/2
    tau_ratio: float = Field(0.3, ge=0.0)  # delay as a fraction of t1
    threshold: float = Field(0.5, gt=0.0, lt=1.0)
    t1: float = Field(1.0, gt=0.0)
    timesteps: int = Field(60, ge=1)
    seed: int = 0
    decay_mode: DecayModeName = "rotation"
    spike_prob: float = Field(0.5, ge=0.0, le=1.0)
    all_zero_input: bool = False
    lif_beta: Optional[float] = Field(None, gt=0.0, lt=1.0)
    lif_weight: Optional[float] = None
    out_dir: str = "runs/trace"


class TraceReport(BaseModel):
    csv: str
    json_path: str
    n_steps: int
    qlif_spikes: int
    lif_spikes: int


class VerifyRequest(BaseModel):
    samples: int = Field(1000, ge=1)
    seed: int = 0
    residual_threshold: float = 1e-10
    out_dir: Optional[str] = None


class ResidualRow(BaseModel):
    branch: str
    mode: str
    samples: int
    max_residual: float
    mean_residual: float


class VerifyReport(BaseModel):
    rows: list[ResidualRow]
    max_residual: float
    passed: bool
    csv: Optional[str] = None


class FetchRequest(BaseModel):
    datasets: list[DatasetName] = Field(default_factory=lambda: ["mnist"])
    splits: list[Literal["train", "test"]] = Field(default_factory=lambda: ["train", "test"])
    data_dir: Optional[str] = None


class FetchedSplit(BaseModel):
    dataset: str
    split: str
    count: int


class FetchReport(BaseModel):
    fetched: list[FetchedSplit]
    cache_dir: str
