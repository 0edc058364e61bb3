"""Scoring of collision alerts against labeled clips.

A collision clip counts as a true positive only when its first alert falls
inside the labeled collision window; an early, late or missing alert is a
false negative.  Any alert on a non-collision clip is a false positive.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exceptions import DimensionError, ParameterError


class Outcome(str, enum.Enum):
    TP = "TP"
    FP = "FP"
    TN = "TN"
    FN = "FN"


@dataclass(frozen=True)
class ClipLabel:
    clip_id: str
    is_collision: bool
    window: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.is_collision:
            if self.window is None:
                raise ParameterError(f"collision clip {self.clip_id!r} needs a window")
            t0, t1 = self.window
            if not 0 <= t0 <= t1:
                raise ParameterError(f"bad window {self.window} for clip {self.clip_id!r}")
            object.__setattr__(self, "window", (int(t0), int(t1)))
        elif self.window is not None:
            raise ParameterError(f"non-collision clip {self.clip_id!r} must not carry a window")


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def add(self, outcome: Outcome) -> None:
        attr = Outcome(outcome).value.lower()
        setattr(self, attr, getattr(self, attr) + 1)

    def as_dict(self) -> Dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def classify_run(trace, label: ClipLabel) -> Outcome:
    """Map one clip's alerts to TP/FP/TN/FN.

    ``trace`` is a :class:`~cdnf.model.RunTrace` (or anything with
    ``first_spike`` and ``__len__``).
    """
    n = len(trace)
    first = trace.first_spike
    if label.is_collision:
        t0, t1 = label.window
        if t1 >= n:
            raise DimensionError(
                f"window {label.window} of clip {label.clip_id!r} exceeds trace length {n}"
            )
        if first is not None and t0 <= first <= t1:
            return Outcome.TP
        return Outcome.FN
    return Outcome.FP if first is not None else Outcome.TN


def accuracy_fraction(counts: ConfusionCounts) -> Fraction:
    if counts.total <= 0:
        raise ParameterError("accuracy of an empty dataset is undefined")
    return Fraction(counts.tp + counts.tn, counts.total) * 100


def accuracy(counts: ConfusionCounts) -> float:
    """``(TP + TN) / (TP + TN + FP + FN) * 100``, rounded to two decimals."""
    return round(float(accuracy_fraction(counts)), 2)


@dataclass
class DatasetScore:
    counts: ConfusionCounts
    accuracy: float
    report: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"counts": self.counts.as_dict(), "total": self.counts.total,
                "accuracy": self.accuracy, "clips": self.report}


def score_dataset(traces: Mapping[str, object], labels: Sequence[ClipLabel]) -> DatasetScore:
    counts = ConfusionCounts()
    report = []
    for label in labels:
        if label.clip_id not in traces:
            raise ParameterError(f"no trace for labeled clip {label.clip_id!r}")
        trace = traces[label.clip_id]
        outcome = classify_run(trace, label)
        counts.add(outcome)
        row = {
            "clip_id": label.clip_id,
            "is_collision": label.is_collision,
            "t_start": label.window[0] if label.window else None,
            "t_end": label.window[1] if label.window else None,
            "first_spike": trace.first_spike,
            "n_frames": len(trace),
            "outcome": outcome.value,
        }
        spikes = getattr(trace, "spikes", None)
        if spikes is not None:
            row["n_spikes"] = int(sum(spikes))
        report.append(row)
    return DatasetScore(counts, accuracy(counts), report)


def _parse_bool(text: str) -> bool:
    val = text.strip().lower()
    if val in ("1", "true", "yes", "y", "collision"):
        return True
    if val in ("0", "false", "no", "n", "non-collision", ""):
        return False
    raise ParameterError(f"cannot read {text!r} as a boolean")


def read_labels(path) -> List[ClipLabel]:
    """Read ``clip_id,is_collision,t_start,t_end`` CSV records."""
    labels = []
    with open(path, newline="") as fh:
        rows = csv.DictReader(line for line in fh if not line.lstrip().startswith("#"))
        missing = {"clip_id", "is_collision"} - set(rows.fieldnames or ())
        if missing:
            raise ParameterError(f"labels file {path} lacks columns {sorted(missing)}")
        for row in rows:
            hit = _parse_bool(row["is_collision"])
            t0, t1 = (row.get("t_start") or "").strip(), (row.get("t_end") or "").strip()
            window = (int(t0), int(t1)) if hit else None
            labels.append(ClipLabel(row["clip_id"].strip(), hit, window))
    return labels


def write_labels(labels: Sequence[ClipLabel], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["clip_id", "is_collision", "t_start", "t_end"])
        for lab in labels:
            t0, t1 = lab.window if lab.window else ("", "")
            w.writerow([lab.clip_id, int(lab.is_collision), t0, t1])


def write_report(score: DatasetScore, out_dir) -> Tuple[Path, Path]:
    """Write ``report.json`` and per-clip ``report.csv``; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jpath, cpath = out / "report.json", out / "report.csv"
    jpath.write_text(json.dumps(score.to_dict(), indent=2))
    cols = ["clip_id", "is_collision", "t_start", "t_end", "first_spike", "n_frames", "outcome"]
    with open(cpath, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        for row in score.report:
            w.writerow({k: "" if row.get(k) is None else row[k] for k in cols})
    return jpath, cpath
