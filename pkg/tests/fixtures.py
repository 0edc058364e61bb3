"""Hand-built traces and labels for the evaluation harness."""

from cdnf.evaluation import ClipLabel
from cdnf.model import FrameRecord, RunTrace


def make_trace(n, spikes=()):
    spikes = set(spikes)
    return RunTrace([FrameRecord(t, 0.51 if t in spikes else 0.5, t in spikes) for t in range(n)])


# (label, spike frames, expected outcome)
SEVEN_CLIPS = [
    (ClipLabel("c1", True, (5, 8)), [6, 7], "TP"),
    (ClipLabel("c2", True, (5, 8)), [5], "TP"),  # window start is inside
    (ClipLabel("c3", True, (5, 8)), [3, 6], "FN"),  # first alert too early
    (ClipLabel("c4", True, (5, 8)), [], "FN"),
    (ClipLabel("n1", False), [4], "FP"),
    (ClipLabel("n2", False), [], "TN"),
    (ClipLabel("c5", True, (2, 9)), [9], "TP"),  # window end is inside
]
SEVEN_COUNTS = dict(tp=3, fp=1, tn=1, fn=2)
SEVEN_ACCURACY = 57.14  # 4 / 7


def seven_clip_dataset(n_frames=10):
    traces = {lab.clip_id: make_trace(n_frames, sp) for lab, sp, _ in SEVEN_CLIPS}
    labels = [lab for lab, _, _ in SEVEN_CLIPS]
    return traces, labels
