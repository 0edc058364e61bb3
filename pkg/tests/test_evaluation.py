import pytest

from cdnf import DimensionError, ParameterError
from cdnf.evaluation import (
    ClipLabel,
    ConfusionCounts,
    Outcome,
    accuracy,
    classify_run,
    read_labels,
    score_dataset,
    write_labels,
    write_report,
)
from fixtures import SEVEN_ACCURACY, SEVEN_CLIPS, SEVEN_COUNTS, make_trace, seven_clip_dataset


@pytest.mark.parametrize("label,spikes,expected", SEVEN_CLIPS, ids=[c[0].clip_id for c in SEVEN_CLIPS])
def test_classify_fixture(label, spikes, expected):
    assert classify_run(make_trace(10, spikes), label) == Outcome(expected)


def test_late_first_alert_is_miss():
    assert classify_run(make_trace(12, [10]), ClipLabel("x", True, (2, 8))) == Outcome.FN


def test_window_beyond_trace():
    with pytest.raises(DimensionError):
        classify_run(make_trace(5), ClipLabel("x", True, (2, 8)))


def test_label_validation():
    with pytest.raises(ParameterError):
        ClipLabel("x", True)
    with pytest.raises(ParameterError):
        ClipLabel("x", True, (5, 2))
    with pytest.raises(ParameterError):
        ClipLabel("x", False, (1, 2))


@pytest.mark.parametrize(
    "counts,expected",
    [
        (ConfusionCounts(tp=2, tn=1, fp=1, fn=0), 75.00),
        (ConfusionCounts(tp=0, tn=0, fp=5, fn=5), 0.00),
        (ConfusionCounts(tp=25, tn=2, fp=5, fn=3), 77.14),
        (ConfusionCounts(tp=3, tn=1, fp=1, fn=2), 57.14),
    ],
)
def test_accuracy_examples(counts, expected):
    assert accuracy(counts) == expected


def test_accuracy_empty():
    with pytest.raises(ParameterError):
        accuracy(ConfusionCounts())


def test_score_seven_clip_fixture():
    traces, labels = seven_clip_dataset()
    score = score_dataset(traces, labels)
    assert score.counts.as_dict() == SEVEN_COUNTS
    assert score.counts.total == 7
    assert score.accuracy == SEVEN_ACCURACY
    assert [r["outcome"] for r in score.report] == [c[2] for c in SEVEN_CLIPS]
    assert score.report[2]["first_spike"] == 3


def test_score_small_datasets():
    one = score_dataset({"a": make_trace(6, [3])}, [ClipLabel("a", True, (2, 4))])
    assert one.counts.as_dict() == dict(tp=1, fp=0, tn=0, fn=0) and one.accuracy == 100.0
    traces = {str(i): make_trace(4) for i in range(4)}
    allneg = score_dataset(traces, [ClipLabel(str(i), False) for i in range(4)])
    assert allneg.counts.tn == 4 and allneg.accuracy == 100.0


def test_missing_trace():
    with pytest.raises(ParameterError):
        score_dataset({}, [ClipLabel("a", False)])


def test_label_file_roundtrip_and_report(tmp_path):
    traces, labels = seven_clip_dataset()
    path = tmp_path / "labels.csv"
    write_labels(labels, path)
    assert read_labels(path) == labels
    jpath, cpath = write_report(score_dataset(traces, labels), tmp_path / "out")
    assert '"accuracy": 57.14' in jpath.read_text()
    assert cpath.read_text().splitlines()[0].startswith("clip_id,is_collision")
