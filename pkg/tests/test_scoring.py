from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TABLE5_FLAGS, TABLE13_FLAGS
from referee.context import DependencyClass, RelatedInfo
from referee.errors import EmptyMatrix, InputError, LengthMismatch, OutOfRangeLabel
from referee.judge import VerdictMatrix
from referee.scoring import (
    TABLE11_WEIGHTS,
    ConsistencyReport,
    Weights,
    aggregate,
    build_report,
    normalize_label,
)
from referee.segmenter import Segment


def oracle(flags, weights=(1, 1, 1, 1)):
    """Exact double loop in rationals."""
    num = Fraction(0)
    for row in flags:
        for w, f in zip(weights, row):
            num += Fraction(w) * f
    return float(num / (len(flags) * sum(Fraction(w) for w in weights)))


def test_extremes():
    assert aggregate(VerdictMatrix.from_flags([[1] * 4] * 3)) == 1.0
    assert aggregate(VerdictMatrix.from_flags([[0] * 4] * 3)) == 0.0


def test_eleven_of_twenty():
    assert aggregate(VerdictMatrix.from_flags(TABLE13_FLAGS)) == 0.55
    assert [sum(r) for r in TABLE5_FLAGS] == [4, 2, 4, 2, 3]
    assert aggregate(VerdictMatrix.from_flags(TABLE5_FLAGS)) == 0.75


def test_random_matrices_match_oracle():
    rng = random.Random(11)
    for _ in range(200):
        flags = [[rng.randint(0, 1) for _ in range(4)] for _ in range(rng.randint(1, 40))]
        m = VerdictMatrix.from_flags(flags)
        assert abs(aggregate(m) - oracle(flags)) <= 1e-12
        assert abs(aggregate(m, TABLE11_WEIGHTS) - oracle(flags, TABLE11_WEIGHTS.as_tuple())) <= 1e-12


def test_empty_matrix():
    with pytest.raises(EmptyMatrix):
        aggregate(VerdictMatrix.from_flags([]))


def test_weights_validation():
    with pytest.raises(InputError):
        Weights(0, 0, 0, 0)
    with pytest.raises(InputError):
        Weights(-1, 1, 1, 1)
    assert Weights.parse("0.6:1.2:1.2:1.0") == TABLE11_WEIGHTS
    assert Weights.parse("0.6,1.2,1.2,1.0") == TABLE11_WEIGHTS
    with pytest.raises(InputError):
        Weights.parse("1,2")


flag_matrices = st.lists(st.lists(st.integers(0, 1), min_size=4, max_size=4), min_size=1, max_size=12)
weights = st.tuples(*[st.floats(0, 10, allow_nan=False)] * 4).filter(lambda w: sum(w) > 0.01)


@settings(max_examples=200, deadline=None)
@given(flag_matrices, weights)
def test_range(flags, w):
    assert 0.0 <= aggregate(VerdictMatrix.from_flags(flags), Weights(*w)) <= 1.0


@settings(max_examples=200, deadline=None)
@given(flag_matrices, st.data())
def test_monotone(flags, data):
    zeros = [(i, j) for i, row in enumerate(flags) for j, f in enumerate(row) if f == 0]
    if not zeros:
        return
    i, j = data.draw(st.sampled_from(zeros))
    flipped = [list(r) for r in flags]
    flipped[i][j] = 1
    assert aggregate(VerdictMatrix.from_flags(flipped)) > aggregate(VerdictMatrix.from_flags(flags))


@settings(max_examples=200, deadline=None)
@given(flag_matrices, weights, st.floats(0.1, 100))
def test_scale_invariance(flags, w, c):
    m = VerdictMatrix.from_flags(flags)
    assert aggregate(m, Weights(*w)) == pytest.approx(aggregate(m, Weights(*(c * x for x in w))), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(flag_matrices, st.floats(0.1, 100))
def test_equal_weight_reduction(flags, c):
    m = VerdictMatrix.from_flags(flags)
    assert aggregate(m, Weights(c, c, c, c)) == pytest.approx(aggregate(m), abs=1e-12)


@pytest.mark.parametrize("raw,expected", [(1, 0.2), (2, 0.4), (3, 0.6), (4, 0.8), (5, 1.0)])
def test_normalize_label(raw, expected):
    assert normalize_label(raw) == expected


@pytest.mark.parametrize("raw", [0, 6, -1, 2.5, True, "3"])
def test_normalize_label_out_of_range(raw):
    with pytest.raises(OutOfRangeLabel):
        normalize_label(raw)


def segs(n):
    return [Segment(i, f"S{i}.", (i * 4, i * 4 + 3)) for i in range(n)]


def test_report_lists_failed_criteria():
    report = build_report(VerdictMatrix.from_flags(TABLE5_FLAGS), segs(5), [])
    assert [list(s.failed) for s in report.per_segment] == [[], ["C1", "C3"], [], ["C2", "C3"], ["C4"]]
    assert [s.row_score for s in report.per_segment] == [1.0, 0.5, 1.0, 0.5, 0.75]
    assert report.overall_score == aggregate(report.matrix)


def test_all_pass_report():
    report = build_report(VerdictMatrix.from_flags([[1] * 4] * 2), segs(2), [])
    assert report.overall_score == 1.0
    assert all(not s.failed for s in report.per_segment)


def test_report_validation():
    with pytest.raises(LengthMismatch):
        build_report(VerdictMatrix.from_flags([[1] * 4]), segs(2), [])
    with pytest.raises(InputError):
        build_report(VerdictMatrix.from_flags([[1] * 4]), segs(1), [], score=0.5)


@settings(max_examples=100, deadline=None)
@given(flag_matrices)
def test_report_round_trip(flags):
    related = [RelatedInfo("a.b", "doc", DependencyClass.EXTERNAL, "a.b", "x")]
    report = build_report(VerdictMatrix.from_flags(flags), segs(len(flags)), related, config={"hops": 1},
                          weights=TABLE11_WEIGHTS)
    again = ConsistencyReport.from_json(report.to_json())
    assert again == report
    assert again.to_json() == report.to_json()


def test_text_format_three_decimals():
    report = build_report(VerdictMatrix.from_flags(TABLE13_FLAGS), segs(5), [])
    assert report.to_text().startswith("score: 0.550\n")
