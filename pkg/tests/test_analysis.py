import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cavegen.analysis import (
    appearance_distribution,
    batch_report,
    iou,
    mirror_h,
    mirror_v,
    pad_square,
    rotate90,
    similarity_csv,
    summary_text,
    symmetry_scores,
    symmetry_csv,
    world_similarity,
)
from cavegen.errors import EmptyWorld, GridError
from cavegen.grid import OccupancyGrid, TopometricType

binary = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=st.integers(0, 1))


@given(binary)
def test_identity_scores_half(m):
    if m.sum() == 0:
        assert iou(m, m) == 0.0
    else:
        assert iou(m, m) == pytest.approx(0.5, abs=1e-12)


@given(binary.flatmap(lambda a: st.tuples(st.just(a), arrays(np.uint8, a.shape, elements=st.integers(0, 1)))))
def test_score_symmetric_and_bounded(pair):
    a, b = pair
    assert iou(a, b) == iou(b, a)
    assert 0.0 <= iou(a, b) <= 0.5


def test_subset_score():
    m1 = np.zeros((3, 3), dtype=np.uint8)
    m2 = np.zeros((3, 3), dtype=np.uint8)
    m1[0, :2] = 1
    m2[0, :] = 1
    m2[1, 0] = 1
    assert iou(m1, m2) == pytest.approx(2 / 6)


def test_shape_mismatch():
    with pytest.raises(GridError):
        iou(np.ones((2, 2)), np.ones((3, 3)))


def test_half_turn_is_double_mirror():
    rng = np.random.default_rng(6)
    for _ in range(20):
        m = rng.integers(0, 2, size=(6, 6))
        assert np.array_equal(rotate90(m, 2), mirror_h(mirror_v(m)))


def test_rotation_is_clockwise():
    m = np.array([[1, 0], [0, 0]])
    assert np.array_equal(rotate90(m, 1), [[0, 1], [0, 0]])


def test_pad_square_centres():
    p = pad_square(np.ones((2, 5)))
    assert p.shape == (5, 5)
    assert p[:, 0].tolist() == [0, 1, 1, 0, 0]


def test_mirror_symmetric_level():
    m = np.array([[1, 0, 1], [1, 1, 1], [0, 0, 0]])
    h, v, _ = symmetry_scores(m)
    assert h == pytest.approx(0.5)
    assert v < 0.5


def test_plus_shape_is_fully_rotation_symmetric():
    plus = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    assert symmetry_scores(plus) == pytest.approx((0.5, 0.5, 0.5))


def test_appearance_distribution():
    g = OccupancyGrid.from_rows([".#.", "###", ".#."])
    dist = appearance_distribution(g)
    assert dist[TopometricType.DEADEND] == pytest.approx(0.8)
    assert dist[TopometricType.INTERSECTION] == pytest.approx(0.2)
    with pytest.raises(EmptyWorld):
        appearance_distribution(OccupancyGrid.empty(1, 3, 3))


def test_world_similarity_pads_to_common_frame():
    a = OccupancyGrid.from_rows(["###", "...", "..."])
    b = OccupancyGrid.from_rows(["####", "....", "....", "...."])
    assert world_similarity(a, b) == pytest.approx(3 / 7)


def test_multi_level_similarity_uses_shared_levels():
    a = OccupancyGrid.from_rows(["###", "...", "..."], ["...", "...", "###"])
    b = OccupancyGrid.from_rows(["###", "...", "..."])
    assert world_similarity(a, b) == pytest.approx(0.5)


def test_identical_worlds_report_half():
    g = OccupancyGrid.from_rows(["#####", "..#..", "..#.."])
    report = batch_report([g, g.copy()], ["a", "a"], ["w1", "w2"])
    grp = report.groups["a"]
    assert grp.similarity[0, 1] == pytest.approx(0.5)
    assert grp.mean_similarity == pytest.approx(0.5)
    csv_text = similarity_csv(grp)
    assert csv_text.splitlines()[0] == "world,w1,w2"
    assert "0.500000" in csv_text
    assert symmetry_csv(report).splitlines()[0] == "world,group,horizontal,vertical,rotational"
    assert summary_text(report).splitlines()[1].startswith("a\t2\t0.500000")


def test_groups_are_separate():
    g1 = OccupancyGrid.from_rows(["###", "...", "..."])
    g2 = OccupancyGrid.from_rows(["...", "...", "###"])
    report = batch_report([g1, g1, g2, g2], ["x", "x", "y", "y"])
    assert set(report.groups) == {"x", "y"}
    assert report.groups["x"].similarity.shape == (2, 2)
    assert report.normalized_symmetry("w000") == pytest.approx(tuple(2 * v for v in report.symmetry["w000"]))


def test_report_needs_two_worlds():
    with pytest.raises(GridError):
        batch_report([OccupancyGrid.from_rows(["###", "...", "..."])], ["a"])
