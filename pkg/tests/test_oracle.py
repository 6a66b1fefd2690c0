import numpy as np
import pytest

from planks.bang import BangInstance
from planks.errors import InvalidDimension, TooLarge
from planks.geometry import Hyperplane, LpBall, sharpness_instance
from planks.oracle import (
    bounding_box,
    check_homothet,
    check_solution,
    exhaustive_signs,
    grid_search_2d,
)
from planks.solver import Certificate, PlankSystem, Solution


def _sol(lam, cert=Certificate.REPLICATED):
    return Solution(np.asarray(lam, dtype=float), None, 0.0, 0.0, 0.0, cert)


def test_check_solution_feasible_at_zero_slack():
    system = PlankSystem(np.eye(2), [0, 0], [0.5, 0.5])
    report = check_solution(system, _sol([0.5, -0.5]))
    assert report.feasible and report.failures == []
    assert report.worst_margin_slack == 0
    assert report.norm_slacks["l1"] == 0


def test_check_solution_deficits():
    system = PlankSystem(np.eye(2), [0, 0], [0.5, 0.5])
    report = check_solution(system, _sol([0.25, 0.25]))
    assert not report.feasible
    assert report.failures == [("plank[0]", 0.25), ("plank[1]", 0.25)]
    assert "VIOLATED plank[1]" in report.render()


def test_check_solution_norm_by_certificate():
    system = PlankSystem(np.eye(2), [0, 0], [0.5, 0.5])
    # l1 = 1.2 fails every certificate; l2sq = 0.72 > 1/2 too
    for cert in Certificate:
        report = check_solution(system, _sol([0.6, 0.6], cert))
        assert not report.feasible
    equal = check_solution(system, _sol([0.5, 0.5], Certificate.EQUAL_WIDTH))
    assert equal.feasible and equal.norm_slacks["l2sq"] == 0
    with pytest.raises(InvalidDimension):
        check_solution(system, _sol([1.0]))


def test_check_homothet():
    body = LpBall("inf", 2)
    planes = [Hyperplane([2, 0], 0)]
    assert check_homothet(body, planes, [0.5, 0.1]).feasible
    report = check_homothet(body, planes, [0.25, 0])
    assert not report.feasible and report.failures[0][0] == "hyperplane[0]"
    report = check_homothet(body, planes, [0.75, 0])
    assert [f[0] for f in report.failures] == ["norm:body"]


def test_exhaustive_examples():
    np.testing.assert_array_equal(exhaustive_signs(np.eye(2), np.ones(2), np.zeros(2)), [1, 1])
    inst = BangInstance(np.eye(2), np.ones(2), np.array([0.5, 0.0]))
    # +1 on row 0 leaves margin 0.5 < 1, so the first feasible vector starts with -1
    np.testing.assert_array_equal(exhaustive_signs(inst), [-1, 1])
    with pytest.raises(TooLarge):
        exhaustive_signs(np.eye(21), np.ones(21), np.zeros(21))


def test_bounding_box():
    np.testing.assert_allclose(bounding_box(LpBall(2, 3)), [1, 1, 1])


def test_grid_single_hyperplane():
    body = LpBall("inf", 2)
    best = grid_search_2d(body, [Hyperplane([1, 0], 0)], 0.5, resolution=256)
    assert best is not None
    slack = 2 * np.hypot(2 / 256, 2 / 256)
    assert abs(abs(best[0]) - 0.5) <= slack


def test_grid_sharpness_three():
    body, planes = sharpness_instance(3, 2)
    assert grid_search_2d(body, planes, 0.25, resolution=1024) is not None
    assert grid_search_2d(body, planes, 0.25 + 1e-2, resolution=1024) is None


def test_grid_two_axes():
    body = LpBall("inf", 2)
    planes = [Hyperplane([1, 0], 0), Hyperplane([0, 1], 0)]
    best = grid_search_2d(body, planes, 1 / 3, resolution=300)
    assert best is not None
    # feasible region: |x_i| in [1/3, 2/3] on both axes, one square per quadrant
    slack = 2 * np.hypot(2 / 300, 2 / 300)
    assert np.all(np.abs(best) >= 1 / 3 - slack) and np.all(np.abs(best) <= 2 / 3 + slack)


def test_grid_monotone_in_ratio():
    rng = np.random.default_rng(50)
    for _ in range(5):
        planes = [Hyperplane(rng.standard_normal(2), rng.uniform(-0.5, 0.5)) for _ in range(3)]
        body = LpBall([1, 2, "inf"][int(rng.integers(3))], 2)
        found = [grid_search_2d(body, planes, r, resolution=128) is not None
                 for r in np.linspace(0.05, 0.6, 12)]
        # once it fails it keeps failing
        assert found == sorted(found, reverse=True)


def test_grid_errors():
    with pytest.raises(TooLarge):
        grid_search_2d(LpBall(2, 3), [Hyperplane([1, 0, 0], 0)], 0.5)
    with pytest.raises(TooLarge):
        grid_search_2d(LpBall(2, 2), [Hyperplane([1, 0], 0)], 0.5, resolution=5000)
