# services/pattern-packing/tests/unit/test_simplex_optimizer.py
import numpy as np
import pytest

from permpack.config import OptimizerConfig
from permpack.core.combination import parse_combination
from permpack.core.permutation import parse_permutation
from permpack.errors import HypothesisError, InfeasibleError
from permpack.models.price_polynomial import SparsePolynomial, build_price_polynomial, combine
from permpack.models.simplex_optimizer import (
    SimplexPoint,
    grid_optimum,
    maximize_on_simplex,
    minimize_on_simplex,
    project_onto_simplex,
    simplex_lattice,
    structured_seeds,
)

CFG = OptimizerConfig(starts=8, seed=0, workers=1)
WIDE = OptimizerConfig(starts=24, seed=1, workers=1)


def poly(num_vars, *terms):
    return SparsePolynomial.from_terms(num_vars, terms)


def _contains(points, target):
    return any(np.allclose(p, target) for p in points)


def test_maximize_examples():
    result = maximize_on_simplex(poly(2, (3, (1, 2))), cfg=CFG)
    assert result.value == pytest.approx(4 / 9, abs=1e-9)
    assert result.point.coords == pytest.approx((1 / 3, 2 / 3), abs=1e-9)
    assert result.method == "baum-eagon"

    result = maximize_on_simplex(poly(2, (1, (4, 0))), cfg=CFG)
    assert result.value == pytest.approx(1.0)
    assert result.point.coords == pytest.approx((1.0, 0.0))


def test_maximize_with_forced_zero():
    result = maximize_on_simplex(poly(2, (3, (1, 2))), forced_zero=[0], cfg=CFG)
    assert result.value == 0
    assert result.point.coords == (0.0, 1.0)


def test_all_coordinates_forced_is_infeasible():
    with pytest.raises(InfeasibleError):
        maximize_on_simplex(poly(2, (3, (1, 2))), forced_zero=[0, 1], cfg=CFG)
    with pytest.raises(IndexError):
        maximize_on_simplex(poly(2, (3, (1, 2))), forced_zero=[2], cfg=CFG)


def test_minimize_examples():
    cubes = poly(2, (1, (3, 0)), (1, (0, 3)))
    result = minimize_on_simplex(cubes, cfg=CFG)
    assert result.value == pytest.approx(0.25, abs=1e-9)
    assert result.point.coords == pytest.approx((0.5, 0.5), abs=1e-6)

    assert minimize_on_simplex(poly(1, (1, (3,))), cfg=CFG).value == pytest.approx(1.0)


def test_minimum_sits_on_a_face():
    """6 x1 x2 x3 + sum x_i^3 is minimized with one coordinate at zero"""
    P = combine(parse_combination("1*123 + 1*321"), "plain", 3)
    result = minimize_on_simplex(P, cfg=CFG)
    assert result.value == pytest.approx(0.25, abs=1e-8)
    coords = sorted(result.point.coords)
    assert coords[0] == pytest.approx(0.0, abs=1e-9)
    assert coords[1:] == pytest.approx([0.5, 0.5], abs=1e-6)


def test_mixed_sign_maximization_needs_opt_in():
    P = poly(2, (1, (2, 0)), (-1, (1, 1)))
    with pytest.raises(HypothesisError):
        maximize_on_simplex(P, cfg=CFG)
    result = maximize_on_simplex(P, cfg=CFG, allow_mixed_sign=True)
    assert result.method == "projected-ascent"
    assert result.value == pytest.approx(1.0, abs=1e-9)


def test_structured_seeds():
    P = poly(3, (1, (1, 1, 1)))
    seeds = structured_seeds(P)
    for target in [(1, 0, 0), (0.5, 0.5, 0), (1 / 3, 1 / 3, 1 / 3)]:
        assert _contains(seeds, target)

    q = build_price_polynomial(parse_permutation("132"), 2)
    assert _contains(structured_seeds(q), (1 / 3, 2 / 3))

    for seed in structured_seeds(P, forced_zero=[1]):
        assert seed[1] == 0


def test_optimizer_beats_grid_oracle():
    """Best found value is never worse than the denominator-200 lattice"""
    cases = [
        combine(parse_combination("1*132"), "plain", 3),
        combine(parse_combination("1*2143 + 1*132"), "plain", 3),
        combine(parse_combination("1*1243"), "plain", 3),
        combine(parse_combination("1*123 + 1/2*321"), "plain", 3),
        poly(3, (1, (2, 0, 4)), (2, (1, 1, 1)), (1, (0, 3, 0))),
    ]
    for P in cases:
        grid_max, _ = grid_optimum(P, 200, "max")
        assert maximize_on_simplex(P, cfg=WIDE).value >= grid_max - 1e-6
        grid_min, _ = grid_optimum(P, 200, "min")
        assert minimize_on_simplex(P, cfg=WIDE).value <= grid_min + 1e-6


def test_results_are_deterministic():
    P = combine(parse_combination("1*2143 + 1*132"), "plain", 4)
    first = maximize_on_simplex(P, cfg=CFG)
    second = maximize_on_simplex(P, cfg=CFG)
    assert first == second
    assert repr(first) == repr(second)


def test_parallel_starts_match_serial():
    P = combine(parse_combination("1*132"), "plain", 3)
    serial = maximize_on_simplex(P, cfg=CFG)
    parallel = maximize_on_simplex(P, cfg=OptimizerConfig(starts=8, seed=0, workers=2))
    assert parallel.value == serial.value
    assert parallel.point == serial.point


def test_multiplicative_updates_never_descend():
    P = combine(parse_combination("1*2143 + 1*1243"), "plain", 4)
    result = maximize_on_simplex(P, cfg=OptimizerConfig(starts=16, seed=3, workers=1, debug=True))
    assert result.ascent_violations == 0


def test_extra_seed_dimension_is_checked():
    with pytest.raises(ValueError):
        maximize_on_simplex(poly(2, (3, (1, 2))), cfg=CFG, extra_seeds=[[1.0, 0.0, 0.0]])


def test_project_onto_simplex():
    x = project_onto_simplex(np.array([0.8, 0.6, -0.2]))
    assert x.sum() == pytest.approx(1.0)
    assert np.all(x >= 0)
    assert x == pytest.approx([0.6, 0.4, 0.0])
    on_simplex = np.array([0.2, 0.3, 0.5])
    assert project_onto_simplex(on_simplex) == pytest.approx(on_simplex)


def test_simplex_point_validation():
    with pytest.raises(ValueError):
        SimplexPoint((0.5, 0.6))
    with pytest.raises(ValueError):
        SimplexPoint((1.5, -0.5))
    assert len(SimplexPoint((0.25, 0.75))) == 2


def test_simplex_lattice():
    assert list(simplex_lattice(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(simplex_lattice(3, 4))) == 15
