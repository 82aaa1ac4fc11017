import random
from fractions import Fraction

import pytest

from circorder.circle import ProjectivePoint as P
from circorder.freegroup import ball
from circorder.harness import (
    ExperimentError,
    agreement_radius,
    find_divergent_basepoints,
    five_point_order,
    perturbed,
    random_bump,
    random_pl_through,
    run_basepoint_walk,
    run_singleton_neighborhood,
    run_stability,
    safe_margin,
    sample_five_point_action,
)
from circorder.pingpong import realize_pl


def test_random_pl_through_hits_constraints():
    rng = random.Random(0)
    pairs = [(Fraction(1, 8), Fraction(1, 2)), (Fraction(5, 8), Fraction(3, 4))]
    for _ in range(20):
        f = random_pl_through(rng, pairs)
        for x, y in pairs:
            assert f.apply_turn(x) == y


def test_five_point_sampler():
    rng = random.Random(4)
    for _ in range(20):
        assert five_point_order(sample_five_point_action(rng))


def test_random_bump_displacement():
    rng = random.Random(2)
    margin = Fraction(1, 50)
    for _ in range(20):
        bump = random_bump(rng, margin)
        for j in range(64):
            t = Fraction(j, 64)
            d = (bump.apply_turn(t) - t) % 1
            assert min(d, 1 - d) < margin


def test_singleton_small_run_is_deterministic():
    r1 = run_singleton_neighborhood(7, 5, 3, control_trials=5)
    r2 = run_singleton_neighborhood(7, 5, 3, control_trials=5)
    assert r1.dumps() == r2.dumps()
    assert r1.passed == 5 and r1.failed == 0
    assert r1.arms["control (unconstrained)"]["disagreements"] > 0
    assert "main arm: 5 passed" in r1.summary()


def test_singleton_rejects_bad_arguments():
    with pytest.raises(ExperimentError):
        run_singleton_neighborhood(0, 0, 3)


def test_safe_margin_and_perturbation(schottky1):
    act = realize_pl(schottky1)
    bound = safe_margin(act)
    assert 0 < bound < Fraction(1, 10)
    p = perturbed(act, random.Random(1), bound / 2)
    for s in (1, 2):
        assert p.maps[s].compose(p.maps[-s]).is_identity()


def test_stability_small_run(schottky1):
    act = realize_pl(schottky1)
    rep = run_stability(schottky1, safe_margin(act) / 2, seed=3, trials=8, radius=3)
    assert rep.passed == 8
    assert rep.arms["control (large perturbation)"]["changed"] > 0
    assert rep.dumps() == run_stability(schottky1, safe_margin(act) / 2, seed=3, trials=8, radius=3).dumps()


def test_stability_rejects_uncertified_margin(schottky1):
    with pytest.raises(ExperimentError):
        run_stability(schottky1, Fraction(1, 5), seed=0, trials=1, radius=2)


def test_agreement_radius_same_point(schottky1):
    act = realize_pl(schottky1)
    x = act.basepoint
    assert agreement_radius(act, x, x, 3) == (3, None)


def test_basepoint_walk_inside_one_gap(schottky1):
    act = realize_pl(schottky1)
    # the basepoint's region minus the arcs: a small walk around x0
    t0 = act.basepoint.turn()
    path = [t0 - Fraction(1, 200), t0, t0 + Fraction(1, 200)]
    rep = run_basepoint_walk(schottky1, path, 3)
    assert rep.failed == 0
    assert all(p["same_gap"] for p in rep.details["pairs"])
    assert all(p["agreement_radius"] == 3 for p in rep.details["pairs"])


def test_divergent_basepoints(three_boundary):
    found = find_divergent_basepoints(three_boundary, agree=2, differ=3)
    assert found is not None
    x, y, triple = found
    act = realize_pl(three_boundary)
    r, diff = agreement_radius(act, x, y, 3)
    assert r == 2 and diff == triple
    assert len(ball(2, 2)) == 17
    assert isinstance(x, P)
