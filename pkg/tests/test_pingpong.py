import json
import random
from fractions import Fraction

import numpy as np
import pytest

from circorder.freegroup import ball
from circorder.orders import check_cocycle, compare_on_ball, materialize, order_from_action
from circorder.pingpong import (
    ConfigError,
    ConfigOracle,
    PingPongConfig,
    Slot,
    _complementary_runs,
    boundary_word,
    comp,
    deck_commutes,
    eval_triple,
    gap_orbit_check,
    klift,
    klift_is_realization,
    linear_part_generator,
    lifted_rotation,
    preset,
    preset_schottky,
    random_config,
    realize_moebius,
    realize_pl,
    validate,
)

from conftest import W


def test_schottky_preset_layout(schottky1):
    assert [s.label(with_index=False) for s in schottky1.slots[1:]] == ["D(a)", "D(b)", "D(A)", "D(B)"]
    assert schottky1.basepoint_slot == 0
    assert validate(schottky1).ok
    assert validate(preset_schottky(2)).ok
    assert preset_schottky(2).rank == 4


def test_preset_parser():
    assert preset("schottky1") == preset_schottky(1)
    assert preset("schottky(2)") == preset_schottky(2)
    assert preset("schottky1/3") == klift(preset_schottky(1), 3)
    with pytest.raises(ConfigError):
        preset("hexagon")


def test_json_round_trip(schottky1, three_boundary):
    for cfg in (schottky1, three_boundary, klift(schottky1, 3)):
        back = PingPongConfig.loads(cfg.dumps())
        assert back == cfg
        assert back.lift == cfg.lift


def test_malformed_json_is_config_error():
    with pytest.raises(ConfigError):
        PingPongConfig.loads("{")
    with pytest.raises(ConfigError):
        PingPongConfig.loads(json.dumps({"rank": 2, "slots": [{"kind": "nope"}], "containment": {}}))
    with pytest.raises(ConfigError):
        PingPongConfig.loads(json.dumps({"rank": 2}))


def _mutate(cfg, letter, slot, target):
    cont = {s: dict(m) for s, m in cfg.containment.items()}
    cont[letter][slot] = target
    return PingPongConfig(cfg.rank, cfg.slots, cont)


def test_validate_schema_errors(schottky1):
    two_base = PingPongConfig(2, schottky1.slots + (Slot.basepoint(),), schottky1.containment)
    assert any(v.kind == "schema" for v in validate(two_base).violations)
    cont = {s: dict(m) for s, m in schottky1.containment.items()}
    del cont[1][0]
    partial = PingPongConfig(2, schottky1.slots, cont)
    assert "not total" in str(validate(partial))
    assert "out of range" in str(validate(_mutate(schottky1, 1, 0, 3)))
    # the inverse component is not in the domain
    inv = schottky1.components(-1)[0]
    assert "inverse" in str(validate(_mutate(schottky1, 1, inv, 0)))


def test_validate_connectivity_and_order():
    rng = random.Random(5)
    found_conn = found_other = False
    for _ in range(200):
        cfg = random_config(rng, 2, 3)
        assert validate(cfg).ok
        for s in (1, 2):
            if cfg.count(s) < 2:
                continue
            for run in _complementary_runs(cfg, s):
                if len(run) >= 2:
                    t = cfg.containment[s][run[0]]
                    bad = _mutate(cfg, s, run[1], (t + 1) % cfg.count(s))
                    kinds = {v.kind for v in validate(bad).violations}
                    assert "connectivity" in kinds
                    found_conn = True
                    break
            i = next(iter(cfg.containment[s]))
            other = _mutate(cfg, s, i, (cfg.containment[s][i] + 1) % cfg.count(s))
            if not validate(other).ok:
                found_other = True
    assert found_conn and found_other


def test_comp_and_eval_triple_basics(schottky1):
    assert comp(schottky1, W("e")) == 0
    assert comp(schottky1, W("a")) == 1
    assert comp(schottky1, W("Ba")) == 4
    assert eval_triple(schottky1, W("e"), W("a"), W("b")) == 1
    assert eval_triple(schottky1, W("e"), W("b"), W("a")) == -1
    assert eval_triple(schottky1, W("a"), W("a"), W("b")) == 0


def test_eval_triple_matches_vectorized_table(three_boundary):
    els = ball(2, 2)
    t = ConfigOracle(three_boundary).table(els)
    rng = random.Random(1)
    for _ in range(400):
        i, j, k = (rng.randrange(len(els)) for _ in range(3))
        assert eval_triple(three_boundary, els[i], els[j], els[k]) == t[i, j, k]


@pytest.mark.parametrize("name", ["schottky1", "three_boundary"])
def test_symbolic_matches_both_realizations(name):
    cfg = preset(name)
    sym = materialize(ConfigOracle(cfg), 3)
    assert check_cocycle(sym).ok
    for act in (realize_moebius(cfg), realize_pl(cfg)):
        assert compare_on_ball(sym, order_from_action(act), 3, 2) is None


@pytest.mark.parametrize("seed", range(20))
def test_random_configs(seed):
    cfg = random_config(random.Random(seed), 2, 2)
    assert validate(cfg).ok
    sym = materialize(ConfigOracle(cfg), 2)
    assert check_cocycle(sym).ok
    assert compare_on_ball(sym, order_from_action(realize_pl(cfg)), 2, 2) is None


def test_klift_identity_and_validity(schottky1):
    assert klift(schottky1, 1) is schottky1
    for n in (1, 2):
        for k in (2, 3, 5):
            lifted = klift(preset_schottky(n), k)
            assert validate(lifted).ok
            assert lifted.count(1) == k
            assert len(lifted.slots) == 1 + 4 * n * k


def test_klift_needs_connected_domains():
    cfg = next(c for c in (random_config(random.Random(s), 2, 2) for s in range(50)) if not c.connected)
    with pytest.raises(ConfigError):
        klift(cfg, 2)


@pytest.mark.parametrize("k", [2, 3])
def test_lifted_action_matches_lifted_config(schottky1, lifted_moebius, k):
    act = lifted_moebius(1, k)
    assert act.period == k
    assert compare_on_ball(ConfigOracle(klift(schottky1, k)), order_from_action(act), 3, 2) is None
    assert deck_commutes(act, 3) == []


def test_klift_is_realization():
    assert klift_is_realization(1, 4)[0]
    assert klift_is_realization(2, 5)[0]
    ok, msg = klift_is_realization(2, 3)
    assert not ok and "sufficient" in msg


def test_boundary_word():
    assert str(boundary_word(1)) == "aBAb"
    assert str(boundary_word(2)) == "aBAbcDCd"
    assert linear_part_generator(klift(preset_schottky(1), 3)) == boundary_word(1) ** 3
    with pytest.raises(ConfigError):
        linear_part_generator(preset("three_boundary"))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_boundary_word_rotation_on_lift(lifted_moebius, k):
    act = lifted_moebius(1, k) if k > 1 else None
    if act is None:
        from circorder.pingpong import lift_action

        act = lift_action(realize_moebius(preset_schottky(1)), 1)
    assert lifted_rotation(act, boundary_word(1), 16) == Fraction(1, k) % 1


def test_gap_scan(schottky1, three_boundary):
    rep = gap_orbit_check(realize_pl(schottky1), 3)
    assert len(rep.gaps) == 4 and rep.unvisited == []
    rep3 = gap_orbit_check(realize_pl(three_boundary), 4)
    assert len(rep3.unvisited) == 2
    text = rep3.render(three_boundary)
    assert "heuristic" in text and "unvisited gaps: 2" in text


def test_realize_pl_rejects_invalid(schottky1):
    with pytest.raises(ConfigError):
        realize_pl(_mutate(schottky1, 1, 0, 3))


def test_orbit_points_stay_in_their_components(schottky1):
    act = realize_pl(schottky1)
    for w in ball(2, 3)[1:]:
        lo, hi = act.arcs[comp(schottky1, w)]
        t = act.act(w).turn()
        assert (t - lo) % 1 <= (hi - lo) % 1
    assert np.all(ConfigOracle(schottky1).table(ball(2, 1)) == materialize(order_from_action(act), 1).values)
