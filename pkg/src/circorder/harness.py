"""Repeatable experiments on sampled exact actions.

Every experiment is a pure function of its spec; reports serialize to JSON
with sorted keys so reruns are byte-identical.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .circle import PLCircleMap, ProjectivePoint, cyclic_ord
from .freegroup import ReducedWord, ball
from .orders import StabilizerViolation, order_from_action
from .pingpong import (
    ConfigOracle,
    PingPongConfig,
    RealizedAction,
    cylinder_arcs,
    cylinder_gap_points,
    preset_schottky,
    realize_pl,
)

DENOMINATOR_BOUND = 2**10
MAX_ATTEMPTS = 20000


class ExperimentError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    experiment: str
    seed: int
    trials: int
    radius: int
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    passed: int = 0
    failed: int = 0
    witnesses: list = field(default_factory=list)
    arms: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "passed": self.passed,
            "failed": self.failed,
            "witnesses": self.witnesses,
            "arms": self.arms,
            "details": self.details,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True, default=str)

    def summary(self) -> str:
        s = self.spec
        lines = [f"{s.experiment} seed={s.seed} trials={s.trials} radius={s.radius}"]
        lines.append(f"  main arm: {self.passed} passed, {self.failed} failed")
        for name, arm in sorted(self.arms.items()):
            lines.append(f"  {name}: " + ", ".join(f"{k}={v}" for k, v in sorted(arm.items()) if k != "witnesses"))
        for w in self.witnesses[:3]:
            lines.append(f"  witness: {json.dumps(w, sort_keys=True, default=str)[:200]}")
        return "\n".join(lines)


def _rng(seed: int, *salt) -> random.Random:
    return random.Random(":".join(str(x) for x in (seed,) + salt))


def _rational(rng: random.Random, den: int = DENOMINATOR_BOUND) -> Fraction:
    return Fraction(rng.randrange(den), den)


def random_pl_map(rng: random.Random, pieces: int | None = None, den: int = DENOMINATOR_BOUND) -> PLCircleMap:
    """Random PL circle homeomorphism with dyadic breakpoints and values."""
    p = pieces or rng.randint(2, 6)
    while True:
        bs = sorted({_rational(rng, den) for _ in range(p)})
        vs = sorted({_rational(rng, den) for _ in range(p)})
        if len(bs) == len(vs) == p:
            shift = rng.randrange(p)
            vs = vs[shift:] + vs[:shift]
            return PLCircleMap(tuple(bs), tuple(vs))


def _action(maps: dict, x0, rank: int = 2) -> RealizedAction:
    full = {}
    for i, f in maps.items():
        full[i] = f
        full[-i] = f.inverse()
    return RealizedAction(rank, full, x0, 1, None, None, "pl-sample")


def _action_json(act: RealizedAction) -> dict:
    return {
        "basepoint": act.basepoint.to_json(),
        "maps": {str(i): act.maps[i].to_json() for i in sorted(act.maps) if i > 0},
    }


def _table(act: RealizedAction, elements) -> np.ndarray:
    return order_from_action(act).table(elements)


def _first_diff(t1: np.ndarray, t2: np.ndarray, els) -> list[str] | None:
    d = np.argwhere(t1 != t2)
    if len(d) == 0:
        return None
    i, j, k = d[0]
    return [str(els[i]), str(els[j]), str(els[k])]


def random_pl_through(rng: random.Random, pairs: Sequence[tuple[Fraction, Fraction]], extra: int = 2) -> PLCircleMap:
    """Random PL homeomorphism taking each x to y (turn coordinates), with up
    to ``extra`` random breakpoints between consecutive prescribed points."""
    pairs = sorted(pairs)
    bs, vs = [], []
    n = len(pairs)
    for i, (x, y) in enumerate(pairs):
        bs.append(x)
        vs.append(y)
        nx, ny = pairs[(i + 1) % n]
        dx = (nx - x) % 1 or Fraction(1)
        dy = (ny - y) % 1 or Fraction(1)
        k = rng.randint(0, extra)
        us = sorted({Fraction(rng.randrange(1, 64), 64) for _ in range(k)})
        ws = sorted({Fraction(rng.randrange(1, 64), 64) for _ in range(len(us))})
        if len(ws) != len(us):
            continue
        for u, w in zip(us, ws):
            bs.append((x + u * dx) % 1)
            vs.append((y + w * dy) % 1)
    return PLCircleMap(tuple(bs), tuple(vs))


def sample_five_point_action(rng: random.Random) -> RealizedAction:
    """Random PL action with x0, aBAb x0, b x0, Ab x0, BAb x0 counterclockwise:
    pick the five points, then a and b through the forced values."""
    while True:
        pts = sorted({_rational(rng) for _ in range(5)})
        if len(pts) == 5:
            break
    x0, p4, p1, p2, p3 = pts
    b = random_pl_through(rng, [(x0, p1), (p3, p2)])
    a = random_pl_through(rng, [(p2, p1), (p3, p4)])
    return _action({1: a, 2: b}, ProjectivePoint.from_turn(x0))


FIVE_POINTS = ["e", "aBAb", "b", "Ab", "BAb"]


def five_point_order(act: RealizedAction) -> bool:
    pts = [act.act(ReducedWord.parse(w, 2)) for w in FIVE_POINTS]
    if len(set(pts)) < 5:
        return False
    return all(cyclic_ord(pts[0], pts[i], pts[i + 1]) == 1 for i in range(1, 4))


def _sample(rng: random.Random, constrained: bool, elements) -> tuple[RealizedAction, int]:
    for attempt in range(1, MAX_ATTEMPTS + 1):
        if constrained:
            act = sample_five_point_action(rng)
            if not five_point_order(act):
                raise ExperimentError("constructed action violates the five-point order")
        else:
            act = _action({1: random_pl_map(rng), 2: random_pl_map(rng)}, ProjectivePoint.from_turn(_rational(rng)))
        try:
            _table(act, elements)
        except StabilizerViolation:
            continue
        return act, attempt
    raise ExperimentError(f"sampler found no admissible action in {MAX_ATTEMPTS} attempts")


def run_singleton_neighborhood(seed: int, trials: int, radius: int, control_trials: int | None = None) -> ExperimentReport:
    """Sampled actions with the five points x0, aBAb x0, b x0, Ab x0, BAb x0
    counterclockwise should all induce the Schottky order on the ball."""
    if trials < 1 or radius < 2:
        raise ExperimentError("need trials >= 1 and radius >= 2")
    control_trials = trials if control_trials is None else control_trials
    spec = ExperimentSpec("singleton-neighborhood", seed, trials, radius, {"control_trials": control_trials})
    rep = ExperimentReport(spec)
    els = ball(2, radius)
    ref = ConfigOracle(preset_schottky(1)).table(els)
    attempts = 0
    for t in range(trials):
        act, n = _sample(_rng(seed, "main", t), True, els)
        attempts += n
        diff = _first_diff(_table(act, els), ref, els)
        if diff is None:
            rep.passed += 1
        else:
            rep.failed += 1
            rep.witnesses.append({"trial": t, "triple": diff, "action": _action_json(act)})
    disagree = 0
    first = None
    for t in range(control_trials):
        act, _ = _sample(_rng(seed, "control", t), False, els)
        diff = _first_diff(_table(act, els), ref, els)
        if diff is not None:
            disagree += 1
            if first is None:
                first = {"trial": t, "triple": diff, "action": _action_json(act)}
    rep.arms["control (unconstrained)"] = {"trials": control_trials, "disagreements": disagree}
    if first:
        rep.details["control_witness"] = first
    rep.details["sampling_attempts"] = attempts
    return rep


# --- stability -------------------------------------------------------------


def safe_margin(act: RealizedAction) -> Fraction:
    """Largest displacement bound under which every containment certificate
    of a PL realization survives: the least slack between an image arc and
    the boundary of its target."""
    cfg = act.cfg
    best = None
    for s in cfg.alphabet.letters:
        comps = cfg.components(-s)
        for c_prev, c_next in zip(comps, comps[1:] + comps[:1]):
            a = act.maps[s].apply_turn(act.arcs[c_prev][1])
            b = act.maps[s].apply_turn(act.arcs[c_next][0])
            for lo, hi in (act.arcs[cfg.slot_of(s, t)] for t in range(cfg.count(s))):
                if lo < a < hi and lo < b < hi:
                    slack = min(a - lo, hi - b)
                    best = slack if best is None else min(best, slack)
    return best


def random_bump(rng: random.Random, margin: Fraction, pieces: int = 6) -> PLCircleMap:
    """PL homeomorphism moving every point by strictly less than margin."""
    if margin == 0:
        return PLCircleMap.identity()
    bs = sorted({_rational(rng) for _ in range(pieces)})
    gaps = [(bs[(i + 1) % len(bs)] - bs[i]) % 1 or Fraction(1) for i in range(len(bs))]
    m = min([margin] + [g / 3 for g in gaps])
    ds = [m * Fraction(rng.randrange(-999, 1000), 1000) for _ in bs]
    return PLCircleMap(tuple(bs), tuple(b + d for b, d in zip(bs, ds)))


def perturbed(act: RealizedAction, rng: random.Random, margin: Fraction, rotate: bool = False) -> RealizedAction:
    """Each generator followed by a random bump moving points by less than
    margin; with ``rotate`` the bump is also rotated by up to margin."""
    maps = {}
    for i in range(1, act.rank + 1):
        bump = random_bump(rng, margin)
        if rotate:
            bump = PLCircleMap.rotation(margin * Fraction(rng.randrange(1, 1000), 1000)).compose(bump)
        f = bump.compose(act.maps[i])
        maps[i] = f
        maps[-i] = f.inverse()
    return act.with_maps(maps)


def run_stability(
    cfg: PingPongConfig, margin: Fraction, seed: int, trials: int, radius: int, control_margin: Fraction = Fraction(1, 4)
) -> ExperimentReport:
    act = realize_pl(cfg)
    bound = safe_margin(act)
    margin = Fraction(margin)
    if margin < 0 or margin >= bound:
        raise ExperimentError(f"margin {margin} is not below the certified bound {bound}")
    spec = ExperimentSpec(
        "stability", seed, trials, radius, {"config": cfg.name or "custom", "margin": margin, "bound": bound}
    )
    rep = ExperimentReport(spec)
    els = ball(cfg.rank, radius)
    ref = _table(act, els)
    ref_bytes = ref.tobytes()
    for t in range(trials):
        p = perturbed(act, _rng(seed, "main", t), margin)
        tab = _table(p, els)
        if tab.tobytes() == ref_bytes:
            rep.passed += 1
        else:
            rep.failed += 1
            rep.witnesses.append({"trial": t, "triple": _first_diff(tab, ref, els), "action": _action_json(p)})
    changed = 0
    for t in range(trials):
        p = perturbed(act, _rng(seed, "control", t), Fraction(control_margin), rotate=True)
        try:
            tab = _table(p, els)
        except StabilizerViolation:
            changed += 1
            continue
        changed += tab.tobytes() != ref_bytes
    rep.arms["control (large perturbation)"] = {"trials": trials, "margin": str(control_margin), "changed": changed}
    return rep


# --- basepoints ---------------------------------------------------------------


def agreement_radius(act: RealizedAction, x, y, radius: int):
    """Largest r <= radius on whose ball the orders from x and y agree, and
    the first differing triple one step further (if any)."""
    els = ball(act.rank, radius)
    tx = _table(act.with_basepoint(x), els)
    ty = _table(act.with_basepoint(y), els)
    for r in range(radius + 1):
        n = len(ball(act.rank, r))
        sub = np.s_[:n, :n, :n]
        diff = _first_diff(tx[sub], ty[sub], els[:n])
        if diff is not None:
            return r - 1, diff
    return radius, None


def run_basepoint_walk(cfg: PingPongConfig, path: Sequence, radius: int) -> ExperimentReport:
    """Agreement radius between consecutive basepoints (turn coordinates)."""
    act = realize_pl(cfg)
    pts = [ProjectivePoint.from_turn(Fraction(t)) for t in path]
    spec = ExperimentSpec(
        "basepoint-walk", 0, max(0, len(pts) - 1), radius, {"config": cfg.name or "custom", "path": [str(Fraction(t)) for t in path]}
    )
    rep = ExperimentReport(spec)
    pairs = []
    for x, y in zip(pts, pts[1:]):
        r, diff = agreement_radius(act, x, y, radius)
        entry = {"from": str(x.turn()), "to": str(y.turn()), "agreement_radius": r, "witness": diff}
        same_gap = _same_gap(act, x, y, radius)
        entry["same_gap"] = same_gap
        if same_gap and diff is not None:
            rep.failed += 1
            rep.witnesses.append(entry)
        else:
            rep.passed += 1
        pairs.append(entry)
    rep.details["pairs"] = pairs
    return rep


def _same_gap(act: RealizedAction, x, y, radius: int) -> bool:
    """Certified: one arc between x and y misses every level-(radius + 2)
    cylinder, and the cylinders of any level cover the limit set."""
    cyl = cylinder_arcs(act, radius + 2)
    tx, ty = x.turn(), y.turn()
    for lo, hi in ((tx, ty), (ty, tx)):
        span = (hi - lo) % 1
        if not any((a - lo) % 1 <= span or (lo - a) % 1 <= (b - a) % 1 for a, b in cyl):
            return True
    return False


def find_divergent_basepoints(cfg: PingPongConfig, agree: int = 2, differ: int = 3, level: int | None = None):
    """Among gap midpoints of the level cylinders, find two basepoints whose
    orders agree on ball ``agree`` and differ on ball ``differ``.

    Returns (x, y, first differing triple) or None.
    """
    act = realize_pl(cfg)
    level = differ + 1 if level is None else level
    els = ball(cfg.rank, differ)
    n_agree = len(ball(cfg.rank, agree))
    seen: dict = {}
    for t in cylinder_gap_points(act, level):
        x = ProjectivePoint.from_turn(t)
        try:
            tab = _table(act.with_basepoint(x), els)
        except StabilizerViolation:
            continue
        key = tab[:n_agree, :n_agree, :n_agree].tobytes()
        for y, other in seen.get(key, []):
            diff = _first_diff(tab, other, els)
            if diff is not None:
                return y, x, diff
        seen.setdefault(key, []).append((x, tab))
    return None
