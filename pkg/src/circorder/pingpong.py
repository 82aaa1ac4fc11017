"""Combinatorial ping-pong configurations and their exact realizations.

A configuration lists the components of every attracting domain D(s), plus a
marker for the basepoint's gap, in counterclockwise order, together with the
containment data: which component of D(s) receives each slot under s. That
data alone determines the cyclic order of the basepoint's orbit.
"""

from __future__ import annotations

import json
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .circle import (
    LiftedMap,
    MoebiusMap,
    PLCircleMap,
    ProjectivePoint,
    cyclic_ord,
    cyclic_sign,
)
from .freegroup import (
    Alphabet,
    ReducedWord,
    WordParseError,
    ball,
    commutator,
    letter_name,
)
from .orders import OrderOracle

BASEPOINT = "basepoint"
COMPONENT = "component"


class ConfigError(ValueError):
    """Malformed configuration data (schema level)."""


class RealizationError(RuntimeError):
    """A constructed action failed its exact certificate."""


def parse_letter(name: str, rank: int) -> int:
    w = ReducedWord.parse(name, rank)
    if len(w) != 1:
        raise ConfigError(f"not a single letter: {name!r}")
    return w.letters[0]


@dataclass(frozen=True)
class Slot:
    kind: str
    letter: int = 0
    index: int = 0

    @classmethod
    def basepoint(cls) -> "Slot":
        return cls(BASEPOINT)

    @classmethod
    def component(cls, letter: int, index: int = 0) -> "Slot":
        return cls(COMPONENT, letter, index)

    @property
    def is_basepoint(self) -> bool:
        return self.kind == BASEPOINT

    def label(self, with_index: bool = True) -> str:
        if self.is_basepoint:
            return "x0"
        name = letter_name(self.letter)
        return f"D{self.index}({name})" if with_index else f"D({name})"

    def to_json(self) -> dict:
        if self.is_basepoint:
            return {"kind": BASEPOINT}
        return {"kind": COMPONENT, "letter": letter_name(self.letter), "index": self.index}


@dataclass(frozen=True, eq=False)
class PingPongConfig:
    rank: int
    slots: tuple
    # letter -> {slot index: component index of that letter}
    containment: dict
    name: str | None = None
    # (base config, k) when this config is the standard k-lift of base
    lift: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        cont = {int(s): {int(i): int(j) for i, j in m.items()} for s, m in self.containment.items()}
        object.__setattr__(self, "containment", cont)
        lookup = {}
        for i, slot in enumerate(self.slots):
            lookup.setdefault(slot, i)
        object.__setattr__(self, "_lookup", lookup)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PingPongConfig):
            return NotImplemented
        return self.rank == other.rank and self.slots == other.slots and self.containment == other.containment

    def __hash__(self) -> int:
        return hash((self.rank, self.slots))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.rank)

    @property
    def basepoint_slot(self) -> int:
        for i, s in enumerate(self.slots):
            if s.is_basepoint:
                return i
        raise ConfigError("no basepoint marker")

    def slot_of(self, letter: int, index: int) -> int:
        return self._lookup[Slot.component(letter, index)]

    def components(self, letter: int) -> list[int]:
        """Slot positions of the components of D(letter), in cyclic order."""
        return [i for i, s in enumerate(self.slots) if not s.is_basepoint and s.letter == letter]

    def count(self, letter: int) -> int:
        return len(self.components(letter))

    @property
    def connected(self) -> bool:
        return all(self.count(s) == 1 for s in self.alphabet.letters)

    def target(self, letter: int, slot: int) -> int:
        """Slot position receiving ``slot`` under ``letter``."""
        return self.slot_of(letter, self.containment[letter][slot])

    # --- serialization

    def to_json(self) -> dict:
        out = {
            "rank": self.rank,
            "slots": [s.to_json() for s in self.slots],
            "containment": {
                letter_name(s): {str(i): j for i, j in sorted(self.containment[s].items())}
                for s in self.alphabet.letters
                if s in self.containment
            },
        }
        if self.name is not None:
            out["name"] = self.name
        if self.lift is not None:
            base, k = self.lift
            out["lift"] = {"k": k, "base": base.to_json()}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "PingPongConfig":
        try:
            rank = int(data["rank"])
            if rank < 1:
                raise ConfigError("rank must be positive")
            slots = []
            for s in data["slots"]:
                if s["kind"] == BASEPOINT:
                    slots.append(Slot.basepoint())
                elif s["kind"] == COMPONENT:
                    slots.append(Slot.component(parse_letter(s["letter"], rank), int(s.get("index", 0))))
                else:
                    raise ConfigError(f"unknown slot kind {s['kind']!r}")
            containment = {}
            for name, m in data["containment"].items():
                containment[parse_letter(name, rank)] = {int(i): int(j) for i, j in m.items()}
            lift = None
            if "lift" in data:
                lift = (cls.from_json(data["lift"]["base"]), int(data["lift"]["k"]))
            return cls(rank, tuple(slots), containment, data.get("name"), lift)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ConfigError(f"malformed config: {exc!r}") from exc
        except WordParseError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def loads(cls, text: str) -> "PingPongConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)


# --- validation ---------------------------------------------------------------


@dataclass
class ConfigViolation:
    kind: str
    letter: int | None
    slot: int | None
    message: str

    def __str__(self) -> str:
        where = []
        if self.letter is not None:
            where.append(f"letter {letter_name(self.letter)}")
        if self.slot is not None:
            where.append(f"slot {self.slot}")
        return f"{self.kind} ({', '.join(where)}): {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def _complementary_runs(cfg: PingPongConfig, letter: int) -> list[list[int]]:
    """Slots between consecutive components of D(letter^-1), in cyclic order.

    Run i follows the i-th component of D(letter^-1) in slot order.
    """
    excl = cfg.components(-letter)
    n = len(cfg.slots)
    runs = []
    for a, b in zip(excl, excl[1:] + [excl[0] + n]):
        runs.append([i % n for i in range(a + 1, b)])
    return runs


def _image_starts(ranks: list[int]) -> list[int]:
    """Rotations of the run sequence along which the target ranks are
    non-decreasing: the unique post-descent run, or any run if all agree."""
    p = len(ranks)
    descents = [i for i in range(p) if ranks[i] < ranks[i - 1]]
    if not descents:
        return list(range(p))
    return descents[:1]


def _induced_inverse(cfg: PingPongConfig, s: int, targets: list[int], start: int) -> dict:
    """Containment data of s^-1 forced by a map realizing s's data whose run
    images are laid out starting from run ``start``."""
    comps = cfg.components(-s)
    p = len(comps)
    tslots = cfg.components(s)
    rank_of = {cfg.slots[q].index: r for r, q in enumerate(tslots)}
    order = [(start + j) % p for j in range(p)]
    out = {}
    n = len(cfg.slots)
    for j, tq in enumerate(tslots):
        last = None
        for i in order:
            if rank_of[targets[i]] <= j:
                last = i
        if last is None:
            last = order[-1]
        # the gap after the image of run ``last`` is covered by the image of
        # the inverse component that follows that run
        idx = cfg.slots[comps[(last + 1) % p]].index
        nxt = tslots[(j + 1) % len(tslots)]
        span = (nxt - tq) % n or n
        for d in range(1, span):
            out[(tq + d) % n] = idx
    return out


def _matching_start(cfg: PingPongConfig, s: int) -> int | None:
    targets = _run_targets(cfg, s)
    tslots = cfg.components(s)
    rank_of = {cfg.slots[q].index: r for r, q in enumerate(tslots)}
    ranks = [rank_of[t] for t in targets]
    for start in _image_starts(ranks):
        if _induced_inverse(cfg, s, targets, start) == cfg.containment[-s]:
            return start
    return None


def validate(cfg: PingPongConfig) -> ValidationReport:
    rep = ValidationReport()
    bad = rep.violations
    slots = cfg.slots
    n_base = sum(1 for s in slots if s.is_basepoint)
    if n_base != 1:
        bad.append(ConfigViolation("schema", None, None, f"expected one basepoint marker, found {n_base}"))
    seen = set()
    for i, s in enumerate(slots):
        if s in seen and not s.is_basepoint:
            bad.append(ConfigViolation("schema", s.letter, i, f"duplicate slot {s.label()}"))
        seen.add(s)
        if not s.is_basepoint and not (1 <= abs(s.letter) <= cfg.rank):
            bad.append(ConfigViolation("schema", None, i, "letter outside the alphabet"))
    letters = cfg.alphabet.letters
    for s in letters:
        idx = sorted(slots[i].index for i in cfg.components(s))
        if not idx:
            bad.append(ConfigViolation("schema", s, None, "letter has no component"))
        elif idx != list(range(len(idx))):
            bad.append(ConfigViolation("schema", s, None, f"component indices {idx} are not 0..m-1"))
    for s in cfg.containment:
        if s not in letters:
            bad.append(ConfigViolation("schema", s, None, "containment for a letter outside the alphabet"))
    if bad:
        return rep

    for s in letters:
        m = cfg.containment.get(s, {})
        excl = set(cfg.components(-s))
        m_s = cfg.count(s)
        for i in range(len(slots)):
            if i in excl:
                if i in m:
                    bad.append(
                        ConfigViolation("schema", s, i, f"domain includes {slots[i].label()}, a component of the inverse")
                    )
            elif i not in m:
                bad.append(ConfigViolation("schema", s, i, "containment not total"))
            elif not 0 <= m[i] < m_s:
                bad.append(ConfigViolation("schema", s, i, f"target index {m[i]} out of range"))
        for i in m:
            if not 0 <= i < len(slots):
                bad.append(ConfigViolation("schema", s, i, "slot reference out of range"))
    if bad:
        return rep

    for s in letters:
        m = cfg.containment[s]
        comps = cfg.components(s)
        rank_of = {slots[p].index: r for r, p in enumerate(comps)}
        seq = [(i, rank_of[m[i]]) for i in range(len(slots)) if i in m]
        steps = sum((seq[(j + 1) % len(seq)][1] - seq[j][1]) % len(comps) for j in range(len(seq)))
        if steps not in (0, len(comps)):
            bad.append(
                ConfigViolation(
                    "order-compatibility", s, None, "targets are not weakly cyclically monotone along the sources"
                )
            )
        for run in _complementary_runs(cfg, s):
            targets = {m[i] for i in run}
            if len(targets) > 1:
                bad.append(
                    ConfigViolation(
                        "connectivity",
                        s,
                        run[0],
                        "sources in one complementary arc of the inverse domain have different targets",
                    )
                )
    if bad:
        return rep
    for s in letters:
        if s > 0 and _matching_start(cfg, s) is None:
            bad.append(
                ConfigViolation(
                    "inverse-consistency", s, None, "containment of the inverse letter is not the one forced by this letter's"
                )
            )
    return rep


# --- symbolic order -------------------------------------------------------------


def comp(cfg: PingPongConfig, w: ReducedWord) -> int:
    """Slot position of the domain component containing w(x0)."""
    slot = cfg.basepoint_slot
    for s in reversed(w.letters):
        slot = cfg.target(s, slot)
    return slot


def eval_triple(cfg: PingPongConfig, w1: ReducedWord, w2: ReducedWord, w3: ReducedWord) -> int:
    budget = len(w1) + len(w2) + len(w3)
    depth = 0
    while True:
        if w1 == w2 or w2 == w3 or w1 == w3:
            return 0
        c1, c2, c3 = comp(cfg, w1), comp(cfg, w2), comp(cfg, w3)
        if c1 != c2 and c2 != c3 and c1 != c3:
            return cyclic_sign(c1, c2, c3)
        depth += 1
        assert depth <= budget, "recursion exceeded the total word length"
        if c1 == c2 == c3:
            w1, w2, w3 = w1.tail(), w2.tail(), w3.tail()
            continue
        # two points share a component C; the third point may be replaced by
        # x0 (also outside C), then everything is pulled back by s^-1
        if c1 == c2:
            x, y = w1, w2
        elif c2 == c3:
            x, y = w2, w3
        else:
            x, y = w3, w1
        s_inv = ReducedWord(cfg.rank, (-x.letters[0],))
        w1, w2, w3 = x.tail(), y.tail(), s_inv


class ConfigOracle(OrderOracle):
    """The circular order a configuration forces on the basepoint orbit."""

    provenance = "ping-pong config"

    def __init__(self, cfg: PingPongConfig):
        self.cfg = cfg
        self.rank = cfg.rank

    def evaluate(self, u, v, w) -> int:
        return eval_triple(self.cfg, u, v, w)

    def table(self, elements: Sequence) -> np.ndarray:
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        singles = {}
        for s in self.cfg.alphabet.letters:
            singles[s] = idx.get(ReducedWord(self.cfg.rank, (s,)), -1)
        closed = all(e.tail() in idx for e in elements if e.letters) and min(singles.values()) >= 0
        if not closed:
            return super().table(elements)
        tail = np.array([idx[e.tail()] if e.letters else -1 for e in elements], dtype=np.int64)
        slot = np.array([comp(self.cfg, e) for e in elements], dtype=np.int64)
        inv1 = np.array([singles[-e.letters[0]] if e.letters else -1 for e in elements], dtype=np.int64)
        return _symbolic_table(n, tail, slot, inv1)


def _symbolic_table(n, tail, slot, inv1) -> np.ndarray:
    out = np.zeros((n, n, n), dtype=np.int8)
    jj, kk = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    jj = jj.ravel()
    kk = kk.ravel()
    for i in range(n):
        I = np.full(jj.shape, i)
        keep = (I != jj) & (jj != kk) & (I != kk)
        where = np.nonzero(keep)[0]
        A, B, C = I[where], jj[where], kk[where]
        res = np.zeros(len(where), dtype=np.int8)
        live = np.arange(len(where))
        while len(live):
            sa, sb, sc = slot[A], slot[B], slot[C]
            distinct = (sa != sb) & (sb != sc) & (sa != sc)
            val = np.sign(sb - sa) + np.sign(sc - sb) + np.sign(sa - sc)
            res[live[distinct]] = val[distinct]
            same = (sa == sb) & (sb == sc)
            ab = (sa == sb) & ~same
            bc = (sb == sc) & ~same
            ca = (sc == sa) & ~same
            nA = np.where(same, tail[A], 0)
            nB = np.where(same, tail[B], 0)
            nC = np.where(same, tail[C], 0)
            nA = np.where(ab, tail[A], nA)
            nB = np.where(ab, tail[B], nB)
            nC = np.where(ab, inv1[A], nC)
            nA = np.where(bc, tail[B], nA)
            nB = np.where(bc, tail[C], nB)
            nC = np.where(bc, inv1[B], nC)
            nA = np.where(ca, tail[C], nA)
            nB = np.where(ca, tail[A], nB)
            nC = np.where(ca, inv1[C], nC)
            cont = ~distinct
            A, B, C, live = nA[cont], nB[cont], nC[cont], live[cont]
        out[i].reshape(-1)[where] = res
    return out


# --- presets ----------------------------------------------------------------------


def _forced_containment(rank: int, slots: Sequence[Slot]) -> dict:
    out = {}
    for s in Alphabet(rank).letters:
        out[s] = {i: 0 for i, sl in enumerate(slots) if sl.is_basepoint or sl.letter != -s}
    return out


def preset_schottky(n: int) -> PingPongConfig:
    """x0, D(a1), D(b1), D(a1^-1), D(b1^-1), D(a2), ... counterclockwise."""
    if n < 1:
        raise ValueError("n must be positive")
    slots = [Slot.basepoint()]
    for j in range(n):
        a, b = 2 * j + 1, 2 * j + 2
        slots += [Slot.component(a), Slot.component(b), Slot.component(-a), Slot.component(-b)]
    return PingPongConfig(2 * n, tuple(slots), _forced_containment(2 * n, slots), name=f"schottky({n})")


def preset_three_boundary() -> PingPongConfig:
    """x0, D(a), D(a^-1), D(b), D(b^-1) counterclockwise."""
    slots = [Slot.basepoint(), Slot.component(1), Slot.component(-1), Slot.component(2), Slot.component(-2)]
    return PingPongConfig(2, tuple(slots), _forced_containment(2, slots), name="three_boundary")


PRESETS = {"schottky": preset_schottky, "three_boundary": preset_three_boundary}


def preset(spec: str) -> PingPongConfig:
    """Parse ``schottky1``, ``schottky(2)``, ``three_boundary`` or any of those
    followed by ``/k`` (standard k-lift)."""
    text = spec.strip().replace(" ", "")
    k = 1
    if "/" in text:
        text, ks = text.split("/", 1)
        k = int(ks)
    if text.startswith("schottky"):
        digits = text[len("schottky") :].strip("()")
        cfg = preset_schottky(int(digits or 1))
    elif text in ("three_boundary", "threeboundary", "three-boundary"):
        cfg = preset_three_boundary()
    else:
        raise ConfigError(f"unknown preset {spec!r}")
    return klift(cfg, k)


# --- k-lifts ------------------------------------------------------------------------


def klift(cfg: PingPongConfig, k: int) -> PingPongConfig:
    """Configuration of the standard k-lift (fixed-point lifts of every
    generator) on the k-fold cover, cut just before the basepoint."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return cfg
    if not cfg.connected:
        raise ConfigError("klift needs connected domains")
    b = cfg.basepoint_slot
    n = len(cfg.slots)
    base = [cfg.slots[(b + i) % n] for i in range(n)]
    pos = {s.letter: i for i, s in enumerate(base) if not s.is_basepoint}
    slots = [Slot.basepoint()]
    for r in range(k):
        slots += [Slot.component(s.letter, r) for s in base if not s.is_basepoint]
    new = PingPongConfig(cfg.rank, tuple(slots), {}, None, None)
    containment = {}
    for s in cfg.alphabet.letters:
        shift_s = int(pos[s] > pos[-s])
        m = {}
        for i, sl in enumerate(slots):
            if sl.is_basepoint:
                r, p = 0, 0
            elif sl.letter == -s:
                continue
            else:
                r, p = sl.index, pos[sl.letter]
            m[i] = (r + int(p > pos[-s]) - shift_s) % k
        containment[s] = m
    name = f"{cfg.name}/{k}" if cfg.name else None
    return PingPongConfig(cfg.rank, new.slots, containment, name, (cfg, k))


def klift_is_realization(n: int, k: int) -> tuple[bool, str]:
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if gcd(k, 2 * n - 1) == 1:
        return True, f"realization (sufficient condition holds: gcd({k}, {2 * n - 1}) = 1)"
    return False, f"criterion fails (sufficient condition not met: gcd({k}, {2 * n - 1}) = {gcd(k, 2 * n - 1)})"


def _base_schottky(cfg: PingPongConfig) -> tuple[int, int]:
    base, k = cfg.lift if cfg.lift is not None else (cfg, 1)
    if base.name is None or not base.name.startswith("schottky(") or base != preset_schottky(base.rank // 2):
        raise ConfigError("linear part is only available for the Schottky presets and their lifts")
    return base.rank // 2, k


def boundary_word(n: int) -> ReducedWord:
    """Generator of the stabilizer of the basepoint's gap for schottky(n):
    the product of the conjugates a_i [a_i, b_i] a_i^-1."""
    out = Alphabet(2 * n).identity()
    for j in range(n):
        a = ReducedWord(2 * n, (2 * j + 1,))
        b = ReducedWord(2 * n, (2 * j + 2,))
        out = out * (a * commutator(a, b) * ~a)
    return out


def linear_part_generator(cfg: PingPongConfig) -> ReducedWord:
    """Generator of the basepoint gap's stabilizer for schottky(n), and its
    k-th power for the standard k-lift."""
    n, k = _base_schottky(cfg)
    return boundary_word(n) ** k


# --- exact realizations -----------------------------------------------------------


def _in_arc(lo, hi, x, period, closed=True) -> bool:
    span = (hi - lo) % period
    d = (x - lo) % period
    if closed:
        return d <= span
    return 0 < d < span


@dataclass(eq=False)
class RealizedAction:
    """Exact action of the free group, generators given by exact maps.

    Points of the base circle are ProjectivePoints; points of a k-fold cover
    are rationals in [0, k) (line coordinates for the cut at infinity).
    ``arcs`` maps slot positions to (lo, hi) in turn (or cover) coordinates.
    """

    rank: int
    maps: dict
    basepoint: object
    period: int = 1
    arcs: dict | None = None
    cfg: PingPongConfig | None = None
    kind: str = "pl"

    @property
    def lifted(self) -> bool:
        return self.period > 1 or isinstance(next(iter(self.maps.values())), LiftedMap)

    def move(self, letter: int, x):
        f = self.maps[letter]
        if isinstance(f, LiftedMap):
            return f.line_apply(x) % self.period
        return f.apply(x)

    def act(self, w: ReducedWord, x=None):
        x = self.basepoint if x is None else x
        for s in reversed(w.letters):
            x = self.move(s, x)
        return x

    def key(self, x):
        return x if not isinstance(x, ProjectivePoint) else x.turn()

    def point_at(self, t: Fraction):
        """Point with the given coordinate (turn, or cover coordinate)."""
        return Fraction(t) % self.period if self.lifted else ProjectivePoint.from_turn(t)

    def ord(self, x, y, z) -> int:
        if isinstance(x, ProjectivePoint):
            return cyclic_ord(x, y, z)
        return cyclic_sign(x, y, z)

    def with_basepoint(self, x) -> "RealizedAction":
        return RealizedAction(self.rank, self.maps, x, self.period, self.arcs, self.cfg, self.kind)

    def with_maps(self, maps: dict) -> "RealizedAction":
        return RealizedAction(self.rank, maps, self.basepoint, self.period, self.arcs, self.cfg, self.kind)


def _layout(cfg: PingPongConfig) -> tuple[dict, Fraction]:
    """Equal regions per slot starting at the basepoint's; arcs fill the middle
    half of their region, the basepoint sits at its region's center."""
    n = len(cfg.slots)
    b = cfg.basepoint_slot
    arcs = {}
    gap = Fraction(1, 4 * n)
    for i, s in enumerate(cfg.slots):
        r = (i - b) % n
        if not s.is_basepoint:
            arcs[i] = (Fraction(r, n) + gap, Fraction(r + 1, n) - gap)
    return arcs, Fraction(1, 2 * n)


def certify(action: RealizedAction, cfg: PingPongConfig) -> list[str]:
    """Exact endpoint checks of the ping-pong data; returns failures."""
    errs = []
    P = action.period
    arcs = action.arcs
    x0 = action.key(action.basepoint)
    order = [i for i in range(len(cfg.slots)) if i in arcs]
    b = cfg.basepoint_slot
    order.sort(key=lambda i: (i - b) % len(cfg.slots))
    seq = [x0]
    for i in order:
        lo, hi = arcs[i]
        if not (0 <= lo < hi < P):
            errs.append(f"arc {cfg.slots[i].label()} is not a proper arc")
        seq += [lo, hi]
    if any(not (a < c) for a, c in zip(seq, seq[1:])):
        # rotate so the basepoint reads first, then demand strict increase
        d = [(v - x0) % P for v in seq]
        if any(not (a < c) for a, c in zip(d, d[1:])):
            errs.append("arcs are not disjoint in the configuration's cyclic order around the basepoint")
    for s in cfg.alphabet.letters:
        comps = cfg.components(-s)
        runs = _complementary_runs(cfg, s)
        for c_prev, c_next, run in zip(comps, comps[1:] + comps[:1], runs):
            start = arcs[c_prev][1]
            end = arcs[c_next][0]
            img_a = action.key(action.move(s, action.point_at(start)))
            img_b = action.key(action.move(s, action.point_at(end)))
            tgts = {cfg.containment[s][i] for i in run}
            if not tgts:
                tgts = set(range(cfg.count(s)))
            ok = False
            for t in tgts:
                lo, hi = arcs[cfg.slot_of(s, t)]
                if (
                    _in_arc(lo, hi, img_a, P, closed=False)
                    and _in_arc(lo, hi, img_b, P, closed=False)
                    and (img_a - lo) % P < (img_b - lo) % P
                ):
                    ok = True
            if not ok:
                errs.append(f"{letter_name(s)} does not map the arc after {cfg.slots[c_prev].label()} into its target")
    return errs


def _finish(action: RealizedAction, cfg: PingPongConfig) -> RealizedAction:
    errs = certify(action, cfg)
    if errs:
        raise RealizationError("; ".join(errs))
    return action


def _connected_moebius(cfg: PingPongConfig) -> RealizedAction:
    arcs, x0 = _layout(cfg)
    maps = {}
    for i in range(1, cfg.rank + 1):
        att_lo, att_hi = arcs[cfg.components(i)[0]]
        rep_lo, rep_hi = arcs[cfg.components(-i)[0]]
        att = ProjectivePoint.from_turn((att_lo + att_hi) / 2)
        rep = ProjectivePoint.from_turn((rep_lo + rep_hi) / 2)
        m = 2
        while True:
            M = MoebiusMap.hyperbolic(att, rep, m)
            u = M.apply_turn(rep_hi)
            v = M.apply_turn(rep_lo)
            if (
                _in_arc(att_lo, att_hi, u, 1, closed=False)
                and _in_arc(att_lo, att_hi, v, 1, closed=False)
                and (u - att_lo) % 1 < (v - att_lo) % 1
            ):
                break
            m *= 2
            if m > 2**64:
                raise RealizationError("no multiplier found")
        maps[i] = M
        maps[-i] = M.inverse()
    act = RealizedAction(cfg.rank, maps, ProjectivePoint.from_turn(x0), 1, arcs, cfg, "moebius")
    return _finish(act, cfg)


def lift_action(b: RealizedAction, k: int, cfg: PingPongConfig | None = None) -> RealizedAction:
    """Fixed-point lifts of a certified connected Moebius action to the
    k-fold cover (k = 1 gives the line action over the circle itself)."""
    base = b.cfg
    maps = {}
    for i in range(1, b.rank + 1):
        lo, hi = b.arcs[base.components(i)[0]]
        fixed = ProjectivePoint.from_turn((lo + hi) / 2)
        lm = LiftedMap.fixed_point_lift(b.maps[i], fixed)
        maps[i] = lm
        maps[-i] = lm.inverse()
    cfg = cfg if cfg is not None else klift(base, k)
    arcs = {}
    for j, sl in enumerate(cfg.slots):
        if not sl.is_basepoint:
            lo, hi = b.arcs[base.components(sl.letter)[0]]
            arcs[j] = (sl.index + lo, sl.index + hi)
    return RealizedAction(b.rank, maps, b.basepoint.turn(), k, arcs, cfg, "moebius-lift")


def realize_moebius(cfg: PingPongConfig) -> RealizedAction:
    """Hyperbolic Moebius generators for a connected configuration, or
    fixed-point lifts of them for a standard k-lift."""
    if cfg.lift is not None:
        base, k = cfg.lift
        if klift(base, k) != cfg:
            raise ConfigError("lift metadata does not match the configuration")
        return _finish(lift_action(realize_moebius(base), k, cfg), cfg)
    if not validate(cfg).ok:
        raise ConfigError(str(validate(cfg)))
    if not cfg.connected:
        raise ConfigError("Moebius realization needs connected domains")
    return _connected_moebius(cfg)


def _run_targets(cfg: PingPongConfig, s: int) -> list[int]:
    """Target component index for each complementary run of D(s^-1)."""
    runs = _complementary_runs(cfg, s)
    out: list[int | None] = [cfg.containment[s][r[0]] if r else None for r in runs]
    p = len(out)
    for _ in range(p):
        for i in range(p):
            if out[i] is None and out[i - 1] is not None:
                out[i] = out[i - 1]
    return out  # type: ignore[return-value]


def realize_pl(cfg: PingPongConfig) -> RealizedAction:
    """Certified piecewise-linear action with the configuration's dynamics."""
    rep = validate(cfg)
    if not rep.ok:
        raise ConfigError(str(rep))
    arcs, x0 = _layout(cfg)
    maps = {}
    for s in cfg.alphabet.letters:
        if s < 0:
            continue
        comps = cfg.components(-s)
        p = len(comps)
        targets = _run_targets(cfg, s)
        start = _matching_start(cfg, s)
        order = [(start + j) % p for j in range(p)]
        images = {}
        for t in set(targets):
            mine = [i for i in order if targets[i] == t]
            lo, hi = arcs[cfg.slot_of(s, t)]
            pad = (hi - lo) / 8
            lo, hi = lo + pad, hi - pad
            q = len(mine)
            step = (hi - lo) / (2 * q - 1)
            for j, i in enumerate(mine):
                images[i] = (lo + 2 * j * step, lo + (2 * j + 1) * step)
        breaks, values = [], []
        for i in range(p):
            c_prev = comps[i]
            c_next = comps[(i + 1) % p]
            breaks += [arcs[c_prev][1], arcs[c_next][0]]
            values += [images[i][0], images[i][1]]
        f = PLCircleMap(tuple(breaks), tuple(values))
        maps[s] = f
        maps[-s] = f.inverse()
    act = RealizedAction(cfg.rank, maps, ProjectivePoint.from_turn(x0), 1, arcs, cfg, "pl")
    return _finish(act, cfg)


def deck_commutes(action: RealizedAction, radius: int) -> list:
    """Orbit points where a generator fails to commute with the unit deck
    rotation of the cover; empty when the action is a genuine lift."""
    bad = []
    P = action.period
    for w in ball(action.rank, radius):
        x = action.act(w)
        for s in Alphabet(action.rank).letters:
            if action.move(s, (x + 1) % P) != (action.move(s, x) + 1) % P:
                bad.append((w, s))
    return bad


# --- gap scan ------------------------------------------------------------------------


@dataclass
class GapStatus:
    after: int
    before: int
    visited: bool
    witness: ReducedWord | None


@dataclass
class GapReport:
    radius: int
    gaps: list

    @property
    def unvisited(self) -> list:
        return [g for g in self.gaps if not g.visited]

    def render(self, cfg: PingPongConfig) -> str:
        lines = [f"gap scan at radius {self.radius} (finite-radius heuristic, not a certificate)"]
        for g in self.gaps:
            a = cfg.slots[g.after].label()
            b = cfg.slots[g.before].label()
            state = f"visited by {g.witness}" if g.visited else "not visited"
            lines.append(f"  {a} .. {b}: {state}")
        lines.append(f"unvisited gaps: {len(self.unvisited)}")
        return "\n".join(lines)


def cylinder_arcs(action: RealizedAction, level: int) -> list[tuple]:
    """Sorted images w(D) of the domain arcs with |w| = level - 1 and w D
    reduced (the last letter of w is not the inverse of D's letter)."""
    cfg = action.cfg
    out = []
    for w in ball(action.rank, level - 1):
        if len(w) != level - 1:
            continue
        for i, (lo, hi) in action.arcs.items():
            t = cfg.slots[i].letter
            if w.letters and w.letters[-1] == -t:
                continue
            a = action.key(action.act(w, action.point_at(lo)))
            b = action.key(action.act(w, action.point_at(hi)))
            out.append((a, b))
    out.sort()
    return out


def cylinder_gap_points(action: RealizedAction, level: int) -> list:
    """Midpoints of the complementary intervals of the level cylinders."""
    cyl = cylinder_arcs(action, level)
    P = action.period
    pts = []
    for (_, hi), (lo, _) in zip(cyl, cyl[1:] + cyl[:1]):
        pts.append((hi + ((lo - hi) % P) / 2) % P)
    return pts


def gap_orbit_check(action: RealizedAction, radius: int) -> GapReport:
    """For each gap between consecutive domain arcs, look for a point of the
    ball-``radius`` orbit in the same complementary component of the
    level-(radius + 1) cylinder arcs."""
    cfg = action.cfg
    if action.arcs is None or cfg is None:
        raise ValueError("action carries no arcs")
    P = action.period
    pts = {}
    words = ball(action.rank, radius)
    for w in words:
        pts[w] = action.act(w)

    cyl = cylinder_arcs(action, radius + 1)
    starts = [a for a, _ in cyl]

    def component(x):
        j = bisect_right(starts, x) - 1
        if j >= 0 and _in_arc(cyl[j][0], cyl[j][1], x, P):
            return None
        return j % len(cyl)

    first = {}
    for w in words:
        c = component(action.key(pts[w]))
        if c is not None and c not in first:
            first[c] = w
    order = sorted(action.arcs, key=lambda i: action.arcs[i][0])
    gaps = []
    for a, b in zip(order, order[1:] + order[:1]):
        hi = action.arcs[a][1]
        lo = action.arcs[b][0]
        mid = (hi + ((lo - hi) % P) / 2) % P
        c = component(mid)
        w = first.get(c)
        gaps.append(GapStatus(a, b, w is not None, w))
    return GapReport(radius, gaps)


# --- random configurations ---------------------------------------------------------


def random_config(rng: random.Random, rank: int = 2, max_components: int = 2) -> PingPongConfig:
    """A random valid configuration (used for property tests)."""
    letters = Alphabet(rank).letters
    counts = {s: rng.randint(1, max_components) for s in letters}
    comps = [Slot.component(s, j) for s in letters for j in range(counts[s])]
    rng.shuffle(comps)
    slots = [Slot.basepoint()] + comps
    cfg = PingPongConfig(rank, tuple(slots), {})
    containment = {}
    for s in letters:
        if s < 0:
            continue
        runs = _complementary_runs(cfg, s)
        tcomps = cfg.components(s)
        m = len(tcomps)
        ranks = sorted(rng.randrange(m) for _ in runs)
        off = rng.randrange(m)
        cmap = {}
        for run, r in zip(runs, ranks):
            idx = slots[tcomps[(r + off) % m]].index
            for i in run:
                cmap[i] = idx
        containment[s] = cmap
    cfg = PingPongConfig(rank, tuple(slots), containment)
    for s in letters:
        if s < 0:
            continue
        targets = _run_targets(cfg, s)
        rank_of = {slots[q].index: r for r, q in enumerate(cfg.components(s))}
        start = rng.choice(_image_starts([rank_of[t] for t in targets]))
        containment[-s] = _induced_inverse(cfg, s, targets, start)
    return PingPongConfig(rank, tuple(slots), containment)


def word_lift(action: RealizedAction, w: ReducedWord) -> LiftedMap:
    """The lift of w's action, composed from the generators' lifts."""
    out = LiftedMap.identity()
    for s in reversed(w.letters):
        out = action.maps[s].after(out)
    return out


def lifted_rotation(action: RealizedAction, w: ReducedWord, max_denominator: int = 64):
    """Certified rotation number of w on the k-fold cover (None if undetermined)."""
    from .circle import rotation_number

    return rotation_number(word_lift(action, w), max_denominator, cover_degree=action.period)
