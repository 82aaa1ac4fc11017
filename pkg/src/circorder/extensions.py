"""Left orders on F x Z read off the lifted action on the line.

The k-lift acts on the k-fold cover R / kZ; its line coordinates form the
universal cover, on which the central generator z acts as translation by k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .circle import LiftedMap
from .freegroup import Alphabet, ReducedWord, WordParseError
from .pingpong import RealizedAction, boundary_word, klift, preset_schottky, realize_moebius

COFINALITY_BOUND = 2**10


@dataclass(frozen=True)
class ExtElement:
    w: ReducedWord
    m: int = 0

    def __mul__(self, other: "ExtElement") -> "ExtElement":
        return ExtElement(self.w * other.w, self.m + other.m)

    def __invert__(self) -> "ExtElement":
        return ExtElement(~self.w, -self.m)

    def __pow__(self, n: int) -> "ExtElement":
        return ExtElement(self.w**n, self.m * n)

    def __str__(self) -> str:
        return f"{self.w}:{self.m}"

    @classmethod
    def parse(cls, text: str, rank: int) -> "ExtElement":
        word, sep, m = text.strip().partition(":")
        try:
            central = int(m) if sep else 0
        except ValueError:
            raise WordParseError(text, len(word) + 1, "central part is not an integer") from None
        return cls(ReducedWord.parse(word.strip(), rank), central)

    @classmethod
    def identity(cls, rank: int) -> "ExtElement":
        return cls(Alphabet(rank).identity())

    @classmethod
    def z(cls, rank: int) -> "ExtElement":
        return cls(Alphabet(rank).identity(), 1)


def _check_lift(action: RealizedAction):
    if not all(isinstance(f, LiftedMap) for f in action.maps.values()):
        raise ValueError("position needs a lifted action")


def position(action: RealizedAction, e: ExtElement) -> Fraction:
    """Line coordinate of e applied to the basepoint lift on sheet 0."""
    _check_lift(action)
    x = Fraction(action.basepoint)
    for s in reversed(e.w.letters):
        x = action.maps[s].line_apply(x)
    return x + e.m * action.period


def ext_compare(action: RealizedAction, e1: ExtElement, e2: ExtElement) -> int:
    p1, p2 = position(action, e1), position(action, e2)
    if p1 == p2:
        assert e1 == e2, f"distinct elements {e1} and {e2} share a line position"
        return 0
    return 1 if p1 > p2 else -1


class ExtOrder:
    """Left order on F x Z from the line action of a k-lift."""

    def __init__(self, action: RealizedAction):
        _check_lift(action)
        self.action = action
        self.rank = action.rank
        self._memo: dict = {}

    def position(self, e: ExtElement) -> Fraction:
        p = self._memo.get(e.w)
        if p is None:
            p = position(self.action, ExtElement(e.w, 0))
            self._memo[e.w] = p
        return p + e.m * self.action.period

    def __call__(self, e1: ExtElement, e2: ExtElement) -> int:
        p1, p2 = self.position(e1), self.position(e2)
        if p1 == p2:
            assert e1 == e2, f"distinct elements {e1} and {e2} share a line position"
            return 0
        return 1 if p1 > p2 else -1


def lift_order(k: int, n: int = 1) -> ExtOrder:
    return ExtOrder(realize_moebius(klift(preset_schottky(n), k)))


@dataclass
class CofinalityReport:
    brackets: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        lines = [f"z^{k} <= {name} < z^{k + 1}" for name, k in self.brackets.items()]
        lines += [f"{name}: no bracket within |k| <= {COFINALITY_BOUND} (evidence against cofinality)" for name in self.failures]
        return "\n".join(lines)


def cofinality_check(
    order: Callable[[ExtElement, ExtElement], int],
    generators: Sequence[ExtElement],
    z: ExtElement,
    bound: int = COFINALITY_BOUND,
) -> CofinalityReport:
    """Find k with z^k <= g < z^(k+1) for every g, searching outward from 0."""
    rep = CofinalityReport()
    for g in generators:
        found = None
        for d in range(bound + 1):
            for k in ((d,) if d == 0 else (d, -d)):
                if order(z**k, g) <= 0 and order(g, z ** (k + 1)) < 0:
                    found = k
                    break
            if found is not None:
                break
        if found is None:
            rep.failures.append(str(g))
        else:
            rep.brackets[str(g)] = found
    return rep


def generators_with_inverses(rank: int) -> list[ExtElement]:
    return [ExtElement(ReducedWord(rank, (s,))) for s in Alphabet(rank).letters]


# --- chains --------------------------------------------------------------------


class ChainMismatch(AssertionError):
    pass


@dataclass
class ChainReport:
    k: int
    claimed: list
    comparisons: list
    observed: list

    @property
    def verified(self) -> bool:
        return all(sign < 0 for _, _, sign in self.comparisons)

    def text(self) -> str:
        sym = {-1: "<", 0: "=", 1: ">"}
        out = [f"k = {self.k}, g = {boundary_word(1)}"]
        out.append("claimed:  " + " < ".join(self.claimed))
        out.append("observed: " + " < ".join(self.observed))
        for a, b, s in self.comparisons:
            out.append(f"  {a} {sym[s]} {b}")
        out.append("verified" if self.verified else "NOT verified")
        return "\n".join(out)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "claimed": self.claimed,
            "observed": self.observed,
            "comparisons": [{"lhs": a, "rhs": b, "sign": s} for a, b, s in self.comparisons],
            "verified": self.verified,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def _label(j: int) -> str:
    if j == 0:
        return "id"
    return "g" if j == 1 else f"g^{j}"


def chain_elements(k: int) -> list[tuple[str, ExtElement]]:
    """id, g, ..., g^(k-1), z, g^k with g = a[a,b]a^-1 = aBAb, the generator
    of the basepoint gap's stabilizer."""
    g = ExtElement(boundary_word(1))
    els = [(_label(j), g**j) for j in range(k)]
    els.append(("z", ExtElement.z(2)))
    els.append((_label(k), g**k))
    return els


def chain_report(k: int, order: ExtOrder | None = None) -> ChainReport:
    if k < 2:
        raise ValueError("k must be at least 2")
    order = order or lift_order(k)
    els = chain_elements(k)
    comps = [(a, b, order(x, y)) for (a, x), (b, y) in zip(els, els[1:])]
    pool = els + [(_label(k + 1), ExtElement(boundary_word(1)) ** (k + 1))]
    observed = [name for name, e in sorted(pool, key=lambda p: order.position(p[1]))]
    return ChainReport(k, [name for name, _ in els], comps, observed)


def verify_chain(k: int) -> ChainReport:
    rep = chain_report(k)
    if not rep.verified:
        raise ChainMismatch(rep.text())
    return rep


def chains_disagree(k1: int, k2: int) -> tuple[int, int]:
    """Signs of (g^min(k1,k2) vs z) in the two lift orders."""
    j = min(k1, k2)
    g = ExtElement(boundary_word(1)) ** j
    z = ExtElement.z(2)
    return lift_order(k1)(g, z), lift_order(k2)(g, z)
