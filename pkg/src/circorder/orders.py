"""Circular and left orders: lazy oracles, materialized tables, validation,
conversion, conjugation, completion and the midpoint embedding."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

from .freegroup import ReducedWord, ball

# literal quadruple scan up to this many elements; beyond it the cocycle
# identity is certified through an explicit cyclic arrangement
LITERAL_COCYCLE_LIMIT = 80


class OrderEvaluationError(RuntimeError):
    def __init__(self, triple, cause):
        self.triple = triple
        super().__init__(f"order evaluation failed on {tuple(map(str, triple))}: {cause}")


class StabilizerViolation(ValueError):
    """The basepoint is fixed by a nontrivial element."""

    def __init__(self, word):
        self.word = word
        super().__init__(f"basepoint is fixed by {word}")


class InconsistentLeftOrder(ValueError):
    pass


class NoAdmissibleGap(ValueError):
    pass


def perm_sign(a, b, c) -> int:
    """Cyclic orientation of three comparable values (0 on ties)."""
    if a == b or b == c or a == c:
        return 0
    if a < b < c or b < c < a or c < a < b:
        return 1
    return -1


def _rank_table(ranks: np.ndarray) -> np.ndarray:
    """Orientation table of distinct integer positions around a circle."""
    r = np.asarray(ranks, dtype=np.int64)
    a = r[:, None, None]
    b = r[None, :, None]
    c = r[None, None, :]
    ab = np.sign(b - a)
    bc = np.sign(c - b)
    ca = np.sign(a - c)
    # +1 exactly when two of the three forward steps are positive and
    # distinct; the sum of the signs of the three steps is then +1
    return (ab + bc + ca).astype(np.int8)


@dataclass
class OrderTable:
    """A finite circular order sampled on an ordered list of group elements."""

    elements: list
    values: np.ndarray
    radius: int | None = None

    def __post_init__(self):
        n = len(self.elements)
        if self.values.shape != (n, n, n):
            raise ValueError("table shape does not match element count")
        self._index = {e: i for i, e in enumerate(self.elements)}

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, e) -> int:
        return self._index[e]

    def __call__(self, u, v, w) -> int:
        return int(self.values[self._index[u], self._index[v], self._index[w]])

    evaluate = __call__

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrderTable):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.values, other.values)

    def to_bytes(self) -> bytes:
        return self.values.tobytes()

    def write_csv(self, stream) -> None:
        names = [str(e) for e in self.elements]
        stream.write("w1,w2,w3,c\n")
        n = len(names)
        vals = self.values
        for i in range(n):
            ni = names[i]
            rows = []
            for j in range(n):
                nj = names[j]
                vij = vals[i, j]
                rows.extend(f"{ni},{nj},{names[k]},{int(vij[k])}\n" for k in range(n))
            stream.write("".join(rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def read_csv(cls, text: str, parse: Callable[[str], object]) -> "OrderTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        names: list[str] = []
        seen = {}
        for row in rows:
            for key in ("w1", "w2", "w3"):
                if row[key] not in seen:
                    seen[row[key]] = len(names)
                    names.append(row[key])
        n = len(names)
        vals = np.zeros((n, n, n), dtype=np.int8)
        for row in rows:
            vals[seen[row["w1"]], seen[row["w2"]], seen[row["w3"]]] = int(row["c"])
        return cls([parse(s) for s in names], vals)


class OrderOracle:
    """A circular order evaluated lazily on triples of group elements."""

    provenance = "oracle"
    rank: int | None = None

    def evaluate(self, u, v, w) -> int:
        raise NotImplementedError

    def __call__(self, u, v, w) -> int:
        return self.evaluate(u, v, w)

    def table(self, elements: Sequence) -> np.ndarray:
        n = len(elements)
        out = np.zeros((n, n, n), dtype=np.int8)
        for i, u in enumerate(elements):
            for j, v in enumerate(elements):
                for k, w in enumerate(elements):
                    if i == j or j == k or i == k:
                        continue
                    try:
                        out[i, j, k] = self.evaluate(u, v, w)
                    except Exception as exc:
                        raise OrderEvaluationError((u, v, w), exc) from exc
        return out


class FunctionOracle(OrderOracle):
    def __init__(self, fn: Callable, provenance: str = "function", rank: int | None = None):
        self.fn = fn
        self.provenance = provenance
        self.rank = rank

    def evaluate(self, u, v, w) -> int:
        return self.fn(u, v, w)


class TableOracle(OrderOracle):
    provenance = "table"

    def __init__(self, table: OrderTable):
        self.order_table = table

    def evaluate(self, u, v, w) -> int:
        return self.order_table(u, v, w)


def materialize(oracle, radius: int, rank: int | None = None, elements: Sequence | None = None) -> OrderTable:
    """Sample an oracle on the ball of the given radius (or on ``elements``)."""
    if isinstance(oracle, OrderTable):
        if elements is None and oracle.radius == radius:
            return oracle
        oracle = TableOracle(oracle)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if elements is None:
        rank = rank if rank is not None else oracle.rank
        if rank is None:
            raise ValueError("rank needed to enumerate the ball")
        elements = ball(rank, radius)
    elements = list(elements)
    return OrderTable(elements, oracle.table(elements), radius)


# --- validation --------------------------------------------------------------


@dataclass
class Violation:
    kind: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        names = ", ".join(str(w) for w in self.witness)
        return f"{self.kind}: ({names}) {self.detail}".rstrip()


@dataclass
class CocycleReport:
    size: int
    violations: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    method: str = "literal"

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"circular order on {self.size} elements ({self.method} cocycle check)"
        head = ", ".join(f"{k}={v}" for k, v in self.counts.items() if v)
        return "violations: " + head + "\n" + "\n".join(f"  {v}" for v in self.violations)


def _record(report, kind, hits, elements, limit, detail_fn=None):
    report.counts[kind] = report.counts.get(kind, 0) + len(hits)
    for idx in hits[: max(0, limit - len(report.violations))]:
        wit = tuple(elements[i] for i in idx)
        report.violations.append(Violation(kind, wit, detail_fn(idx) if detail_fn else ""))


def _check_degenerate(t: OrderTable, report, limit):
    v = t.values
    n = t.size
    idx = np.arange(n)
    deg = (idx[:, None, None] == idx[None, :, None]) | (idx[None, :, None] == idx[None, None, :]) | (
        idx[:, None, None] == idx[None, None, :]
    )
    bad_zero = np.argwhere(deg & (v != 0))
    bad_nondeg = np.argwhere(~deg & (np.abs(v) != 1))
    _record(report, "nonzero on degenerate triple", [tuple(x) for x in bad_zero], t.elements, limit)
    _record(report, "not +-1 on distinct triple", [tuple(x) for x in bad_nondeg], t.elements, limit)


def _check_antisymmetry(t: OrderTable, report, limit):
    v = t.values.astype(np.int16)
    for axes, name in (((1, 0, 2), "12"), ((0, 2, 1), "23"), ((2, 1, 0), "13")):
        bad = np.argwhere(v != -np.transpose(v, axes))
        _record(report, f"antisymmetry ({name} swap)", [tuple(x) for x in bad], t.elements, limit)


def _cocycle_literal(t: OrderTable, report, limit):
    v = t.values.astype(np.int8)
    hits = []
    total = 0
    for a1 in range(t.size):
        # c(a2,a3,a4) - c(a1,a3,a4) + c(a1,a2,a4) - c(a1,a2,a3)
        s = v - v[a1][None, :, :] + v[a1][:, None, :] - v[a1][:, :, None]
        bad = np.argwhere(s != 0)
        total += len(bad)
        for b in bad[: max(0, limit - len(hits))]:
            hits.append((a1, *b))
    report.counts["cocycle identity"] = report.counts.get("cocycle identity", 0) + total
    for idx in hits[: max(0, limit - len(report.violations))]:
        report.violations.append(Violation("cocycle identity", tuple(t.elements[i] for i in idx)))


def cyclic_arrangement(t: OrderTable) -> list[int]:
    """Element indices in the cyclic order read off the table, starting at 0."""
    v = t.values

    def cmp(x, y):
        return -int(v[0, x, y]) if x != y else 0

    rest = sorted(range(1, t.size), key=cmp_to_key(cmp))
    return [0] + rest


def _quad_ok(v, q) -> bool:
    a1, a2, a3, a4 = q
    return int(v[a2, a3, a4]) - int(v[a1, a3, a4]) + int(v[a1, a2, a4]) - int(v[a1, a2, a3]) == 0


def _cocycle_arrangement(t: OrderTable, report, limit):
    """A table is a circular order iff it is the orientation table of some
    cyclic arrangement; build the arrangement from the table and compare."""
    order = cyclic_arrangement(t)
    rank = np.empty(t.size, dtype=np.int64)
    rank[order] = np.arange(t.size)
    v = t.values
    mismatches = []
    for i in range(t.size):
        r = rank
        a = r[i]
        b = r[:, None]
        c = r[None, :]
        exp = (np.sign(b - a) + np.sign(c - b) + np.sign(a - c)).astype(np.int8)
        bad = np.argwhere(exp != v[i])
        for b_ in bad[: max(0, limit - len(mismatches))]:
            mismatches.append((i, *b_))
        if len(mismatches) >= limit:
            break
    if not mismatches:
        return
    found = []
    for tri in mismatches:
        for other in range(t.size):
            if len(found) >= limit:
                break
            for q in permutations((*tri, other)):
                if not _quad_ok(v, q):
                    found.append(q)
                    break
    if found:
        report.counts["cocycle identity"] = len(found)
        for q in found[:limit]:
            report.violations.append(Violation("cocycle identity", tuple(t.elements[i] for i in q)))
    else:
        report.counts["arrangement mismatch"] = len(mismatches)
        for tri in mismatches[:limit]:
            report.violations.append(Violation("arrangement mismatch", tuple(t.elements[i] for i in tri)))


def _check_left_invariance(t: OrderTable, report, limit):
    els = t.elements
    if not els or not hasattr(els[0], "__mul__"):
        return
    index = t._index
    v = t.values
    total = 0
    for g in els:
        image = np.array([index.get(g * u, -1) for u in els])
        if np.array_equal(image, np.arange(len(els))):
            continue
        dom = np.nonzero(image >= 0)[0]
        img = image[dom]
        a = v[np.ix_(dom, dom, dom)]
        b = v[np.ix_(img, img, img)]
        bad = np.argwhere(a != b)
        total += len(bad)
        for x in bad[: max(0, limit - len(report.violations))]:
            wit = (g,) + tuple(els[dom[i]] for i in x)
            report.violations.append(Violation("left invariance", wit, "(g, u, v, w)"))
    report.counts["left invariance"] = total


def check_cocycle(t: OrderTable, *, max_witnesses: int = 20, left_invariance: bool = True) -> CocycleReport:
    """Check the circular order axioms exhaustively on a table.

    Covers vanishing exactly on degenerate triples, antisymmetry, the cocycle
    identity on all quadruples, and left invariance for every (g, triple) whose
    translate stays inside the table.
    """
    method = "literal" if t.size <= LITERAL_COCYCLE_LIMIT else "arrangement"
    report = CocycleReport(t.size, method=method)
    if t.size == 0:
        return report
    _check_degenerate(t, report, max_witnesses)
    _check_antisymmetry(t, report, max_witnesses)
    if method == "literal":
        _cocycle_literal(t, report, max_witnesses)
    else:
        _cocycle_arrangement(t, report, max_witnesses)
    if left_invariance:
        _check_left_invariance(t, report, max_witnesses)
    return report


# --- constructions -----------------------------------------------------------


def conjugate(oracle, g) -> FunctionOracle:
    """The conjugate order (x, y, z) -> c(xg, yg, zg)."""
    return FunctionOracle(
        lambda x, y, z: oracle(x * g, y * g, z * g),
        provenance=f"conjugate by {g}",
        rank=getattr(oracle, "rank", None),
    )


LeftOrder = Callable[[object, object], int]
"""A left order as a comparison: -1, 0, +1 for x < y, x = y, x > y."""


def from_left_order(lo: LeftOrder, rank: int | None = None) -> FunctionOracle:
    """Degenerate circular order of a left order, via the coboundary
    c(g1, g2, g3) = c'(g2, g3) - c'(g1, g3) + c'(g1, g2) with c'(x, y) = 1
    iff x < y."""

    def before(x, y):
        return -lo(x, y)

    def c(g1, g2, g3):
        val = before(g2, g3) - before(g1, g3) + before(g1, g2)
        degenerate = g1 == g2 or g2 == g3 or g1 == g3
        if (val == 0) != degenerate or abs(val) > 1:
            raise InconsistentLeftOrder(f"left order is not total and transitive on {(g1, g2, g3)}")
        return val

    return FunctionOracle(c, provenance="left order", rank=rank)


def integer_order(x, y) -> int:
    """The usual order on Z = F_1, elements given as rank-1 words."""
    ex = sum(x.letters) if isinstance(x, ReducedWord) else x
    ey = sum(y.letters) if isinstance(y, ReducedWord) else y
    return (ex > ey) - (ex < ey)


def compare_on_ball(o1, o2, radius: int, rank: int | None = None):
    """First triple of the ball (shortlex triple order) where the two orders
    differ, or None when they agree."""
    rank = rank if rank is not None else getattr(o1, "rank", None) or getattr(o2, "rank", None)
    els = ball(rank, radius)
    t1 = o1.values if isinstance(o1, OrderTable) else o1.table(els)
    t2 = o2.values if isinstance(o2, OrderTable) else o2.table(els)
    diff = np.argwhere(t1 != t2)
    if len(diff) == 0:
        return None
    i, j, k = diff[0]
    return (els[i], els[j], els[k])


class OrbitOracle(OrderOracle):
    """Order read off the orbit of a basepoint under an exact action."""

    provenance = "realized action"

    def __init__(self, action, basepoint=None):
        self.action = action
        self.basepoint = action.basepoint if basepoint is None else basepoint
        self.rank = action.rank
        self._points: dict = {}
        self._seen: dict = {}

    def point(self, w: ReducedWord):
        p = self._points.get(w)
        if p is None:
            if not w.letters:
                p = self.basepoint
            else:
                p = self.action.move(w.letters[0], self.point(w.tail()))
            key = self.action.key(p)
            other = self._seen.get(key)
            if other is not None and other != w:
                raise StabilizerViolation(~other * w)
            self._seen[key] = w
            self._points[w] = p
        return p

    def evaluate(self, u, v, w) -> int:
        if u == v or v == w or u == w:
            return 0
        return self.action.ord(self.point(u), self.point(v), self.point(w))

    def table(self, elements: Sequence) -> np.ndarray:
        keys = [self.action.key(self.point(e)) for e in elements]
        order = sorted(range(len(elements)), key=lambda i: keys[i])
        ranks = np.empty(len(elements), dtype=np.int64)
        ranks[order] = np.arange(len(elements))
        return _rank_table(ranks)


def order_from_action(action, basepoint=None) -> OrbitOracle:
    return OrbitOracle(action, basepoint)


def complete_order(
    orbit: Callable[[object], object],
    ord3: Callable[[object, object, object], int],
    in_stabilizer: Callable[[object], bool],
    k_order: LeftOrder,
    rank: int | None = None,
) -> FunctionOracle:
    """Extend a left order on the stabilizer K of a point to a circular order.

    ``orbit(g)`` is the exact image of the point under g. Elements sharing a
    point are ordered inside that point by ``k_order`` applied to
    g1^-1 g2, i.e. the coset gK is blown up into an interval ordered like K.
    """

    def locate(g1, g2):
        h = ~g1 * g2
        if not in_stabilizer(h):
            raise ValueError(f"{g1} and {g2} share a point but {h} is not in the stabilizer")
        return h

    def c(g1, g2, g3):
        if g1 == g2 or g2 == g3 or g1 == g3:
            return 0
        p1, p2, p3 = orbit(g1), orbit(g2), orbit(g3)
        for g, h, p, q in ((g1, g2, p1, p2), (g2, g3, p2, p3), (g1, g3, p1, p3)):
            if p != q:
                if in_stabilizer(~g * h):
                    raise ValueError(f"membership says {~g * h} fixes the point but it moves it")
        if p1 != p2 and p2 != p3 and p1 != p3:
            return ord3(p1, p2, p3)
        if p1 == p2 == p3:
            k2 = locate(g1, g2)
            k3 = locate(g1, g3)
            ident = ~g1 * g1
            return from_left_order(k_order)(ident, k2, k3)
        # exactly two coincide; rotate so the pair comes first
        triples = ((g1, g2, g3, p1, p2), (g2, g3, g1, p2, p3), (g3, g1, g2, p3, p1))
        for x, y, _, px, py in triples:
            if px == py:
                # x before y inside the blown-up point iff x^-1 y > id in K
                h = locate(x, y)
                ident = ~x * x
                return 1 if k_order(h, ident) > 0 else -1
        raise AssertionError("unreachable")

    return FunctionOracle(c, provenance="completion", rank=rank)


def midpoint_embed(t: OrderTable) -> list[Fraction]:
    """Embed the table's elements on the circle [0, 1) one at a time, each at
    the midpoint of the unique gap consistent with the order."""
    n = t.size
    if n == 0:
        return []
    coords = [Fraction(0)]
    if n == 1:
        return coords
    coords.append(Fraction(1, 2))
    placed = [0, 1]  # element indices sorted by coordinate
    v = t.values
    for m in range(2, n):
        cands = []
        for pos in range(len(placed)):
            a = placed[pos]
            b = placed[(pos + 1) % len(placed)]
            if v[a, m, b] == 1:
                cands.append(pos)
        if len(cands) != 1:
            raise NoAdmissibleGap(f"{len(cands)} admissible gaps for {t.elements[m]}")
        pos = cands[0]
        a = placed[pos]
        b = placed[(pos + 1) % len(placed)]
        lo, hi = coords[a], coords[b]
        span = (hi - lo) % 1 or Fraction(1)
        mid = (lo + span / 2) % 1
        coords.append(mid)
        placed.insert(pos + 1, m)
    return coords
