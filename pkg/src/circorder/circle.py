"""Exact circle geometry: the rational projective line, Moebius and
piecewise-linear homeomorphisms, lifts to covers, and rotation numbers.

Everything is exact. A circle point is a :class:`ProjectivePoint`; maps also
work on *turn coordinates*, rationals in ``[0, 1)`` given by a fixed
piecewise-Moebius chart that sends infinity to 0, -1 to 1/4, 0 to 1/2 and 1
to 3/4. Counterclockwise means increasing affine coordinate, equivalently
increasing turn coordinate.

Lifts live on the line. A line coordinate ``X = sheet + u`` encodes the point
whose turn coordinate, measured from a cut point, is ``u``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd
from typing import Callable, Protocol, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class CutPointCollision(ValueError):
    pass


class SupportViolation(ValueError):
    pass


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True, order=False)
class ProjectivePoint:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if p == 0 and q == 0:
            raise ValueError("(0, 0) is not a projective point")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def of(cls, x) -> "ProjectivePoint":
        if isinstance(x, ProjectivePoint):
            return x
        if x is None or x == "inf":
            return INF
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @classmethod
    def from_turn(cls, t: Fraction) -> "ProjectivePoint":
        t = Fraction(t) % 1
        if t == 0:
            return INF
        if t < HALF:
            x = (2 * t - 1) / (2 * t)
        else:
            x = (2 * t - 1) / (2 - 2 * t)
        return cls(x.numerator, x.denominator)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    def affine(self) -> Fraction | None:
        return None if self.q == 0 else Fraction(self.p, self.q)

    def turn(self) -> Fraction:
        if self.q == 0:
            return ZERO
        x = Fraction(self.p, self.q)
        if x < 0:
            return 1 / (2 - 2 * x)
        return (2 * x + 1) / (2 * x + 2)

    def to_json(self) -> list[int]:
        return [self.p, self.q]

    def __str__(self) -> str:
        return "inf" if self.q == 0 else str(Fraction(self.p, self.q))


INF = ProjectivePoint(1, 0)


def _det(u: ProjectivePoint, v: ProjectivePoint) -> int:
    return u.p * v.q - u.q * v.p


def cyclic_ord(x: ProjectivePoint, y: ProjectivePoint, z: ProjectivePoint) -> int:
    """Orientation of three points on the projective line.

    The product of the three pairwise 2x2 determinants is invariant under
    rescaling each homogeneous vector and picks up det(M)^3 under a matrix M.
    """
    return _sign(_det(x, y) * _det(y, z) * _det(z, x))


def cyclic_sign(a, b, c) -> int:
    """Orientation of three numbers read as points of R / (period) Z.

    Inputs must be representatives from one fundamental interval.
    """
    if a == b or b == c or a == c:
        return 0
    if a < b < c or b < c < a or c < a < b:
        return 1
    return -1


def arc_contains(lo: Fraction, hi: Fraction, t: Fraction, *, closed: bool = True) -> bool:
    """Whether turn coordinate t lies on the counterclockwise arc lo -> hi."""
    span = (hi - lo) % 1
    d = (t - lo) % 1
    if closed:
        return d <= span if span else d == 0
    return 0 < d < span


class CircleMap(Protocol):
    def apply(self, x: ProjectivePoint) -> ProjectivePoint: ...

    def apply_turn(self, t: Fraction) -> Fraction: ...

    def inverse(self) -> "CircleMap": ...


@dataclass(frozen=True)
class MoebiusMap:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c <= 0:
            raise ValueError("Moebius map must have positive determinant")
        g = gcd(gcd(self.a, self.b), gcd(self.c, self.d))
        if g > 1:
            for name in "abcd":
                object.__setattr__(self, name, getattr(self, name) // g)

    @classmethod
    def from_rational(cls, entries: Sequence[Fraction]) -> "MoebiusMap":
        fr = [Fraction(e) for e in entries]
        den = 1
        for e in fr:
            den = den * e.denominator // gcd(den, e.denominator)
        ints = [int(e * den) for e in fr]
        return cls(*ints)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def hyperbolic(
        cls, attracting: ProjectivePoint, repelling: ProjectivePoint, multiplier: int
    ) -> "MoebiusMap":
        """The map fixing both points, with derivative ``1/multiplier`` at the
        attracting one."""
        if multiplier <= 1:
            raise ValueError("multiplier must exceed 1")
        # conjugate x -> m x (attracting infinity, repelling 0)
        pa, qa = attracting.p, attracting.q
        pr, qr = repelling.p, repelling.q
        det_p = pa * qr - pr * qa
        if det_p == 0:
            raise ValueError("fixed points must differ")
        # P diag(m, 1) adj(P)
        m = multiplier
        a = m * pa * qr - pr * qa
        b = -m * pa * pr + pr * pa
        c = m * qa * qr - qr * qa
        d = -m * qa * pr + qr * pa
        if det_p < 0:
            a, b, c, d = -a, -b, -c, -d
        return cls(a, b, c, d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def apply(self, x: ProjectivePoint) -> ProjectivePoint:
        return ProjectivePoint(self.a * x.p + self.b * x.q, self.c * x.p + self.d * x.q)

    def apply_turn(self, t: Fraction) -> Fraction:
        return self.apply(ProjectivePoint.from_turn(t)).turn()

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def to_json(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    @classmethod
    def from_json(cls, data) -> "MoebiusMap":
        (a, b), (c, d) = data
        return cls(int(a), int(b), int(c), int(d))


@dataclass(frozen=True)
class PLCircleMap:
    """Orientation-preserving piecewise-linear circle homeomorphism.

    Stored as breakpoint/value pairs in turn coordinates, sorted by breakpoint.
    Between consecutive breakpoints the map is affine in turn coordinates.
    """

    breaks: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    _spans: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if len(self.breaks) != len(self.values) or not self.breaks:
            raise ValueError("need matching, nonempty breakpoint and value lists")
        pairs = sorted(zip((Fraction(b) % 1 for b in self.breaks), (Fraction(v) % 1 for v in self.values)))
        bs = tuple(p[0] for p in pairs)
        vs = tuple(p[1] for p in pairs)
        if len(set(bs)) != len(bs):
            raise ValueError("breakpoints must be distinct")
        n = len(bs)
        spans = []
        total = ZERO
        for i in range(n):
            lb = (bs[(i + 1) % n] - bs[i]) % 1 or ONE
            lv = (vs[(i + 1) % n] - vs[i]) % 1 or ONE
            if n > 1 and vs[(i + 1) % n] == vs[i]:
                raise ValueError("values must be strictly cyclically increasing")
            spans.append((lb, lv))
            total += lv
        if n > 1 and total != 1:
            raise ValueError("values are not in the breakpoints' cyclic order")
        object.__setattr__(self, "breaks", bs)
        object.__setattr__(self, "values", vs)
        object.__setattr__(self, "_spans", tuple(spans))

    @classmethod
    def from_points(cls, pairs: Sequence[tuple[ProjectivePoint, ProjectivePoint]]) -> "PLCircleMap":
        return cls(tuple(b.turn() for b, _ in pairs), tuple(v.turn() for _, v in pairs))

    @classmethod
    def identity(cls) -> "PLCircleMap":
        return cls((ZERO,), (ZERO,))

    @classmethod
    def rotation(cls, angle: Fraction) -> "PLCircleMap":
        return cls((ZERO,), (Fraction(angle) % 1,))

    def apply_turn(self, t: Fraction) -> Fraction:
        t = t % 1
        i = bisect_right(self.breaks, t) - 1
        if i < 0:
            i = len(self.breaks) - 1
        d = (t - self.breaks[i]) % 1
        if d == 0:
            return self.values[i]
        lb, lv = self._spans[i]
        return (self.values[i] + d * lv / lb) % 1

    def apply(self, x: ProjectivePoint) -> ProjectivePoint:
        return ProjectivePoint.from_turn(self.apply_turn(x.turn()))

    def inverse(self) -> "PLCircleMap":
        return PLCircleMap(self.values, self.breaks)

    def compose(self, inner: "PLCircleMap") -> "PLCircleMap":
        """self after inner."""
        inv = inner.inverse()
        bs = set(inner.breaks) | {inv.apply_turn(b) for b in self.breaks}
        bs = sorted(bs)
        return PLCircleMap(tuple(bs), tuple(self.apply_turn(inner.apply_turn(b)) for b in bs))

    def is_identity(self) -> bool:
        return all(b == v for b, v in zip(self.breaks, self.values))

    def to_json(self) -> list:
        return [
            [ProjectivePoint.from_turn(b).to_json(), ProjectivePoint.from_turn(v).to_json()]
            for b, v in zip(self.breaks, self.values)
        ]

    @classmethod
    def from_json(cls, data) -> "PLCircleMap":
        pairs = [(ProjectivePoint(*b), ProjectivePoint(*v)) for b, v in data]
        return cls.from_points(pairs)


@dataclass(frozen=True)
class Composite:
    """Composition of circle maps; ``maps[0]`` acts last."""

    maps: tuple

    def apply_turn(self, t: Fraction) -> Fraction:
        for m in reversed(self.maps):
            t = m.apply_turn(t)
        return t

    def apply(self, x: ProjectivePoint) -> ProjectivePoint:
        for m in reversed(self.maps):
            x = m.apply(x)
        return x

    def inverse(self) -> "Composite":
        return Composite(tuple(m.inverse() for m in reversed(self.maps)))


def compose(*maps):
    """Compose circle maps left to right as written (rightmost acts first)."""
    if all(isinstance(m, MoebiusMap) for m in maps):
        out = MoebiusMap.identity()
        for m in maps:
            out = out @ m
        return out
    if all(isinstance(m, PLCircleMap) for m in maps):
        out = PLCircleMap.identity()
        for m in maps:
            out = out.compose(m)
        return out
    flat = []
    for m in maps:
        flat.extend(m.maps if isinstance(m, Composite) else [m])
    return Composite(tuple(flat))


def apply(m, x: ProjectivePoint) -> ProjectivePoint:
    return m.apply(x)


def perturb(m: PLCircleMap, bump: PLCircleMap, arc: tuple[Fraction, Fraction]) -> PLCircleMap:
    """bump after m, after checking bump is the identity off the open arc.

    ``arc`` is a pair of turn coordinates read counterclockwise.
    """
    lo, hi = (Fraction(a) % 1 for a in arc)
    check = [lo, hi] + [b for b in bump.breaks if not arc_contains(lo, hi, b, closed=False)]
    for t in check:
        if bump.apply_turn(t) != t:
            raise SupportViolation(f"bump moves {t} outside the arc ({lo}, {hi})")
    return bump.compose(m)


# --- covers and lifts ------------------------------------------------------


@dataclass(frozen=True)
class CoverPoint:
    """A point of the line (or of a k-fold cover) over the base circle.

    ``sheet`` counts full turns past the cut point; on a k-fold cover it is
    read modulo k.
    """

    base: ProjectivePoint
    sheet: int


@dataclass(frozen=True)
class Cut:
    point: ProjectivePoint = INF

    @property
    def turn(self) -> Fraction:
        return self.point.turn()

    def offset(self, t: Fraction) -> Fraction:
        """Turn coordinate measured from the cut; raises on collision."""
        u = (t - self.turn) % 1
        if u == 0:
            raise CutPointCollision(f"point {ProjectivePoint.from_turn(t)} is the cut point")
        return u

    def to_line(self, p: CoverPoint) -> Fraction:
        return p.sheet + self.offset(p.base.turn())

    def from_line(self, x: Fraction) -> CoverPoint:
        sheet = floor(x)
        u = x - sheet
        if u == 0:
            raise CutPointCollision("line point sits over the cut point")
        return CoverPoint(ProjectivePoint.from_turn(u + self.turn), sheet)

    def line_of_turn(self, t: Fraction, sheet: int = 0) -> Fraction:
        return sheet + self.offset(t)

    def base_turn(self, x: Fraction) -> Fraction:
        return (x + self.turn) % 1


@dataclass(frozen=True)
class LiftedMap:
    """The continuous lift of ``base`` to the line sending ``ref_in`` to ``ref_out``.

    Both references are line coordinates for ``cut``; their fractional parts
    must be related by the base map.
    """

    base: object
    ref_in: Fraction
    ref_out: Fraction
    cut: Cut = Cut()

    def __post_init__(self):
        t_in = self.cut.base_turn(self.ref_in)
        t_out = self.cut.base_turn(self.ref_out)
        if self.base.apply_turn(t_in) != t_out:
            raise ValueError("reference assignment does not cover the base map")

    @classmethod
    def through(cls, base, point: ProjectivePoint, displacement: int = 0, cut: Cut = Cut()) -> "LiftedMap":
        """Lift taking the sheet-0 copy of ``point`` to sheet ``displacement``
        (plus whatever crossing of the cut the short image arc forces)."""
        x = cut.line_of_turn(point.turn())
        y = cut.line_of_turn(base.apply_turn(point.turn()), displacement)
        return cls(base, x, y, cut)

    @classmethod
    def fixed_point_lift(cls, base, fixed: ProjectivePoint, cut: Cut = Cut()) -> "LiftedMap":
        if base.apply(fixed) != fixed:
            raise ValueError(f"{fixed} is not fixed by the map")
        x = cut.line_of_turn(fixed.turn())
        return cls(base, x, x, cut)

    @classmethod
    def identity(cls, displacement: int = 0, cut: Cut = Cut()) -> "LiftedMap":
        x = cut.line_of_turn(HALF + cut.turn)
        return cls(PLCircleMap.identity(), x, x + displacement, cut)

    def line_apply(self, x: Fraction) -> Fraction:
        delta = x - self.ref_in
        n = floor(delta)
        f = delta - n
        if f == 0:
            return self.ref_out + n
        t = self.cut.base_turn(x)
        self.cut.offset(t)
        image = self.base.apply_turn(t)
        u_img = self.cut.offset(image)
        u_ref = self.ref_out - floor(self.ref_out)
        return self.ref_out + ((u_img - u_ref) % 1) + n

    def __call__(self, x: Fraction) -> Fraction:
        return self.line_apply(x)

    def apply(self, p: CoverPoint) -> CoverPoint:
        return self.cut.from_line(self.line_apply(self.cut.to_line(p)))

    def after(self, inner: "LiftedMap") -> "LiftedMap":
        """self composed after inner."""
        if inner.cut != self.cut:
            raise ValueError("lifts use different cut points")
        return LiftedMap(compose(self.base, inner.base), inner.ref_in, self.line_apply(inner.ref_out), self.cut)

    def inverse(self) -> "LiftedMap":
        return LiftedMap(self.base.inverse(), self.ref_out, self.ref_in, self.cut)

    def shifted(self, n: int) -> "LiftedMap":
        return LiftedMap(self.base, self.ref_in, self.ref_out + n, self.cut)


def lift_apply(lm: LiftedMap, p: CoverPoint) -> CoverPoint:
    return lm.apply(p)


def _iterate(f: Callable[[Fraction], Fraction], x: Fraction, times: int) -> Fraction:
    for _ in range(times):
        x = f(x)
    return x


def _candidates(lo: Fraction, hi: Fraction, max_den: int) -> list[Fraction]:
    """Rationals strictly between lo and hi with denominator <= max_den."""
    found = set()
    for q in range(1, max_den + 1):
        p = floor(lo * q) + 1
        while Fraction(p, q) < hi:
            found.add(Fraction(p, q))
            p += 1
    return sorted(found)


def _certify(lm: LiftedMap, tau: Fraction, start: Fraction, grid_cap: int) -> bool:
    """Look for a sign change of F^q - id - p on the line (an exact fixed
    point of F^q translated by -p, hence translation number p/q)."""
    p, q = tau.numerator, tau.denominator

    def g(x):
        return _iterate(lm.line_apply, x, q) - x - p

    seen_neg = seen_pos = False
    m = 1
    while m <= grid_cap:
        for j in range(m):
            if m > 1 and j % 2 == 0:
                continue
            x = start + Fraction(j, m)
            try:
                v = g(x)
            except CutPointCollision:
                continue
            if v == 0:
                return True
            seen_neg |= v < 0
            seen_pos |= v > 0
            if seen_neg and seen_pos:
                return True
        m *= 2
    return False


def translation_number(
    lm: LiftedMap, max_denominator: int, *, step_cap: int = 2**16, grid_cap: int = 2**12
) -> Fraction | None:
    """Certified translation number of a lift, or None when undetermined.

    For N iterates, |F^N(x) - x - N tau| < 1, so tau lies in an open window of
    width 2/N. Once the window holds a single rational with small enough
    denominator it is certified by an exact sign change of F^q - id - p.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    x0 = lm.ref_in
    x = x0
    done = 0
    n = 1
    tried = set()
    while n <= step_cap:
        x = _iterate(lm.line_apply, x, n - done)
        done = n
        d = x - x0
        lo, hi = (d - 1) / n, (d + 1) / n
        cands = _candidates(lo, hi, max_denominator)
        if not cands:
            return None
        if len(cands) == 1 and cands[0] not in tried:
            tried.add(cands[0])
            if _certify(lm, cands[0], x0, grid_cap):
                return cands[0]
        if Fraction(2, n) < Fraction(1, 2 * max_denominator**2) and len(cands) <= 1:
            return None
        n *= 2
    return None


def rotation_number(
    lm: LiftedMap, max_denominator: int, cover_degree: int = 1, **kwargs
) -> Fraction | None:
    """Rotation number (in turns of the k-fold cover) of a line lift, read on
    the k-fold cyclic cover; None means undetermined."""
    tau = translation_number(lm, max_denominator, **kwargs)
    if tau is None:
        return None
    return (tau / cover_degree) % 1
