"""Arithmetic on the real projective line.

Points are homogeneous pairs ``(p : q)`` standing for ``p / q``; the angle
coordinate ``phi`` with ``(sin phi : cos phi)`` identifies the line with
``R / pi Z``.  Increasing ``phi`` is the fixed positive orientation, which
agrees with the usual order on the finite reals and passes from ``+inf`` to
``-inf`` through the point at infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CoincidentPoints, DegenerateMap, DegenerateWindows

EPS_PT = 1e-10
PI = math.pi


def wrap_pi(phi):
    """Reduce angles to ``[0, pi)``."""
    return np.mod(phi, PI)


def angle_distance(phi1, phi2):
    """Fubini-Study distance between two angle coordinates, in ``[0, pi/2]``."""
    d = np.mod(np.asarray(phi1) - np.asarray(phi2), PI)
    return np.minimum(d, PI - d)


def angle_of_real(x):
    """Angle coordinate of real numbers (``inf`` allowed), vectorized."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(x), PI / 2, np.mod(np.arctan(x), PI))
    return out


@dataclass(frozen=True)
class ProjPoint:
    """A point ``(p : q)`` of the projective line, stored in canonical form.

    The representative has unit norm and ``q > 0`` (or ``q == 0, p > 0``).
    """

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        r = math.hypot(p, q)
        if not r > 0 or not math.isfinite(r):
            raise ValueError(f"invalid homogeneous pair ({p}, {q})")
        p, q = p / r, q / r
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_real(cls, x) -> "ProjPoint":
        if isinstance(x, str):
            if x.strip().lower() in ("inf", "+inf", "-inf", "infinity"):
                return INF
            x = float(x)
        x = float(x)
        if math.isinf(x):
            return INF
        return cls(x, 1.0)

    @classmethod
    def from_angle(cls, phi: float) -> "ProjPoint":
        return cls(math.sin(phi), math.cos(phi))

    @property
    def angle(self) -> float:
        """Representative angle in ``[0, pi)``."""
        return math.atan2(self.p, self.q) % PI

    @property
    def is_infinite(self) -> bool:
        return abs(self.q) <= 1e-300

    def to_real(self) -> float:
        if self.is_infinite:
            return math.inf
        return self.p / self.q

    def close_to(self, other: "ProjPoint", tol: float = EPS_PT) -> bool:
        return fubini_study_distance(self, other) <= tol

    def __repr__(self):
        x = self.to_real()
        return "ProjPoint(inf)" if math.isinf(x) else f"ProjPoint({x!r})"


INF = ProjPoint(1.0, 0.0)
ZERO = ProjPoint(0.0, 1.0)


def hom_det(a: ProjPoint, b: ProjPoint) -> float:
    """``a.p*b.q - a.q*b.p``: the difference ``a - b`` up to the factor ``a.q*b.q``."""
    return a.p * b.q - a.q * b.p


def fubini_study_distance(a: ProjPoint, b: ProjPoint) -> float:
    return float(angle_distance(a.angle, b.angle))


def cyclic_position(a: ProjPoint, b: ProjPoint, c: ProjPoint,
                    tol: float = EPS_PT) -> bool:
    """True iff moving from ``a`` in the positive direction reaches ``b`` before ``c``."""
    for u, v in ((a, b), (a, c), (b, c)):
        if u.close_to(v, tol):
            raise CoincidentPoints(f"{u} and {v} coincide")
    db = (b.angle - a.angle) % PI
    dc = (c.angle - a.angle) % PI
    return db < dc


def cyclically_ordered(points: Iterable[ProjPoint]) -> bool:
    """Whether the points are met in this order going once around the line."""
    pts = list(points)
    base = pts[0].angle
    offs = [(pt.angle - base) % PI for pt in pts]
    return all(offs[i] < offs[i + 1] for i in range(len(offs) - 1))


@dataclass(frozen=True)
class MobiusMap:
    """Real projective map ``x -> (a x + b) / (c x + d)``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = [float(v) for v in (self.a, self.b, self.c, self.d)]
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v)
        norm2 = sum(v * v for v in vals)
        if not norm2 > 0 or abs(self.det) <= 1e-12 * norm2:
            raise DegenerateMap(f"singular map {vals}")

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, theta: float) -> "MobiusMap":
        """Shift of the angle coordinate by ``theta`` (an isometry)."""
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, s, -s, c)

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def preserves_orientation(self) -> bool:
        return self.det > 0

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """``self o other``."""
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return apply_mobius(self, x)

    def condition(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def lift_angles(self, phi):
        """A continuous lift of the map to the angle line.

        Returns the argument of the image vector, unwrapped along ``phi``
        (which must be sorted).  Images differ from the true lift by a
        constant multiple of ``2 pi``.
        """
        phi = np.asarray(phi, dtype=float)
        s, c = np.sin(phi), np.cos(phi)
        p = self.a * s + self.b * c
        q = self.c * s + self.d * c
        return np.unwrap(np.arctan2(p, q))


def apply_mobius(m: MobiusMap, x: ProjPoint) -> ProjPoint:
    return ProjPoint(m.a * x.p + m.b * x.q, m.c * x.p + m.d * x.q)


@dataclass(frozen=True)
class Arc:
    """Closed arc traversed from ``start`` to ``end`` in the positive direction."""

    start: ProjPoint
    end: ProjPoint

    def __post_init__(self):
        if self.start.close_to(self.end):
            raise CoincidentPoints("arc endpoints coincide")

    @classmethod
    def from_reals(cls, a, b) -> "Arc":
        return cls(ProjPoint.from_real(a), ProjPoint.from_real(b))

    @property
    def length(self) -> float:
        return (self.end.angle - self.start.angle) % PI

    @property
    def contains_infinity(self) -> bool:
        return self.contains(INF, tol=0.0)

    def offset(self, phi):
        """Offsets of angles from the start, in ``[0, pi)``."""
        return np.mod(np.asarray(phi) - self.start.angle, PI)

    def contains_angle(self, phi, tol: float = EPS_PT):
        off = self.offset(phi)
        return (off <= self.length + tol) | (off >= PI - tol)

    def contains(self, x: ProjPoint, tol: float = EPS_PT) -> bool:
        return bool(self.contains_angle(x.angle, tol))

    def point_at(self, frac: float) -> ProjPoint:
        return ProjPoint.from_angle(self.start.angle + frac * self.length)

    def midpoint(self) -> ProjPoint:
        """Midpoint in the Fubini-Study metric."""
        return self.point_at(0.5)

    def angles(self, k: int) -> np.ndarray:
        """``k`` equally spaced (non-wrapped) angles from start to end inclusive."""
        return self.start.angle + np.linspace(0.0, self.length, k)

    def image(self, m: MobiusMap) -> "Arc":
        if m.preserves_orientation:
            return Arc(m(self.start), m(self.end))
        return Arc(m(self.end), m(self.start))

    def __repr__(self):
        return f"Arc({self.start.to_real()!r}, {self.end.to_real()!r})"


def cross_ratio(f) -> float:
    """Cross ratio of the two value windows.

    ``f`` exposes ``fminus`` and ``fplus`` arcs whose endpoints are cyclically
    ordered as ``fminus.start, fminus.end, fplus.start, fplus.end``.  Each
    difference is a homogeneous determinant, so endpoints at infinity are
    handled without division by zero.
    """
    m0, m1 = f.fminus.start, f.fminus.end
    p0, p1 = f.fplus.start, f.fplus.end
    pts = (m0, m1, p0, p1)
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i].close_to(pts[j]):
                raise DegenerateWindows("window endpoints coincide")
    num = hom_det(p1, m1) * hom_det(m0, p0)
    den = hom_det(p1, p0) * hom_det(m0, m1)
    return num / den
