"""Band systems, value windows and range checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateImage, DegenerateWindows, OutOfRange
from .projline import (EPS_PT, PI, Arc, MobiusMap, ProjPoint, angle_distance,
                       cross_ratio, cyclically_ordered)
from .ratfun import RealRational, boundary_solutions

EPS_MEM = 1e-6
PLUS, MINUS = "plus", "minus"


def _check_kind(kind: str) -> str:
    if kind not in (PLUS, MINUS):
        raise ValueError(f"band type must be 'plus' or 'minus', got {kind!r}")
    return kind


@dataclass(frozen=True)
class Band:
    arc: Arc
    kind: str
    id: str

    def __post_init__(self):
        _check_kind(self.kind)


@dataclass(frozen=True)
class Transition:
    id: str
    arc: Arc
    left: str   # kind of the band before it
    right: str  # kind of the band after it

    @property
    def mixed(self) -> bool:
        """Surrounded by one pass band and one stop band."""
        return self.left != self.right


@dataclass(frozen=True)
class BandSystem:
    """Bands listed in cyclic (positive) order.

    Transition ``k`` lies between ``bands[k]`` and ``bands[k+1]`` (cyclically)
    and carries the stable id ``transition_ids[k]``.
    """

    bands: tuple
    transition_ids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))
        if not self.transition_ids:
            object.__setattr__(self, "transition_ids",
                               tuple(f"T{k}" for k in range(len(self.bands))))
        if len(self.transition_ids) != len(self.bands):
            raise ValueError("one transition id per band required")

    @classmethod
    def from_intervals(cls, items) -> "BandSystem":
        """``items``: iterable of ``(kind, start, end)`` in cyclic order."""
        bands = [Band(Arc.from_reals(a, b), _check_kind(k), f"B{i}")
                 for i, (k, a, b) in enumerate(items)]
        return cls(tuple(bands))

    @property
    def m(self) -> int:
        return len(self.bands)

    @property
    def transitions(self) -> list[Transition]:
        out = []
        for k, tid in enumerate(self.transition_ids):
            b0, b1 = self.bands[k], self.bands[(k + 1) % self.m]
            out.append(Transition(tid, Arc(b0.arc.end, b1.arc.start), b0.kind, b1.kind))
        return out

    def transition(self, tid: str) -> Transition:
        for t in self.transitions:
            if t.id == tid:
                return t
        raise KeyError(tid)

    def bands_of(self, kind: str) -> list[Band]:
        return [b for b in self.bands if b.kind == kind]

    @property
    def has_infinite_endpoint(self) -> bool:
        return any(b.arc.start.is_infinite or b.arc.end.is_infinite for b in self.bands)

    def band_containing(self, x: ProjPoint, tol: float = EPS_PT) -> Band | None:
        for b in self.bands:
            if b.arc.contains(x, tol):
                return b
        return None

    def to_json(self) -> list:
        def enc(pt):
            v = pt.to_real()
            return "inf" if math.isinf(v) else v
        return [{"type": b.kind, "start": enc(b.arc.start), "end": enc(b.arc.end)}
                for b in self.bands]

    @classmethod
    def from_json(cls, items, transition_ids=None) -> "BandSystem":
        sys_ = cls.from_intervals([(d["type"], d["start"], d["end"]) for d in items])
        if transition_ids:
            sys_ = BandSystem(sys_.bands, tuple(transition_ids))
        return sys_


def validate(e: BandSystem) -> list[str]:
    """All violated band-system invariants (empty list when valid)."""
    out = []
    if e.m < 2:
        out.append(f"need at least 2 bands, got {e.m}")
    kinds = {b.kind for b in e.bands}
    for kind in (PLUS, MINUS):
        if kind not in kinds:
            out.append(f"empty type: no {kind} band")
    for i in range(e.m):
        for j in range(i + 1, e.m):
            a, b = e.bands[i].arc, e.bands[j].arc
            if (a.contains(b.start, 0.0) or a.contains(b.end, 0.0)
                    or b.contains(a.start, 0.0)):
                out.append(f"overlap: bands {e.bands[i].id} and {e.bands[j].id}")
    if e.m >= 2 and not any("overlap" in v for v in out):
        pts = []
        for b in e.bands:
            pts += [b.arc.start, b.arc.end]
        if not cyclically_ordered(pts):
            out.append("bands are not listed in cyclic order")
    if len(set(e.transition_ids)) != len(e.transition_ids):
        out.append("duplicate transition ids")
    return out


def transform(e: BandSystem, m: MobiusMap) -> BandSystem:
    """Image ``m(E)``; types and transition ids are carried along."""
    bands = [Band(b.arc.image(m), b.kind, b.id) for b in e.bands]
    ends = [pt for b in bands for pt in (b.arc.start, b.arc.end)]
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            if ends[i].close_to(ends[j]):
                raise DegenerateImage("band endpoints collide under the map")
    tids = list(e.transition_ids)
    if not m.preserves_orientation:
        k = e.m
        bands = bands[::-1]
        tids = [e.transition_ids[(k - 2 - i) % k] for i in range(k)]
    return BandSystem(tuple(bands), tuple(tids))


# -- value windows ---------------------------------------------------------

@dataclass(frozen=True)
class ValueWindows:
    """Stop window ``fminus`` and pass window ``fplus``.

    The endpoints ``fminus.start, fminus.end, fplus.start, fplus.end`` are
    cyclically ordered; ``start`` is the ``0`` boundary and ``end`` the ``1``
    boundary of each window.
    """

    fminus: Arc
    fplus: Arc

    def __post_init__(self):
        pts = self.endpoints()
        for i in range(4):
            for j in range(i + 1, 4):
                if pts[i].close_to(pts[j]):
                    raise DegenerateWindows("window endpoints coincide")
        if not cyclically_ordered(pts):
            raise DegenerateWindows("windows overlap or are misordered")

    @classmethod
    def from_reals(cls, m0, m1, p0, p1) -> "ValueWindows":
        return cls(Arc.from_reals(m0, m1), Arc.from_reals(p0, p1))

    def endpoints(self) -> tuple:
        return (self.fminus.start, self.fminus.end, self.fplus.start, self.fplus.end)

    def window(self, kind: str) -> Arc:
        return self.fplus if kind == PLUS else self.fminus

    def boundary(self, kind: str, parity: int) -> ProjPoint:
        w = self.window(kind)
        return w.end if parity else w.start

    @property
    def kappa(self) -> float:
        return cross_ratio(self)

    @property
    def lift_anchor(self):
        """Canonical lifted copy of the windows as angle intervals ``(minus, plus)``."""
        m0 = self.fminus.start.angle
        m1 = m0 + self.fminus.length
        p0 = m1 + (self.fplus.start.angle - m1) % PI
        return (m0, m1), (p0, p0 + self.fplus.length)

    def transform(self, m: MobiusMap) -> "ValueWindows":
        return ValueWindows(self.fminus.image(m), self.fplus.image(m))

    def to_json(self) -> list:
        out = []
        for pt in self.endpoints():
            v = pt.to_real()
            out.append("inf" if math.isinf(v) else v)
        return out

    @classmethod
    def from_json(cls, d) -> "ValueWindows":
        if isinstance(d, dict):
            if "mu" in d:
                return windows_from_mu(float(d["mu"]))
            if "theta" in d:
                return windows_from_theta(float(d["theta"]))
            d = d["endpoints"]
        return cls.from_reals(*d)


def windows_from_mu(mu: float) -> ValueWindows:
    """``F+ = [1-mu, 1+mu]``, ``F- = -F+``."""
    if not 0 < mu < 1:
        raise OutOfRange(f"mu must lie in (0, 1), got {mu}")
    return ValueWindows.from_reals(-1 - mu, -1 + mu, 1 - mu, 1 + mu)


def windows_from_theta(theta: float) -> ValueWindows:
    """``F+ = [-theta, theta]`` and ``F-`` the arc from ``1/theta`` through infinity to ``-1/theta``."""
    if not 0 < theta < 1:
        raise OutOfRange(f"theta must lie in (0, 1), got {theta}")
    return ValueWindows.from_reals(1 / theta, -1 / theta, -theta, theta)


def kappa_from_mu(mu: float) -> float:
    return mu ** -2


def kappa_from_theta(theta: float) -> float:
    return (0.5 * (theta + 1 / theta)) ** 2


# -- ranges -------------------------------------------------------------------

def arc_excess(arc: Arc, phi):
    """Angular distance of values outside ``arc`` (zero inside)."""
    off = arc.offset(phi)
    L = arc.length
    out = np.where(off <= L, 0.0, np.minimum(off - L, PI - off))
    return out


def band_candidates(r: RealRational, band: Arc, targets=(), crit=None) -> np.ndarray:
    """Source angles (unwrapped along the band) where the range of ``r`` is decided.

    Band endpoints, critical points, solutions of ``r = c`` for each target
    ``c``, and midpoints between consecutive such points.
    """
    if crit is None:
        crit = r.critical_points()
    offs = [0.0, band.length]
    for x in crit:
        if band.contains(x, 0.0):
            offs.append(float(band.offset(x.angle)))
    if r.actual_degree > 0:
        for c in targets:
            for x, _ in boundary_solutions(r, c, band, tol=0.0):
                offs.append(float(band.offset(x.angle)))
    offs = np.unique(np.clip(offs, 0.0, band.length))
    mids = 0.5 * (offs[1:] + offs[:-1])
    return band.start.angle + np.sort(np.concatenate([offs, mids]))


def max_excess(r: RealRational, e: BandSystem, f: ValueWindows) -> float:
    """Largest Fubini-Study distance by which ``r(E)`` leaves the matching windows."""
    crit = r.critical_points()
    worst = 0.0
    for b in e.bands:
        w = f.window(b.kind)
        phi = band_candidates(r, b.arc, (w.start, w.end), crit)
        worst = max(worst, float(np.max(arc_excess(w, r.values_at_angles(phi)))))
    return worst


def membership(e: BandSystem, f: ValueWindows, r: RealRational,
               tol: float = EPS_MEM) -> bool:
    """Whether ``r(E+)`` lies in ``F+`` and ``r(E-)`` in ``F-`` (within ``tol``)."""
    return max_excess(r, e, f) <= tol


def _lifted_range(r: RealRational, band: Arc, crit) -> tuple[float, float]:
    """Lifted value interval ``[lo, hi]`` (angles) of ``r`` over the band."""
    phi = band_candidates(r, band, (), crit)
    phi = np.unique(np.concatenate([phi, band.angles(65)]))
    for _ in range(40):
        v = np.unwrap(r.values_at_angles(phi), period=PI)
        jumps = np.abs(np.diff(v))
        bad = np.nonzero(jumps >= PI / 4)[0]
        if not len(bad):
            break
        phi = np.sort(np.concatenate([phi, 0.5 * (phi[bad] + phi[bad + 1])]))
    return float(v.min()), float(v.max())


def _arcs_meet(a0, la, b0, lb) -> bool:
    return (b0 - a0) % PI <= la or (a0 - b0) % PI <= lb


def _cover(arcs, avoid):
    """Smallest arc containing all ``arcs`` and disjoint from every arc in ``avoid``."""
    best = None
    for s, _ in arcs:
        L = max((s2 - s) % PI + l2 for s2, l2 in arcs)
        if L >= PI:
            continue
        if any(_arcs_meet(s, L, a0, la) for a0, la in avoid):
            continue
        if best is None or L < best[1]:
            best = (s % PI, L)
    return best


def tight_windows(r: RealRational, e: BandSystem) -> ValueWindows:
    """Smallest windows containing ``r(E+)`` and ``r(E-)``."""
    crit = r.critical_points()
    arcs = {PLUS: [], MINUS: []}
    for b in e.bands:
        lo, hi = _lifted_range(r, b.arc, crit)
        if hi - lo >= PI:
            raise DegenerateWindows(f"image of band {b.id} wraps the whole line")
        arcs[b.kind].append((lo % PI, hi - lo))
    plus = _cover(arcs[PLUS], arcs[MINUS])
    if plus is None:
        raise DegenerateWindows("ranges on pass and stop bands interlace")
    minus = _cover(arcs[MINUS], [plus])
    if minus is None:
        raise DegenerateWindows("ranges on pass and stop bands interlace")
    if plus[1] <= EPS_PT or minus[1] <= EPS_PT:
        raise DegenerateWindows("function is constant on a band type")
    fm = Arc(ProjPoint.from_angle(minus[0]), ProjPoint.from_angle(minus[0] + minus[1]))
    fp = Arc(ProjPoint.from_angle(plus[0]), ProjPoint.from_angle(plus[0] + plus[1]))
    return ValueWindows(fm, fp)


def enlarge(f: ValueWindows, pad: float) -> ValueWindows:
    """Grow both windows by ``pad`` (angle) at each end."""
    def grow(a: Arc) -> Arc:
        return Arc(ProjPoint.from_angle(a.start.angle - pad),
                   ProjPoint.from_angle(a.start.angle + a.length + pad))
    return ValueWindows(grow(f.fminus), grow(f.fplus))


def strictly_inside(inner: ValueWindows, outer: ValueWindows, tol: float = 0.0) -> bool:
    for k in (PLUS, MINUS):
        a, b = inner.window(k), outer.window(k)
        if not (b.contains(a.start, tol) and b.contains(a.end, tol)):
            return False
        if (b.offset(a.start.angle) + a.length) > b.length + tol:
            return False
    return True


def mu_form(f: ValueWindows) -> tuple[MobiusMap, ValueWindows]:
    """Orientation-preserving map sending ``f`` to ``windows_from_mu(kappa**-0.5)``."""
    mu = f.kappa ** -0.5
    target = windows_from_mu(mu)
    beta = three_point_map(f.endpoints()[:3], target.endpoints()[:3])
    return beta, target


def three_point_map(src, dst) -> MobiusMap:
    """The projective map sending three points to three points."""
    def to_std(pts):
        # sends pts to (0, inf, 1) in the order (a, b, c)
        a, b, c = pts
        m = np.array([[a.q, -a.p], [b.q, -b.p]], dtype=float)
        # x -> (x - a)/(x - b) scaled so c -> 1
        num = m[0, 0] * c.p + m[0, 1] * c.q
        den = m[1, 0] * c.p + m[1, 1] * c.q
        return np.array([[m[0, 0] * den, m[0, 1] * den], [m[1, 0] * num, m[1, 1] * num]])
    A = to_std(src)
    B = to_std(dst)
    Binv = np.array([[B[1, 1], -B[0, 1]], [-B[1, 0], B[0, 0]]])
    M = Binv @ A
    return MobiusMap.from_matrix(M / np.max(np.abs(M)))


def excess_profile(r: RealRational, e: BandSystem, f: ValueWindows, k: int = 200):
    """Sampled ``(x, value, signed distance to the window boundary)`` for plotting."""
    rows = []
    for b in e.bands:
        w = f.window(b.kind)
        phi = b.arc.angles(k)
        vals = r.values_at_angles(phi)
        off = w.offset(vals)
        inside = off <= w.length
        dist = np.where(inside, np.minimum(off, w.length - off), -arc_excess(w, vals))
        xs = np.tan(np.mod(phi + PI / 2, PI) - PI / 2)
        ys = np.tan(np.mod(vals + PI / 2, PI) - PI / 2)
        for x, y, d in zip(xs, ys, dist):
            rows.append((b.id, float(x), float(y), float(d)))
    return rows


__all__ = [
    "Band", "BandSystem", "Transition", "ValueWindows", "validate", "transform",
    "windows_from_mu", "windows_from_theta", "membership", "max_excess",
    "tight_windows", "enlarge", "mu_form", "three_point_map", "PLUS", "MINUS",
    "EPS_MEM", "kappa_from_mu", "kappa_from_theta", "angle_distance",
]
