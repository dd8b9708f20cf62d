"""Phase lifting and transition indexes of rational functions.

The lift of ``R = P/Q`` is ``Arg(Q + iP)`` followed continuously along a
source arc.  Between consecutive real zeros of ``P`` and ``Q`` the vector
``(Q, P)`` stays in one closed quadrant, so sampling at those zeros and at
the midpoints between them makes every step smaller than ``pi/2`` and the
unwrapped lift exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bands import (MINUS, PLUS, BandSystem, ValueWindows, enlarge, max_excess)
from .errors import AnchorMismatch, LiftFailure, PreconditionViolated
from .projline import INF, PI, ZERO, Arc, MobiusMap, ProjPoint
from .ratfun import RealRational, boundary_solutions, evaluate

ANCHOR_TOL = 1e-7
CANONICAL, FLIPPED = "canonical", "flipped"


@dataclass(frozen=True)
class Anchor:
    """Lifted copies of ``F-`` and ``F+`` as angle intervals."""

    minus: tuple
    plus: tuple
    convention: str = CANONICAL

    def interval(self, kind: str) -> tuple:
        return self.plus if kind == PLUS else self.minus


def anchor_for(f: ValueWindows, convention: str = CANONICAL) -> Anchor:
    """Canonical anchor, or the one with the two lifts of ``F+`` exchanged."""
    minus, plus = f.lift_anchor
    if convention == FLIPPED:
        plus = (plus[0] + PI, plus[1] + PI)
    elif convention != CANONICAL:
        raise ValueError(f"unknown convention {convention!r}")
    return Anchor(minus, plus, convention)


@dataclass(frozen=True)
class PhaseLift:
    angles: np.ndarray  # source angles, increasing along the arc
    phi: np.ndarray     # lifted values Arg(Q + iP)

    @property
    def samples(self) -> list:
        return [(ProjPoint.from_angle(a), float(p)) for a, p in zip(self.angles, self.phi)]

    @property
    def start(self) -> float:
        return float(self.phi[0])

    @property
    def end(self) -> float:
        return float(self.phi[-1])

    @property
    def variation(self) -> float:
        return float(np.max(self.phi) - np.min(self.phi))


def _shift_into(phi0: float, interval, tol: float = ANCHOR_TOL) -> int | None:
    lo, hi = interval
    k = math.ceil((lo - tol - phi0) / PI)
    return k if phi0 + k * PI <= hi + tol else None


def lift_phase(r: RealRational, t: Arc, f: ValueWindows | None = None,
               anchor: Anchor | None = None, start_kind: str | None = None,
               extra: int = 32) -> PhaseLift:
    """Continuous lift of ``r`` along ``t``.

    With windows given, the lift is shifted by a multiple of ``pi`` (a sign
    change of ``(P, Q)``) so that its start lies in the anchor interval of
    ``start_kind`` (inferred from the start value when omitted).
    """
    offs = [0.0, t.length]
    if r.actual_degree > 0:
        for c in (ZERO, INF):
            for x, _ in boundary_solutions(r, c, t, tol=0.0):
                offs.append(float(t.offset(x.angle)))
    offs = np.unique(np.clip(offs, 0.0, t.length))
    offs = np.unique(np.concatenate([offs, 0.5 * (offs[1:] + offs[:-1]),
                                     np.linspace(0.0, t.length, extra)]))
    for _ in range(40):
        ang = t.start.angle + offs
        P, Q = r.hom_values(np.sin(ang), np.cos(ang))
        raw = np.arctan2(P, Q)
        steps = np.angle(np.exp(1j * np.diff(raw)))
        bad = np.nonzero(np.abs(steps) > PI / 2 + 1e-9)[0]
        if not len(bad):
            break
        # root sampling was inexact: bisect the offending steps
        offs = np.sort(np.concatenate([offs, 0.5 * (offs[bad] + offs[bad + 1])]))
    else:
        raise LiftFailure("phase step exceeds a quarter turn; P and Q nearly cancel")
    phi = raw[0] + np.concatenate([[0.0], np.cumsum(steps)])
    if f is not None:
        anchor = anchor or anchor_for(f)
        if start_kind is None:
            v = ProjPoint.from_angle(phi[0])
            start_kind = PLUS if f.fplus.contains(v, ANCHOR_TOL) else MINUS
        k = _shift_into(float(phi[0]), anchor.interval(start_kind))
        if k is None:
            raise AnchorMismatch("start value is outside its window")
        phi = phi + k * PI
    return PhaseLift(ang, phi)


def transition_index(r: RealRational, tid: str, e: BandSystem, f: ValueWindows,
                     convention: str = CANONICAL, anchor: Anchor | None = None):
    """Integer and binary transition index of ``r`` on transition ``tid``."""
    t = e.transition(tid)
    anchor = anchor or anchor_for(f, convention)
    lift = lift_phase(r, t.arc, f, anchor, t.left)
    lo, hi = anchor.interval(t.right)
    k = math.floor((lift.end - lo + ANCHOR_TOL) / PI)
    if lift.end - k * PI > hi + ANCHOR_TOL:
        raise AnchorMismatch(f"end value on {tid} is outside its window")
    return k, k % 2


@dataclass(frozen=True)
class IndexArray:
    """Binary (and optionally integer) transition indexes keyed by transition id."""

    bits: dict
    ints: dict = field(default_factory=dict)
    convention: str = CANONICAL
    parity_ok: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "bits", {k: int(v) % 2 for k, v in self.bits.items()})

    def __getitem__(self, tid) -> int:
        return self.bits[tid]

    def total(self) -> int:
        return sum(self.bits.values())

    def ones(self) -> int:
        return self.total()

    def consistent_with(self, n: int) -> bool:
        """The index sum has the parity of the degree."""
        return self.total() % 2 == n % 2

    def hamming(self, other: "IndexArray") -> int:
        return sum((self.bits[k] - other.bits[k]) % 2 for k in self.bits)

    def flipped_at(self, *tids) -> "IndexArray":
        bits = dict(self.bits)
        for t in tids:
            bits[t] ^= 1
        return IndexArray(bits, {}, self.convention)

    def same_bits(self, other: "IndexArray") -> bool:
        return self.bits == other.bits

    def to_json(self) -> dict:
        return {"convention": self.convention,
                "bands": {k: {"bin": self.bits[k], "int": self.ints.get(k)}
                          for k in self.bits}}

    @classmethod
    def from_json(cls, d) -> "IndexArray":
        if isinstance(d, dict) and "bands" in d:
            bands = d["bands"]
            bits = {k: (v["bin"] if isinstance(v, dict) else v) for k, v in bands.items()}
            ints = {k: v.get("int") for k, v in bands.items() if isinstance(v, dict)
                    and v.get("int") is not None}
            return cls(bits, ints, d.get("convention", CANONICAL))
        if isinstance(d, dict):
            return cls(dict(d))
        raise ValueError("index array must be an object")


def index_array(r: RealRational, e: BandSystem, f: ValueWindows,
                convention: str = CANONICAL, anchor: Anchor | None = None) -> IndexArray:
    anchor = anchor or anchor_for(f, convention)
    bits, ints = {}, {}
    for t in e.transitions:
        k, b = transition_index(r, t.id, e, f, anchor=anchor)
        bits[t.id], ints[t.id] = b, k
    arr = IndexArray(bits, ints, anchor.convention)
    ok = arr.consistent_with(r.actual_degree)
    return IndexArray(bits, ints, anchor.convention, ok)


def group_index(arr: IndexArray, tids) -> int:
    """Index of an arc with endpoints in ``E``: the sum over its transitions."""
    return sum(arr.bits[t] for t in tids) % 2


def relabel(arr: IndexArray, e: BandSystem) -> IndexArray:
    """Switch anchor convention: bits flip exactly on mixed transitions."""
    bits = {t.id: arr.bits[t.id] ^ int(t.mixed) for t in e.transitions}
    conv = FLIPPED if arr.convention == CANONICAL else CANONICAL
    return IndexArray(bits, {}, conv)


def transport(arr: IndexArray, e: BandSystem, beta: MobiusMap | None = None) -> IndexArray:
    """Class array for the problem moved by a source map and a target map ``beta``.

    Transition ids travel with the source map, so only an orientation
    reversing target map matters: it exchanges the anchor labeling.
    """
    if beta is None or beta.preserves_orientation:
        return IndexArray(dict(arr.bits), {}, arr.convention)
    out = relabel(arr, e)
    return IndexArray(out.bits, {}, arr.convention)


def interior_point(t: Arc, frac: float = 0.5) -> ProjPoint:
    """A finite point inside the arc, avoiding the neighbourhood of infinity."""
    for fr in (frac, 0.3, 0.7, 0.2, 0.8):
        x = t.point_at(fr)
        if abs(x.to_real()) < 1e6:
            return x
    raise PreconditionViolated("no usable finite interior point")


def zero_shift_check(r: RealRational, tid: str, eps: float, e: BandSystem, f: ValueWindows,
                     x0: ProjPoint | None = None) -> bool:
    """Check ``sigma(R (x - x0 + eps)/(x - x0), T) = sigma(R, T) - sign(eps R(x0))``."""
    t = e.transition(tid)
    x0 = x0 or interior_point(t.arc)
    if x0.is_infinite or not t.arc.contains(x0, 0.0):
        raise PreconditionViolated("x0 must be a finite interior point of T")
    a = x0.to_real()
    if eps == 0 or not t.arc.contains(ProjPoint.from_real(a - eps), 0.0):
        raise PreconditionViolated("x0 - eps must stay inside T")
    v = evaluate(r, x0)
    if v.is_infinite or abs(v.p) < 1e-12:
        raise PreconditionViolated("R(x0) must be finite and nonzero")
    from numpy.polynomial import polynomial as npoly
    r2 = RealRational(npoly.polymul(r.pcoef, [eps - a, 1.0]),
                      npoly.polymul(r.qcoef, [-a, 1.0]), r.nominal_degree + 1)
    if r2.actual_degree != r.actual_degree + 1:
        raise PreconditionViolated("perturbation cancelled against R")
    pad = max(max_excess(r2, e, f), max_excess(r, e, f)) + 1e-9
    try:
        fstar = enlarge(f, pad) if pad > 1e-9 else f
    except Exception as exc:  # windows collide
        raise PreconditionViolated(f"enlarged windows degenerate: {exc}") from exc
    k, _ = transition_index(r, tid, e, fstar)
    k2, _ = transition_index(r2, tid, e, fstar)
    sign = 1 if eps * (v.p / v.q) > 0 else -1
    return k2 == k - sign


lemma1_check = zero_shift_check
