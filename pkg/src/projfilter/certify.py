"""Extremal points, gaps, cyclic alternation and the optimality verdict."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from . import __version__
from . import polyutil as pu
from .bands import (EPS_MEM, BandSystem, ValueWindows, band_candidates, max_excess)
from .errors import ClassInfeasible, MembershipViolated, ValueCoincidenceAtEndpoint
from .projline import EPS_PT, INF, PI, ProjPoint, angle_distance, fubini_study_distance
from .ratfun import RealRational, evaluate
from .stiefel import CANONICAL, IndexArray, index_array

EPS_EXT = 1e-8
MERGE_TOL = 1e-7
OPTIMAL, NOT_CERTIFIED = "optimal_certified", "not_certified"

# callables invoked on every certificate produced (used for auditing)
observers: list = []


def ext_tolerance() -> float:
    """Extremal-point tolerance; the ``ZK_TOL`` environment variable overrides it."""
    return float(os.environ.get("ZK_TOL", EPS_EXT))


@dataclass(frozen=True)
class Extremal:
    point: ProjPoint
    band: str
    kind: str
    parity: int
    distance: float = 0.0

    @property
    def x(self) -> float:
        return self.point.to_real()


@dataclass(frozen=True)
class Gap:
    start: Extremal | None
    end: Extremal | None
    parity: int          # 0 even, 1 odd
    dsigma: int
    transitions: tuple

    @property
    def odd(self) -> bool:
        return self.parity == 1

    @property
    def contains_infinity(self) -> bool:
        if self.start is None or self.start is self.end:
            return True
        a, b = self.start.point.angle, self.end.point.angle
        return (PI / 2 - a) % PI < (b - a) % PI and not self.start.point.is_infinite


@dataclass
class Certificate:
    extremal_points: list
    gaps: list
    alt: int
    sigma0: int
    sigma1: int
    sigma_hamming: int
    defect: int
    nominal_degree: int
    actual_degree: int
    class_array: IndexArray
    own_array: IndexArray
    verdict: str
    rhs: int
    malozemov: int
    reason: str = ""
    kappa: float = float("nan")
    tolerances: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.verdict == OPTIMAL

    def summary(self) -> tuple:
        return (self.alt, self.sigma0, self.sigma1, self.sigma_hamming,
                self.defect, self.verdict)

    def parity_violations(self) -> list[str]:
        out = []
        if self.alt % 2:
            out.append(f"alt={self.alt} is odd")
        if self.rhs % 2:
            out.append(f"rhs={self.rhs} is odd")
        if (self.defect + self.sigma0 + self.sigma1) % 2:
            out.append("d + sigma0 + sigma1 is odd")
        if (self.sigma_hamming + self.defect) % 2:
            out.append("sigma + d is odd")
        if self.sigma_hamming > self.defect:
            out.append("sigma exceeds the defect")
        if (self.verdict == OPTIMAL) != (self.alt >= self.rhs):
            out.append("verdict disagrees with alt >= rhs")
        return out

    def to_json(self) -> dict:
        def enc(v):
            return "inf" if math.isinf(v) else v
        return {
            "schema": 1,
            "tool_version": __version__,
            "verdict": self.verdict,
            "reason": self.reason,
            "alt": self.alt,
            "rhs": self.rhs,
            "sigma0": self.sigma0,
            "sigma1": self.sigma1,
            "sigma": self.sigma_hamming,
            "defect": self.defect,
            "nominal_degree": self.nominal_degree,
            "actual_degree": self.actual_degree,
            "malozemov_count": self.malozemov,
            "kappa": self.kappa,
            "extremal_points": [{"x": enc(x.x), "band": x.band, "parity": x.parity}
                                for x in self.extremal_points],
            "gaps": [{"parity": "odd" if g.odd else "even", "dsigma": g.dsigma,
                      "transitions": list(g.transitions)} for g in self.gaps],
            "class_array": self.class_array.to_json(),
            "own_array": self.own_array.to_json(),
            "tolerances": self.tolerances,
        }


def extremal_points(r: RealRational, e: BandSystem, f: ValueWindows,
                    tol: float | None = None, check: bool = True) -> list[Extremal]:
    """Points of ``E`` mapped within ``tol`` of the window boundaries, in cyclic order."""
    tol = ext_tolerance() if tol is None else tol
    if check:
        exc = max_excess(r, e, f)
        if exc > EPS_MEM:
            raise MembershipViolated(f"r leaves the windows by {exc:.3g}")
    crit = r.critical_points()
    out = []
    for b in e.bands:
        w = f.window(b.kind)
        phi = band_candidates(r, b.arc, (w.start, w.end), crit)
        vals = r.values_at_angles(phi)
        d0 = angle_distance(vals, w.start.angle)
        d1 = angle_distance(vals, w.end.angle)
        run = None
        for ang, a, c in zip(phi, d0, d1):
            dist, par = (a, 0) if a <= c else (c, 1)
            if dist > tol:
                if run is not None:
                    out.append(run)
                run = None
                continue
            cand = Extremal(ProjPoint.from_angle(ang), b.id, b.kind, par, float(dist))
            if run is not None and run.parity == par:
                if cand.distance < run.distance:
                    run = cand
                continue
            if run is not None:
                out.append(run)
            run = cand
        if run is not None:
            out.append(run)
    out.sort(key=lambda x: x.point.angle)
    return out


def _between(a: float, b: float, x: float, full: bool) -> bool:
    if full:
        return True
    return 0 < (x - a) % PI < (b - a) % PI


def gaps_and_parities(ext: list, e: BandSystem, r: RealRational, class_array: IndexArray,
                      f: ValueWindows, own: IndexArray | None = None) -> list[Gap]:
    """Gaps between cyclically consecutive extremal points with their ``dsigma``."""
    own = own or index_array(r, e, f, class_array.convention)
    trans = e.transitions
    if not ext:
        tids = tuple(t.id for t in trans)
        ds = sum(own.bits[t] - class_array.bits[t] for t in tids) % 2
        return [Gap(None, None, 0, ds, tids)]
    K = len(ext)
    out = []
    for i in range(K):
        a, b = ext[i], ext[(i + 1) % K]
        tids = tuple(t.id for t in trans
                     if _between(a.point.angle, b.point.angle, t.arc.midpoint().angle, K == 1))
        ds = sum(own.bits[t] - class_array.bits[t] for t in tids) % 2
        out.append(Gap(a, b, (a.parity + b.parity) % 2, ds, tids))
    return out


def malozemov_count(r: RealRational, e: BandSystem, f: ValueWindows,
                    tol: float | None = None, ext: list | None = None) -> int:
    """Longest alternating run of extremal points in the linear order of the real line."""
    ext = extremal_points(r, e, f, tol) if ext is None else ext
    if not ext:
        return 0
    order = sorted(ext, key=lambda x: (x.point.is_infinite, x.x))
    return 1 + sum(order[i].parity != order[i + 1].parity for i in range(len(order) - 1))


def certify(r: RealRational, e: BandSystem, f: ValueWindows, class_array: IndexArray,
            n: int | None = None, tol: float | None = None) -> Certificate:
    """Cyclic alternation certificate of ``r`` relative to the class ``class_array``."""
    tol = ext_tolerance() if tol is None else tol
    n = r.nominal_degree if n is None else int(n)
    k = r.actual_degree
    d = n - k
    if d < 0:
        raise ClassInfeasible(f"degree {k} exceeds n={n}")
    if not class_array.consistent_with(n):
        raise ClassInfeasible("class array parity disagrees with n")
    exc = max_excess(r, e, f)
    if exc > EPS_MEM:
        raise MembershipViolated(f"r leaves the windows by {exc:.3g}")
    own = index_array(r, e, f, class_array.convention)
    sigma = own.hamming(class_array)
    if sigma > d:
        raise ClassInfeasible(f"Hamming distance {sigma} exceeds defect {d}")
    ext = extremal_points(r, e, f, tol, check=False)
    gaps = gaps_and_parities(ext, e, r, class_array, f, own)
    alt = sum(g.odd for g in gaps)
    s0 = sum(g.dsigma for g in gaps if not g.odd)
    s1 = sum(g.dsigma for g in gaps if g.odd)
    rhs = n + 2 + k - s0 + s1
    reason = ""
    if not ext:
        verdict, reason = NOT_CERTIFIED, "interior slack; F can be squeezed"
    else:
        verdict = OPTIMAL if alt >= rhs else NOT_CERTIFIED
        if verdict == NOT_CERTIFIED:
            reason = f"alternation {alt} below required {rhs}"
    cert = Certificate(
        extremal_points=ext, gaps=gaps, alt=alt, sigma0=s0, sigma1=s1,
        sigma_hamming=sigma, defect=d, nominal_degree=n, actual_degree=k,
        class_array=class_array, own_array=own, verdict=verdict, rhs=rhs,
        malozemov=malozemov_count(r, e, f, tol, ext), reason=reason, kappa=f.kappa,
        tolerances={"ext": tol, "mem": EPS_MEM, "pt": EPS_PT})
    for obs in observers:
        obs(cert)
    return cert


def coincidence_count(r: RealRational, r2: RealRational, e1: ProjPoint, e2: ProjPoint) -> int:
    """Zeros of ``P Q2 - Q P2`` on the closed arc from ``e1`` to ``e2``, with multiplicity.

    ``e1 == e2`` means the whole line.
    """
    from numpy.polynomial import polynomial as npoly
    N1, N2 = r.actual_degree, r2.actual_degree
    P, Q = pu.pad(r.pcoef, N1 + 1), pu.pad(r.qcoef, N1 + 1)
    P2, Q2 = pu.pad(r2.pcoef, N2 + 1), pu.pad(r2.qcoef, N2 + 1)
    w = npoly.polysub(npoly.polymul(P, Q2), npoly.polymul(Q, P2))
    w = pu.pad(w, N1 + N2 + 1)
    if pu.norm_inf(w) == 0:
        raise ValueError("functions coincide identically")
    whole = e1.close_to(e2)
    a, length = e1.angle, (e2.angle - e1.angle) % PI

    def inside(pt):
        return whole or (pt.angle - a) % PI <= length + 1e-12 or \
            fubini_study_distance(pt, e1) <= 1e-12
    count = 0
    w = pu.trim(w, 1e-12)
    for x, mult in pu.real_roots(w):
        if inside(ProjPoint.from_real(x)):
            count += mult
    drop = N1 + N2 - pu.degree(w, 1e-12)
    if drop > 0 and inside(INF):
        count += drop
    return count


def coincidence_parity_check(r: RealRational, r2: RealRational, e1: Extremal, e2: Extremal,
                             e: BandSystem, f: ValueWindows,
                             convention: str = CANONICAL) -> bool:
    """Coincidences of ``r`` and ``r2`` on ``[e1, e2]`` have the parity predicted by the indexes."""
    for x in (e1, e2):
        if fubini_study_distance(evaluate(r, x.point), evaluate(r2, x.point)) <= 1e-12:
            raise ValueCoincidenceAtEndpoint(f"r and r2 agree at {x.point}")
    count = coincidence_count(r, r2, e1.point, e2.point)
    s = index_array(r, e, f, convention)
    s2 = index_array(r2, e, f, convention)
    whole = e1.point.close_to(e2.point)
    a, b = e1.point.angle, e2.point.angle
    tsum = sum(s.bits[t.id] + s2.bits[t.id] for t in e.transitions
               if _between(a, b, t.arc.midpoint().angle, whole))
    return count % 2 == (e1.parity + e2.parity + tsum) % 2
