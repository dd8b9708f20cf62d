"""One improvement step for a function whose certificate fails.

In target coordinates where ``inf`` lies outside the windows and ``R(inf)``
is neither ``0``, ``inf`` nor a window boundary, ``R = P/Q`` with
``deg P = deg Q``.  The step is

    R'(tau) = (M Pi P - tau p) / (M Pi Q - tau q)

where ``Pi`` has one zero in every transition whose index must flip, ``M``
is positive of degree ``d - Sigma`` and ``pQ - qP = -L / Pi``.  For small
``tau`` the sign of ``R' - R`` equals the sign of ``L``, which is chosen so
that ``R'`` moves inward at every extremal point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import polyutil as pu
from .achiezer import solve_achiezer
from .bands import BandSystem, ValueWindows, tight_windows, transform
from .certify import Certificate, certify
from .errors import (AlreadyOptimal, DegenerateImage, DegenerateWindows, LiftFailure,
                     AnchorMismatch, NormalizationFailed, StepNotFound, IllConditioned,
                     NotCoprime)
from .projline import INF, PI, ZERO, MobiusMap, ProjPoint, angle_distance
from .ratfun import RealRational, compose_source, compose_target, evaluate
from .stiefel import IndexArray, index_array, interior_point

TAU0 = 1e-2
HALVINGS = 60
NORMALIZE_MARGIN = 1e-3
COPRIME_TOL = 1e-8


@dataclass
class DeformationPlan:
    flip_points: list            # x_s in the original source coordinate
    L: np.ndarray
    M: np.ndarray
    p: np.ndarray
    q: np.ndarray
    tau: float | None
    # working frame
    alpha: MobiusMap             # source rotation
    beta: MobiusMap              # target rotation
    r_frame: RealRational
    e_frame: BandSystem
    f_frame: ValueWindows
    class_array: IndexArray
    n: int
    extra_zeros: list = field(default_factory=list)
    frame_flip_points: list = field(default_factory=list)
    residual: float = 0.0

    @property
    def sigma(self) -> int:
        return len(self.flip_points)

    def numerator_denominator(self, tau: float):
        P, Q = self.r_frame.pcoef, self.r_frame.qcoef
        base = npoly.polymul(self.M, pu.from_roots(self.frame_flip_points))
        A, B = npoly.polymul(base, P), npoly.polymul(base, Q)
        return npoly.polysub(A, tau * self.p), npoly.polysub(B, tau * self.q)


def _normalize(r: RealRational, e: BandSystem, f: ValueWindows, rng):
    """Rotations ``alpha`` (source) and ``beta`` (target) meeting the frame conditions."""
    m0, m1, p0, p1 = (pt.angle for pt in f.endpoints())
    gaps = [(m1, (p0 - m1) % PI), (p1, (m0 - p1) % PI)]
    start, length = max(gaps, key=lambda g: g[1])
    for attempt in range(40):
        a_ang = 0.0 if attempt == 0 else rng.uniform(0, PI)
        frac = 0.5 if attempt == 0 else rng.uniform(0.3, 0.7)
        z = start + frac * length
        alpha = MobiusMap.rotation(a_ang)
        beta = MobiusMap.rotation(PI / 2 - z)
        # value of R at the source point sent to infinity by alpha
        v = evaluate(r, alpha.inverse()(INF))
        fb = f.transform(beta)
        w = beta(v)
        bad = [INF, ZERO] + list(fb.endpoints())
        if min(angle_distance(w.angle, b.angle) for b in bad) < NORMALIZE_MARGIN:
            continue
        try:
            ea = transform(e, alpha)
        except DegenerateImage:
            continue
        if any(b.arc.start.is_infinite or b.arc.end.is_infinite for b in ea.bands):
            continue
        return alpha, beta, ea, fb
    raise NormalizationFailed("could not move infinity off the windows and boundary values")


def _gap_point(a: float, b: float, avoid, frac: float) -> float:
    x = a + frac * (b - a)
    for _ in range(20):
        if all(abs(x - y) > 1e-9 * max(1.0, abs(b - a)) for y in avoid):
            return x
        frac = 0.5 * (frac + 0.5) + 0.05
        x = a + frac * (b - a)
    return x


def plan_deformation(r: RealRational, cert: Certificate, e: BandSystem, f: ValueWindows,
                     rng=None, jitter: float = 0.0) -> DeformationPlan:
    """Build ``L``, ``M``, flip points and the Achiezer direction ``(p, q)``."""
    if cert.verdict == "optimal_certified":
        raise AlreadyOptimal("certificate already holds")
    rng = rng if rng is not None else np.random.default_rng(0)
    cls = cert.class_array
    n = cert.nominal_degree
    tol = cert.tolerances.get("ext")
    alpha, beta, e_n, f_n = _normalize(r, e, f, rng)
    r_n = compose_target(compose_source(r, alpha), beta)
    c_n = certify(r_n, e_n, f_n, cls, n, tol)
    k = r_n.actual_degree
    P, Q = pu.pad(r_n.pcoef, k + 1), pu.pad(r_n.qcoef, k + 1)
    if k > 0 and (abs(P[-1]) < 1e-12 or abs(Q[-1]) < 1e-12):
        raise NormalizationFailed("degrees of numerator and denominator differ in the frame")

    def jit(frac):
        return frac + jitter * rng.uniform(-0.1, 0.1)

    flips = [t for t in e_n.transitions if c_n.own_array.bits[t.id] != cls.bits[t.id]]
    xs = [interior_point(t.arc, jit(0.5)).to_real() for t in flips]

    ext = sorted(c_n.extremal_points, key=lambda x: x.x)
    extra = []
    for a, b in zip(ext[:-1], ext[1:]):
        inside = sum(a.x < x < b.x for x in xs)
        if (inside + a.parity + b.parity) % 2:
            extra.append(_gap_point(a.x, b.x, xs, jit(0.5)))
    sign = 1.0
    if ext:
        Lx = np.prod([ext[0].x - z for z in xs + extra]) if xs + extra else 1.0
        want = -1.0 if ext[0].parity else 1.0
        sign = want if Lx > 0 else -want
    L = sign * pu.from_roots(xs + extra)
    S = -sign * pu.from_roots(extra)

    nm = c_n.defect - c_n.sigma_hamming
    M = np.array([1.0])
    for _ in range(nm // 2):
        c = rng.normal() * (1 + jitter)
        M = npoly.polymul(M, [c * c + 1.0, -2 * c, 1.0])

    if k == 0:
        p, q, res = S / Q[0], np.zeros(1), 0.0
    else:
        sol = solve_achiezer(P, Q, S)
        p, q, res = sol.p, sol.q, sol.residual
    if max(pu.degree(p), pu.degree(q)) > n:
        raise NormalizationFailed(f"deformation direction has degree above {n}")
    base = npoly.polymul(M, pu.from_roots(xs))
    scale = max(pu.norm_inf(npoly.polymul(base, P)), pu.norm_inf(npoly.polymul(base, Q)))
    size = max(pu.norm_inf(p), pu.norm_inf(q), 1e-300)
    p, q = p * (scale / size), q * (scale / size)
    back = alpha.inverse()
    return DeformationPlan(
        flip_points=[back(ProjPoint.from_real(x)) for x in xs], L=L, M=M, p=p, q=q, tau=None,
        alpha=alpha, beta=beta, r_frame=r_n, e_frame=e_n, f_frame=f_n, class_array=cls, n=n,
        extra_zeros=extra, frame_flip_points=xs, residual=res)


def _try_tau(plan: DeformationPlan, tau: float, kappa0: float):
    """Candidate for one ``tau``: ``(r_frame', windows)`` or a failure reason."""
    num, den = plan.numerator_denominator(tau)
    if pu.common_roots(num, den, COPRIME_TOL):
        return "cancellation"
    try:
        r2 = RealRational(num, den, plan.n, reduce=False)
        if r2.actual_degree > plan.n:
            return "degree"
        f2 = tight_windows(r2, plan.e_frame)
    except (DegenerateWindows, ValueError):
        return "windows"
    if not f2.kappa > kappa0:
        return "kappa"
    try:
        own = index_array(r2, plan.e_frame, f2, plan.class_array.convention)
    except (LiftFailure, AnchorMismatch):
        return "index"
    if not own.same_bits(plan.class_array):
        return "index"
    return r2, f2


def apply_deformation(r: RealRational, plan: DeformationPlan, f: ValueWindows,
                      mode: str = "largest", tau0: float = TAU0):
    """Halving line search on ``tau``; returns ``(r2, f2)`` in the original coordinates.

    ``mode="largest"`` takes the first admissible ``tau``; ``mode="best"``
    keeps halving while the cross ratio still grows and returns the best one.
    """
    kappa0 = f.kappa
    reasons: dict = {}
    best = None
    tau = tau0
    for _ in range(HALVINGS):
        out = _try_tau(plan, tau, kappa0)
        if isinstance(out, str):
            reasons[out] = reasons.get(out, 0) + 1
            if best is not None:
                break
        else:
            kap = out[1].kappa
            if best is None or kap > best[2]:
                best = (out[0], out[1], kap, tau)
                if mode == "largest":
                    break
            else:
                break
        tau /= 2
    if best is None:
        raise StepNotFound(f"no admissible tau after {HALVINGS} halvings: {reasons}")
    r2, f2, _, tau = best
    plan.tau = tau
    binv, ainv = plan.beta.inverse(), plan.alpha.inverse()
    r_back = compose_source(compose_target(r2, binv), ainv)
    return r_back, f2.transform(binv)


def improve_step(r: RealRational, cert: Certificate, e: BandSystem, f: ValueWindows,
                 rng=None, mode: str = "largest", retries: int = 4, tau0: float = TAU0):
    """Plan and apply one step, re-jittering the plan when the line search fails."""
    rng = rng if rng is not None else np.random.default_rng(0)
    last = None
    for attempt in range(retries + 1):
        try:
            plan = plan_deformation(r, cert, e, f, rng, jitter=float(attempt > 0))
            r2, f2 = apply_deformation(r, plan, f, mode, tau0)
            return r2, f2, plan
        except (StepNotFound, NormalizationFailed, IllConditioned, NotCoprime) as exc:
            last = exc
    raise StepNotFound(str(last))


def chordal(z: complex, w: complex) -> float:
    """Chordal distance on the Riemann sphere."""
    return abs(z - w) / math.sqrt((1 + abs(z) ** 2) * (1 + abs(w) ** 2))


def near_pairs(r: RealRational, max_dist: float = 1e-2) -> list:
    """Zero/pole pairs of ``r`` closer than ``max_dist`` (chordal), nearest first."""
    zs = [z for z, _ in pu.roots_with_multiplicity(r.pcoef) if z.imag >= 0]
    ws = [w for w, _ in pu.roots_with_multiplicity(r.qcoef) if w.imag >= 0]
    out = []
    for z in zs:
        for w in ws:
            if (abs(z.imag) > 0) != (abs(w.imag) > 0):
                continue
            d = chordal(z, w)
            if d < max_dist:
                out.append((d, z, w))
    out.sort(key=lambda t: t[0])
    return out


def cancel_pair(r: RealRational, z: complex, w: complex) -> RealRational:
    """Remove the zero ``z`` and the pole ``w`` (with conjugates), keeping the nominal degree."""
    return RealRational(pu.deflate(r.pcoef, z), pu.deflate(r.qcoef, w), r.nominal_degree,
                        reduce=False)
