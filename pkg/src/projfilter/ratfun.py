"""Real rational functions as coprime pairs of real polynomials."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import polyutil as pu
from .errors import ConstantFunction, IndeterminateValue
from .projline import Arc, INF, MobiusMap, ProjPoint

EPS_ROOT = 1e-8


@dataclass(frozen=True, eq=False)
class RealRational:
    """``R = P / Q`` with ascending coefficient vectors.

    Construction cancels approximate common roots of ``P`` and ``Q`` (matched
    within ``EPS_ROOT``); the cancelled roots are kept in ``cancelled``.  The
    pair is rescaled to unit max-norm; its overall sign is kept.
    """

    pcoef: np.ndarray
    qcoef: np.ndarray
    nominal_degree: int | None = None
    reduce: bool = True
    cancelled: tuple = field(default=(), compare=False)

    def __post_init__(self):
        p = pu.as_coef(self.pcoef)
        q = pu.as_coef(self.qcoef)
        scale = max(pu.norm_inf(p), pu.norm_inf(q))
        if not scale > 0 or not np.isfinite(scale):
            raise ValueError("numerator and denominator both vanish")
        p, q = p / scale, q / scale
        p, q = pu.trim(p), pu.trim(q)
        cancelled = []
        if self.reduce and max(len(p), len(q)) > 1 and p.any() and q.any():
            for z, k in pu.common_roots(p, q, EPS_ROOT):
                p = pu.deflate(p, z, k)
                q = pu.deflate(q, z, k)
                cancelled.extend([z] * k)
            scale = max(pu.norm_inf(p), pu.norm_inf(q))
            p, q = pu.trim(p / scale), pu.trim(q / scale)
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "pcoef", p)
        object.__setattr__(self, "qcoef", q)
        object.__setattr__(self, "cancelled", tuple(cancelled))
        n = self.actual_degree if self.nominal_degree is None else int(self.nominal_degree)
        if n < self.actual_degree:
            raise ValueError(f"nominal degree {n} below actual degree {self.actual_degree}")
        object.__setattr__(self, "nominal_degree", n)

    # -- basic data -------------------------------------------------------
    @property
    def actual_degree(self) -> int:
        return max(len(self.pcoef), len(self.qcoef)) - 1

    @property
    def defect(self) -> int:
        return self.nominal_degree - self.actual_degree

    def with_nominal(self, n: int) -> "RealRational":
        return RealRational(self.pcoef, self.qcoef, n, reduce=False)

    @classmethod
    def polynomial(cls, coef, n: int | None = None) -> "RealRational":
        return cls(coef, [1.0], n)

    @classmethod
    def chebyshev(cls, k: int, n: int | None = None) -> "RealRational":
        c = np.polynomial.chebyshev.cheb2poly([0] * k + [1])
        return cls(c, [1.0], n)

    # -- evaluation -------------------------------------------------------
    def hom_values(self, s, t):
        """Homogeneous ``(P, Q)`` at ``(s : t)``; continuous along continuous ``(s, t)``."""
        N = self.actual_degree
        return pu.hom_eval(self.pcoef, N, s, t), pu.hom_eval(self.qcoef, N, s, t)

    def values_at_angles(self, phi):
        """Raw argument ``Arg(Q + iP)`` at source angles ``phi`` (not unwrapped)."""
        P, Q = self.hom_values(np.sin(phi), np.cos(phi))
        return np.arctan2(P, Q)

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return evaluate(self, x)

    def real(self, x):
        """Affine values ``P(x)/Q(x)`` for finite real ``x`` (vectorized)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return npoly.polyval(x, self.pcoef) / npoly.polyval(x, self.qcoef)

    def wronskian(self) -> np.ndarray:
        """``P'Q - PQ'``, the numerator of the derivative."""
        return npoly.polysub(npoly.polymul(npoly.polyder(self.pcoef), self.qcoef),
                             npoly.polymul(self.pcoef, npoly.polyder(self.qcoef)))

    def critical_points(self) -> list[ProjPoint]:
        N = self.actual_degree
        if N == 0:
            return []
        w = pu.trim(self.wronskian(), 1e-12)
        pts = [ProjPoint.from_real(x) for x, _ in pu.real_roots(w)]
        if pu.degree(w, 1e-12) < 2 * N - 2:
            pts.append(INF)
        return pts

    def to_json(self) -> dict:
        return {"p": [float(v) for v in self.pcoef],
                "q": [float(v) for v in self.qcoef],
                "n": int(self.nominal_degree)}

    @classmethod
    def from_json(cls, d: dict) -> "RealRational":
        return cls(d["p"], d["q"], d.get("n"))

    def __repr__(self):
        return (f"RealRational(p={np.round(self.pcoef, 6).tolist()}, "
                f"q={np.round(self.qcoef, 6).tolist()}, n={self.nominal_degree})")


def evaluate(r: RealRational, x: ProjPoint) -> ProjPoint:
    """Projective value ``(P(x) : Q(x))`` using compensated Horner sums."""
    N = r.actual_degree
    if abs(x.q) >= abs(x.p):
        u, w = x.p / x.q, x.q ** N
        P = pu.comp_horner(pu.pad(r.pcoef, N + 1), u) * w
        Q = pu.comp_horner(pu.pad(r.qcoef, N + 1), u) * w
    else:
        u, w = x.q / x.p, x.p ** N
        P = pu.comp_horner(pu.pad(r.pcoef, N + 1)[::-1], u) * w
        Q = pu.comp_horner(pu.pad(r.qcoef, N + 1)[::-1], u) * w
    if P == 0 and Q == 0:
        raise IndeterminateValue(f"0/0 at {x}")
    return ProjPoint(P, Q)


def compose_target(r: RealRational, m: MobiusMap) -> RealRational:
    """``m o r``."""
    N = r.actual_degree + 1
    P, Q = pu.pad(r.pcoef, N), pu.pad(r.qcoef, N)
    return RealRational(m.a * P + m.b * Q, m.c * P + m.d * Q, r.nominal_degree, reduce=False)


def compose_source(r: RealRational, m: MobiusMap) -> RealRational:
    """``r o m^-1``: the function transported along the source map ``m``."""
    inv = m.inverse()
    num = np.array([inv.b, inv.a])  # a' y + b'
    den = np.array([inv.d, inv.c])  # c' y + d'
    N = r.actual_degree

    def subst(c):
        c = pu.pad(c, N + 1)
        out = np.zeros(N + 1)
        for k in range(N + 1):
            if c[k] == 0:
                continue
            term = npoly.polymul(npoly.polypow(num, k), npoly.polypow(den, N - k))
            out[: len(term)] += c[k] * term
        return out

    return RealRational(subst(r.pcoef), subst(r.qcoef), r.nominal_degree, reduce=False)


def boundary_solutions(r: RealRational, c: ProjPoint, within: Arc,
                       tol: float = 1e-10) -> list[tuple[ProjPoint, int]]:
    """Solutions of ``r(x) = c`` inside the arc, with multiplicities."""
    N = r.actual_degree
    if N == 0:
        raise ConstantFunction("boundary solutions of a constant")
    comb = c.q * pu.pad(r.pcoef, N + 1) - c.p * pu.pad(r.qcoef, N + 1)
    scale = pu.norm_inf(comb)
    if scale == 0:
        return []
    comb = pu.trim(comb, 1e-12)
    out = []
    for x, k in pu.real_roots(comb):
        pt = ProjPoint.from_real(x)
        if within.contains(pt, tol):
            out.append((pt, k))
    d = pu.degree(comb, 1e-12)
    if d < N and within.contains(INF, tol):
        out.append((INF, N - d))
    return out
