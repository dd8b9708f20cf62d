"""Solve ``S = p Q - q P`` for coprime equal-degree ``P, Q``.

``p1`` interpolates ``S/Q`` at the zeros of ``P`` and ``q1`` interpolates
``S/P`` at the zeros of ``Q`` (Hermite conditions at multiple zeros); the
remainder is divisible by ``PQ`` and the quotient ``2r`` completes
``p = p1 + rP``, ``q = -q1 - rQ``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import polyutil as pu
from .errors import IllConditioned, NotCoprime

RESIDUAL_TOL = 1e-10
IMAG_TOL = 1e-11
REFINE_STEPS = 4


@dataclass(frozen=True)
class AchiezerSolution:
    p: np.ndarray
    q: np.ndarray
    residual: float
    method: str = "interpolation"

    @property
    def degree(self) -> int:
        return max(pu.degree(self.p), pu.degree(self.q), 0)


def degree_bound(n: int, m: int) -> int:
    return max(m - n, n - 1)


def _exact_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    fb = [Fraction(float(y)) for y in b]
    for i, x in enumerate(a):
        fx = Fraction(float(x))
        if fx:
            for j, y in enumerate(fb):
                out[i + j] += fx * y
    return out


def exact_defect(P, Q, S, p, q) -> np.ndarray:
    """``S - (pQ - qP)`` evaluated exactly on the float coefficients, then rounded."""
    pq, qp = _exact_mul(p, Q), _exact_mul(q, P)
    L = max(len(pq), len(qp), len(S))
    out = [Fraction(0)] * L
    for i, v in enumerate(S):
        out[i] += Fraction(float(v))
    for i, v in enumerate(pq):
        out[i] -= v
    for i, v in enumerate(qp):
        out[i] += v
    return np.array([float(v) for v in out])


def residual_of(P, Q, S, p, q) -> float:
    """Relative max-norm of ``S - (pQ - qP)``, computed without rounding error."""
    return pu.norm_inf(exact_defect(P, Q, S, p, q)) / max(pu.norm_inf(S), 1e-300)


def _series_quotient(num, den, k):
    """First ``k`` Taylor coefficients of ``num/den`` given their Taylor coefficients."""
    out = np.zeros(k, dtype=complex)
    num = np.concatenate([num, np.zeros(k)])[:k]
    den = np.concatenate([den, np.zeros(k)])[:k]
    for i in range(k):
        out[i] = (num[i] - np.dot(out[:i], den[i:0:-1])) / den[0]
    return out


def _hermite(nodes, values, n):
    """Coefficients (degree < n) matching Taylor data ``values`` at ``nodes``."""
    A = np.zeros((n, n), dtype=complex)
    b = np.zeros(n, dtype=complex)
    row = 0
    for z, vals in zip(nodes, values):
        for l, v in enumerate(vals):
            for j in range(l, n):
                A[row, j] = comb(j, l) * z ** (j - l)
            b[row] = v
            row += 1
    return np.linalg.solve(A, b), np.linalg.cond(A)


def _interp(S, D, roots, n):
    """Hermite interpolant of ``S/D`` at the given roots (with multiplicities)."""
    nodes, values = [], []
    for z, k in roots:
        ts = pu.shift_taylor(S, z)[:k] if len(S) else np.zeros(k)
        td = pu.shift_taylor(D, z)
        values.append(_series_quotient(ts, td, k))
        nodes.append(z)
    return _hermite(nodes, values, n)


def _by_interpolation(P, Q, S, n):
    rp = pu.roots_with_multiplicity(P)
    rq = pu.roots_with_multiplicity(Q)
    p1, c1 = _interp(S, Q, rp, n)
    q1, c2 = _interp(S, P, rq, n)
    scale = max(pu.norm_inf(np.abs(p1)), pu.norm_inf(np.abs(q1)), 1e-300)
    if max(np.max(np.abs(p1.imag)), np.max(np.abs(q1.imag))) > IMAG_TOL * max(scale, 1.0) * 1e3:
        raise IllConditioned("interpolants are not real", )
    p1, q1 = p1.real, q1.real
    rem = npoly.polysub(npoly.polysub(S, npoly.polymul(p1, Q)), npoly.polymul(q1, P))
    two_r, _ = npoly.polydiv(pu.trim(rem, 0.0), npoly.polymul(P, Q))
    if len(S) - 1 < 2 * n:
        two_r = np.zeros(1)
    r = pu.as_coef(two_r) / 2
    p = npoly.polyadd(p1, npoly.polymul(r, P))
    q = npoly.polysub(-q1, npoly.polymul(r, Q))
    return p, q, max(c1, c2)


def _by_least_squares(P, Q, S, n, deg):
    """Coefficient system for ``p Q - q P = S`` with ``deg p, deg q <= deg``."""
    m = max(len(S) - 1, deg + n)
    cols = []
    for j in range(deg + 1):
        e = np.zeros(j + 1)
        e[j] = 1
        cols.append(pu.pad(npoly.polymul(e, Q), m + 1))
    for j in range(deg + 1):
        e = np.zeros(j + 1)
        e[j] = 1
        cols.append(pu.pad(-npoly.polymul(e, P), m + 1))
    A = np.array(cols).T
    sol, *_ = np.linalg.lstsq(A, pu.pad(S, m + 1), rcond=None)
    return sol[: deg + 1], sol[deg + 1:], np.linalg.cond(A)


def solve_achiezer(P, Q, S, tol: float = RESIDUAL_TOL) -> AchiezerSolution:
    P, Q, S = pu.trim(P, 0.0), pu.trim(Q, 0.0), pu.trim(S, 0.0)
    n = len(P) - 1
    if n < 1 or len(Q) - 1 != n:
        raise ValueError("P and Q must have the same degree n >= 1")
    if pu.common_roots(P, Q, 1e-8):
        raise NotCoprime("P and Q share a root")
    if not S.any():
        z = np.zeros(1)
        return AchiezerSolution(z, z, 0.0)
    m = len(S) - 1
    deg = degree_bound(n, m)
    method = "interpolation"
    try:
        p, q, cond = _by_interpolation(P, Q, S, n)
        p, q = pu.pad(p, deg + 1)[: deg + 1], pu.pad(q, deg + 1)[: deg + 1]
        res = residual_of(P, Q, S, p, q)
    except (np.linalg.LinAlgError, IllConditioned):
        p = q = np.zeros(deg + 1)
        res, cond = np.inf, np.inf
    if res > tol:
        p_ls, q_ls, cond = _by_least_squares(P, Q, S, n, deg)
        res_ls = residual_of(P, Q, S, p_ls, q_ls)
        if res_ls < res:
            p, q, res, method = p_ls, q_ls, res_ls, "least_squares"
    for _ in range(REFINE_STEPS):
        if res <= tol:
            break
        dp, dq, _ = _by_least_squares(P, Q, exact_defect(P, Q, S, p, q), n, deg)
        p2, q2 = p + dp, q + dq
        res2 = residual_of(P, Q, S, p2, q2)
        if not res2 < res:
            break
        p, q, res = p2, q2, res2
        method += "+refinement" if not method.endswith("refinement") else ""
    if res > tol:
        raise IllConditioned(f"residual {res:.3g} above {tol:g} (condition ~{cond:.3g})")
    p = pu.as_coef(p)[: deg + 1]
    q = pu.as_coef(q)[: deg + 1]
    return AchiezerSolution(p, q, residual_of(P, Q, S, p, q), method)
