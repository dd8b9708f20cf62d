"""Polynomial helpers on ascending coefficient vectors.

Thin layer over ``numpy.polynomial.polynomial``: trimming, homogeneous
evaluation, compensated Horner, and root finding with multiplicities.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as npoly

COEF_TOL = 1e-13
CLUSTER_TOL = 1e-6
REAL_TOL = 1e-7


def as_coef(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float)).copy()
    return c if c.size else np.zeros(1)


def trim(c, tol: float = COEF_TOL) -> np.ndarray:
    """Drop negligible leading (high order) coefficients."""
    c = as_coef(c)
    scale = np.max(np.abs(c))
    if scale == 0:
        return np.zeros(1)
    k = len(c)
    while k > 1 and abs(c[k - 1]) <= tol * scale:
        k -= 1
    return c[:k]


def degree(c, tol: float = COEF_TOL) -> int:
    c = trim(c, tol)
    if len(c) == 1 and c[0] == 0:
        return -1
    return len(c) - 1


def pad(c, n: int) -> np.ndarray:
    c = as_coef(c)
    if len(c) >= n:
        return c
    return np.concatenate([c, np.zeros(n - len(c))])


def hom_eval(c, N: int, s, t):
    """Evaluate ``sum c_k s^k t^(N-k)``, vectorized over ``s, t``."""
    c = pad(c, N + 1)[: N + 1]
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    big_t = np.abs(t) >= np.abs(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(big_t, s / np.where(big_t, t, 1.0), t / np.where(big_t, 1.0, s))
        fwd = npoly.polyval(u, c)
        rev = npoly.polyval(u, c[::-1])
        out = np.where(big_t, t ** N * fwd, s ** N * rev)
    return out


def _two_sum(a, b):
    s = a + b
    bp = s - a
    return s, (a - (s - bp)) + (b - bp)


def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def comp_horner(c, x: float) -> float:
    """Compensated Horner evaluation (roughly twice working precision)."""
    c = as_coef(c)
    s = float(c[-1])
    err = 0.0
    for a in c[-2::-1]:
        p, pe = _two_prod(s, x)
        s, se = _two_sum(p, float(a))
        err = err * x + (pe + se)
    return s + err


def _cluster(roots: np.ndarray, tol: float):
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= tol * max(1.0, abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [roots[idx] for idx in groups.values()]


def _polish(c, z, k: int, iters: int = 8):
    d = c
    for _ in range(k - 1):
        d = npoly.polyder(d)
    dd = npoly.polyder(d) if len(d) > 1 else np.zeros(1)
    best = z
    best_res = abs(npoly.polyval(z, d))
    for _ in range(iters):
        den = npoly.polyval(z, dd)
        if den == 0:
            break
        z = z - npoly.polyval(z, d) / den
        res = abs(npoly.polyval(z, d))
        if not np.isfinite(res):
            break
        if res < best_res:
            best, best_res = z, res
        if res == 0:
            break
    return best


def roots_with_multiplicity(c, cluster_tol: float = CLUSTER_TOL):
    """Roots of a polynomial as ``(complex center, multiplicity)`` pairs.

    Roots come from companion-matrix eigenvalues; clusters closer than
    ``cluster_tol`` (relative) are merged into one multiple root and each
    center is polished by Newton's method on the derivative of matching order.
    """
    c = trim(c)
    if len(c) <= 1:
        return []
    raw = npoly.polyroots(c)
    out = []
    for grp in _cluster(np.asarray(raw, dtype=complex), cluster_tol):
        k = len(grp)
        z = complex(np.mean(grp))
        if abs(z.imag) <= REAL_TOL * max(1.0, abs(z)):
            z = complex(_polish(c, z.real, k), 0.0)
        else:
            z = complex(_polish(c, z, k))
        out.append((z, k))
    return out


def real_roots(c, cluster_tol: float = CLUSTER_TOL):
    """Real roots with multiplicities, sorted."""
    out = []
    for z, k in roots_with_multiplicity(c, cluster_tol):
        if abs(z.imag) <= REAL_TOL * max(1.0, abs(z)):
            out.append((float(z.real), k))
    out.sort()
    return out


def from_roots(roots, lead: float = 1.0) -> np.ndarray:
    """Real polynomial with given roots; complex roots are paired with conjugates."""
    c = np.array([lead], dtype=float)
    for z in roots:
        z = complex(z)
        if abs(z.imag) > 0:
            c = npoly.polymul(c, [abs(z) ** 2, -2 * z.real, 1.0])
        else:
            c = npoly.polymul(c, [-z.real, 1.0])
    return c


def deflate(c, z: complex, k: int = 1) -> np.ndarray:
    """Divide out ``(x - z)^k`` (with the conjugate factor if ``z`` is complex)."""
    c = trim(c)
    fac = from_roots([z])
    for _ in range(k):
        c, _ = npoly.polydiv(c, fac)
    return as_coef(c)


def common_roots(a, b, tol: float = 1e-8):
    """Approximate common roots of two polynomials: ``[(z, multiplicity)]``.

    Complex roots are reported once, with positive imaginary part.
    """
    ra = roots_with_multiplicity(a)
    rb = [list(x) for x in roots_with_multiplicity(b)]
    out = []
    for z, ka in ra:
        if z.imag < -REAL_TOL * max(1.0, abs(z)):
            continue
        for item in rb:
            w, kb = item
            if kb > 0 and abs(z - w) <= tol * max(1.0, abs(z)):
                k = min(ka, kb)
                out.append((z, k))
                item[1] -= k
                break
    return out


def norm_inf(c) -> float:
    return float(np.max(np.abs(as_coef(c))))


def shift_taylor(c, z: complex) -> np.ndarray:
    """Coefficients of ``c(x + z)`` (Taylor coefficients at ``z``)."""
    c = np.asarray(c, dtype=complex)
    n = len(c)
    out = c.copy()
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += z * out[j + 1]
    return out


def is_close_to_zero(x: float, scale: float, tol: float = COEF_TOL) -> bool:
    return abs(x) <= tol * max(scale, math.ulp(1.0))
