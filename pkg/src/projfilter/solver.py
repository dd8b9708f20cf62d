"""Certificate-driven minimax solver and a brute-force oracle for tiny degrees."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import polyutil as pu
from .bands import (MINUS, PLUS, BandSystem, ValueWindows, _cover, mu_form, tight_windows,
                    transform)
from .certify import Certificate, certify, ext_tolerance
from .errors import (AlreadyOptimal, InfeasibleClass, PreconditionViolated, ProjFilterError,
                     Stalled, StepNotFound)
from .improve import cancel_pair, improve_step, near_pairs
from .projline import PI, MobiusMap
from .ratfun import RealRational, compose_source, compose_target
from .stiefel import CANONICAL, IndexArray, index_array


JUMP_DIST = 1e-3   # chordal distance at which a zero/pole pair is tried for cancellation


@dataclass
class SolverOptions:
    max_iter: int = 200
    stall_tol: float = 1e-10
    stall_limit: int = 3
    eta0: float = 1e-2       # initial active-set tolerance for planning steps
    tau0: float = 1.0        # first trial step of the line search
    mode: str = "best"
    tol: float | None = None  # extremal tolerance of the final certificate
    convention: str = CANONICAL
    seed: int = 0
    keep_history: bool = False


@dataclass
class SolveReport:
    iterations: list                 # (kappa, defect, alt, sigma0, sigma1)
    final: RealRational
    certificate: Certificate
    windows: ValueWindows
    converged: bool
    class_array: IndexArray
    reason: str = ""
    oracle_gap: float | None = None
    oracle_kappa: float | None = None
    history: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def kappa(self) -> float:
        return self.windows.kappa

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "converged": self.converged,
            "reason": self.reason,
            "kappa": self.kappa,
            "iterations": [list(t) for t in self.iterations],
            "function": self.final.to_json(),
            "windows": self.windows.to_json(),
            "class_array": self.class_array.to_json(),
            "certificate": self.certificate.to_json(),
            "oracle_kappa": self.oracle_kappa,
            "oracle_gap": self.oracle_gap,
            "seconds": self.seconds,
        }


def check_class(cls: IndexArray, n: int) -> None:
    if cls.ones() > n:
        raise InfeasibleClass(f"{cls.ones()} transitions with index 1 exceed n={n}")
    if not cls.consistent_with(n):
        raise InfeasibleClass("index sum parity differs from n")


def _infinity_in_transition(e: BandSystem) -> MobiusMap:
    """Rotation sending the midpoint of the longest transition to infinity."""
    t = max(e.transitions, key=lambda t: t.arc.length)
    return MobiusMap.rotation(PI / 2 - t.arc.midpoint().angle)


def _node_values(e2: BandSystem, nodes):
    """Snap nodes into bands and assign the band targets +1 / -1."""
    xs, ys = [], []
    spans = []
    for b in e2.bands:
        a, c = b.arc.start.to_real(), b.arc.end.to_real()
        spans.append((a, c, b.kind))
    for x in nodes:
        best = None
        for a, c, kind in spans:
            y = min(max(x, a), c)
            d = abs(y - x)
            if best is None or d < best[0]:
                pad = 1e-3 * (c - a)
                best = (d, min(max(y, a + pad), c - pad), kind)
        xs.append(best[1])
        ys.append(1.0 if best[2] == PLUS else -1.0)
    return np.array(xs), np.array(ys)


def default_seed(e: BandSystem, n: int, class_array: IndexArray | None = None,
                 convention: str = CANONICAL, seed: int = 0):
    """Polynomial through +-1 band targets at Chebyshev-like nodes.

    Returns ``(r, class_array)``; the class is the seed's own unless one is
    prescribed, in which case lower-degree seeds are tried until the class
    distance fits in the defect.
    """
    rng = np.random.default_rng(seed)
    alpha = _infinity_in_transition(e)
    e2 = transform(e, alpha)
    lo = min(b.arc.start.to_real() for b in e2.bands)
    hi = max(b.arc.end.to_real() for b in e2.bands)
    for k in range(n, 0, -1):
        for attempt in range(60):
            j = np.arange(k + 1)
            t = -np.cos((j + 0.5) * PI / (k + 1)) if attempt == 0 else \
                np.sort(rng.uniform(-1, 1, k + 1))
            nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
            xs, ys = _node_values(e2, nodes)
            if len(np.unique(xs)) < k + 1 or len(np.unique(ys)) < 2:
                continue
            c = np.polynomial.polynomial.polyfit(xs, ys, k)
            try:
                r = compose_source(RealRational(c, [1.0], n), alpha.inverse())
                f = tight_windows(r, e)
                own = index_array(r, e, f, convention)
            except ProjFilterError:
                continue
            if r.actual_degree < 1:
                continue
            if class_array is None:
                if (n - r.actual_degree) % 2:
                    t0 = e.transitions[0].id
                    own = own.flipped_at(t0)
                return r, IndexArray(own.bits, {}, convention)
            if own.hamming(class_array) <= n - r.actual_degree:
                return r, class_array
    raise PreconditionViolated("no polynomial seed found in the class; supply a seed")


def _mu_normalize(r: RealRational, e: BandSystem):
    f0 = tight_windows(r, e)
    beta, f = mu_form(f0)
    return compose_target(r, beta), f


def _defect_jump(r, e, f, cls, n, eta, tol, rng, opts, max_dist=1e-2):
    """Cancel a nearly cancelling zero/pole pair, then step; accept only if the cross ratio grows."""
    for _, z, w in near_pairs(r, max_dist)[:3]:
        try:
            r_red, f_red = _mu_normalize(cancel_pair(r, z, w), e)
            c_red = certify(r_red, e, f_red, cls, n, tol)
        except ProjFilterError:
            continue
        if c_red.optimal and f_red.kappa >= f.kappa:
            return r_red, f_red
        try:
            plan_cert = certify(r_red, e, f_red, cls, n, max(eta, tol))
            if plan_cert.optimal:
                plan_cert = c_red
            r2, f2, _ = improve_step(r_red, plan_cert, e, f_red, rng, opts.mode, tau0=opts.tau0)
            r2, f2 = _mu_normalize(r2, e)
        except ProjFilterError:
            continue
        if f2.kappa > f.kappa:
            return r2, f2
    return None


def solve(e: BandSystem, n: int, class_array: IndexArray | None = None,
          seed: RealRational | None = None, opts: SolverOptions | None = None) -> SolveReport:
    """Alternate certification and improvement steps until the certificate holds."""
    opts = opts or SolverOptions()
    t_start = time.perf_counter()
    if n < 1:
        raise PreconditionViolated("degree must be at least 1")
    if class_array is not None:
        check_class(class_array, n)
    if seed is None:
        seed, cls = default_seed(e, n, class_array, opts.convention, opts.seed)
    else:
        if seed.actual_degree > n:
            raise PreconditionViolated(f"seed degree {seed.actual_degree} exceeds n={n}")
        seed = seed.with_nominal(n)
        cls = class_array
    r, f = _mu_normalize(seed, e)
    if cls is None:
        cls = index_array(r, e, f, opts.convention)
        if not cls.consistent_with(n):
            cls = cls.flipped_at(e.transitions[0].id)
    check_class(cls, n)
    rng = np.random.default_rng(opts.seed)
    tol = ext_tolerance() if opts.tol is None else opts.tol
    eta = max(opts.eta0, tol)
    history = []
    iterations = []
    stall = 0
    steps = 0
    reason = ""
    cert = certify(r, e, f, cls, n, tol)

    def record(c):
        iterations.append((f.kappa, c.defect, c.alt, c.sigma0, c.sigma1))
        if opts.keep_history:
            history.append((r, f, c))

    record(cert)
    while not cert.optimal:
        if steps >= opts.max_iter:
            reason = f"iteration cap {opts.max_iter} reached"
            break
        planning = certify(r, e, f, cls, n, eta) if eta > tol else cert
        try:
            if planning.optimal:
                raise AlreadyOptimal("active set already alternates")
            r2, f2, _ = improve_step(r, planning, e, f, rng, opts.mode, tau0=opts.tau0)
            if near_pairs(r, JUMP_DIST):
                jump = _defect_jump(r, e, f, cls, n, eta, tol, rng, opts, JUMP_DIST)
                if jump is not None and jump[1].kappa > f2.kappa:
                    r2, f2 = jump
        except (AlreadyOptimal, StepNotFound) as exc:
            jump = _defect_jump(r, e, f, cls, n, eta, tol, rng, opts)
            if jump is None:
                if eta <= tol:
                    reason = f"no improving step: {exc}"
                    break
                eta = max(eta / 10, tol)
                continue
            r2, f2 = jump
        k_old = f.kappa
        try:
            r2, f2 = _mu_normalize(r2, e)
            cert2 = certify(r2, e, f2, cls, n, tol)
        except ProjFilterError as exc:
            # the step does not survive re-certification in the original frame
            if eta <= tol:
                reason = f"step rejected on re-certification: {exc}"
                break
            eta = max(eta / 10, tol)
            continue
        steps += 1
        r, f, cert = r2, f2, cert2
        gain = (f.kappa - k_old) / k_old
        record(cert)
        stall = stall + 1 if gain < opts.stall_tol else 0
        if stall >= opts.stall_limit:
            rep = SolveReport(iterations, r, cert, f, False, cls, "stalled", history=history,
                              seconds=time.perf_counter() - t_start)
            raise Stalled(f"relative gain below {opts.stall_tol} {stall} times", rep)
    if cert.optimal:
        reason = "optimal_certified"
    return SolveReport(iterations, r, cert, f, cert.optimal, cls, reason, history=history,
                       seconds=time.perf_counter() - t_start)


# -- oracle ---------------------------------------------------------------------

def sampled_kappa(P, Q, e: BandSystem, samples: int = 1500) -> float:
    """Cross ratio of the tightest windows of ``P/Q`` from dense samples (0 if none exist)."""
    N = max(len(P), len(Q)) - 1
    arcs = {PLUS: [], MINUS: []}
    for b in e.bands:
        phi = b.arc.angles(samples)
        vp = pu.hom_eval(P, N, np.sin(phi), np.cos(phi))
        vq = pu.hom_eval(Q, N, np.sin(phi), np.cos(phi))
        v = np.unwrap(np.arctan2(vp, vq), period=PI)
        lo, hi = v.min(), v.max()
        if hi - lo >= PI:
            return 0.0
        arcs[b.kind].append((lo % PI, hi - lo))
    plus = _cover(arcs[PLUS], arcs[MINUS])
    if plus is None:
        return 0.0
    minus = _cover(arcs[MINUS], [plus])
    if minus is None or plus[1] <= 0 or minus[1] <= 0:
        return 0.0
    m0, m1 = minus[0], minus[0] + minus[1]
    p0, p1 = plus[0], plus[0] + plus[1]
    num = math.sin(p1 - m1) * math.sin(m0 - p0)
    den = math.sin(p1 - p0) * math.sin(m0 - m1)
    return num / den


def _pencil(u):
    """Two polynomials spanning the plane orthogonal to ``u`` (coefficients)."""
    u = np.asarray(u, dtype=float)
    _, _, vt = np.linalg.svd(u[None, :])
    return vt[1], vt[2]


def brute_force_oracle(e: BandSystem, n: int, grid: int = 24, levels: int = 24,
                       samples: int = 1500, keep: int = 6):
    """Maximize the sampled cross ratio over all functions of degree ``n <= 2``.

    The cross ratio of the tightest windows is invariant under target maps,
    so it depends only on the pencil spanned by ``P`` and ``Q``.  For
    ``n = 1`` there is one pencil; for ``n = 2`` pencils are planes in the
    coefficient space, searched through their unit normals on a grid with
    nested refinement around the best cells.
    """
    if n <= 0:
        return 1.0, None
    if n == 1:
        k = sampled_kappa(np.array([0.0, 1.0]), np.array([1.0, 0.0]), e, samples)
        return (k if k > 0 else 1.0), RealRational([0.0, 1.0], [1.0])
    if n > 2:
        raise PreconditionViolated("oracle supports n <= 2")

    def value(th, ph):
        u = (math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th))
        P, Q = _pencil(u)
        return sampled_kappa(P, Q, e, samples)

    h_th, h_ph = (PI / 2) / grid, (2 * PI) / (2 * grid)
    cells = [((i + 0.5) * h_th, (j + 0.5) * h_ph)
             for i in range(grid) for j in range(2 * grid)]
    scored = sorted(((value(t, p), t, p) for t, p in cells), reverse=True)
    best = scored[0]
    for _ in range(levels):
        h_th, h_ph = h_th / 2, h_ph / 2
        cand = []
        for _, t, p in scored[:keep]:
            for dt in (-1, 0, 1):
                for dp in (-1, 0, 1):
                    cand.append((t + dt * h_th, p + dp * h_ph))
        scored = sorted(((value(t, p), t, p) for t, p in cand), reverse=True)
        scored = sorted(scored + [best], reverse=True)
        best = scored[0]
    k, t, p = best
    P, Q = _pencil((math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)))
    return (k if k > 0 else 1.0), RealRational(P, Q, 2)
