"""Lattice zeta sums K(Q,P,s) = sum' chi_l P(l)/Q(l)^s and their continuation.

Direct evaluation applies in the absolute-convergence region
2 Re(s) - deg P > rank.  Everywhere else the value is defined through the
split Mellin representation of Gamma(s) K(s): the [A, inf) piece gives
upper incomplete gamma factors on the direct lattice, the (0, A] piece is
Poisson-transformed and integrated term by term against the exact
Laurent-in-t polynomial factor, each monomial contributing one incomplete
gamma with shifted order r/2 + m - s, plus the boundary term -P(0) A^s / s.
The split point A is analytically irrelevant, which is itself a test
surface.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from .errors import (
    BudgetExceeded,
    GridTouchesZeroSection,
    NotAbsolutelyConvergent,
    PoleAtS,
    ZeroSectionSingularity,
)
from .incgamma import upper_gamma
from .lattice import SNAP_TOL, box_shell
from .polygauss import gaussian_ft
from .sums import CompensatedSum, gaussian_tail, map_shells, power_tail, thread_count

DEFAULT_SHELL_CAP = 400
_POLE_TOL = 1e-12


@dataclass
class ZetaValue:
    value: np.ndarray
    s: complex
    regime: str  # 'direct' or 'accelerated'
    error_bound: float
    split_a: float = None

    def scalar(self):
        return complex(self.value[0])


def converges_directly(P, s, rank):
    return 2.0 * complex(s).real - P.degree > rank


def kzeta_direct(frame, P, u, s, tol=1e-10, shell_cap=DEFAULT_SHELL_CAP, threads=None):
    """Shell summation in the absolute-convergence region with power-law tail."""
    s = complex(s)
    if not converges_directly(P, s, frame.rank):
        raise NotAbsolutelyConvergent(
            f"need 2 Re(s) - deg P > {frame.rank}, got s={s}, deg={P.degree}"
        )
    h = frame.reduce_point(u)
    constant_p = P.degree == 0 and not P.is_zero()
    if frame.rank == 2 and constant_p and s.imag == 0.0 and not np.any(h != 0.0):
        return _direct_ball_rank2(frame, P, s.real, tol)
    acc = CompensatedSum(P.target_dim)
    coeff = P.coeff_l1()
    growth = frame.basis_norm * math.sqrt(frame.rank)
    nthreads = thread_count(threads)

    phase = frame.phase_data(u)

    def shell_partial(k):
        ms = box_shell(frame.rank, k)
        q = frame.q_values(ms)
        chi = (
            frame.char_values(ms, h)
            if phase is None
            else frame.char_values_exact(ms, *phase)
        )
        weights = chi * np.exp(-s * np.log(q))
        return (P.evaluate_many(frame.points(ms)) * weights[:, None]).sum(axis=0)

    k = 1
    while k <= shell_cap:
        batch = list(range(k, min(k + max(nthreads, 1), shell_cap + 1)))
        for part in map_shells(shell_partial, batch, nthreads):
            acc.add(part)
        k = batch[-1] + 1
        tail = power_tail(
            k - 1,
            rank=frame.rank,
            sigma=frame.sigma_min,
            s_re=s.real,
            coeff=coeff,
            deg=P.degree,
            growth=growth,
        )
        if tail <= tol:
            return ZetaValue(value=acc.value, s=s, regime="direct", error_bound=float(tail))
    raise BudgetExceeded(f"direct zeta: tail above {tol} after {shell_cap} shells")


def _ball_tail_scalar(frame, s_re, radius):
    """Integral-comparison bound for sum over Q(m) > radius of Q(m)^{-s}.

    Shifting each lattice cell into the continuum costs the cell diameter
    D in the Q-norm: Q(m)^{-s} <= integral over the cell of
    (sqrt(Q(x)) - D)^{-2s}, so the tail is bounded by the ellipsoid-polar
    integral 2*pi/sqrt(det M) * int rho (rho - D)^{-2s} drho.
    """
    m = frame.basis.T @ frame.q_mat @ frame.basis
    det = float(np.linalg.det(m))
    corners = [np.array(c, dtype=float) for c in np.ndindex(2, 2)]
    D = max(math.sqrt(float(c @ m @ c)) for c in corners)
    rho0 = math.sqrt(radius)
    tau0 = rho0 - D
    if tau0 <= 0 or 2 * s_re <= 2:
        return math.inf
    # int_{tau0}^inf (tau + D) tau^{-2s} dtau, expanded in powers
    val = tau0 ** (2 - 2 * s_re) / (2 * s_re - 2) + D * tau0 ** (1 - 2 * s_re) / (2 * s_re - 1)
    return 2 * math.pi / math.sqrt(det) * val


def _direct_ball_rank2(frame, P, s_re, tol, max_radius_coord=500_000):
    """Row-by-row rank-2 ball summation for constant P, u = 0, real s.

    This is the same direct algorithm with a tighter (ball) truncation
    certificate, needed because the absolute tail decays only like a power.
    Uses the lambda <-> -lambda symmetry (the summand is even here).
    """
    g = frame.gram
    a, b, c = g[0, 0], g[0, 1], g[1, 1]
    const = complex(P.value_at_zero()[0])
    # grow the radius until the certificate passes
    radius = 16.0 * frame.sigma_max
    while _ball_tail_scalar(frame, s_re, radius) * abs(const) > tol:
        radius *= 2.0
        if radius > frame.sigma_min * max_radius_coord**2:
            raise BudgetExceeded("direct ball summation: radius exceeds budget")
    m1_max = int(math.floor(math.sqrt(radius / (a - b * b / c))))
    total = 0.0
    comp = 0.0
    for m1 in range(0, m1_max + 1):
        # solve c m2^2 + 2 b m1 m2 + (a m1^2 - radius) <= 0
        disc = (b * m1) ** 2 - c * (a * m1 * m1 - radius)
        if disc < 0:
            continue
        lo = int(math.ceil((-b * m1 - math.sqrt(disc)) / c))
        hi = int(math.floor((-b * m1 + math.sqrt(disc)) / c))
        if m1 == 0:
            lo = max(lo, 1)  # half-lattice representatives; factor 2 below
        m2 = np.arange(lo, hi + 1, dtype=float)
        if len(m2) == 0:
            continue
        q = a * m1 * m1 + 2 * b * m1 * m2 + c * m2 * m2
        q = q[q > 0]
        part = float(np.sum(q ** (-s_re)))
        t = total + part
        comp += (total - t) + part if abs(total) >= abs(part) else (part - t) + total
        total = t
    value = 2.0 * (total + comp) * const
    tail = _ball_tail_scalar(frame, s_re, radius) * abs(const)
    return ZetaValue(
        value=np.array([value], dtype=complex),
        s=complex(s_re),
        regime="direct",
        error_bound=float(tail),
    )


def kzeta_accelerated(
    frame, P, u, s, split_a=1.0, tol=1e-10, shell_cap=DEFAULT_SHELL_CAP, threads=None
):
    """Analytic continuation by the split-Mellin / incomplete-gamma assembly."""
    s = complex(s)
    A = float(split_a)
    if A <= 0 or tol <= 0:
        raise ValueError("split point and tol must be positive")
    h = frame.reduce_point(u)
    u_in_lattice = frame.in_base_lattice(u)
    r = frame.rank
    half = r / 2.0

    p0 = P.value_at_zero()
    if np.any(p0 != 0) and abs(s) < _POLE_TOL:
        raise PoleAtS("boundary term P(0) A^s / s has a pole at s = 0")

    gf = gaussian_ft(P, frame.q_mat, h=h, pairing=frame.pairing, vol_scale=frame.vol_scale)
    by_tpow = gf.monomials_by_tpower()
    rhos = {m: half + m - s for m in by_tpow}

    # dual-side zero term: only the constant-in-w monomials contribute at w=0
    zero_term = np.zeros(P.target_dim, dtype=complex)
    if u_in_lattice:
        for m, monos in by_tpow.items():
            c0 = sum((vec for alpha, vec in monos if sum(alpha) == 0), np.zeros(P.target_dim, dtype=complex))
            if np.any(c0 != 0):
                denom = s - half - m
                if abs(denom) < _POLE_TOL:
                    raise ZeroSectionSingularity(
                        f"dual-side constant term diverges at s = {half + m}"
                    )
                zero_term = zero_term + c0 * A**denom / denom

    piece_i = _gamma_weighted_direct(
        frame, P, h, s, A, tol / 4, shell_cap, threads, phase=frame.phase_data(u)
    )
    piece_ii = _gamma_weighted_dual(
        frame, gf, by_tpow, rhos, h, s, A, tol / 4, shell_cap, threads, skip_zero=True
    )

    total = piece_i.sum + gf.disc_factor * (piece_ii.sum + zero_term)
    if np.any(p0 != 0):
        total = total - p0 * A**s / s
    rg = complex(special.rgamma(s))
    err = (piece_i.tail + gf.disc_factor * piece_ii.tail) * abs(rg)
    return ZetaValue(
        value=total * rg, s=s, regime="accelerated", error_bound=float(err), split_a=A
    )


class _Piece:
    def __init__(self, sum_, tail):
        self.sum = sum_
        self.tail = tail


def _gamma_weighted_direct(frame, P, h, s, A, tol, shell_cap, threads, phase=None):
    """sum_{l != 0} chi_l P(l) Gamma(s, A Q(l)) / Q(l)^s with certified tail."""
    acc = CompensatedSum(P.target_dim)
    coeff = P.coeff_l1()
    growth = frame.basis_norm * math.sqrt(frame.rank)
    # tail bound valid once A Q >= x_min (then |Gamma(s,x)| <= 2 x^{Re s - 1} e^{-x})
    x_min = max(1.0, 2.0 * (s.real - 1.0))
    k_cert = math.ceil(math.sqrt(x_min / (A * frame.sigma_min))) + 1
    nthreads = thread_count(threads)

    def shell_partial(k):
        ms = box_shell(frame.rank, k)
        q = frame.q_values(ms)
        gam = np.array([upper_gamma(s, A * float(x)) for x in q])
        chi = (
            frame.char_values(ms, h)
            if phase is None
            else frame.char_values_exact(ms, *phase)
        )
        weights = chi * gam * np.exp(-s * np.log(q))
        return (P.evaluate_many(frame.points(ms)) * weights[:, None]).sum(axis=0)

    k = 1
    while k <= shell_cap:
        batch = list(range(k, min(k + max(nthreads, 1), shell_cap + 1)))
        for part in map_shells(shell_partial, batch, nthreads):
            acc.add(part)
        k = batch[-1] + 1
        if k - 1 < k_cert:
            continue
        tail = (2.0 * A ** (s.real - 1.0) / frame.sigma_min) * gaussian_tail(
            k - 1,
            rank=frame.rank,
            sigma=frame.sigma_min,
            decay=A,
            coeff=coeff,
            deg=P.degree,
            growth=growth,
        )
        if tail <= tol:
            return _Piece(acc.value, float(tail))
    raise BudgetExceeded(f"accelerated zeta (direct piece): tail above {tol}")


def _gamma_weighted_dual(frame, gf, by_tpow, rhos, h, s, A, tol, shell_cap, threads, skip_zero):
    """Dual-lattice sum of the term-by-term Mellin integrals over (0, A]."""
    dual = frame.dual_frame()
    r = frame.rank
    target_dim = gf.target_dim
    acc = CompensatedSum(target_dim)
    qd_sigma = float(np.linalg.eigvalsh(gf.dual_form)[0]) - 1e-12
    h_norm = float(np.linalg.norm(h))
    growth = dual.basis_norm * math.sqrt(r)
    max_rho_re = max((rho.real for rho in rhos.values()), default=0.0)
    x_min = max(1.0, 2.0 * (max_rho_re - 1.0))
    # coefficient for the tail: per monomial, |Gamma(rho,y)/(pi^2 Qd)^rho| <= 2 A^{-Re rho}/y * e^{-y}
    tail_coeff = 0.0
    for m, monos in by_tpow.items():
        rho = rhos[m]
        for _alpha, vec in monos:
            tail_coeff += float(np.max(np.abs(vec))) * 2.0 * A ** (-rho.real)
    tail_coeff /= x_min
    k_cert = (
        math.ceil(
            (math.sqrt(x_min * A / (math.pi**2 * qd_sigma)) + h_norm) / dual.basis_smin
        )
        + 1
    )
    nthreads = thread_count(threads)

    def shell_partial(k):
        ms = box_shell(r, k)
        ws = dual.points(ms) + h
        qd = np.einsum("ij,jk,ik->i", ws, gf.dual_form, ws)
        keep = qd > SNAP_TOL if skip_zero else np.ones(len(qd), dtype=bool)
        ws, qd = ws[keep], qd[keep]
        out = np.zeros(target_dim, dtype=complex)
        if len(ws) == 0:
            return out
        ys = (math.pi**2 / A) * qd
        log_pq = np.log(math.pi**2 * qd)
        for m, monos in by_tpow.items():
            rho = rhos[m]
            gam = np.array([upper_gamma(rho, float(y)) for y in ys])
            factor = gam * np.exp(-rho * log_pq)
            poly_m = np.zeros((len(ws), target_dim), dtype=complex)
            for alpha, vec in monos:
                mono = np.ones(len(ws))
                for j, a in enumerate(alpha):
                    if a:
                        mono = mono * ws[:, j] ** a
                poly_m += mono[:, None] * vec[None, :]
            out = out + (poly_m * factor[:, None]).sum(axis=0)
        return out

    k = 0
    while k <= shell_cap:
        batch = list(range(k, min(k + max(nthreads, 1), shell_cap + 1)))
        for part in map_shells(shell_partial, batch, nthreads):
            acc.add(part)
        k = batch[-1] + 1
        if k - 1 < k_cert:
            continue
        tail = tail_coeff * gaussian_tail(
            k - 1,
            rank=r,
            sigma=qd_sigma * dual.basis_smin**2,
            decay=math.pi**2 / A,
            coeff=1.0,
            deg=gf.poly_degree(),
            growth=growth,
            rho_shift=h_norm / dual.basis_smin,
            amp_shift=h_norm,
        )
        if tail <= tol:
            return _Piece(acc.value, float(tail))
    raise BudgetExceeded(f"accelerated zeta (dual piece): tail above {tol}")


def kzeta(frame, P, u, s, mode="auto", split_a=1.0, tol=1e-10, threads=None):
    """Dispatch between the direct and accelerated regimes.

    `auto` picks the direct sum only when its power-law certificate
    reaches tol within a modest shell budget; otherwise the continuation
    (which agrees wherever both converge) is used.
    """
    if mode == "auto":
        cheap = False
        if converges_directly(P, s, frame.rank):
            probe = power_tail(
                64,
                rank=frame.rank,
                sigma=frame.sigma_min,
                s_re=complex(s).real,
                coeff=P.coeff_l1(),
                deg=P.degree,
                growth=frame.basis_norm * math.sqrt(frame.rank),
            )
            cheap = probe <= tol
        mode = "direct" if cheap else "accel"
    if mode == "direct":
        return kzeta_direct(frame, P, u, s, tol=tol, threads=threads)
    if mode in ("accel", "accelerated"):
        return kzeta_accelerated(frame, P, u, s, split_a=split_a, tol=tol, threads=threads)
    raise ValueError("mode must be auto, direct or accel")


def kzeta_gamma_product(frame, P, u, s, split_a=1.0, tol=1e-10, threads=None):
    """The assembled Gamma(s) * K(s) before dividing by Gamma.

    For u outside the base lattice every piece is entire in s, which the
    suite checks through a Cauchy-integral reconstruction on a small circle.
    """
    s = complex(s)
    A = float(split_a)
    h = frame.reduce_point(u)
    gf = gaussian_ft(P, frame.q_mat, h=h, pairing=frame.pairing, vol_scale=frame.vol_scale)
    by_tpow = gf.monomials_by_tpower()
    rhos = {m: frame.rank / 2.0 + m - s for m in by_tpow}
    piece_i = _gamma_weighted_direct(
        frame, P, h, s, A, tol / 2, DEFAULT_SHELL_CAP, threads, phase=frame.phase_data(u)
    )
    piece_ii = _gamma_weighted_dual(
        frame, gf, by_tpow, rhos, h, s, A, tol / 2, DEFAULT_SHELL_CAP, threads, skip_zero=True
    )
    total = piece_i.sum + gf.disc_factor * piece_ii.sum
    p0 = P.value_at_zero()
    if frame.in_base_lattice(u):
        for m, monos in by_tpow.items():
            c0 = sum(
                (vec for alpha, vec in monos if sum(alpha) == 0),
                np.zeros(P.target_dim, dtype=complex),
            )
            denom = s - frame.rank / 2.0 - m
            if np.any(c0 != 0):
                if abs(denom) < _POLE_TOL:
                    raise ZeroSectionSingularity(f"pole at s = {frame.rank / 2.0 + m}")
                total = total + gf.disc_factor * c0 * A**denom / denom
    if np.any(p0 != 0):
        if abs(s) < _POLE_TOL:
            raise PoleAtS("boundary term pole at s = 0")
        total = total - p0 * A**s / s
    return total


def torus_distance(frame, u):
    """Distance from u to the base lattice Z^rank (ambient coordinates)."""
    v = frame.reduce_point(u)
    best = math.inf
    for corner in np.ndindex(*(2,) * frame.rank):
        best = min(best, float(np.linalg.norm(v - np.array(corner, dtype=float))))
    return best


def smoothness_scan(frame, P, s, grid, fd_step=0.01, tol=1e-11, mode="accelerated"):
    """Values and finite-difference gradients of the continued sum on a u-grid.

    Each gradient is computed at steps fd_step, fd_step/2 and fd_step/4;
    the stability ratio |g_h|/|g_{h/2}| should sit near 1 and the
    Richardson ratio |g_h - g_{h/2}| / |g_{h/2} - g_{h/4}| near 4 for a
    second-order-smooth integrand.
    """
    rows = []
    for u in grid:
        u = np.asarray(u, dtype=float)
        if torus_distance(frame, u) < 10 * fd_step:
            raise GridTouchesZeroSection(f"grid point {u.tolist()} too close to the lattice")

        def value_at(v):
            return kzeta(frame, P, v, s, mode=mode, tol=tol).value

        val = value_at(u)
        grads = {}
        for step in (fd_step, fd_step / 2, fd_step / 4):
            g = np.zeros((frame.rank, P.target_dim), dtype=complex)
            for j in range(frame.rank):
                e = np.zeros(frame.rank)
                e[j] = step
                g[j] = (value_at(u + e) - value_at(u - e)) / (2 * step)
            grads[step] = g
        g1, g2, g4 = grads[fd_step], grads[fd_step / 2], grads[fd_step / 4]
        denom = np.linalg.norm(g2 - g4)
        rich = float(np.linalg.norm(g1 - g2) / denom) if denom > 0 else math.nan
        stab = float(np.linalg.norm(g1) / np.linalg.norm(g2)) if np.linalg.norm(g2) > 0 else math.nan
        rows.append(
            {
                "u": u.tolist(),
                "value": val,
                "grad": g2,
                "grad_norm": float(np.linalg.norm(g2)),
                "stability_ratio": stab,
                "richardson_ratio": rich,
            }
        )
    return rows
