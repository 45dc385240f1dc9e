"""Acceptance battery: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance below is pinned, nothing is calibrated at runtime.
"""

import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import mpmath as mp
import numpy as np

from polylat import PolarizedAbelianData, SumLattice
from polylat.bm import closedness_residual, sphere_integral
from polylat.currents import TorsionPoint, eisenstein_value, g_grade
from polylat.polygauss import VectorPolynomial
from polylat.symalg import (
    SymElem,
    c_n_contraction,
    gamma_vs_delta,
    psi_n_matrix,
    theta_ladder_check,
)
from polylat.theta import theta_direct, theta_transformed
from polylat.torus import exterior_d, log_connection, nu_form
from polylat.verify import random_abelian_data, random_form
from polylat.zeta import kzeta_accelerated, kzeta_direct, smoothness_scan


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line, flush=True)
    assert ok, line


def test_criterion_1_theta_transformation_law():
    t0 = time.time()
    rng = random.Random(2024)
    worst = 0.0
    for i in range(20):
        rank = 2 if i % 2 == 0 else 4
        data = random_abelian_data(rng, rank)
        frame = SumLattice.from_abelian(data, side="dual")
        t = 0.2 + 4.8 * rng.random()
        u = [rng.random() for _ in range(rank)]
        P = VectorPolynomial.constant(1.0, rank)
        a = theta_direct(frame, P, u, t, tol=1e-13)
        b = theta_transformed(frame, P, u, t, tol=1e-13)
        rel = float(np.max(np.abs(a.value - b.value))) / max(float(np.max(np.abs(a.value))), 1e-30)
        worst = max(worst, rel)
    elapsed = time.time() - t0
    report(
        1,
        worst <= 1e-10 and elapsed <= 10.0,
        f"theta law on 20 random configs: worst rel {worst:.2e}, {elapsed:.1f}s (cap 10s)",
    )


def test_criterion_2_jacobi_self_dual_point():
    mp.mp.dps = 25
    oracle = float(mp.nsum(lambda n: mp.e ** (-mp.pi * n * n), [-mp.inf, mp.inf]))
    closed = float(mp.pi ** mp.mpf(0.25) / mp.gamma(mp.mpf(3) / 4))
    frame = SumLattice.euclidean(1, [[math.pi]])
    got = theta_direct(frame, VectorPolynomial.constant(1.0, 1), [0.0], 1.0, tol=1e-12)
    err = abs(got.scalar().real - 1.0864348112)
    ok = err <= 1e-9 and abs(oracle - closed) < 1e-15 and abs(got.scalar().real - oracle) <= 1e-9
    report(2, ok, f"rank-1 theta = {got.scalar().real:.10f}, |err| = {err:.1e} (tol 1e-9)")


def test_criterion_3_zeta_regime_agreement():
    frame = SumLattice.euclidean(2)
    P = VectorPolynomial.constant(1.0, 2)
    mp.mp.dps = 25

    def oracle(s):
        beta = mp.nsum(lambda k: (-1) ** k / (2 * k + 1) ** s, [0, mp.inf])
        return float(4 * mp.zeta(s) * beta)

    # frozen from the 4 zeta(s) beta(s) oracle computed above
    frozen = {2: 6.02681204, 3: 4.65891362}
    ok = True
    details = []
    for s in (2, 3):
        vd = kzeta_direct(frame, P, [0, 0], float(s), tol=8e-9)
        va = kzeta_accelerated(frame, P, [0, 0], float(s), tol=1e-11)
        gap = abs(vd.scalar() - va.scalar())
        ref_err = abs(va.scalar().real - oracle(s))
        frz_err = abs(va.scalar().real - frozen[s])
        ok &= gap <= 1e-8 and ref_err <= 1e-9 and frz_err <= 1e-8
        details.append(f"s={s}: accel {va.scalar().real:.9f}, |direct-accel| {gap:.1e}")
    report(3, ok, "; ".join(details) + " (tol 1e-8)")


def test_criterion_4_split_point_independence():
    t0 = time.time()
    rng = random.Random(11)
    data = PolarizedAbelianData.from_tau(0, 1)
    frame = SumLattice.from_abelian(data, "dual")
    P = VectorPolynomial.constant(1.0, 2)
    worst = 0.0
    for _ in range(5):
        u = [rng.randrange(1, 8) / 8, rng.randrange(1, 8) / 8]
        s = complex(0.5 + 2.5 * rng.random(), -1.0 + 2.0 * rng.random())
        vals = [
            kzeta_accelerated(frame, P, u, s, split_a=a, tol=1e-12).scalar()
            for a in (0.5, 1.0, 2.0)
        ]
        spread = max(abs(x - y) for x in vals for y in vals) / max(abs(vals[1]), 1e-30)
        worst = max(worst, spread)
    elapsed = time.time() - t0
    report(
        4,
        worst <= 1e-9 and elapsed <= 30.0,
        f"A in {{0.5,1,2}} at 5 random (u,s): worst spread {worst:.2e}, {elapsed:.1f}s (cap 30s)",
    )


def test_criterion_5_smoothness_scan():
    t0 = time.time()
    data = PolarizedAbelianData.from_tau(0, 1)
    frame = SumLattice.from_abelian(data, "dual")
    P = VectorPolynomial(2, {(2, 0): [1.0], (1, 1): [0.5], (0, 2): [1.0]})
    grid = [((i + 0.5) / 8, (j + 0.5) / 8) for i in range(8) for j in range(8)]
    rows = smoothness_scan(frame, P, 2.0, grid, fd_step=0.008, tol=1e-12)
    finite = all(np.all(np.isfinite(np.abs(r["value"]))) for r in rows)
    ratios = [r["richardson_ratio"] for r in rows]
    in_window = all(3.5 <= r <= 4.5 for r in ratios)
    elapsed = time.time() - t0
    report(
        5,
        finite and in_window and elapsed <= 60.0,
        f"8x8 grid finite, Richardson in [{min(ratios):.2f}, {max(ratios):.2f}] "
        f"(window [3.5,4.5]), {elapsed:.1f}s (cap 60s)",
    )


def test_criterion_6_current_oracle_equivalence():
    t0 = time.time()
    data = PolarizedAbelianData.from_tau(0, 1)
    rng = random.Random(31)
    worst = 0.0
    K = 450
    mm, nn = np.meshgrid(np.arange(-K, K + 1), np.arange(-K, K + 1), indexing="ij")
    mm = mm.ravel().astype(float)
    nn = nn.ravel().astype(float)
    keep = (mm != 0) | (nn != 0)
    mm, nn = mm[keep], nn[keep]
    c = mm + 1j * nn
    q = np.pi * (mm * mm + nn * nn)
    for _ in range(10):
        u = (rng.randrange(1, 16) / 16 + rng.randrange(1, 5) / 128, rng.randrange(1, 16) / 16)
        chi = np.exp(2j * np.pi * (mm * (-u[1]) + nn * u[0]))
        for n in (4, 5, 6):
            grade = g_grade(data, u, n, tol=1e-9)
            for a in range(1, n):
                b = n - a
                oracle = np.sum(
                    chi * np.conj(c) ** (a - 1) * c ** (b - 1) * (-q / 2) / q ** (a + b)
                )
                tail = math.pi ** (2 - a - b) * (K - 2.0) ** (2 - a - b) / (a + b - 2)
                word = tuple(sorted([0] * (b - 1) + [1] * (a - 1)))
                diff = abs(grade.component(word) - (-1) ** (a + 1) * oracle)
                assert diff <= 1e-7 + tail, (u, n, a, b, diff, tail)
                worst = max(worst, diff)
    elapsed = time.time() - t0
    report(
        6,
        worst <= 1e-7 and elapsed <= 120.0,
        f"grades 4..6 at 10 points vs brute force: worst {worst:.2e} (tol 1e-7), "
        f"{elapsed:.1f}s (cap 120s)",
    )


def test_criterion_7_eisenstein_at_torsion():
    data = PolarizedAbelianData.from_tau(0, 1)
    x = TorsionPoint.from_rationals((Fraction(1, 2), Fraction(1, 2)))
    engine = eisenstein_value(data, x, 2, 6, tol=1e-10)
    # independent oracle: brute-force EK sums for grade 5, then contraction
    u = (0.5, 0.5)
    K = 400
    mm, nn = np.meshgrid(np.arange(-K, K + 1), np.arange(-K, K + 1), indexing="ij")
    mm = mm.ravel().astype(float)
    nn = nn.ravel().astype(float)
    keep = (mm != 0) | (nn != 0)
    mm, nn = mm[keep], nn[keep]
    chi = np.exp(2j * np.pi * (mm * (-u[1]) + nn * u[0]))
    c = mm + 1j * nn
    q = np.pi * (mm * mm + nn * nn)
    grade_words = {}
    for a in range(1, 5):
        b = 5 - a
        val = np.sum(chi * np.conj(c) ** (a - 1) * c ** (b - 1) * (-q / 2) / q ** (a + b))
        w = tuple(sorted([0] * (b - 1) + [1] * (a - 1)))
        grade_words[w] = grade_words.get(w, 0j) + (-1) ** (a + 1) * val
    oracle = {}
    for w, v in grade_words.items():
        cnt = w.count(0)
        if cnt:
            rest = list(w)
            rest.remove(0)
            oracle[tuple(rest)] = oracle.get(tuple(rest), 0j) + cnt / len(w) * v
    worst = 0.0
    for (word, _ext), got in engine.components.items():
        worst = max(worst, abs(got - oracle.get(word, 0j)))
    for word, v in oracle.items():
        worst = max(worst, abs(engine.component(word) - v))
    report(
        7,
        worst <= 1e-7,
        f"x=(1/2,1/2), l=2: engine vs oracle worst {worst:.2e} (tol 1e-7; "
        f"both vanish by 2-torsion parity, norm {engine.norm():.1e})",
    )


def test_criterion_8_exact_algebra_suite():
    t0 = time.time()
    ok = True
    for m in (2, 4):
        for n in range(0, 5):
            *_, bij = psi_n_matrix(m, n)
            ok &= bij
    rng = random.Random(2025)
    for m in (2, 4):
        els = [tuple(rng.randrange(-5, 6) for _ in range(m)) for _ in range(50)]
        ok &= all(gamma_vs_delta(m, els))
    for n in range(0, 6):
        for hd in (1, 2, 4):
            psi_ok, theta_ok = theta_ladder_check(hd, n)
            ok &= theta_ok and (psi_ok == (n == 0))
    eps = lambda i: Fraction(1) if i == 0 else Fraction(0)
    for n in (1, 3, 5):
        unit = SymElem(2, n, {(0,) * n: Fraction(1)})
        ok &= c_n_contraction(eps, unit) == SymElem(2, n - 1, {(0,) * (n - 1): Fraction(1)})
    elapsed = time.time() - t0
    report(
        8,
        bool(ok) and elapsed <= 30.0,
        f"psi bijective (m in {{2,4}}, n<=4), gamma=delta(1) on 50 elements, "
        f"theta ladder n<=5 with psi negative control, c_n unit fixed point; "
        f"{elapsed:.1f}s (cap 30s)",
    )


def test_criterion_9_symbolic_flatness():
    t0 = time.time()
    rng = random.Random(9)
    d1 = PolarizedAbelianData.from_tau(0, 1)
    d2 = PolarizedAbelianData.product(
        PolarizedAbelianData.from_tau(0, 1),
        PolarizedAbelianData.from_tau(Fraction(1, 2), Fraction(3, 2)),
    )
    ok = True
    for i in range(200):
        data = d1 if i % 2 == 0 else d2
        f = random_form(rng, data, rng.randrange(1, 5))
        ok &= exterior_d(exterior_d(f)).is_zero()
        ok &= log_connection(log_connection(f)).is_zero()
    for data in (d1, d2):
        ok &= exterior_d(nu_form(data, 4)).is_zero()
    elapsed = time.time() - t0
    report(
        9,
        bool(ok) and elapsed <= 20.0,
        f"d^2 = 0 and nabla^2 = 0 on 200 random forms, d(nu) = 0, exactly; "
        f"{elapsed:.1f}s (cap 20s)",
    )


def test_criterion_10_bochner_martinelli():
    t0 = time.time()
    ok = True
    worst1 = worst2 = 0.0
    for r in (0.2, 0.4, 0.6, 0.8):
        worst1 = max(worst1, abs(sphere_integral(1, r, 48) - 1.0))
        worst2 = max(worst2, abs(sphere_integral(2, r, 32) - 1.0))
    ok &= worst1 <= 1e-10 and worst2 <= 1e-6
    ratios = []
    for d, z, h in ((1, [0.5 + 0.1j], 1e-2), (2, [0.4 + 0.2j, -0.3 + 0.3j], 1e-3)):
        ratios.append(closedness_residual(d, z, h) / closedness_residual(d, z, h / 2))
    ok &= all(3.5 <= r <= 4.5 for r in ratios)
    elapsed = time.time() - t0
    report(
        10,
        bool(ok) and elapsed <= 60.0,
        f"sphere integrals: d=1 worst {worst1:.1e} (tol 1e-10), d=2 worst {worst2:.1e} "
        f"(tol 1e-6); closedness ratios {[f'{r:.2f}' for r in ratios]}; {elapsed:.1f}s (cap 60s)",
    )


def test_criterion_11_end_to_end_determinism():
    cmd = [sys.executable, "-m", "polylat.cli", "suite", "run", "--quick"]
    run1 = subprocess.run(cmd, capture_output=True, text=True)
    run2 = subprocess.run(cmd, capture_output=True, text=True)
    ok = run1.returncode == 0 and run2.returncode == 0 and run1.stdout == run2.stdout
    summary = json.loads(run1.stdout.strip().splitlines()[-1])
    ok &= summary["status"] == "pass"
    report(
        11,
        ok,
        f"suite run twice: byte-identical={run1.stdout == run2.stdout}, "
        f"{summary['detail']['total']} checks pass",
    )
