import math
from fractions import Fraction

import numpy as np
import pytest

from polylat import (
    PolarizedAbelianData,
    SumLattice,
    character,
    dual_lattice,
    enumerate_shell,
    hodge_split,
    q_form,
)
from polylat.errors import (
    ConventionViolation,
    NotInDualLattice,
    ShellTooLarge,
    SingularPolarization,
)


@pytest.fixture
def tau_i():
    return PolarizedAbelianData.from_tau(0, 1)


def test_dual_lattice_principal(tau_i):
    dl = dual_lattice(tau_i)
    assert dl.kappa == 1
    # principal polarization: dual equals the lattice itself
    basis = np.array([[float(x) for x in col] for col in dl.basis]).T
    assert abs(abs(np.linalg.det(basis)) - 1.0) < 1e-12
    assert np.all(basis == np.round(basis))


def test_dual_lattice_index_four():
    data = PolarizedAbelianData(1, [[0, -1], [1, 0]], [[0, -2], [2, 0]])
    assert dual_lattice(data).kappa == 4


def test_singular_polarization_rejected():
    with pytest.raises(SingularPolarization):
        PolarizedAbelianData(1, [[0, -1], [1, 0]], [[0, 0], [0, 0]])


def test_hodge_split_zero(tau_i):
    hv = hodge_split(tau_i, [0, 0])
    assert np.all(hv.minus10 == 0) and np.all(hv.zero_minus1 == 0)


def test_hodge_split_e1(tau_i):
    hv = hodge_split(tau_i, [1, 0])
    assert np.allclose(hv.minus10, [0.5, -0.5j])
    assert np.allclose(hv.zero_minus1, np.conj(hv.minus10))
    jf = tau_i.j_float()
    assert np.allclose(jf @ hv.minus10, 1j * hv.minus10)
    assert np.allclose(jf @ hv.zero_minus1, -1j * hv.zero_minus1)


def test_hodge_split_reconstruction(tau_i):
    rng = np.random.default_rng(0)
    for _ in range(20):
        lam = rng.normal(size=2)
        hv = hodge_split(tau_i, lam)
        assert np.allclose(hv.minus10 + hv.zero_minus1, lam, atol=1e-14)


def test_q_form_values(tau_i):
    assert q_form(tau_i, [0, 0]) == 0.0
    assert abs(q_form(tau_i, [1, 0]) - math.pi) < 1e-14
    assert abs(q_form(tau_i, [2, 0]) - 4 * q_form(tau_i, [1, 0])) < 1e-12


def test_q_form_is_hodge_pairing(tau_i):
    rng = np.random.default_rng(1)
    for _ in range(10):
        lam = rng.normal(size=2)
        hv = hodge_split(tau_i, lam)
        pair = 2j * math.pi * (hv.minus10 @ tau_i.e_float() @ hv.zero_minus1)
        assert abs(pair.imag) < 1e-12
        assert abs(pair.real - q_form(tau_i, lam)) < 1e-10


def test_convention_violation_detected():
    # flipped pairing breaks positivity
    with pytest.raises(ConventionViolation):
        PolarizedAbelianData(1, [[0, -1], [1, 0]], [[0, 1], [-1, 0]])


def test_character_values(tau_i):
    assert character(tau_i, [1, 0], [0, 0]) == 1
    val = character(tau_i, [1, 0], [0, 0.5])
    assert abs(val + 1) < 1e-12  # exp(2 pi i E(e1, e2)/2) = -1
    u = [0.3, 0.7]
    shifted = [1.3, 0.7]
    assert abs(character(tau_i, [1, 0], u) - character(tau_i, [1, 0], shifted)) < 1e-15


def test_character_membership(tau_i):
    with pytest.raises(NotInDualLattice):
        character(tau_i, [Fraction(1, 2), 0], [0, 0])
    # index-4 pairing admits half-integer duals
    data = PolarizedAbelianData(1, [[0, -1], [1, 0]], [[0, -2], [2, 0]])
    assert abs(abs(character(data, [Fraction(1, 2), 0], [0.1, 0.2])) - 1) < 1e-12


def test_enumerate_shell_counts(tau_i):
    sh = enumerate_shell(tau_i, math.pi * 1.0000001)
    assert len(sh) == 4
    assert sorted(map(tuple, sh.tolist())) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert len(enumerate_shell(tau_i, 4 * math.pi * 1.0000001)) == 12
    assert len(enumerate_shell(tau_i, 0.5)) == 0


def test_enumerate_shell_monotone(tau_i):
    small = {tuple(v) for v in enumerate_shell(tau_i, 2 * math.pi).tolist()}
    large = {tuple(v) for v in enumerate_shell(tau_i, 9 * math.pi).tolist()}
    assert small <= large


def test_enumerate_shell_complete_bruteforce():
    data = PolarizedAbelianData.from_tau(Fraction(1, 2), Fraction(3, 2))
    frame = SumLattice.from_abelian(data, "primal")
    R = 25.0
    got = {tuple(v) for v in enumerate_shell(data, R).tolist()}
    expect = set()
    for m in range(-10, 11):
        for n in range(-10, 11):
            q = frame.q_values(np.array([[m, n]]))[0]
            if 0 < q <= R:
                expect.add((m, n))
    assert got == expect


def test_enumerate_shell_cap(tau_i):
    with pytest.raises(ShellTooLarge):
        enumerate_shell(tau_i, 1e9, cap=1000)


def test_from_period_matrix_matches_tau():
    tau = 0.5 + 1.25j
    data = PolarizedAbelianData.from_period_matrix([[1.0, tau]], [[0, -1], [1, 0]])
    ref = PolarizedAbelianData.from_tau(Fraction(1, 2), Fraction(5, 4))
    assert data.J == ref.J


def test_from_period_matrix_rejects_degenerate():
    with pytest.raises(SingularPolarization):
        PolarizedAbelianData.from_period_matrix([[1.0, 2.0]], [[0, -1], [1, 0]])


def test_product_rank4():
    data = PolarizedAbelianData.product(
        PolarizedAbelianData.from_tau(0, 1),
        PolarizedAbelianData.from_tau(Fraction(1, 2), Fraction(3, 2), e_scale=2),
    )
    assert data.d == 2
    assert dual_lattice(data).kappa == 4


def test_hodge_split_idempotent(tau_i):
    hv = hodge_split(tau_i, [2.0, -1.0])
    again = hodge_split(tau_i, np.real(hv.minus10 + hv.zero_minus1))
    assert np.allclose(hv.minus10, again.minus10, atol=1e-15)
    assert np.allclose(hv.zero_minus1, again.zero_minus1, atol=1e-15)


def test_exact_phase_data(tau_i):
    frame = SumLattice.from_abelian(tau_i, "dual")
    phase = frame.phase_data([Fraction(1, 3), Fraction(5, 6)])
    assert phase is not None
    v, den = phase
    assert den == 6
    ms = np.array([[1, 0], [-2, 3], [7, -5]])
    exact = frame.char_values_exact(ms, v, den)
    approx = frame.char_values(ms, frame.reduce_point([Fraction(1, 3), Fraction(5, 6)]))
    assert np.max(np.abs(exact - approx)) < 1e-12
    assert np.max(np.abs(np.abs(exact) - 1.0)) < 1e-15
    assert frame.phase_data([0.5, 0.5]) is None  # float input: no exact path


def test_sum_lattice_char_phases_are_periodic(tau_i):
    frame = SumLattice.from_abelian(tau_i, "dual")
    ms = np.array([[1, 0], [2, -3], [0, 5]])
    u = np.array([0.3, 0.45])
    a = frame.char_values(ms, frame.reduce_point(u))
    b = frame.char_values(ms, frame.reduce_point(u + np.array([1.0, 2.0])))
    assert np.max(np.abs(a - b)) <= 1e-12
    # exact rational input reduces exactly
    from fractions import Fraction

    c = frame.char_values(ms, frame.reduce_point([Fraction(3, 10), Fraction(9, 20)]))
    d = frame.char_values(ms, frame.reduce_point([Fraction(13, 10), Fraction(49, 20)]))
    assert np.max(np.abs(c - d)) == 0.0
