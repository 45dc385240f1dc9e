"""Polarized lattice data: complex structure, pairing, dual lattice, shells.

A polarized complex torus over a point base is stored as the integral
lattice Z^{2d} (its own coordinates), a complex structure J on the real
span and an integral alternating pairing E.  The pairing convention is
<x,y> = 2*pi*i*E(x,y) and positivity is pinned by E(J l, l) > 0, which
fixes the orientation used by every downstream sign.

J and E are kept exact (Fraction / int matrices); floats only enter at
evaluation time.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from . import ratlin
from .errors import (
    ConventionViolation,
    NotInDualLattice,
    ShellTooLarge,
    SingularPolarization,
)

SNAP_TOL = 1e-12  # floats this close to a lattice point are snapped onto it


def _to_float_matrix(rows):
    return np.array([[float(x) for x in row] for row in rows], dtype=float)


class PolarizedAbelianData:
    """Lattice Z^{2d} with complex structure J and alternating pairing E.

    Invariants checked at construction: J^2 = -1, E alternating and
    nondegenerate, E(Jx, Jy) = E(x, y), and positivity E(Jl, l) > 0 for
    all nonzero l (certified through positive definiteness of the
    symmetrized matrix of E(J., .)).
    """

    def __init__(self, d, J, E, _float_tol=None):
        self.d = int(d)
        n = 2 * self.d
        self.J = ratlin.frac_matrix(J)
        self.E = [[int(x) for x in row] for row in E]
        if len(self.J) != n or len(self.E) != n:
            raise ValueError(f"J and E must be {n}x{n}")
        self._validate()

    def _validate(self):
        n = 2 * self.d
        j2 = ratlin.mat_mul(self.J, self.J)
        if j2 != ratlin.mat_neg(ratlin.identity(n)):
            raise ConventionViolation("J^2 != -identity")
        for i in range(n):
            for j in range(n):
                if self.E[i][j] != -self.E[j][i]:
                    raise SingularPolarization("E is not alternating")
        if ratlin.det(ratlin.frac_matrix(self.E)) == 0:
            raise SingularPolarization("det E = 0")
        # compatibility E(Jx, Jy) = E(x, y)
        ef = ratlin.frac_matrix(self.E)
        jt_e_j = ratlin.mat_mul(ratlin.mat_mul(ratlin.transpose(self.J), ef), self.J)
        if jt_e_j != ef:
            raise ConventionViolation("E(Jx, Jy) != E(x, y)")
        # positivity: S = sym(J^T E) must be positive definite; then
        # E(Jl, l) = l^T S l > 0 for every nonzero l, not just a sample.
        jte = ratlin.mat_mul(ratlin.transpose(self.J), ef)
        s = [[(jte[i][j] + jte[j][i]) / 2 for j in range(n)] for i in range(n)]
        if jte != s:
            raise ConventionViolation("E(J., .) failed to symmetrize")
        for k in range(1, n + 1):
            minor = [row[:k] for row in s[:k]]
            if ratlin.det(minor) <= 0:
                raise ConventionViolation(
                    "E(Jl, l) is not positive definite; J/E orientation mismatch"
                )
        self._q_rat = s  # exact matrix of Q/pi in the lattice basis

    # -- alternate constructors -------------------------------------------

    @classmethod
    def from_period_matrix(cls, periods, E, tol=1e-12):
        """Build (J, E) from a d x 2d complex period matrix.

        The complex structure is transported from multiplication by i on
        C^d; Riemann-relation failures surface as the usual invariant
        violations (within `tol`, entries are rationalized by rounding to
        a bounded-denominator fraction).
        """
        P = np.asarray(periods, dtype=complex)
        d = P.shape[0]
        if P.shape != (d, 2 * d):
            raise ValueError("period matrix must be d x 2d")
        stack = np.vstack([P.real, P.imag])
        if abs(np.linalg.det(stack)) < tol:
            raise SingularPolarization("period matrix has degenerate real span")
        mult_i = np.block(
            [[np.zeros((d, d)), -np.eye(d)], [np.eye(d), np.zeros((d, d))]]
        )
        jf = np.linalg.solve(stack, mult_i @ stack)
        if np.max(np.abs(jf @ jf + np.eye(2 * d))) > 1e-9:
            raise ConventionViolation("transported J fails J^2 = -1")
        J = [[_snap_fraction(x, tol) for x in row] for row in jf]
        return cls(d, J, E)

    @classmethod
    def from_tau(cls, tau_re, tau_im, e_scale=1):
        """Elliptic-curve convenience: lattice Z + Z*tau with rational tau.

        `e_scale` >= 1 scales the principal pairing, giving index
        kappa = e_scale^2.
        """
        x, y = Fraction(tau_re), Fraction(tau_im)
        if y <= 0:
            raise ConventionViolation("tau must lie in the upper half plane")
        J = [[-x / y, -(x * x + y * y) / y], [1 / y, x / y]]
        s = int(e_scale)
        E = [[0, -s], [s, 0]]
        return cls(1, J, E)

    @classmethod
    def product(cls, *factors):
        """Block-diagonal product of polarized data (ranks add)."""
        d = sum(f.d for f in factors)
        n = 2 * d
        J = [[Fraction(0)] * n for _ in range(n)]
        E = [[0] * n for _ in range(n)]
        off = 0
        for f in factors:
            k = 2 * f.d
            for i in range(k):
                for j in range(k):
                    J[off + i][off + j] = f.J[i][j]
                    E[off + i][off + j] = f.E[i][j]
            off += k
        return cls(d, J, E)

    # -- basic geometry ----------------------------------------------------

    @property
    def rank(self):
        return 2 * self.d

    @property
    def q_matrix_rat(self):
        """Exact matrix of Q/pi: Q(l) = pi * l^T q_matrix_rat l."""
        return self._q_rat

    def q_matrix(self):
        return math.pi * _to_float_matrix(self._q_rat)

    def j_float(self):
        return _to_float_matrix(self.J)

    def e_float(self):
        return np.array(self.E, dtype=float)

    def det_e(self):
        return int(ratlin.det(ratlin.frac_matrix(self.E)))


@dataclass(frozen=True)
class DualLattice:
    """Generators of the 2*pi*i-dual lattice and its index over the base."""

    basis: tuple  # columns, as tuples of Fractions, in lattice coordinates
    kappa: int


@dataclass(frozen=True)
class HodgeVector:
    """Components of a vector under the (-1,0) / (0,-1) eigensplit of J."""

    minus10: np.ndarray
    zero_minus1: np.ndarray


def dual_lattice(data):
    """Vectors pairing integrally with the lattice, plus the index kappa."""
    ef = ratlin.frac_matrix(data.E)
    if ratlin.det(ef) == 0:
        raise SingularPolarization("det E = 0")
    # l' in the dual iff E(l', e_j) in Z for all j, i.e. E^T l' integral;
    # generators are the columns of E^{-T}.
    inv_t = ratlin.transpose(ratlin.inverse(ef))
    cols = tuple(tuple(inv_t[i][j] for i in range(len(inv_t))) for j in range(len(inv_t)))
    kappa = abs(int(ratlin.det(ef)))
    snf = ratlin.smith_diagonal(data.E)
    prod = 1
    for x in snf:
        prod *= x
    if prod != kappa:
        raise SingularPolarization("Smith normal form disagrees with det E")
    return DualLattice(basis=cols, kappa=kappa)


def hodge_split(data, lam):
    """Split a real vector as l = l^{-1,0} + l^{0,-1} along the J-eigenspaces."""
    v = np.asarray(lam, dtype=complex)
    jv = data.j_float() @ v
    minus10 = (v - 1j * jv) / 2
    zero_minus1 = (v + 1j * jv) / 2
    return HodgeVector(minus10=minus10, zero_minus1=zero_minus1)


def q_form(data, lam):
    """Q(l) = <l^{-1,0}, l^{0,-1}> = pi * E(Jl, l), positive for l != 0."""
    v = np.asarray(lam, dtype=float)
    val = math.pi * float(v @ _to_float_matrix(data.q_matrix_rat) @ v)
    if val < 0 and not np.allclose(v, 0):
        raise ConventionViolation("negative Q value: J/E convention mismatch")
    return val


def character(data, lam_dual, u):
    """chi_{l'}(u) = exp(2*pi*i*E(l', u)); requires l' in the dual lattice."""
    lam = [ratlin.as_fraction(x) if not isinstance(x, float) else x for x in lam_dual]
    ef = ratlin.frac_matrix(data.E)
    # membership: E^T l' must be integral
    if all(isinstance(x, Fraction) for x in lam):
        pair = ratlin.mat_vec(ratlin.transpose(ef), lam)
        if any(p.denominator != 1 for p in pair):
            raise NotInDualLattice(f"{lam_dual} is not in the dual lattice")
    else:
        pair = data.e_float().T @ np.asarray(lam_dual, dtype=float)
        if np.max(np.abs(pair - np.round(pair))) > SNAP_TOL:
            raise NotInDualLattice(f"{lam_dual} is not in the dual lattice")
    phase = float(np.asarray(lam_dual, dtype=float) @ data.e_float() @ np.asarray(u, dtype=float))
    return complex(np.exp(2j * np.pi * (phase - math.floor(phase))))


# ---------------------------------------------------------------------------
# summation frames


class SumLattice:
    """A lattice presented for summation: integer coordinates + geometry.

    Holds everything the theta/zeta engines need: ambient basis V
    (columns are generators), ambient quadratic form matrix M with
    Q(x) = x^T M x, ambient pairing B for characters, the pairing-dual
    lattice basis, and the volume normalization that makes this frame's
    covolume equal 1 (the Poisson identity is exact in that volume).
    """

    def __init__(self, basis, q_mat, pairing, dual_basis, label, data=None):
        self.basis = np.asarray(basis, dtype=float)
        self.q_mat = np.asarray(q_mat, dtype=float)
        self.pairing = np.asarray(pairing, dtype=float)
        self.dual_basis = np.asarray(dual_basis, dtype=float)
        self.label = label
        self.data = data
        self.rank = self.basis.shape[0]
        self.gram = self.basis.T @ self.q_mat @ self.basis
        self.char_mat = self.basis.T @ self.pairing
        evals = np.linalg.eigvalsh(0.5 * (self.gram + self.gram.T))
        if evals[0] <= 0:
            raise ConventionViolation("summation Gram matrix is not positive definite")
        # explicit lower bound Q(l) >= sigma_min |m|^2, with a safety margin
        self.sigma_min = float(evals[0]) - 1e-10
        self.sigma_max = float(evals[-1]) + 1e-10
        self.vol_scale = 1.0 / abs(np.linalg.det(self.basis))
        self.basis_norm = float(np.linalg.norm(self.basis, 2))
        self.basis_smin = float(np.linalg.svd(self.basis, compute_uv=False)[-1])

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_abelian(cls, data, side="dual"):
        """Frame for the lattice (side='primal') or its 2*pi*i-dual."""
        n = data.rank
        b = data.e_float()
        q = data.q_matrix()
        eye = np.eye(n)
        dual = dual_lattice(data)
        w = _to_float_matrix([[float(dual.basis[j][i]) for j in range(n)] for i in range(n)])
        if side == "dual":
            return cls(basis=w, q_mat=q, pairing=b, dual_basis=eye, label="dual", data=data)
        if side == "primal":
            return cls(basis=eye, q_mat=q, pairing=b, dual_basis=w, label="primal", data=data)
        raise ValueError("side must be 'primal' or 'dual'")

    @classmethod
    def euclidean(cls, rank, q_mat=None):
        """Z^rank with pairing x.p, self-dual; Q defaults to |x|^2."""
        eye = np.eye(rank)
        q = eye if q_mat is None else np.asarray(q_mat, dtype=float)
        return cls(basis=eye, q_mat=q, pairing=eye, dual_basis=eye, label="euclidean")

    def dual_frame(self):
        """The pairing-dual lattice as its own summation frame."""
        return SumLattice(
            basis=self.dual_basis,
            q_mat=self.q_mat,
            pairing=self.pairing,
            dual_basis=self.basis,
            label=f"{self.label}-dual",
            data=self.data,
        )

    # -- pointwise geometry --------------------------------------------------

    def points(self, ms):
        return np.asarray(ms, dtype=float) @ self.basis.T

    def q_values(self, ms):
        m = np.asarray(ms, dtype=float)
        return np.einsum("ij,jk,ik->i", m, self.gram, m)

    def char_values(self, ms, u):
        """exp(2*pi*i*E(l, u)) for each integer coordinate row of ms."""
        phases = np.asarray(ms, dtype=float) @ (self.char_mat @ np.asarray(u, dtype=float))
        phases -= np.floor(phases)
        return np.exp(2j * np.pi * phases)

    def phase_data(self, u):
        """(numerators, denominator) for exact characters at rational u.

        Available when u is given in Fractions and the character matrix is
        integral (true for all frames built here): the phase of each
        character is then an exact root of unity computed in integers and
        floated only at the end.
        """
        if not all(isinstance(x, Fraction) for x in u):
            return None
        cm = np.round(self.char_mat)
        if np.max(np.abs(self.char_mat - cm)) > 1e-12:
            return None
        den = 1
        for x in u:
            den = den * x.denominator // math.gcd(den, x.denominator)
        nums = [int((x % 1) * den) for x in u]
        v = cm.astype(np.int64) @ np.array(nums, dtype=np.int64)
        return v, den

    def char_values_exact(self, ms, v, den):
        """Characters as exact den-th roots of unity (integer phases mod den)."""
        phases = (np.asarray(ms, dtype=np.int64) @ v) % den
        return np.exp((2j * np.pi / den) * phases)

    def reduce_point(self, u):
        """Reduce an ambient point mod Z^rank; exact for Fraction input."""
        if any(isinstance(x, Fraction) for x in u):
            return np.array(
                [float(ratlin.as_fraction(x) % 1) for x in u], dtype=float
            )
        v = np.asarray(u, dtype=float)
        return v - np.floor(v)

    def in_base_lattice(self, u):
        """True when u lies in Z^rank up to the snap tolerance."""
        v = self.reduce_point(u)
        return bool(np.all(np.minimum(v, 1.0 - v) < SNAP_TOL))


def box_shell(rank, k):
    """Integer vectors with sup-norm exactly k, in a fixed deterministic order."""
    if k == 0:
        return np.zeros((1, rank), dtype=np.int64)
    pieces = []
    # decompose by the first coordinate with |m_i| = k
    for i in range(rank):
        pre = [np.arange(-(k - 1), k, dtype=np.int64)] * i
        post = [np.arange(-k, k + 1, dtype=np.int64)] * (rank - 1 - i)
        for sign in (-k, k):
            dims = pre + [np.array([sign], dtype=np.int64)] + post
            mesh = np.meshgrid(*dims, indexing="ij")
            pieces.append(np.stack([m.ravel() for m in mesh], axis=1))
    shell = np.vstack(pieces)
    order = np.lexsort(shell.T[::-1])
    return shell[order]


def shell_point_count(rank, k):
    if k == 0:
        return 1
    return (2 * k + 1) ** rank - (2 * k - 1) ** rank


def enumerate_shell(data_or_frame, R, side="primal", cap=2_000_000):
    """All lattice vectors with 0 < Q(l) <= R, lexicographic, certified complete.

    The bounding box |m_i| <= sqrt(R * (G^{-1})_{ii}) comes from the
    Cauchy-Schwarz inequality in the G-inner product, so no vector with
    Q <= R can fall outside it.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if isinstance(data_or_frame, SumLattice):
        frame = data_or_frame
    else:
        frame = SumLattice.from_abelian(data_or_frame, side=side)
    ginv = np.linalg.inv(frame.gram)
    bounds = np.floor(np.sqrt(np.maximum(R * np.diag(ginv), 0.0)) * (1 + 1e-9) + 1e-12)
    bounds = bounds.astype(np.int64)
    total = 1
    for b in bounds:
        total *= 2 * int(b) + 1
        if total > cap:
            raise ShellTooLarge(f"bounding box has {total}+ points (cap {cap})")
    grids = [np.arange(-int(b), int(b) + 1, dtype=np.int64) for b in bounds]
    mesh = np.meshgrid(*grids, indexing="ij")
    ms = np.stack([g.ravel() for g in mesh], axis=1)
    q = frame.q_values(ms)
    keep = (q > 0) & (q <= R * (1 + 1e-12))
    ms = ms[keep]
    order = np.lexsort(ms.T[::-1])
    return ms[order]


def _snap_fraction(x, tol):
    """Rationalize a float whose exact value is a small-denominator rational."""
    f = Fraction(float(x)).limit_denominator(10**9)
    if abs(float(f) - float(x)) > tol * max(1.0, abs(float(x))):
        raise ConventionViolation(f"matrix entry {x!r} is not near-rational")
    return f
