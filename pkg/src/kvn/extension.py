"""Minimal positive extension of a partially defined positive operator.

An operator ``A`` is given on ``dom A = span(D)`` (columns ``d_j``) by the
antidual vectors ``A d_j = B[:, j]``.  Everything is expressed in domain
coefficients ``c``, so that ``x = D c`` and ``A x = B c``.

* Gram form ``G = D^H B``; ``<Ax|x> = c^H G c``.
* Auxiliary Hilbert space: ``C^k`` modulo ``ker G`` with the inner product
  ``<c, c'> = c'^H G c``.  Writing ``G = U diag(lam) U^H`` on its range,
  ``z = lam^{1/2} U^H c`` are orthonormal coordinates.
* The embedding ``J : c -> B c`` becomes ``F = B U lam^{-1/2}`` in those
  coordinates, its adjoint composed with the bidual embedding is
  ``T = F^H`` and the extension is ``A_N = T^* T = F F^H = B G^+ B^H``.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy import optimize

from . import normed
from ._sphere import min_dual_norm_on_sphere
from ._linalg import (
    RTOL, TOL, as_matrix, column_space, hermitian_part, max_abs, min_eigenvalue,
    numerical_rank, polar_unitary, psd_kernel, psd_range, random_complex, random_psd,
)
from .bounds import Interval, agree, upper
from .errors import (
    BadCandidate, DimensionError, NotExtendable, NotPositive, NotSymmetric,
    RangeMismatch, VerificationError,
)
from .normed import Check, NormedSpace


@dataclass(frozen=True, eq=False)
class PartialPositiveOperator:
    """``A : span(D) -> antidual`` with ``A D[:, j] = B[:, j]``.

    Parameters
    ----------
    space : NormedSpace
    D : (n, k) array
        Domain basis; its columns must be linearly independent.
    B : (n, k) array
        Values, column ``j`` being the coordinates of ``A d_j``.
    """

    space: NormedSpace
    D: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        n = self.space.dim
        D = as_matrix(self.D, (n, None), "domain_basis")
        B = as_matrix(self.B, (n, D.shape[1]), "values")
        if D.shape[1] > n:
            raise DimensionError(f"{D.shape[1]} domain vectors in dimension {n}")
        if D.shape[1] and numerical_rank(D) < D.shape[1]:
            raise DimensionError("domain basis columns are linearly dependent")
        D.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "B", B)

    @property
    def n(self):
        return self.space.dim

    @property
    def k(self):
        return self.D.shape[1]

    def apply(self, c):
        """``A(D c)`` for a coefficient vector ``c``."""
        return self.B @ np.asarray(c, dtype=complex)

    @classmethod
    def everywhere_defined(cls, space, M):
        """The operator with matrix ``M`` on all of ``space``."""
        return cls(space, np.eye(space.dim, dtype=complex), as_matrix(M, (space.dim, space.dim)))

    def to_json(self):
        from .serialize import encode_complex

        return {"space": self.space.to_json(), "domain_basis": encode_complex(self.D),
                "values": encode_complex(self.B)}

    @classmethod
    def from_json(cls, obj):
        from .serialize import decode_matrix

        space = NormedSpace.from_json(obj["space"])
        D = decode_matrix(obj["domain_basis"])
        B = decode_matrix(obj["values"])
        if D.shape[0] == 0:
            D = np.zeros((space.dim, 0), complex)
        if B.shape[0] == 0:
            B = np.zeros((space.dim, 0), complex)
        return cls(space, D, B)


def _scale(op):
    return max(np.linalg.norm(op.D, 2) * np.linalg.norm(op.B, 2), 1e-300) if op.k else 1.0


def gram(op, tol=TOL):
    """``G = D^H B``, i.e. ``G_ij = <A d_j | d_i>``.

    Raises
    ------
    NotSymmetric
        ``G`` is not Hermitian within ``tol`` (relative to ``|D| |B|``).
    NotPositive
        ``G`` has an eigenvalue below ``-tol * |G|``.
    """
    G = op.D.conj().T @ op.B
    if op.k == 0:
        return G
    scale = _scale(op)
    chk = normed.check_symmetry(G / scale, tol)
    if not chk:
        w = chk.witness
        raise NotSymmetric(
            f"<Ax|y> != conj(<Ay|x>) (deviation {chk.detail * scale:.3g})",
            {"x": op.D @ w["x"], "y": op.D @ w["y"], "lhs": w["lhs"] * scale, "rhs": w["rhs"] * scale},
        )
    G = hermitian_part(G)
    lam, V = np.linalg.eigh(G)
    if lam[0] < -tol * max(abs(lam[-1]), scale):
        x = op.D @ V[:, 0]
        raise NotPositive(f"<Ax|x> = {lam[0]:.3g} < 0", {"x": x, "value": float(lam[0])})
    return G


def check_well_defined(op, tol=TOL, rtol=RTOL):
    """``ker G`` inside ``ker B``: positivity forces ``A x = 0`` whenever ``<Ax|x> = 0``.

    Returns a :class:`~kvn.normed.Check`; on failure the witness holds the
    domain vector ``x = D v`` with ``<Ax|x> = 0`` but ``A x != 0``.
    """
    if op.k == 0:
        return Check(True, None, 0.0)
    G = gram(op, tol)
    K = psd_kernel(G, rtol)
    nb = np.linalg.norm(op.B, 2)
    if K.shape[1] == 0 or nb == 0:
        return Check(True, None, 0.0)
    BK = op.B @ K
    cols = np.linalg.norm(BK, axis=0)
    j = int(np.argmax(cols))
    worst = float(cols[j] / nb)
    if worst <= tol:
        return Check(True, None, worst)
    v = K[:, j]
    return Check(False, {"x": op.D @ v, "coefficients": v, "Ax": op.B @ v,
                         "quadratic_form": float((v.conj() @ G @ v).real)}, worst)


def _require_well_defined(op, tol, rtol):
    chk = check_well_defined(op, tol, rtol)
    if not chk:
        raise NotExtendable("a domain vector with <Ax|x> = 0 has A x != 0; "
                            "dual_norm(Ax)^2 / <Ax|x> is unbounded", chk.witness)
    return chk


class RangeConstants(NamedTuple):
    M_min: object
    Mprime_min: object
    empty_range: bool


class ExtensionResult:
    """Krein-von Neumann extension data; the bound constants are computed lazily.

    Attributes
    ----------
    G, rank_G, pinv_G : Gram matrix, its numerical rank and pseudo-inverse.
    T_coeff : (k, n) array
        ``G^+ B^H``: ``x -> T_coeff x`` is ``T x`` in domain coefficients.
    factor : (n, r) array
        ``F = B U lam^{-1/2}``, the matrix of ``T^*`` from orthonormal
        coordinates of the auxiliary space.
    A_N : (n, n) array
    """

    def __init__(self, op, G, U, lam, tol=TOL, rtol=RTOL):
        self.op = op
        self.tol = tol
        self.rtol = rtol
        self.G = G
        self.U = U
        self.lam = lam
        self.rank_G = int(lam.size)
        self.pinv_G = (U / lam) @ U.conj().T if lam.size else np.zeros((op.k, op.k), complex)
        self.T_coeff = self.pinv_G @ op.B.conj().T
        self.factor = op.B @ (U / np.sqrt(lam)) if lam.size else np.zeros((op.n, 0), complex)
        self.A_N = hermitian_part(self.factor @ self.factor.conj().T)
        for a in (self.G, self.pinv_G, self.T_coeff, self.factor, self.A_N):
            a.setflags(write=False)

    @property
    def space(self):
        return self.op.space

    def T(self, x):
        """``T x`` in orthonormal auxiliary coordinates; ``|T x|^2 = x^H A_N x``."""
        return self.factor.conj().T @ np.asarray(x, dtype=complex)

    @cached_property
    def constants(self):
        return closed_range_constants(self.op, self, tol=self.tol, rtol=self.rtol)

    @property
    def M_min(self):
        return self.constants.M_min

    @property
    def Mprime_min(self):
        return self.constants.Mprime_min

    def diagnostics(self):
        D, B = self.op.D, self.op.B
        return {
            "extension_residual": max_abs(self.A_N @ D - B),
            "min_eigenvalue": min_eigenvalue(self.A_N),
            "rank_A_N": numerical_rank(self.A_N, self.rtol),
            "rank_G": self.rank_G,
        }

    def to_json(self):
        from .serialize import encode_complex

        c = self.constants
        return {
            "A_N": encode_complex(self.A_N),
            "G": encode_complex(self.G),
            "rank_G": self.rank_G,
            "M": c.M_min,
            "Mprime": c.Mprime_min,
            "empty_range": c.empty_range,
            "diagnostics": self.diagnostics(),
        }


def krein_von_neumann(op, tol=TOL, rtol=RTOL):
    """Smallest positive extension ``A_N = B G^+ B^H`` of ``op``.

    Raises
    ------
    NotExtendable
        ``ker G`` is not contained in ``ker B``.
    NotSymmetric, NotPositive
        Propagated from :func:`gram`.
    VerificationError
        ``A_N D != B`` beyond tolerance (a bug, not an input problem).
    """
    G = gram(op, tol)
    _require_well_defined(op, tol, rtol)
    if op.k:
        U, lam = psd_range(G, rtol)
    else:
        U, lam = np.zeros((0, 0), complex), np.zeros(0)
    res = ExtensionResult(op, G, U, lam, tol, rtol)
    resid = max_abs(res.A_N @ op.D - op.B)
    if resid > tol * max(1.0, max_abs(op.B)) * 10:
        raise VerificationError(f"extension residual {resid:.3g}")
    return res


# ---------------------------------------------------------------- constants

def _lift(res, Z):
    """Domain coefficients ``c = U lam^{-1/2} z`` for columns of ``Z``."""
    return (res.U / np.sqrt(res.lam)) @ Z


def _direct_ratio(op, G, c):
    """``dual_norm(Bc)^2 / c^H G c`` evaluated straight from the operator data."""
    q = float((c.conj() @ G @ c).real)
    return normed.dual_norm(op.space, op.B @ c) ** 2 / q


def _schwarz_lower(res, starts=6, seed=0):
    """Largest ``dual_norm(F z)^2`` found by alternating norming steps."""
    space, F = res.space, res.factor
    r = F.shape[1]
    rng = np.random.default_rng(seed)
    w = space.w
    inits = list(np.linalg.svd(F / np.sqrt(w)[:, None], full_matrices=False)[2][:2].conj())
    inits += [random_complex(rng, r) for _ in range(starts)]
    best, best_z = 0.0, None
    for z in inits:
        z = z / np.linalg.norm(z)
        val = 0.0
        for _ in range(500):
            y = normed.norming_vector(space, F @ z)
            g = F.conj().T @ y
            z_new = g / max(np.linalg.norm(g), 1e-300)
            new = normed.dual_norm(space, F @ z_new) ** 2
            if new <= val * (1 + 1e-14):
                val = max(val, new)
                break
            z, val = z_new, new
        if val > best:
            best, best_z = val, z
    c = _lift(res, best_z)
    return _direct_ratio(res.op, res.G, c), c


def schwarz_bound(op, result=None, tol=TOL, rtol=RTOL):
    """Least ``M`` with ``dual_norm(Ax)^2 <= M <Ax|x>`` on ``dom A``.

    ``l1``: ``max_i B_i G^+ B_i^H / w_i^2`` over rows ``B_i``.
    ``l2``: largest eigenvalue of ``F^H W^{-1} F``.
    ``linf``/``op``: an :class:`~kvn.bounds.Interval` whose lower end is the
    ratio at an explicit domain vector.

    Raises
    ------
    NotExtendable
        The supremum is infinite.
    """
    res = result if result is not None else krein_von_neumann(op, tol, rtol)
    if res.rank_G == 0:
        return 0.0
    space = op.space
    w = space.w
    tag = space.norm_tag
    if tag == normed.L1:
        rows = np.einsum("ij,jk,ik->i", op.B, res.pinv_G, op.B.conj()).real
        return float(np.max(rows / w**2))
    if tag == normed.L2:
        F = res.factor
        H = F.conj().T @ (F / w[:, None])
        return float(np.linalg.eigvalsh(hermitian_part(H))[-1])
    lo, _ = _schwarz_lower(res)
    top = normed.ball_quadratic_max(space, res.A_N)
    lo = max(lo, top.lo)
    return Interval(min(lo, top.hi), top.hi, "norming ascent / " + top.method, top.resolution)


def _mprime_bounds(res, seed=0):
    """``sup <Ax|x> / dual_norm(Ax)^2`` as an Interval (non-``l2`` norms)."""
    space, F, op = res.space, res.factor, res.op
    m_lo, _, z = min_dual_norm_on_sphere(space, F, seed=seed)
    lo = 1.0 / _direct_ratio(op, res.G, _lift(res, z))
    hi = 1.0 / m_lo if m_lo > 0 else np.inf
    # second certificate: H = A_N^+ gives phi^H H phi = |z|^2 on ran F
    H = np.linalg.pinv(res.A_N, hermitian=True)
    mu = np.linalg.eigvalsh(hermitian_part(F.conj().T @ H @ F))[0]
    if mu > 0:
        hi = min(hi, upper(normed.dual_ball_quadratic_max(space, H)) / mu)
    hi *= 1 + 1e-10
    if lo > hi:
        if lo > hi * (1 + 1e-8):
            raise VerificationError(f"closed-range bound inverted: {lo} > {hi}")
        lo = hi
    return Interval(lo, hi, "sphere descent / quadratic certificates", {"gap": (hi - lo) / hi})


def closed_range_constants(op, result=None, tol=TOL, rtol=RTOL):
    """``(M_min, Mprime_min, empty_range)`` for the two-sided norm comparison

        dual_norm(Ax)^2 <= M <Ax|x>,   <Ax|x> <= M' dual_norm(Ax)^2.

    ``M'`` is exact for ``l2`` (reciprocal of the least eigenvalue of
    ``F^H W^{-1} F``) and an Interval otherwise.  For ``A = 0`` both are 0 and
    ``empty_range`` is set.
    """
    res = result if result is not None else krein_von_neumann(op, tol, rtol)
    if res.rank_G == 0:
        return RangeConstants(0.0, 0.0, True)
    M = schwarz_bound(op, res, tol, rtol)
    if op.space.norm_tag == normed.L2:
        F = res.factor
        H = F.conj().T @ (F / op.space.w[:, None])
        Mp = float(1.0 / np.linalg.eigvalsh(hermitian_part(H))[0])
    else:
        Mp = _mprime_bounds(res)
    return RangeConstants(M, Mp, False)


def extension_norm(op, result=None, rtol_check=1e-6):
    """``operator_norm(A_N)``, checked against ``M_min`` and ``|T|^2``.

    Raises
    ------
    VerificationError
        The norm formula or the C*-identity fails within ``rtol_check``.
    """
    res = result if result is not None else krein_von_neumann(op)
    space = op.space
    nrm = normed.operator_norm(res.A_N, space)
    M = res.M_min
    if not agree(nrm, M, rtol=rtol_check):
        raise VerificationError(f"|A_N| = {nrm} but M_min = {M}")
    t2 = normed.ball_quadratic_max(space, res.A_N)
    if not agree(nrm, t2, rtol=rtol_check):
        raise VerificationError(f"|A_N| = {nrm} but |T|^2 = {t2}")
    return nrm


# ---------------------------------------------------------------- oracles

def rayleigh_sup(a, G, grid_density=16, seed=0, starts=4, max_iter=400):
    """Direct search for ``sup |a^H c|^2 / (c^H G c)`` over ``c``.

    No factorization or inverse of ``G`` is used: an L-BFGS ascent on the
    ratio (analytic gradient, ``c`` renormalized) is followed by a pattern
    polish with moves ``c -> c + r e^{i theta} e_j`` over a geometric grid of
    ``r`` and ``grid_density`` phases.  Points whose denominator falls below
    ``1e-9 |G| |c|^2`` are ignored, which keeps rounding in ``c^H G c`` below
    about ``1e-7`` relative.
    """
    a = np.asarray(a, dtype=complex)
    G = hermitian_part(np.asarray(G, dtype=complex))
    k = a.size
    if k == 0 or not np.any(a):
        return 0.0
    gn = max(np.linalg.norm(G, 2), 1e-300)
    diag = np.diag(G).real
    phases = np.exp(2j * np.pi * np.arange(grid_density) / grid_density)
    radii = 2.0 ** np.arange(1, -40, -1)
    steps = (radii[:, None] * phases[None, :]).ravel()
    rng = np.random.default_rng(seed)
    floor = 1e-9 * gn

    def value(num, den, nc2):
        ok = den > floor * nc2
        return np.where(ok, num / np.where(ok, den, 1.0), -np.inf)

    def ratio(c):
        return float(value(abs(np.vdot(a, c)) ** 2, float(np.vdot(c, G @ c).real), np.vdot(c, c).real))

    def neg(z):
        c = z[:k] + 1j * z[k:]
        s_ = np.vdot(a, c)
        Gc = G @ c
        q_ = float(np.vdot(c, Gc).real)
        if not q_ > floor * np.vdot(c, c).real:
            return 0.0, np.zeros(2 * k)
        f = abs(s_) ** 2 / q_
        g = (a * s_ * q_ - abs(s_) ** 2 * Gc) / q_**2     # Wirtinger derivative d f / d conj(c)
        return -f, -2 * np.concatenate([g.real, g.imag])

    best_overall = 0.0
    inits = [a.copy()] + [random_complex(rng, k) for _ in range(starts)]
    for c in inits:
        c = c / np.linalg.norm(c)
        z0 = np.concatenate([c.real, c.imag])
        sol = optimize.minimize(neg, z0, jac=True, method="L-BFGS-B",
                                options={"maxiter": 500, "ftol": 1e-16, "gtol": 1e-14})
        c2 = sol.x[:k] + 1j * sol.x[k:]
        if np.linalg.norm(c2) > 0 and ratio(c2) >= ratio(c):
            c = c2 / np.linalg.norm(c2)
        cur = ratio(c)
        for _ in range(max_iter):
            s = np.vdot(a, c)
            Gc = G @ c
            q = float(np.vdot(c, Gc).real)
            t = steps   # |c| = 1
            # all moves at once: rows = coordinate j, columns = step
            s_new = s + np.conj(a)[:, None] * t[None, :]
            q_new = q + 2 * np.real(np.conj(t)[None, :] * Gc[:, None]) + np.abs(t)[None, :] ** 2 * diag[:, None]
            nc2 = 1.0 + 2 * np.real(np.conj(t)[None, :] * c[:, None]) + np.abs(t)[None, :] ** 2
            vals = value(np.abs(s_new) ** 2, q_new, nc2)
            # discount each move by its rounding noise so near-kernel points cannot win on noise
            noise = 64 * np.finfo(float).eps * gn * nc2 / np.maximum(q_new, floor)
            vals = np.where(np.isfinite(vals), vals - np.abs(np.where(np.isfinite(vals), vals, 0.0)) * noise, -np.inf)
            j, m = np.unravel_index(int(np.argmax(vals)), vals.shape)
            if not vals[j, m] > cur * (1 + 1e-14):
                break
            c = c.copy()
            c[j] += t[m]
            c /= np.linalg.norm(c)
            cur = ratio(c)
        best_overall = max(best_overall, cur)
    return best_overall


def quadratic_form_oracle(op, x, grid_density=16, seed=0, tol=TOL, starts=0):
    """Brute-force ``sup {|<Ay|x>|^2 : y in dom A, <Ay|y> <= 1}``.

    Independent of the pseudo-inverse: a pattern search over domain
    coefficients (see :func:`rayleigh_sup`).  The ratio has no local maxima
    other than the global one, so a single start at ``B^H x`` suffices by
    default.
    """
    x = np.asarray(x, dtype=complex)
    if op.k == 0:
        return 0.0
    G = gram(op, tol)
    return rayleigh_sup(op.B.conj().T @ x, G, grid_density, seed, starts)


def verify_minimality(op, result, candidate, tol=TOL):
    """``candidate - A_N`` is PSD for a positive extension ``candidate`` of ``op``.

    Raises
    ------
    BadCandidate
        ``candidate`` is not Hermitian, not PSD or does not extend ``op``.
    """
    C = as_matrix(candidate, (op.n, op.n), "candidate")
    scale = max(1.0, max_abs(C))
    if not normed.check_symmetry(C, tol):
        raise BadCandidate("candidate is not Hermitian")
    C = hermitian_part(C)
    lam = min_eigenvalue(C)
    if lam < -tol * scale:
        raise BadCandidate(f"candidate is not positive (eigenvalue {lam:.3g})", {"min_eigenvalue": lam})
    resid = max_abs(C @ op.D - op.B)
    if resid > tol * scale:
        raise BadCandidate(f"candidate does not extend the operator (residual {resid:.3g})",
                           {"residual": resid})
    gap = min_eigenvalue(C - result.A_N)
    return Check(gap >= -tol * scale, None, gap)


def domain_complement_projector(op):
    Q = column_space(op.D) if op.k else np.zeros((op.n, 0), complex)
    return np.eye(op.n) - Q @ Q.conj().T


def random_extension(op, result, seed=0, scale=1.0, rank=None):
    """``A_N + P S P`` with ``P`` the orthoprojection onto ``span(D)^perp`` and ``S`` random PSD."""
    rng = np.random.default_rng(seed)
    P = domain_complement_projector(op)
    S = random_psd(rng, op.n, rank, scale) if scale else np.zeros((op.n, op.n))
    return hermitian_part(result.A_N + P @ S @ P)


def random_operator(n, k, norm=normed.L2, seed=0, rank=None, weighted=True):
    """Seeded random extendable operator ``B = P D`` with ``P`` random PSD.

    Returns ``(op, P)``; ``P`` is one positive extension, so ``A_N <= P``.
    """
    rng = np.random.default_rng(seed)
    space = normed.random_space(rng, n, norm, weighted)
    D = random_complex(rng, n, k)
    P = random_psd(rng, n, rank)
    return PartialPositiveOperator(space, D, P @ D), P


# ---------------------------------------------------------------- range data

@dataclass
class RangeReport:
    ranks: dict
    inclusions: dict = field(default_factory=dict)
    factor_identity: float = 0.0

    @property
    def ok(self):
        r = self.ranks
        return all(self.inclusions.values()) and len(set(r.values())) == 1


def range_chain_check(op, result, rtol=1e-8):
    """Column-space chain ``ran A_N <= ran A_N^H <= ran T^*`` with equal ranks.

    ``T^*`` is the factor ``F`` and ``J`` is ``c -> B c``; in finite
    dimensions all ranges are closed so the three ranks must agree.

    Raises
    ------
    RangeMismatch
        An inclusion or rank equality fails.
    """
    A, F = result.A_N, result.factor

    def unit(M):
        s = np.linalg.norm(M, 2) if M.size else 0.0
        return M / s if s > 0 else M

    def rk(M):
        return numerical_rank(M, rtol) if M.size else 0

    def contained(X, Y):
        return rk(np.hstack([unit(X), unit(Y)])) == rk(Y)

    ranks = {"A_N": rk(A), "A_N_adjoint": rk(A.conj().T), "T_adjoint": rk(F), "J": rk(op.B)}
    inclusions = {
        "ran A_N in ran A_N^*": contained(A, A.conj().T),
        "ran A_N^* in ran T^*": contained(A.conj().T, F),
        "ran T^* in ran A_N": contained(F, A),
    }
    report = RangeReport(ranks, inclusions, max_abs(F @ F.conj().T - A))
    if not report.ok or report.factor_identity > 1e-9 * max(1.0, max_abs(A)):
        raise RangeMismatch(f"range chain broken: {ranks} {inclusions}", report)
    return report


class Boundedness(NamedTuple):
    bounded: bool
    radius: float
    witness: dict


def compactness_check(op, tol=TOL, rtol=RTOL):
    """Boundedness of ``{Ax : <Ax|x> <= 1}`` in the antidual.

    In finite dimensions bounded means totally bounded; the radius is
    ``sqrt(M_min)``.  A non-well-defined operator gives an unbounded ray
    ``t x`` with ``<A tx|tx> = 0`` and ``dual_norm(A tx) = t dual_norm(Ax)``.
    """
    chk = check_well_defined(op, tol, rtol)
    if not chk:
        w = chk.witness
        return Boundedness(False, float("inf"),
                           {"direction": w["x"], "growth_rate": normed.dual_norm(op.space, w["Ax"])})
    M = schwarz_bound(op, None, tol, rtol)
    return Boundedness(True, float(np.sqrt(upper(M))), None)
