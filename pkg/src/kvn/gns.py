"""Representable functionals on left ideals and their minimal representable extension.

Conventions
-----------
A functional ``f`` on a left ideal ``M`` with basis columns ``a_1 .. a_k``
(matrix ``D``) is stored by its values ``v_j = f(a_j)``.  It induces the
positive operator ``A : M -> antidual(algebra)``, ``<Aa|x> = f(x^* a)``, whose
value matrix is ``B[i, j] = f(e_i^* a_j)``; its Gram matrix is
``G[i, j] = f(a_i^* a_j) = (D^H B)[i, j]``.

For ``a = D c`` we have ``f(a) = v^T c = <c, conj(v)>`` and
``f(a^* a) = c^H G c``, so::

    C_min = sup |f(a)|^2 / f(a^* a) = conj(v)^H G^+ conj(v).

The GNS space is ``range(G)`` with coordinates ``q = Lam^{1/2} U^H c``
(``G = U Lam U^H`` on its range), which turns ``f(b^* a)`` into ``q_b^H q_a``.
In these coordinates

* ``pi(x) = Lam^{1/2} U^H  D^+ L_x D  U Lam^{-1/2}``;
* ``zeta = Lam^{-1/2} U^H conj(v)``, the Riesz vector of ``f``;
* ``f_N(x) = <pi(x) zeta, zeta>``, equivalently ``f_N = conj(B G^+ conj(v))``
  as coefficients on the algebra basis.

Functionals on the whole algebra are coefficient vectors ``phi`` acting
linearly by ``phi(x) = sum phi_i x_i``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from . import extension as ext
from ._linalg import RTOL, TOL, as_vector, max_abs, numerical_rank, psd_range, random_complex
from .bounds import Interval, as_interval, lower, upper
from .errors import (
    BadCandidate, BadIndicator, DimensionError, InvalidInput, NotCStarInstance, NotLeftUnit,
    NotPositive, NotRepresentable, NotSymmetric, UnboundedNet, VerificationError,
)
from .normed import dual_norm, operator_norm


class IdealFunctional:
    """A linear functional on a left ideal ``M`` of ``algebra``.

    Parameters
    ----------
    algebra : StarAlgebra
    ideal_basis : (d, k) array
        Columns spanning ``M``; must be linearly independent and closed under
        left multiplication.
    values : (k,) array
        ``f`` on the basis columns.
    """

    def __init__(self, algebra, ideal_basis, values, tol=TOL):
        D = np.asarray(ideal_basis, dtype=complex)
        if D.ndim != 2 or D.shape[0] != algebra.dim:
            raise DimensionError(f"ideal basis must have {algebra.dim} rows, got shape {D.shape}")
        k = D.shape[1]
        if k and numerical_rank(D / np.linalg.norm(D, axis=0)) < k:
            raise DimensionError("ideal basis columns are linearly dependent")
        if not alg.is_left_ideal(algebra, D):
            raise InvalidInput("ideal basis does not span a left ideal")
        self.algebra = algebra
        self.D = D
        self.values = as_vector(values, k, "values") if k else np.zeros(0, complex)
        self.tol = tol
        self._Dp = np.linalg.pinv(D) if k else np.zeros((0, algebra.dim), complex)
        self.B = self._value_matrix()
        self.G = D.conj().T @ self.B

    # ------------------------------------------------------------ constructors

    @classmethod
    def from_generators(cls, algebra, generators, values=None, functional=None, tol=TOL):
        """Ideal generated by ``generators``; ``f`` given on the resulting basis or as a d-vector."""
        D = alg.left_ideal_basis(algebra, generators)
        if (values is None) == (functional is None):
            raise InvalidInput("give exactly one of values (on the ideal basis) or functional (d-vector)")
        if functional is not None:
            phi = as_vector(functional, algebra.dim, "functional")
            values = D.T @ phi
        elif len(values) != D.shape[1]:
            raise DimensionError(
                f"{len(values)} values for an ideal of dimension {D.shape[1]}; the basis is the "
                "independent generators followed by products e_i * b in a fixed order")
        return cls(algebra, D, values, tol)

    @classmethod
    def total(cls, algebra, phi, tol=TOL):
        """``phi`` on the whole algebra (``M = A``, standard basis)."""
        phi = as_vector(phi, algebra.dim, "functional")
        return cls(algebra, np.eye(algebra.dim, dtype=complex), phi, tol)

    # ------------------------------------------------------------ evaluation

    @property
    def k(self):
        return self.D.shape[1]

    def coefficients(self, y):
        """Coordinates of ``y`` in the ideal basis; rejects ``y`` outside ``M``."""
        y = as_vector(y, self.algebra.dim)
        c = self._Dp @ y
        if max_abs(self.D @ c - y) > 1e-9 * max(1.0, max_abs(y)):
            raise InvalidInput("element does not lie in the ideal")
        return c

    def __call__(self, y):
        return complex(self.values @ self.coefficients(y)) if self.k else 0j

    def _value_matrix(self):
        a, D = self.algebra, self.D
        d, k = D.shape
        B = np.zeros((d, k), complex)
        if not k:
            return B
        for i in range(d):
            Li = a.left_mult_matrix(a.involute(a.basis(i)))
            B[i] = self.values @ (self._Dp @ (Li @ D))
        return B

    def operator(self):
        """The induced :class:`PartialPositiveOperator` over the algebra's normed space."""
        return ext.PartialPositiveOperator(self.algebra.normed_space(), self.D, self.B)

    def gram(self):
        """Hermitian PSD Gram matrix; non-positive ``f`` is refused as not representable."""
        G = self.G
        scale = max(1.0, max_abs(G), max_abs(self.B) * max(1.0, max_abs(self.D)))
        if max_abs(G - G.conj().T) > self.tol * scale:
            i, j = np.unravel_index(int(np.argmax(np.abs(G - G.conj().T))), G.shape)
            raise NotRepresentable("f(b* a) is not hermitian in (a, b)",
                                   {"a": self.D[:, j], "b": self.D[:, i], "f(b*a)": G[i, j],
                                    "conj f(a*b)": np.conj(G[j, i])})
        G = 0.5 * (G + G.conj().T)
        if self.k:
            lam, V = np.linalg.eigh(G)
            if lam[0] < -self.tol * scale:
                raise NotRepresentable("f(a* a) < 0 for some a in the ideal",
                                       {"a": self.D @ V[:, 0], "f(a*a)": float(lam[0])})
        return G

    def to_json(self):
        from .serialize import encode_complex

        return {"algebra": self.algebra.to_json(), "ideal_basis": encode_complex(self.D),
                "values": encode_complex(self.values)}


def _total_value(phi, x):
    return complex(np.sum(phi * x))


def as_functional(phi, n):
    return as_vector(phi, n, "functional")


# ---------------------------------------------------------------- representability

@dataclass
class Representability:
    C_min: float
    rank: int
    oracle: float = float("nan")
    U: np.ndarray = field(default=None, repr=False)
    lam: np.ndarray = field(default=None, repr=False)


def representability_check(F, rtol=RTOL, oracle=True, seed=0):
    """``C_min = sup |f(a)|^2 / f(a^* a)`` or :class:`NotRepresentable`.

    Representable iff ``ker G`` lies in ``ker(c -> v^T c)``; the refusal
    carries ``a = D u`` with ``f(a^* a) = 0`` and ``f(a) != 0``.  The closed
    form is cross-checked by a pattern search on the ``G``-ellipsoid.
    """
    G = F.gram()
    v = F.values
    if F.k == 0 or not np.any(v) and max_abs(G) == 0:
        return Representability(0.0, 0, 0.0, np.zeros((F.k, 0)), np.zeros(0))
    U, lam = psd_range(G, rtol)
    K = np.eye(F.k) - U @ U.conj().T
    leak = K @ np.conj(v)            # component of conj(v) in ker G
    vscale = max(1.0, float(np.linalg.norm(v)))
    if np.linalg.norm(leak) > 1e-8 * vscale:
        u = leak / np.linalg.norm(leak)
        a = F.D @ u
        raise NotRepresentable(
            "f does not vanish on the kernel of its Gram form",
            {"a": a, "coefficients": u, "f(a)": complex(v @ u), "f(a*a)": float(np.real(u.conj() @ G @ u))})
    z = U.conj().T @ np.conj(v)
    C = float(np.sum(np.abs(z) ** 2 / lam)) if lam.size else 0.0
    orc = float("nan")
    if oracle:
        orc = ext.rayleigh_sup(np.conj(v), G, seed=seed)
        if abs(orc - C) > 1e-6 * max(1.0, C):
            raise VerificationError(f"C_min closed form {C} disagrees with oracle {orc}")
    return Representability(C, int(lam.size), orc, U, lam)


def is_representable_total(a, phi, rtol=RTOL):
    try:
        representability_check(IdealFunctional.total(a, phi), rtol, oracle=False)
    except NotRepresentable:
        return False
    return True


def schwarz_functional_bound(F, rep=None, tol=TOL, rtol=RTOL):
    """Least ``M`` with ``sup_{|x| <= 1} |f(x^* a)|^2 <= M f(a^* a)`` on the ideal.

    Delegates to the extension engine on the induced operator.  Asserts
    ``M <= C_min * m^2`` with ``m`` a sampled modulus-of-continuity lower
    bound is *not* possible in general (``m`` is only a lower bound), so the
    asserted inequality is ``M <= C_min`` when the involution is isometric.
    """
    rep = rep or representability_check(F, rtol, oracle=False)
    if F.k == 0:
        return 0.0
    op = F.operator()
    res = ext.krein_von_neumann(op, tol, rtol)
    M = ext.schwarz_bound(op, res, tol, rtol)
    if F.algebra.involution_isometric and lower(M) > rep.C_min * (1 + 1e-7) + 1e-9:
        raise VerificationError(f"Schwarz constant {M} exceeds C_min = {rep.C_min} with isometric involution")
    return M


# ---------------------------------------------------------------- GNS

@dataclass
class GnsData:
    H_dim: int
    pi: np.ndarray          # (d, r, r)
    zeta: np.ndarray        # (r,)
    C_min: float
    fN: np.ndarray          # (d,)
    Q: np.ndarray = field(repr=False)       # coefficients -> quotient coordinates
    R: np.ndarray = field(repr=False)       # quotient coordinates -> coefficients
    zeta_coefficients: np.ndarray = field(repr=False)

    def represent(self, x):
        return np.tensordot(np.asarray(x, dtype=complex), self.pi, axes=1)

    def state(self, x):
        """``<pi(x) zeta, zeta>``."""
        if self.H_dim == 0:
            return 0j
        return complex(self.zeta.conj() @ self.represent(x) @ self.zeta)

    def to_json(self):
        from .serialize import encode_complex

        return {"H_dim": self.H_dim, "pi": encode_complex(self.pi), "zeta": encode_complex(self.zeta),
                "C_min": self.C_min, "fN": encode_complex(self.fN)}


def gns(F, rtol=RTOL, check=True, tol=1e-9):
    """GNS data of a representable ideal functional.

    With ``check`` the homomorphism, *-compatibility, reconstruction and
    cyclicity properties are verified (:class:`VerificationError` otherwise).
    """
    rep = representability_check(F, rtol, oracle=check)
    a, d = F.algebra, F.algebra.dim
    U, lam = rep.U, rep.lam
    r = lam.size
    if r == 0:
        return GnsData(0, np.zeros((d, 0, 0), complex), np.zeros(0, complex), 0.0,
                       np.zeros(d, complex), np.zeros((0, F.k)), np.zeros((F.k, 0)), np.zeros(F.k, complex))
    sq = np.sqrt(lam)
    Q = sq[:, None] * U.conj().T
    R = U / sq[None, :]
    pi = np.stack([Q @ (F._Dp @ (a.left_mult_matrix(a.basis(i)) @ F.D)) @ R for i in range(d)])
    zeta = (U.conj().T @ np.conj(F.values)) / sq
    zc = R @ zeta                               # = G^+ conj(v)
    fN = np.conj(F.B @ zc)
    data = GnsData(r, pi, zeta, rep.C_min, fN, Q, R, zc)
    if check:
        check_gns(F, data, tol)
    return data


def check_gns(F, data, tol=1e-9):
    """Raise :class:`VerificationError` unless the GNS invariants hold."""
    a = F.algebra
    d, pi = a.dim, data.pi
    scale = max(1.0, max_abs(pi))
    for i in range(d):
        star = a.involute(a.basis(i))
        if max_abs(data.represent(star) - pi[i].conj().T) > tol * scale:
            raise VerificationError(f"pi(e_{i}*) is not the adjoint of pi(e_{i})")
        for j in range(d):
            if max_abs(data.represent(a.c[i, j]) - pi[i] @ pi[j]) > tol * scale**2:
                raise VerificationError(f"pi(e_{i} e_{j}) != pi(e_{i}) pi(e_{j})")
    recon = np.array([data.state(F.D[:, j]) for j in range(F.k)])
    if max_abs(recon - F.values) > tol * max(1.0, max_abs(F.values)):
        raise VerificationError("f(a_j) != <pi(a_j) zeta, zeta>")
    vecs = np.column_stack([data.represent(F.D[:, j]) @ data.zeta for j in range(F.k)])
    if numerical_rank(vecs, 1e-9) != data.H_dim:
        raise VerificationError("zeta is not cyclic for pi restricted to the ideal")
    return True


def cyclic_vector_identity(F, data, x):
    """``(pi(x) zeta, J^* x)`` in quotient coordinates; the two must agree.

    ``J^* x`` is the class ``w`` with ``<[a], w> = <Aa|x> = f(x^* a)``, that is
    ``w = R^H B^H x``.
    """
    if data.H_dim == 0:
        return np.zeros(0, complex), np.zeros(0, complex)
    x = as_vector(x, F.algebra.dim)
    return data.represent(x) @ data.zeta, data.R.conj().T @ (F.B.conj().T @ x)


# ---------------------------------------------------------------- minimal extension

@dataclass
class Certificate:
    extends: float
    representable: bool
    sup_formula: float
    state_formula: float
    samples: int

    @property
    def ok(self):
        return self.representable and max(self.extends, self.sup_formula, self.state_formula) <= 1e-9


def sup_formula(F, x, grid_density=16, seed=0):
    """``sup{ |f(x^* a)|^2 : a in M, f(a^* a) <= 1 }`` by pattern search."""
    if F.k == 0:
        return 0.0
    a = F.algebra
    G = F.gram()
    xs = a.involute(x)
    num = np.array([F(a.multiply(xs, F.D[:, j])) for j in range(F.k)])
    # f(x^* D c) = num^T c = <c, conj(num)>
    return ext.rayleigh_sup(np.conj(num), G, grid_density, seed)


def total_value_on_square(a, phi, x):
    """``phi(x^* x)``."""
    return _total_value(phi, a.multiply(a.involute(x), x))


def minimal_extension(F, samples=50, seed=0, rtol=RTOL, check=True):
    """``(f_N, GnsData, Certificate)`` for a representable ideal functional."""
    data = gns(F, rtol, check=check)
    a = F.algebra
    fN = data.fN
    ext_err = max_abs(F.D.T @ fN - F.values) if F.k else 0.0
    representable = is_representable_total(a, fN, rtol)
    rng = np.random.default_rng(seed)
    sup_err = state_err = 0.0
    for s in range(samples if check else 0):
        x = random_complex(rng, a.dim)
        x = x / a.norm(x)
        direct = total_value_on_square(a, fN, x)
        grid = sup_formula(F, x, seed=seed + s)
        sup_err = max(sup_err, abs(direct - grid) / max(1.0, abs(grid)))
        state_err = max(state_err, abs(_total_value(fN, x) - data.state(x)) / max(1.0, abs(data.state(x))))
    cert = Certificate(float(ext_err), representable, float(sup_err), float(state_err), samples if check else 0)
    if check and not cert.ok:
        raise VerificationError(f"minimal extension certificate failed: {cert}")
    return fN, data, cert


def verify_functional_minimality(F, fN, candidate, samples=50, seed=0, tol=1e-9):
    """``f_N(x^* x) <= candidate(x^* x) + tol`` on seeded random ``x``.

    Raises :class:`BadCandidate` unless ``candidate`` extends ``f`` and is
    representable on the whole algebra.
    """
    a = F.algebra
    cand = as_functional(candidate, a.dim)
    if F.k and max_abs(F.D.T @ cand - F.values) > tol * max(1.0, max_abs(F.values)):
        raise BadCandidate("candidate does not extend f", {"defect": max_abs(F.D.T @ cand - F.values)})
    try:
        representability_check(IdealFunctional.total(a, cand), oracle=False)
    except NotRepresentable as exc:
        raise BadCandidate("candidate is not representable on the algebra", exc.witness) from exc
    fN = as_functional(fN, a.dim)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        x = random_complex(rng, a.dim)
        x = x / a.norm(x)
        if total_value_on_square(a, fN, x).real > total_value_on_square(a, cand, x).real + tol:
            return False
    return True


def annihilating_subspace(F, rep_matrices=None):
    """Orthonormal basis of vectors killed by every ``rep(a_j)``: they give positive functionals vanishing on ``M``."""
    R = F.algebra.rep if rep_matrices is None else rep_matrices
    if R is None:
        raise InvalidInput("algebra has no *-representation for candidate generation")
    N = R.shape[1]
    if F.k == 0:
        return np.eye(N, dtype=complex)
    stacked = np.concatenate([np.tensordot(F.D[:, j], R, axes=1) for j in range(F.k)])
    _, s, Vh = np.linalg.svd(stacked)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 0.0)))
    return Vh[rank:].conj().T


def positive_vanishing_functional(F, rng, scale=1.0, basis=None):
    """``x -> tr(W^H rep(x) W)`` with ``W`` supported where the ideal acts as zero.

    Such a functional is positive (a sum of vector states) and vanishes on
    ``M``, so ``f_N`` plus it is again a representable extension of ``f``.
    """
    a = F.algebra
    Nb = annihilating_subspace(F) if basis is None else basis
    if Nb.shape[1] == 0:
        return np.zeros(a.dim, complex)
    W = Nb @ random_complex(rng, Nb.shape[1], Nb.shape[1])
    W *= scale / max(np.linalg.norm(W), 1e-300)
    # phi_i = tr(W^H R_i W)
    return np.einsum("ab,iac,cb->i", W.conj(), a.rep, W)


def representable_candidates(F, fN, count=50, seed=0):
    """``count`` representable extensions ``f_N + omega`` with ``omega >= 0`` vanishing on ``M``."""
    rng = np.random.default_rng(seed)
    Nb = annihilating_subspace(F)
    out = []
    for m in range(count):
        scale = 10.0 ** rng.uniform(-2, 1)
        out.append(fN + positive_vanishing_functional(F, rng, scale, Nb))
    return out


# ---------------------------------------------------------------- unital and approximate units

def _check_left_unit(F, e, tol=1e-9):
    a = F.algebra
    for j in range(F.k):
        aj = F.D[:, j]
        if max_abs(a.multiply(e, aj) - aj) > tol * max(1.0, max_abs(aj)):
            raise NotLeftUnit(f"e * a_{j} != a_{j}", {"index": j, "defect": max_abs(a.multiply(e, aj) - aj)})


def _functional_from_AN(result, e):
    return np.conj(result.A_N @ e)


def unital_minimal_extension(F, e, rtol=RTOL, tol=1e-9):
    """``f_N = conj(A_N e)`` for a left unit ``e`` of the ideal.

    Cross-checks against :func:`minimal_extension` and runs both the
    representability and the Schwarz checks, which must agree.
    """
    a = F.algebra
    e = as_vector(e, a.dim, "e")
    _check_left_unit(F, e, tol)
    rep = representability_check(F, rtol)
    M = schwarz_functional_bound(F, rep, rtol=rtol)
    fN_ref, _, _ = minimal_extension(F, samples=0, rtol=rtol, check=False)
    if F.k == 0:
        return np.zeros(a.dim, complex)
    res = ext.krein_von_neumann(F.operator(), TOL, rtol)
    fN = _functional_from_AN(res, e)
    if max_abs(fN - fN_ref) > tol * max(1.0, max_abs(fN_ref)):
        raise VerificationError(f"conj(A_N e) differs from f_N by {max_abs(fN - fN_ref):.3g}")
    if not np.isfinite(upper(M)):
        raise VerificationError("Schwarz constant infinite for a representable functional")
    return fN


@dataclass
class ApproximateUnitReport:
    functionals: list
    deviations: list
    fN: np.ndarray
    monotone: bool
    final: float


def approximate_unit_limit(F, units, bound=1.0, slack=1e-12, rtol=RTOL):
    """``conj(A_N e_i)`` along a finite net and its dual-norm distance to ``f_N``."""
    a = F.algebra
    space = a.normed_space()
    norms = [a.norm(as_vector(e, a.dim, "unit")) for e in units]
    if any(nrm > bound * (1 + 1e-12) for nrm in norms):
        i = int(np.argmax(norms))
        raise UnboundedNet(f"|e_{i}| = {norms[i]:.6g} exceeds the declared bound {bound}", {"index": i, "norm": norms[i]})
    fN, _, _ = minimal_extension(F, samples=0, rtol=rtol, check=False)
    if F.k == 0:
        fs = [np.zeros(a.dim, complex) for _ in units]
    else:
        res = ext.krein_von_neumann(F.operator(), TOL, rtol)
        fs = [_functional_from_AN(res, as_vector(e, a.dim)) for e in units]
    devs = [float(dual_norm(space, g - fN)) for g in fs]
    mono = all(b <= p + slack for p, b in zip(devs, devs[1:]))
    return ApproximateUnitReport(fs, devs, fN, mono, devs[-1] if devs else 0.0)


# ---------------------------------------------------------------- unitization

@dataclass
class UnitizationReport:
    algebra: object
    fN: np.ndarray
    unit_value: complex
    sup_formula_error: float


def unitization_extension(a, f_total, samples=20, seed=0, rtol=RTOL):
    """Minimal representable extension of ``f`` from ``{0} x A`` to ``C + A``."""
    f_total = as_functional(f_total, a.dim)
    representability_check(IdealFunctional.total(a, f_total), rtol, oracle=False)
    ua = alg.unitization(a)
    D = np.zeros((ua.dim, a.dim), complex)
    D[1:, :] = np.eye(a.dim)
    F = IdealFunctional(ua, D, f_total)
    fN, _, _ = minimal_extension(F, samples=0, rtol=rtol, check=False)
    rng = np.random.default_rng(seed)
    err = 0.0
    for s in range(samples):
        x = random_complex(rng, ua.dim)      # (lambda, b)
        x /= ua.norm(x)
        direct = total_value_on_square(ua, fN, x).real
        grid = sup_formula(F, x, seed=seed + s)
        err = max(err, abs(direct - grid) / max(1.0, abs(grid)))
    if err > 1e-8:
        raise VerificationError(f"unitization sup formula off by {err:.3g}")
    return UnitizationReport(ua, fN, complex(fN[0]), err)


# ---------------------------------------------------------------- C*-instances

@dataclass
class NormChain:
    f_norm: float
    zeta_norm_sq: float
    AN_norm: Interval
    fN_norm: float

    def values(self):
        return [self.f_norm, self.zeta_norm_sq, self.AN_norm, self.fN_norm]

    def consistent(self, rtol=1e-6):
        ref = self.f_norm
        atol = 1e-12
        scalars = [self.zeta_norm_sq, self.fN_norm]
        ok = all(abs(s - ref) <= rtol * max(1.0, abs(ref)) + atol for s in scalars)
        return ok and as_interval(self.AN_norm).contains(ref, rtol=rtol, atol=atol * 10)


def _ideal_blocks(F):
    """Indices of blocks whose full matrix-unit span lies in the ideal, or None if M is not such a sum."""
    a = F.algebra
    sizes = a.blocks
    Q, _ = np.linalg.qr(F.D) if F.k else (np.zeros((a.dim, 0)), None)
    inside, start, dims = [], 0, 0
    for b, m in enumerate(sizes):
        idx = range(start, start + m * m)
        E = np.eye(a.dim)[:, list(idx)]
        if max_abs(E - Q @ (Q.conj().T @ E)) <= 1e-9:
            inside.append(b)
            dims += m * m
        start += m * m
    if dims != F.k:
        return None
    return inside


def cstar_ideal_norm_check(F, rtol=1e-6):
    """``|f| = |zeta|^2 = |A_N| = |f_N|`` for a positive functional on a block ideal of a C*-instance."""
    a = F.algebra
    if not a.is_cstar:
        raise NotCStarInstance(f"{a!r} is not a block matrix algebra with the operator norm")
    blocks = _ideal_blocks(F)
    if blocks is None:
        raise NotCStarInstance("ideal is not a sum of full matrix blocks")
    space = a.normed_space()
    p = np.zeros(a.dim, complex)
    start = 0
    for b, m in enumerate(a.blocks):
        if b in blocks:
            for q in range(m):
                p[start + q * m + q] = 1
        start += m * m
    if F.k == 0:
        zero = Interval(0.0, 0.0, "exact")
        return NormChain(0.0, 0.0, zero, 0.0)
    f_norm = F(p).real
    fN, data, _ = minimal_extension(F, samples=0, check=False)
    res = ext.krein_von_neumann(F.operator())
    AN = as_interval(operator_norm(res.A_N, space))
    fN_norm = _total_value(fN, a.unit).real
    return NormChain(float(f_norm), float(np.sum(np.abs(data.zeta) ** 2)), AN, float(fN_norm))


def completeness_bound(a, f_total, rtol=RTOL):
    """Least ``L`` with ``f(a^* a) <= L sup_{|x|<=1} |f(x^* a)|^2``; ``(L, empty)``.

    ``empty`` flags the zero functional, where the supremum is over an empty
    set and ``L = 0`` by convention.
    """
    F = IdealFunctional.total(a, f_total)
    representability_check(F, rtol, oracle=False)
    op = F.operator()
    res = ext.krein_von_neumann(op, TOL, rtol)
    rc = ext.closed_range_constants(op, res)
    return rc.Mprime_min, bool(rc.empty_range)


# ---------------------------------------------------------------- discrete measures

@dataclass
class MeasureReport:
    mu_K_norm: float
    A_norm: Interval
    fN_norm: float
    AN_norm: Interval
    chain_ok: bool
    competitor_extends: bool
    competitor_norm: float
    mu_eK: float
    sup_side: float
    strict: bool
    fN: np.ndarray
    competitor: np.ndarray

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def discrete_measure_functional(mu, K):
    """``f = mu`` restricted to functions supported in ``K`` on ``C(Omega)``."""
    mu = np.asarray(mu, dtype=float)
    n = mu.size
    if np.any(mu < 0):
        raise InvalidInput("measure weights must be nonnegative")
    K = sorted(set(int(k) for k in K))
    if any(k < 0 or k >= n for k in K):
        raise InvalidInput(f"K must be a subset of range({n})")
    a = alg.function_algebra(n)
    D = np.eye(n, dtype=complex)[:, K]
    return IdealFunctional(a, D, mu[K].astype(complex))


def discrete_measure_scenario(mu, K, eK, samples=20, seed=0, rtol=1e-6):
    """Compare the minimal extension of ``mu|D(K)`` with the competitor ``g -> mu(e_K g)``."""
    mu = np.asarray(mu, dtype=float)
    eK = np.asarray(eK, dtype=float)
    if eK.shape != mu.shape:
        raise BadIndicator(f"e_K has {eK.size} entries for {mu.size} points")
    F = discrete_measure_functional(mu, K)
    Kl = sorted(set(int(k) for k in K))
    if np.any(eK < 0) or np.any(eK > 1):
        raise BadIndicator("e_K must take values in [0, 1]", {"eK": eK.tolist()})
    if np.any(eK[Kl] != 1):
        raise BadIndicator("e_K must equal 1 on K", {"K": Kl, "eK on K": eK[Kl].tolist()})
    a = F.algebra
    space = a.normed_space()
    rng = np.random.default_rng(seed)
    mu_K = float(mu[Kl].sum())
    # |Af| = mu(|f|) on D(K)
    for _ in range(samples):
        f = np.zeros(mu.size, complex)
        f[Kl] = random_complex(rng, len(Kl)) if Kl else 0
        Af = np.diag(mu) @ f      # <Af|g> = mu(f conj g) has coordinates mu * f
        if abs(dual_norm(space, Af) - float(np.sum(mu * np.abs(f)))) > 1e-9 * max(1.0, mu.sum()):
            raise VerificationError("|Af| != mu(|f|)")
    if F.k:
        op = F.operator()
        A_norm = as_interval(operator_norm(op.B @ np.linalg.pinv(op.D), space)) if mu_K else Interval(0.0, 0.0)
        res = ext.krein_von_neumann(op)
        AN = as_interval(operator_norm(res.A_N, space))
        fN, _, _ = minimal_extension(F, samples=0, check=False)
    else:
        A_norm = AN = Interval(0.0, 0.0, "exact")
        fN = np.zeros(mu.size, complex)
    fN_norm = float(dual_norm(space, fN))
    chain = (abs(fN_norm - mu_K) <= rtol * max(1.0, mu_K) and AN.contains(mu_K, rtol, 1e-12)
             and A_norm.contains(mu_K, rtol, 1e-12))
    comp = mu * eK
    extends = bool(max_abs(F.D.T @ comp - F.values) <= 1e-12 * max(1.0, mu.sum())) if F.k else True
    comp_norm = float(dual_norm(space, comp))
    mu_eK = float(np.sum(mu * eK))
    return MeasureReport(mu_K, A_norm, fN_norm, AN, bool(chain), extends, comp_norm, mu_eK,
                         mu_K, bool(mu_K < mu_eK - 1e-12 * max(1.0, mu_eK)), fN, comp)


def indicator_net(n, K, steps=6):
    """``(1 - 2^-m) 1_K`` for ``m = 1..steps-1`` followed by ``1_K``."""
    ind = np.zeros(n)
    ind[sorted(set(K))] = 1
    return [(1 - 2.0 ** -m) * ind for m in range(1, steps)] + [ind]


# ---------------------------------------------------------------- positivity inequality

def spectral_radius_inequality(F, pairs=100, seed=0):
    """Largest ``f(a^* x^* x a) - r(x^* x) f(a^* a)`` over seeded unit-norm ``(a in M, x)`` pairs.

    Nonpositive up to rounding for every positive ideal functional.
    """
    a = F.algebra
    if F.k == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(pairs):
        aa = F.D @ random_complex(rng, F.k)
        aa /= a.norm(aa)
        x = random_complex(rng, a.dim)
        x /= a.norm(x)
        xx = a.multiply(a.involute(x), x)
        lhs = F(a.multiply(a.involute(aa), a.multiply(xx, aa))).real
        rhs = alg.spectral_radius(a, xx) * F(a.multiply(a.involute(aa), aa)).real
        worst = max(worst, lhs - rhs)
    return float(worst)
