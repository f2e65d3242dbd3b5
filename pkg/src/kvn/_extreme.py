"""Maximizing a Hermitian quadratic form over extreme points of a unit ball.

Two feasible sets occur:

* the torus ``{u : |u_i| = 1}`` (extreme points of the l-infinity ball);
* block-unitary matrices ``U = U_1 + ... + U_m`` with coordinates of each
  block stored row-major (extreme points of the operator-norm ball of a
  block-diagonal matrix algebra).

Lower bounds come from a monotone ascent (for a convex form the update
``u <- argmax_{feasible} Re<grad, u>`` never decreases the objective).
Upper bounds come from the Lagrangian certificate

    u^H Q u = u^H (Q - K) u + u^H K u <= s * lambda_max(Q - K) + c(K),

valid for every ``K`` in a family whose value ``u^H K u = c(K)`` is the same
for all feasible ``u`` (diagonal matrices on the torus, ``I (x) Lambda`` on
each unitary block); ``s = ||u||^2`` is constant on the feasible set.
"""

import itertools

import numpy as np
from scipy.optimize import minimize

from .bounds import Interval
from ._linalg import hermitian_part, phase, polar_unitary, random_complex

_EPS = np.finfo(float).eps


class _Family:
    """Affine family ``K(theta) = sum theta_l K_l`` with constant value ``c . theta``."""

    def __init__(self, basis, consts, s):
        self.basis = np.asarray(basis, dtype=complex)
        self.consts = np.asarray(consts, dtype=float)
        self.s = float(s)

    def assemble(self, theta):
        return np.tensordot(theta, self.basis, axes=1)

    def exact(self, Q, theta):
        lam = np.linalg.eigvalsh(Q - self.assemble(theta))[-1]
        return float(self.consts @ theta + self.s * lam)


def _torus_family(n):
    basis = np.zeros((n, n, n), complex)
    basis[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    return _Family(basis, np.ones(n), n)


def _block_offsets(blocks):
    offsets, o = [], 0
    for m in blocks:
        offsets.append(o)
        o += m * m
    return offsets, o


def _unitary_family(blocks):
    offsets, N = _block_offsets(blocks)
    basis, consts = [], []
    for m, o in zip(blocks, offsets):
        eye = np.eye(m)
        for q in range(m):
            H = np.zeros((m, m), complex)
            H[q, q] = 1.0
            basis.append(_embed(np.kron(eye, H), o, N))
            consts.append(1.0)
        for q in range(m):
            for r in range(q + 1, m):
                H = np.zeros((m, m), complex)
                H[q, r] = H[r, q] = 1.0
                basis.append(_embed(np.kron(eye, H), o, N))
                consts.append(0.0)
                H = np.zeros((m, m), complex)
                H[q, r], H[r, q] = 1j, -1j
                basis.append(_embed(np.kron(eye, H), o, N))
                consts.append(0.0)
    return _Family(basis, consts, sum(blocks))


def _embed(K, o, N):
    out = np.zeros((N, N), complex)
    out[o:o + K.shape[0], o:o + K.shape[0]] = K
    return out


def _theta_from_unitary_kkt(Q, u, blocks):
    # stationarity on the unitary group: mat(Qu) = U Lambda^T
    offsets, _ = _block_offsets(blocks)
    Qu = Q @ u
    theta = []
    for m, o in zip(blocks, offsets):
        U = u[o:o + m * m].reshape(m, m)
        Y = Qu[o:o + m * m].reshape(m, m)
        Lam = (U.conj().T @ Y).T
        Lam = hermitian_part(Lam)
        theta.extend(Lam.real[np.arange(m), np.arange(m)])
        for q in range(m):
            for r in range(q + 1, m):
                theta.append(Lam[q, r].real)
                theta.append(Lam[q, r].imag)
    return np.array(theta, dtype=float)


def _certify(Q, family, theta0, lo, refine=True):
    """Best exact certificate value found while minimizing a smoothed bound."""
    best = family.exact(Q, theta0)
    best_theta = theta0
    scale = max(np.linalg.norm(Q, 2), 1e-300)
    if not refine or best - lo <= 1e-12 * scale * family.s:
        return best
    theta = theta0.copy()
    record = {"best": best}

    def smoothed(th, t):
        M = Q - family.assemble(th)
        lam, V = np.linalg.eigh(M)
        top = lam[-1]
        record["best"] = min(record["best"], float(family.consts @ th + family.s * top))
        w = np.exp((lam - top) / t)
        lse = top + t * np.log(w.sum())
        p = w / w.sum()
        # d lambda_i / d theta_l = -v_i^H K_l v_i
        dlam = np.einsum("ni,lnm,mi->li", V.conj(), family.basis, V).real
        grad = family.consts - family.s * (dlam @ p)
        return float(family.consts @ th + family.s * lse), grad

    for t in scale * np.array([1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7]):
        res = minimize(smoothed, theta, args=(t,), jac=True, method="L-BFGS-B",
                       options={"maxiter": 200, "gtol": 1e-12 * scale, "ftol": 1e-15})
        theta = res.x
        if record["best"] - lo <= 1e-12 * scale * family.s:
            break
    return min(best, record["best"])


def _slack(Q, family):
    N = Q.shape[0]
    return 16 * N * _EPS * family.s * max(np.linalg.norm(Q, 2), 1e-300)


def torus_max(Q, *, phases=16, starts=8, seed=0, refine=True, sign_enum_max=12):
    """Certified ``sup {u^H Q u : |u_i| = 1}`` for Hermitian ``Q``.

    Returns ``(Interval, u_best)``.
    """
    Q = hermitian_part(np.asarray(Q, dtype=complex))
    n = Q.shape[0]
    if n == 0:
        return Interval(0.0, 0.0, "empty"), np.zeros(0, complex)
    lam, V = np.linalg.eigh(Q)
    shift = max(0.0, -lam[0])
    Qs = Q + shift * np.eye(n)
    rng = np.random.default_rng(seed)

    cands = [np.ones(n, complex), phase(V[:, -1])]
    if n <= sign_enum_max:
        signs = np.array(list(itertools.product([1.0, -1.0], repeat=n - 1)))
        S = np.hstack([np.ones((signs.shape[0], 1)), signs]).astype(complex)
        vals = np.einsum("ij,jk,ik->i", S.conj(), Qs, S).real
        for idx in np.argsort(vals)[::-1][:starts]:
            cands.append(S[idx])
    grid = np.exp(2j * np.pi * np.arange(phases) / phases)
    for _ in range(starts):
        cands.append(grid[rng.integers(0, phases, n)])

    best_val, best_u = -np.inf, None
    for u in cands:
        u, val = _torus_ascent(Qs, u)
        if val > best_val:
            best_val, best_u = val, u
    lo = best_val - shift * n

    family = _torus_family(n)
    theta0 = (best_u.conj() * (Q @ best_u)).real
    hi = _certify(Q, family, theta0, lo, refine) + _slack(Q, family)
    hi = max(hi, lo)
    return Interval(lo, hi, "torus ascent + diagonal certificate",
                    {"phases": phases, "starts": len(cands)}), best_u


def _torus_ascent(Qs, u, max_iter=2000):
    val = float((u.conj() @ Qs @ u).real)
    tol = 1e-15 * max(abs(val), 1.0)
    for _ in range(max_iter):
        u_new = phase(Qs @ u)
        new = float((u_new.conj() @ Qs @ u_new).real)
        if new <= val + tol:
            if new > val:
                u, val = u_new, new
            break
        u, val = u_new, new
    return u, val


def unitary_max(Q, blocks, *, starts=8, seed=0, refine=True):
    """Certified ``sup {u^H Q u : u = vec of a block-unitary}``.

    Returns ``(Interval, u_best)``.
    """
    Q = hermitian_part(np.asarray(Q, dtype=complex))
    blocks = tuple(int(m) for m in blocks)
    offsets, N = _block_offsets(blocks)
    if Q.shape != (N, N):
        raise ValueError("quadratic form does not match the block structure")
    if N == 0:
        return Interval(0.0, 0.0, "empty"), np.zeros(0, complex)
    if all(m == 1 for m in blocks):
        iv, u = torus_max(Q, starts=starts, seed=seed, refine=refine)
        return iv, u
    lam, V = np.linalg.eigh(Q)
    shift = max(0.0, -lam[0])
    Qs = Q + shift * np.eye(N)
    total = sum(blocks)
    rng = np.random.default_rng(seed)

    def project(z):
        u = np.empty(N, complex)
        for m, o in zip(blocks, offsets):
            u[o:o + m * m] = polar_unitary(z[o:o + m * m].reshape(m, m)).ravel()
        return u

    ident = np.concatenate([np.eye(m).ravel() for m in blocks]).astype(complex)
    cands = [ident, project(V[:, -1]), project(Q @ ident)]
    for _ in range(starts):
        cands.append(project(random_complex(rng, N)))

    best_val, best_u = -np.inf, None
    for u in cands:
        u, val = _unitary_ascent(Qs, u, project)
        if val > best_val:
            best_val, best_u = val, u
    lo = best_val - shift * total

    family = _unitary_family(blocks)
    theta0 = _theta_from_unitary_kkt(Q, best_u, blocks)
    hi = _certify(Q, family, theta0, lo, refine) + _slack(Q, family)
    hi = max(hi, lo)
    return Interval(lo, hi, "unitary ascent + block certificate",
                    {"starts": len(cands)}), best_u


def _unitary_ascent(Qs, u, project, max_iter=2000):
    val = float((u.conj() @ Qs @ u).real)
    tol = 1e-15 * max(abs(val), 1.0)
    for _ in range(max_iter):
        u_new = project(Qs @ u)
        new = float((u_new.conj() @ Qs @ u_new).real)
        if new <= val + tol:
            if new > val:
                u, val = u_new, new
            break
        u, val = u_new, new
    return u, val


def bilinear_max(M, *, blocks=None, **kw):
    """Certified ``sup |v^H M u|`` over torus (or block-unitary) pairs ``u, v``.

    Uses the Hermitian dilation ``[[0, M^H], [M, 0]]`` whose form equals
    ``2 Re(v^H M u)``.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    H = np.zeros((2 * n, 2 * n), complex)
    H[:n, n:] = M.conj().T
    H[n:, :n] = M
    if blocks is None:
        iv, _ = torus_max(H, sign_enum_max=10, **kw)
    else:
        iv, _ = unitary_max(H, tuple(blocks) + tuple(blocks), **kw)
    return Interval(0.5 * iv.lo, 0.5 * iv.hi, "bilinear dilation; " + iv.method, iv.resolution)


def rank_one_max(Q, blocks, *, starts=8, seed=0):
    """``sup {vec(a b^H)^H Q vec(a b^H) : |a| = |b| = 1}`` within a single block.

    These are the extreme points of the trace-norm ball of a block-diagonal
    algebra.  The upper end is the crude bound ``lambda_max(Q)``.
    """
    Q = hermitian_part(np.asarray(Q, dtype=complex))
    offsets, N = _block_offsets(blocks)
    rng = np.random.default_rng(seed)
    lam_top = float(np.linalg.eigvalsh(Q)[-1]) if N else 0.0
    best = -np.inf
    for m, o in zip(blocks, offsets):
        Qb = Q[o:o + m * m, o:o + m * m].reshape(m, m, m, m)
        for trial in range(starts):
            b = random_complex(rng, m) if trial else np.eye(m)[0].astype(complex)
            b /= np.linalg.norm(b)
            val = -np.inf
            for _ in range(200):
                # vec(a b^H)_{pq} = a_p conj(b_q)
                Qa = np.einsum("pqrs,q,s->pr", Qb, b, b.conj())
                w, Va = np.linalg.eigh(hermitian_part(Qa))
                a = Va[:, -1]
                Qbq = np.einsum("pqrs,p,r->qs", Qb, a.conj(), a)
                # in c = conj(b) the form reads c^H Qbq c
                w2, Vc = np.linalg.eigh(hermitian_part(Qbq))
                b = Vc[:, -1].conj()
                new = float(w2[-1])
                if new <= val + 1e-15 * max(abs(new), 1.0):
                    val = max(val, new)
                    break
                val = new
            best = max(best, val)
    if N == 0:
        return Interval(0.0, 0.0, "empty")
    hi = max(lam_top, best)
    return Interval(best, hi, "rank-one ascent; spectral upper bound", {"starts": starts})
