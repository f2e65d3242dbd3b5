"""Two-sided bounds for ``m = min {dual_norm(F z)^2 : |z|_2 = 1}``.

Every certificate has the form: if ``H`` is Hermitian PSD with
``phi^H H phi <= dual_norm(phi)^2`` for all ``phi`` then
``m >= lambda_min(F^H H F)``.  Admissible families used here:

* ``l1`` tag (dual norm ``max |phi_i| / w_i``): ``H = diag(eta / w^2)`` with
  ``eta`` in the simplex.
* ``linf`` tag (dual norm ``sum |phi_i| / w_i``): ``H = W^-1 V V^H W^-1`` with
  unit rows ``V_i``, since then ``|phi^H H phi| <= (sum |phi_i| / w_i)^2``.
* any tag: convex combinations of ``y y^H`` with ``norm(y) <= 1``, grown by
  Frank-Wolfe steps.

The first two are maximized over a softmin surrogate with L-BFGS; the exact
``lambda_min`` of each iterate is what is reported.  Upper ends are explicit
unit vectors.
"""

import numpy as np
from scipy.optimize import minimize

from . import normed
from ._linalg import hermitian_part, phase, random_complex


_GOLD = 0.5 * (np.sqrt(5) - 1)


def _softmin(K, beta):
    """Smooth lower bound ``lam_min - log(sum e^{-beta (lam - lam_min)}) / beta`` and its gradient."""
    lam, V = np.linalg.eigh(hermitian_part(K))
    e = np.exp(-beta * (lam - lam[0]))
    Z = e.sum()
    return lam[0] - np.log(Z) / beta, (V * (e / Z)) @ V.conj().T


def _lam_min(K):
    lam, V = np.linalg.eigh(hermitian_part(K))
    return lam[0], V[:, 0]


def simplex_certificate(A, rounds=(3, 30, 300, 3000)):
    """``max_eta lambda_min(A^H diag(eta) A)`` over the simplex; returns ``(value, eta)``."""
    n = A.shape[0]
    t = np.zeros(n)
    eta = np.ones(n) / n
    best = _lam_min((A.conj().T * eta) @ A)[0]
    best_eta = eta
    for c in rounds:
        beta = c / max(best, 1e-300)

        def f(t):
            eta = np.exp(t - t.max())
            eta /= eta.sum()
            val, P = _softmin((A.conj().T * eta) @ A, beta)
            g = np.einsum("ij,jk,ik->i", A, P, A.conj()).real
            return -val, -(eta * (g - eta @ g))

        t = minimize(f, t, jac=True, method="L-BFGS-B", options={"maxiter": 300}).x
        eta = np.exp(t - t.max())
        eta /= eta.sum()
        val = _lam_min((A.conj().T * eta) @ A)[0]
        if val > best:
            best, best_eta = val, eta
    return best, best_eta


def unit_row_certificate(A, rounds=(3, 30, 300, 3000)):
    """``max lambda_min(A^H V V^H A)`` over square ``V`` with unit rows; returns ``(value, V)``."""
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    best = _lam_min(A.conj().T @ A)[0]
    best_V = V
    x = np.concatenate([V.real.ravel(), V.imag.ravel()])
    nn = n * n

    def rows(x):
        U = (x[:nn] + 1j * x[nn:]).reshape(n, n)
        nr = np.maximum(np.linalg.norm(U, axis=1), 1e-300)
        return U / nr[:, None], nr

    for c in rounds:
        beta = c / max(best, 1e-300)

        def f(x):
            V, nr = rows(x)
            C = A.conj().T @ V
            val, P = _softmin(C @ C.conj().T, beta)
            G = 2 * (A @ P @ C)
            G = (G - V * np.real(np.sum(V.conj() * G, axis=1))[:, None]) / nr[:, None]
            return -val, -np.concatenate([G.real.ravel(), G.imag.ravel()])

        x = minimize(f, x, jac=True, method="L-BFGS-B", options={"maxiter": 300}).x
        V = rows(x)[0]
        C = A.conj().T @ V
        val = _lam_min(C @ C.conj().T)[0]
        if val > best:
            best, best_V = val, V
    return best, best_V


def hull_certificate(space, F, iters=150, seed=0):
    """Frank-Wolfe ascent of ``lambda_min(F^H E F)`` over ``conv {y y^H : norm(y) <= 1}``.

    Returns ``(value, z_list)`` where ``z_list`` collects the eigenvectors met.
    """
    n = space.dim
    if space.norm_tag == normed.OP:
        # Haar average of vec(U) vec(U)^H over block unitaries
        E = np.zeros((n, n), complex)
        o = 0
        for m in space.blocks:
            E[o:o + m * m, o:o + m * m] = np.eye(m * m) / m
            o += m * m
    elif space.norm_tag == normed.LINF:
        E = np.diag(1 / space.w**2).astype(complex)
    else:
        E = np.diag(1 / (n * space.w**2)).astype(complex)
    val, z = _lam_min(F.conj().T @ E @ F)
    zs = [z]
    for _ in range(iters):
        y = normed.norming_vector(space, F @ z)
        Y = np.outer(y, y.conj())

        def step(g):
            return _lam_min(F.conj().T @ ((1 - g) * E + g * Y) @ F)

        # golden-section search on the concave map g -> lambda_min
        lo, hi = 0.0, 1.0
        g1, g2 = hi - _GOLD * hi, lo + _GOLD * hi
        v1, v2 = step(g1)[0], step(g2)[0]
        for _ in range(25):
            if v1 < v2:
                lo, g1, v1 = g1, g2, v2
                g2 = lo + _GOLD * (hi - lo)
                v2 = step(g2)[0]
            else:
                hi, g2, v2 = g2, g1, v1
                g1 = hi - _GOLD * (hi - lo)
                v1 = step(g1)[0]
        g = 0.5 * (lo + hi)
        new, z_new = step(g)
        zs.append(z_new)
        if new <= val * (1 + 1e-12):
            break
        E, val, z = (1 - g) * E + g * Y, new, z_new
    return val, zs


def _low_eigenspace(K, rel=0.05, cap=4):
    lam, V = np.linalg.eigh(hermitian_part(K))
    keep = lam <= lam[0] + rel * max(abs(lam[0]), 1e-300)
    return V[:, : max(1, min(cap, int(keep.sum())))]


def _search_subspace(space, F, Q, starts=2, seed=0):
    """Minimize ``dual_norm(F Q y)^2`` over unit ``y``; ``Q`` has few columns."""
    m = Q.shape[1]
    FQ = F @ Q

    def obj(t):
        y = t[:m] + 1j * t[m:]
        ny = np.vdot(y, y).real
        return normed.dual_norm(space, FQ @ y) ** 2 / ny if ny > 1e-300 else np.inf

    if m == 1:
        return Q[:, 0]
    rng = np.random.default_rng(seed)
    best, best_t = np.inf, None
    for k in range(starts):
        t0 = np.eye(2 * m)[0] if k == 0 else rng.standard_normal(2 * m)
        sol = minimize(obj, t0, method="Powell", options={"xtol": 1e-9, "ftol": 1e-13, "maxfev": 300 * m})
        if sol.fun < best:
            best, best_t = sol.fun, sol.x
    return Q @ (best_t[:m] + 1j * best_t[m:])


def _smooth_descent(space, F, z, rounds=(10, 100, 1000, 10000)):
    """L-BFGS on a smoothed ``dual_norm(F z)^2 / |z|^2`` (l1 and linf tags) with continuation."""
    w2 = space.w**2
    r = F.shape[1]
    linf = space.norm_tag == normed.LINF

    def parts(x):
        z = x[:r] + 1j * x[r:]
        N = np.vdot(z, z).real
        phi = F @ z
        return z, N, phi, np.abs(phi) ** 2 / w2

    best = normed.dual_norm(space, F @ z) ** 2 / np.vdot(z, z).real
    best_z = z
    x = np.concatenate([z.real, z.imag])
    for c in rounds:
        z, N, phi, u = parts(x)
        if linf:
            delta2 = (np.sum(np.sqrt(u)) / (c * u.size)) ** 2 + 1e-300

            def f(x):
                z, N, phi, u = parts(x)
                sq = np.sqrt(u + delta2)
                S = sq.sum()
                gS = F.conj().T @ (phi / (w2 * sq))
                g = 2 * (S * gS / N - S * S * z / N**2)
                return S * S / N, np.concatenate([g.real, g.imag])
        else:
            beta = c / max(np.max(u) / N, 1e-300)

            def f(x):
                z, N, phi, u = parts(x)
                v = u / N
                m = v.max()
                e = np.exp(beta * (v - m))
                p = e / e.sum()
                g = 2 * (F.conj().T @ (p * phi / w2) / N - (p @ u) * z / N**2)
                return m + np.log(e.sum()) / beta, np.concatenate([g.real, g.imag])

        x = minimize(f, x, jac=True, method="L-BFGS-B", options={"maxiter": 200}).x
        zc = x[:r] + 1j * x[r:]
        val = normed.dual_norm(space, F @ zc) ** 2 / np.vdot(zc, zc).real
        if val < best:
            best, best_z = val, zc
    return best, best_z


def _reweighted(space, F, z, iters=200):
    """Local descent of ``dual_norm(F z)^2`` by reweighted eigenproblems (l1 and linf tags)."""
    w = space.w
    tag = space.norm_tag
    best, best_z = np.inf, z
    eta = None
    for _ in range(iters):
        a = np.abs(F @ z) / w
        val = normed.dual_norm(space, F @ z) ** 2 / np.vdot(z, z).real
        if val < best * (1 - 1e-13):
            best, best_z = val, z
        elif eta is not None:
            break
        if tag == normed.LINF:
            # (sum a_i)^2 = min over the simplex of sum a_i^2 / eta_i
            eta = np.maximum(a / max(a.sum(), 1e-300), 1e-14)
            H = (F.conj().T / (eta * w**2)) @ F
        else:
            # Lawson: move weight onto the largest entries
            eta = np.ones_like(a) / a.size if eta is None else eta * a**2
            eta = eta / max(eta.sum(), 1e-300)
            H = (F.conj().T * (eta / w**2)) @ F
        z = _lam_min(H)[1]
    return best, best_z


def min_dual_norm_on_sphere(space, F, seed=0):
    """Bracket ``min {dual_norm(F z)^2 : |z| = 1}``.

    Returns ``(lower, upper, z)`` with ``dual_norm(F z)^2 = upper`` and
    ``|z| = 1``.
    """
    tag = space.norm_tag
    w = space.w
    r = F.shape[1]
    rng = np.random.default_rng(seed)
    A = F / w[:, None]
    cands = list(np.linalg.svd(F, full_matrices=False)[2].conj()[::-1][: min(r, 2)])
    cands += [random_complex(rng, r) for _ in range(2)]
    if tag == normed.L1:
        lower, eta = simplex_certificate(A)
        cands.append(_search_subspace(space, F, _low_eigenspace((A.conj().T * eta) @ A), seed=seed))
    elif tag == normed.LINF:
        lower, V = unit_row_certificate(A)
        C = A.conj().T @ V
        cands.append(_search_subspace(space, F, _low_eigenspace(C @ C.conj().T), seed=seed))
    else:
        lower = -np.inf
    # the hull ascent is the only certificate for op; elsewhere it seeds candidates
    hull, zs = hull_certificate(space, F, iters={normed.OP: 150, normed.L1: 40}.get(tag, 10), seed=seed)
    lower = max(lower, hull)
    cands += zs

    def primal(z):
        return normed.dual_norm(space, F @ z) ** 2 / np.vdot(z, z).real

    # preimages of dual-ball extreme points
    Fp = np.linalg.pinv(F)
    if tag == normed.L1:
        z = Fp @ w.astype(complex)
        for _ in range(20):
            cands.append(z)
            z = Fp @ (w * phase(F @ z))
    elif tag == normed.LINF:
        cands += [Fp[:, i] * w[i] for i in range(space.dim)]
    cands = [z for z in cands if np.linalg.norm(z) > 0]
    vals = [primal(z) for z in cands]
    i = int(np.argmin(vals))
    best, z = vals[i], cands[i]
    if tag in (normed.L1, normed.LINF):
        for j in np.argsort(vals)[:3]:
            p, zz = _reweighted(space, F, cands[j])
            if p < best:
                best, z = p, zz
        p, zz = _smooth_descent(space, F, z)
        if p < best:
            best, z = p, zz
    z = z / np.linalg.norm(z)
    return max(lower, 0.0), best, z
