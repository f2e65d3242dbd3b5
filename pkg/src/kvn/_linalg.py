"""Small dense linear-algebra helpers shared by all modules.

All rank decisions go through :func:`psd_range` / :func:`numerical_rank`
with the same relative cutoff so that rank claims made by different
routines agree with each other.
"""

import numpy as np

RTOL = 1e-10
TOL = 1e-9


def as_vector(x, dim=None, name="x"):
    from .errors import DimensionError

    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {dim}")
    return v


def as_matrix(M, shape=None, name="M"):
    from .errors import DimensionError

    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be a matrix, got shape {A.shape}")
    if shape is not None:
        for got, want in zip(A.shape, shape):
            if want is not None and got != want:
                raise DimensionError(f"{name} has shape {A.shape}, expected {shape}")
    return A


def hermitian_part(M):
    return 0.5 * (M + M.conj().T)


def max_abs(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def psd_range(G, rtol=RTOL):
    """Eigen-decomposition of a Hermitian PSD matrix restricted to its range.

    Returns ``(U, lam)`` with orthonormal columns ``U`` spanning the
    numerical range and the corresponding eigenvalues ``lam > rtol * lam_max``.
    """
    G = hermitian_part(np.asarray(G, dtype=complex))
    if G.size == 0:
        return np.zeros((G.shape[0], 0), complex), np.zeros(0)
    lam, U = np.linalg.eigh(G)
    top = lam[-1]
    if top <= 0:
        return np.zeros((G.shape[0], 0), complex), np.zeros(0)
    keep = lam > rtol * top
    return U[:, keep], lam[keep]


def psd_kernel(G, rtol=RTOL):
    """Orthonormal basis of the numerical kernel of a Hermitian PSD matrix."""
    G = hermitian_part(np.asarray(G, dtype=complex))
    if G.size == 0:
        return np.zeros((G.shape[0], 0), complex)
    lam, U = np.linalg.eigh(G)
    top = lam[-1]
    if top <= 0:
        return U
    return U[:, lam <= rtol * top]


def psd_pinv(G, rtol=RTOL):
    U, lam = psd_range(G, rtol)
    return (U / lam) @ U.conj().T if lam.size else np.zeros_like(np.asarray(G, complex))


def numerical_rank(M, rtol=RTOL):
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def column_space(M, rtol=RTOL):
    """Orthonormal basis of the column space of ``M``."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), complex)
    W, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        return np.zeros((M.shape[0], 0), complex)
    return W[:, s > rtol * s[0]]


def min_eigenvalue(M):
    M = hermitian_part(np.asarray(M, dtype=complex))
    if M.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(M)[0])


def random_complex(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_psd(rng, n, rank=None, scale=1.0):
    rank = n if rank is None else rank
    Z = random_complex(rng, n, rank)
    return scale * (Z @ Z.conj().T) / max(rank, 1)


def phase(z):
    """Unit-modulus phase of ``z``; zero entries map to 1."""
    z = np.asarray(z, dtype=complex)
    a = np.abs(z)
    out = np.ones_like(z)
    nz = a > 0
    out[nz] = z[nz] / a[nz]
    return out


def polar_unitary(Y):
    """Unitary factor of the polar decomposition ``Y = U P``."""
    W, _, Vh = np.linalg.svd(Y)
    return W @ Vh
