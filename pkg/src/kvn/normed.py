"""Finite-dimensional complex normed spaces and their antiduals.

An antidual vector ``phi`` is stored by coordinates and acts on ``x`` by
``<phi|x> = sum_i phi_i * conj(x_i) = x^H phi``.  With this convention the
matrix ``M`` of an operator into the antidual satisfies ``<Mx|y> = y^H M x``
and positivity ``<Mx|x> >= 0`` is ordinary positive semidefiniteness.  The
bidual embedding is the identity on coordinates.

Supported norm tags
-------------------
``l1``    ``sum w_i |x_i|``
``l2``    ``sqrt(sum w_i |x_i|^2)``
``linf``  ``max w_i |x_i|``
``op``    coordinates are matrix units of a block-diagonal algebra, stored
          row-major block by block; the norm is the largest block operator
          norm and the dual norm is the sum of block trace norms.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _extreme
from ._linalg import TOL, as_matrix, as_vector, hermitian_part, max_abs, phase, polar_unitary
from .errors import DimensionError, InvalidInput

L1, L2, LINF, OP = "l1", "l2", "linf", "op"
TAGS = (L1, L2, LINF, OP)


@dataclass(frozen=True)
class NormedSpace:
    """Coordinate space ``C^dim`` with a weighted l1/l2/linf or block operator norm.

    Parameters
    ----------
    dim : int
    norm_tag : {"l1", "l2", "linf", "op"}
    weights : tuple of float, optional
        Strictly positive coordinate weights (ignored for ``op``).
    blocks : tuple of int, optional
        Block sizes for ``op``; ``dim`` must equal ``sum(m*m)``.
    """

    dim: int
    norm_tag: str = L2
    weights: tuple = None
    blocks: tuple = None

    def __post_init__(self):
        tag = str(self.norm_tag).lower()
        object.__setattr__(self, "norm_tag", tag)
        if tag not in TAGS:
            raise InvalidInput(f"unknown norm tag {self.norm_tag!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidInput(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if tag == OP:
            if self.blocks is None:
                raise InvalidInput("op norm needs block sizes")
            blocks = tuple(int(m) for m in self.blocks)
            if any(m < 1 for m in blocks) or sum(m * m for m in blocks) != self.dim:
                raise InvalidInput(f"blocks {blocks} do not tile dimension {self.dim}")
            object.__setattr__(self, "blocks", blocks)
            object.__setattr__(self, "weights", None)
            return
        if self.blocks is not None:
            raise InvalidInput("blocks only apply to the op norm")
        if self.weights is not None:
            w = tuple(float(v) for v in np.asarray(self.weights, dtype=float).ravel())
            if len(w) != self.dim:
                raise InvalidInput(f"{len(w)} weights for dimension {self.dim}")
            if not all(v > 0 and math.isfinite(v) for v in w):
                raise InvalidInput("weights must be finite and strictly positive")
            object.__setattr__(self, "weights", w)

    @property
    def w(self):
        if self.weights is None:
            return np.ones(self.dim)
        return np.asarray(self.weights, dtype=float)

    def block_views(self, x):
        """Split a coordinate vector into its square blocks (op norm only)."""
        out, o = [], 0
        for m in self.blocks:
            out.append(np.asarray(x)[o:o + m * m].reshape(m, m))
            o += m * m
        return out

    def norm(self, x):
        return norm(self, x)

    def dual_norm(self, phi):
        return dual_norm(self, phi)

    def antidual(self, coords):
        return AntidualVector(as_vector(coords, self.dim, "coords"), self)

    def to_json(self):
        out = {"dim": self.dim, "norm": self.norm_tag}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.blocks is not None:
            out["blocks"] = list(self.blocks)
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(obj["dim"], obj["norm"], obj.get("weights"), obj.get("blocks"))


@dataclass(frozen=True, eq=False)
class AntidualVector:
    """A conjugate-linear functional ``x -> sum phi_i conj(x_i)`` on ``space``."""

    coords: np.ndarray
    space: NormedSpace

    def __call__(self, x):
        return pair(self, x)

    def norm(self):
        return dual_norm(self.space, self.coords)


def norm(space, x):
    """Norm of ``x`` in ``space``."""
    x = as_vector(x, space.dim)
    a = np.abs(x)
    tag = space.norm_tag
    if tag == L1:
        return float(np.sum(space.w * a))
    if tag == L2:
        return float(np.sqrt(np.sum(space.w * a * a)))
    if tag == LINF:
        return float(np.max(space.w * a))
    return max(float(np.linalg.norm(X, 2)) for X in space.block_views(x))


def dual_norm(space, phi):
    """``sup |<phi|x>|`` over the unit ball of ``space``."""
    phi = as_vector(phi, space.dim, "phi")
    a = np.abs(phi)
    tag = space.norm_tag
    if tag == L1:
        return float(np.max(a / space.w))
    if tag == L2:
        return float(np.sqrt(np.sum(a * a / space.w)))
    if tag == LINF:
        return float(np.sum(a / space.w))
    return float(sum(np.linalg.norm(X, "nuc") for X in space.block_views(phi)))


def pair(phi, x):
    """Antidual pairing ``<phi|x> = sum phi_i conj(x_i)``.

    ``phi`` may be an :class:`AntidualVector` or a bare coordinate vector.
    """
    if isinstance(phi, AntidualVector):
        coords, dim = phi.coords, phi.space.dim
    else:
        coords = as_vector(phi, name="phi")
        dim = coords.shape[0]
    x = as_vector(x, dim)
    return complex(np.vdot(x, coords))


def norming_vector(space, phi):
    """Unit-ball vector ``x`` with ``<phi|x> = dual_norm(phi)``."""
    phi = as_vector(phi, space.dim, "phi")
    w = space.w
    tag = space.norm_tag
    if tag == L1:
        i = int(np.argmax(np.abs(phi) / w))
        x = np.zeros(space.dim, complex)
        x[i] = phase(phi[i : i + 1])[0] / w[i]
        return x
    if tag == L2:
        d = dual_norm(space, phi)
        if d == 0:
            x = np.zeros(space.dim, complex)
            x[0] = 1 / np.sqrt(w[0])
            return x
        return phi / w / d
    if tag == LINF:
        return phase(phi) / w
    return np.concatenate([polar_unitary(X).ravel() for X in space.block_views(phi)])


def _check_square(M, space):
    return as_matrix(M, (space.dim, space.dim))


def _is_psd(M, tol=TOL):
    if max_abs(M - M.conj().T) > tol * max(1.0, max_abs(M)):
        return False
    lam = np.linalg.eigvalsh(hermitian_part(M))
    return lam[0] >= -tol * max(1.0, abs(lam[-1]))


def operator_norm(M, space, *, phases=16, seed=0):
    """Norm of ``M`` as a map from ``space`` into its antidual.

    ``sup {dual_norm(M x) : norm(x) <= 1}``.  Exact for ``l1`` and ``l2``.
    For ``linf`` and ``op`` an :class:`~kvn.bounds.Interval` is returned:
    the lower end is attained by an explicit extreme point and the upper end
    is a Lagrangian eigenvalue certificate.  Positive semidefinite inputs use
    the quadratic form ``sup x^H M x`` (equal to the bilinear supremum by
    Cauchy-Schwarz); other inputs use a Hermitian dilation.
    """
    M = _check_square(M, space)
    w = space.w
    tag = space.norm_tag
    if tag == L1:
        return float(np.max(np.abs(M) / np.outer(w, w)))
    if tag == L2:
        s = 1 / np.sqrt(w)
        return float(np.linalg.norm(s[:, None] * M * s[None, :], 2))
    if tag == LINF:
        Mw = M / np.outer(w, w)
        if _is_psd(M):
            return _extreme.torus_max(Mw, phases=phases, seed=seed)[0]
        return _extreme.bilinear_max(Mw, phases=phases, seed=seed)
    if _is_psd(M):
        return _extreme.unitary_max(M, space.blocks, seed=seed)[0]
    return _extreme.bilinear_max(M, blocks=space.blocks, seed=seed)


def ball_quadratic_max(space, P, *, seed=0):
    """``sup {x^H P x : norm(x) <= 1}`` for Hermitian PSD ``P``."""
    P = hermitian_part(_check_square(P, space))
    w = space.w
    tag = space.norm_tag
    if tag == L1:
        return float(max(0.0, np.max(np.diag(P).real / w**2)))
    if tag == L2:
        s = 1 / np.sqrt(w)
        return float(max(0.0, np.linalg.eigvalsh(s[:, None] * P * s[None, :])[-1]))
    if tag == LINF:
        return _extreme.torus_max(P / np.outer(w, w), seed=seed)[0]
    return _extreme.unitary_max(P, space.blocks, seed=seed)[0]


def dual_ball_quadratic_max(space, Q, *, seed=0):
    """``sup {phi^H Q phi : dual_norm(phi) <= 1}`` for Hermitian PSD ``Q``."""
    Q = hermitian_part(_check_square(Q, space))
    w = space.w
    tag = space.norm_tag
    if tag == L1:
        return _extreme.torus_max(Q * np.outer(w, w), seed=seed)[0]
    if tag == L2:
        s = np.sqrt(w)
        return float(max(0.0, np.linalg.eigvalsh(s[:, None] * Q * s[None, :])[-1]))
    if tag == LINF:
        return float(max(0.0, np.max(np.diag(Q).real * w**2)))
    return _extreme.rank_one_max(Q, space.blocks, seed=seed)


@dataclass
class Check:
    """Boolean outcome with an optional witness; truthy iff ``ok``."""

    ok: bool
    witness: dict = None
    detail: float = 0.0

    def __bool__(self):
        return bool(self.ok)


def check_symmetry(M, tol=TOL):
    """Test ``<Mx|y> = conj(<My|x>)`` for all ``x, y``.

    In coordinates this is ``M == M^H`` up to ``tol * max(1, max|M|)``.  On
    failure the witness is the pair of basis vectors ``x = e_j, y = e_i`` at
    the worst entry.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"matrix must be square, got {M.shape}")
    D = np.abs(M - M.conj().T)
    dev = max_abs(D)
    if dev <= tol * max(1.0, max_abs(M)):
        return Check(True, None, dev)
    i, j = np.unravel_index(int(np.argmax(D)), D.shape)
    n = M.shape[0]
    x, y = np.zeros(n, complex), np.zeros(n, complex)
    x[j] = 1
    y[i] = 1
    lhs = complex(y.conj() @ M @ x)
    rhs = complex(np.conj(x.conj() @ M @ y))
    return Check(False, {"x": x, "y": y, "lhs": lhs, "rhs": rhs}, dev)


def random_space(rng, n, tag, weighted=True):
    """Seeded random space (weights in ``[0.5, 2]``) for tests and demos."""
    if tag == OP:
        raise InvalidInput("random op spaces are built from block sizes")
    w = tuple(rng.uniform(0.5, 2.0, n)) if weighted else None
    return NormedSpace(n, tag, w)

