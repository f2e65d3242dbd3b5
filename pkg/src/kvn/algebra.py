"""Finite-dimensional Banach *-algebras given by structure constants.

Coordinates refer to a basis ``e_0 .. e_{d-1}``:

* product ``e_i e_j = sum_k c[i, j, k] e_k``;
* involution ``e_i^* = sum_j S[i, j] e_j`` extended conjugate-linearly, so
  ``coords(x^*) = S^T conj(x)``;
* norm either weighted l1 ``sum w_i |x_i|`` or the operator norm of a
  faithful *-representation ``x -> sum x_i R_i``.

Built-in C*-instances (matrix and block algebras) use matrix-unit bases
ordered row-major block by block, which is the layout of the ``op`` norm tag
in :mod:`kvn.normed`.
"""

import itertools

import numpy as np

from ._linalg import RTOL, as_vector, max_abs, numerical_rank
from .errors import (
    ConvergenceError, DimensionError, InvalidAlgebra, NotHermitian, SpectralRadiusTooLarge,
)
from .normed import L1, LINF, OP, NormedSpace

VALIDATION_TOL = 1e-10


class StarAlgebra:
    """Structure-constant algebra with involution and a submultiplicative norm.

    Parameters
    ----------
    structure : (d, d, d) array
    involution : (d, d) array
    norm : dict
        ``{"kind": "l1", "weights": [...]}`` or ``{"kind": "opnorm", "rep": R}``
        with ``R`` of shape ``(d, N, N)``.
    unit : (d,) array, optional
    rep : (d, N, N) array, optional
        A *-representation used to build positive functionals (defaults to the
        norm representation for ``opnorm``).
    name : str
    validate : bool
        Run the exhaustive basis checks (associativity, involution laws,
        submultiplicativity, representation laws, unit).
    """

    def __init__(self, structure, involution, norm, unit=None, rep=None, name="", validate=True):
        c = np.asarray(structure, dtype=complex)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise DimensionError(f"structure constants must be d x d x d, got {c.shape}")
        d = c.shape[0]
        S = np.asarray(involution, dtype=complex)
        if S.shape != (d, d):
            raise DimensionError(f"involution must be {d} x {d}, got {S.shape}")
        self.dim = d
        self.c = c
        self.S = S
        self.name = name
        kind = norm.get("kind")
        if kind == "l1":
            w = norm.get("weights")
            self.weights = np.ones(d) if w is None else np.asarray(w, dtype=float)
            if self.weights.shape != (d,) or np.any(self.weights <= 0):
                raise InvalidAlgebra("l1 weights must be d positive numbers")
            self.norm_rep = None
        elif kind == "opnorm":
            R = np.asarray(norm.get("rep"), dtype=complex)
            if R.ndim != 3 or R.shape[0] != d or R.shape[1] != R.shape[2]:
                raise InvalidAlgebra(f"opnorm rep must be d x N x N, got {R.shape}")
            self.weights = None
            self.norm_rep = R
        else:
            raise InvalidAlgebra(f"unknown norm kind {kind!r}")
        self.norm_kind = kind
        self.unit = None if unit is None else as_vector(unit, d, "unit")
        if rep is not None:
            rep = np.asarray(rep, dtype=complex)
        self.rep = rep if rep is not None else self.norm_rep
        self.blocks = _canonical_blocks(self.norm_rep) if kind == "opnorm" else None
        self.involution_isometric = False
        if validate:
            self.validate()
        self.involution_isometric = self._check_isometric()

    # ------------------------------------------------------------ arithmetic

    def multiply(self, x, y):
        x = as_vector(x, self.dim)
        y = as_vector(y, self.dim, "y")
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def involute(self, x):
        return self.S.T @ np.conj(as_vector(x, self.dim))

    def left_mult_matrix(self, x):
        """``L`` with ``L @ y = coords(x y)``."""
        return np.einsum("i,ijk->kj", as_vector(x, self.dim), self.c)

    def right_mult_matrix(self, y):
        return np.einsum("j,ijk->ki", as_vector(y, self.dim), self.c)

    def power(self, x, m):
        out = x
        for _ in range(m - 1):
            out = self.multiply(out, x)
        return out

    def basis(self, i):
        e = np.zeros(self.dim, complex)
        e[i] = 1
        return e

    def norm(self, x):
        x = as_vector(x, self.dim)
        if self.norm_kind == "l1":
            return float(np.sum(self.weights * np.abs(x)))
        return float(np.linalg.norm(np.tensordot(x, self.norm_rep, axes=1), 2))

    def represent(self, x):
        if self.rep is None:
            raise InvalidAlgebra(f"algebra {self.name or ''} has no *-representation")
        return np.tensordot(as_vector(x, self.dim), self.rep, axes=1)

    def is_hermitian(self, x, tol=VALIDATION_TOL):
        x = as_vector(x, self.dim)
        return self.norm(self.involute(x) - x) <= tol * max(1.0, self.norm(x))

    @property
    def is_cstar(self):
        """Operator-norm instance with a matrix-unit basis (block-diagonal C*-algebra)."""
        return self.norm_kind == "opnorm" and self.blocks is not None

    def normed_space(self):
        """The algebra's coordinates as a :class:`~kvn.normed.NormedSpace`."""
        if self.norm_kind == "l1":
            return NormedSpace(self.dim, L1, tuple(self.weights))
        if self.blocks is None:
            raise InvalidAlgebra("operator norms are only supported on matrix-unit bases")
        if all(m == 1 for m in self.blocks):
            return NormedSpace(self.dim, LINF)
        return NormedSpace(self.dim, OP, blocks=self.blocks)

    # ------------------------------------------------------------ validation

    def validate(self, tol=VALIDATION_TOL):
        """Exhaustive checks on basis elements; raises :class:`InvalidAlgebra`."""
        c, d = self.c, self.dim
        scale = max(1.0, max_abs(c))
        lhs = np.einsum("ijm,mkl->ijkl", c, c)
        rhs = np.einsum("jkm,iml->ijkl", c, c)
        if max_abs(lhs - rhs) > tol * scale**2:
            raise InvalidAlgebra("structure constants are not associative")
        E = np.eye(d, dtype=complex)
        twice = np.stack([self.involute(self.involute(E[i])) for i in range(d)])
        if max_abs(twice - E) > tol:
            raise InvalidAlgebra("involution is not an involution: (x*)* != x")
        for i, j in itertools.product(range(d), repeat=2):
            a = self.involute(c[i, j])
            b = self.multiply(self.involute(E[j]), self.involute(E[i]))
            if max_abs(a - b) > tol * scale:
                raise InvalidAlgebra(f"(e_{i} e_{j})* != e_{j}* e_{i}*")
        if self.norm_kind == "l1":
            w = self.weights
            lhs = np.einsum("ijk,k->ij", np.abs(c), w)
            if np.any(lhs > np.outer(w, w) * (1 + tol)):
                i, j = np.unravel_index(int(np.argmax(lhs - np.outer(w, w))), lhs.shape)
                raise InvalidAlgebra(f"weighted l1 norm is not submultiplicative at (e_{i}, e_{j})")
        for R, label in ((self.norm_rep, "norm"), (self.rep, "auxiliary")):
            if R is None:
                continue
            prod = np.einsum("iab,jbc->ijac", R, R)
            image = np.einsum("ijk,kac->ijac", c, R)
            if max_abs(prod - image) > tol * max(1.0, max_abs(R)) ** 2:
                raise InvalidAlgebra(f"{label} representation is not multiplicative")
            star = np.einsum("ij,jab->iab", self.S, R)
            if max_abs(star - np.conj(np.transpose(R, (0, 2, 1)))) > tol * max(1.0, max_abs(R)):
                raise InvalidAlgebra(f"{label} representation is not a *-map")
            if label == "norm" and numerical_rank(R.reshape(d, -1)) < d:
                raise InvalidAlgebra("norm representation is not faithful")
        if self.unit is not None:
            Lu = self.left_mult_matrix(self.unit)
            Ru = self.right_mult_matrix(self.unit)
            if max_abs(Lu - np.eye(d)) > tol or max_abs(Ru - np.eye(d)) > tol:
                raise InvalidAlgebra("declared unit is not a two-sided unit")
        return True

    def _check_isometric(self, samples=16, seed=0, tol=VALIDATION_TOL):
        if self.norm_kind == "opnorm":
            return True
        rng = np.random.default_rng(seed)
        xs = [self.basis(i) for i in range(self.dim)]
        xs += [rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim) for _ in range(samples)]
        return all(abs(self.norm(self.involute(x)) - self.norm(x)) <= tol * self.norm(x) for x in xs)

    # ------------------------------------------------------------ JSON

    def to_json(self):
        from .serialize import encode_complex

        out = {"dim": self.dim, "structure": encode_complex(self.c), "involution": encode_complex(self.S)}
        if self.norm_kind == "l1":
            out["norm"] = {"kind": "l1", "weights": self.weights.tolist()}
        else:
            out["norm"] = {"kind": "opnorm", "rep": encode_complex(self.norm_rep)}
        if self.unit is not None:
            out["unit"] = encode_complex(self.unit)
        return out

    def __repr__(self):
        return f"StarAlgebra({self.name or 'custom'}, dim={self.dim}, norm={self.norm_kind})"


def _canonical_blocks(R):
    """Block sizes if ``R`` is the matrix-unit embedding of a block-diagonal algebra, else None."""
    d, N, _ = R.shape
    sizes, i, o = [], 0, 0
    while i < d and o < N:
        m = 0
        while o + m < N and i + m < d and _is_unit(R[i + m], o, o + m):
            m += 1
        if m == 0:
            return None
        for p, q in itertools.product(range(m), repeat=2):
            if i + p * m + q >= d or not _is_unit(R[i + p * m + q], o + p, o + q):
                return None
        sizes.append(m)
        i += m * m
        o += m
    if i != d or o != N:
        return None
    return tuple(sizes)


def _is_unit(M, a, b):
    E = np.zeros_like(M)
    E[a, b] = 1
    return max_abs(M - E) <= 1e-12


# ---------------------------------------------------------------- spectral tools

def spectral_radius(a, x):
    """Largest eigenvalue modulus of left multiplication on the unitization ``C + A``.

    The unitization adds the eigenvalue 0, so non-unital algebras need no
    special treatment.
    """
    L = a.left_mult_matrix(x)
    if not L.size:
        return 0.0
    return float(max(0.0, np.max(np.abs(np.linalg.eigvals(L)))))


def gelfand_sequence(a, x, kmax=6):
    """``[|x^(2^k)|^(1/2^k) for k = 0..kmax]`` by repeated squaring."""
    out = []
    y = as_vector(x, a.dim)
    for k in range(kmax + 1):
        nrm = a.norm(y)
        out.append(nrm ** (1.0 / 2**k) if nrm > 0 else 0.0)
        y = a.multiply(y, y)
    return out


def gelfand_check(a, x, kmax=6, rtol=1e-9):
    """``r(x) <= |x^(2^k)|^(1/2^k)`` for every ``k`` and the sequence is nonincreasing."""
    r = spectral_radius(a, x)
    seq = gelfand_sequence(a, x, kmax)
    upper_ok = all(r <= s * (1 + rtol) + 1e-12 for s in seq)
    mono = all(t <= s * (1 + rtol) + 1e-12 for s, t in zip(seq, seq[1:]))
    return {"radius": r, "sequence": seq, "upper_bound": upper_ok, "nonincreasing": mono,
            "final_gap": seq[-1] - r}


class SquareRoot:
    __slots__ = ("y", "residual", "hermitian_defect", "iterations")

    def __init__(self, y, residual, hermitian_defect, iterations):
        self.y = y
        self.residual = residual
        self.hermitian_defect = hermitian_defect
        self.iterations = iterations

    def __repr__(self):
        return f"SquareRoot(residual={self.residual:.3g}, iterations={self.iterations})"


def square_root_lemma(a, h, tol=1e-12, max_iter=200):
    """Hermitian ``y`` with ``2y - y^2 = h`` for hermitian ``h`` with ``r(h) < 1``.

    Fixed-point iteration ``y <- (h + y^2) / 2`` from ``y = 0``; this picks
    the branch ``y = 1 - sqrt(1 - h)`` of the power series.

    Raises
    ------
    NotHermitian
    SpectralRadiusTooLarge
        ``r(h) >= 1 - tol``.
    ConvergenceError
        The residual did not reach ``tol * max(1, |h|)`` within ``max_iter``.
    """
    h = as_vector(h, a.dim, "h")
    if not a.is_hermitian(h, max(tol, VALIDATION_TOL)):
        raise NotHermitian("h is not hermitian", {"defect": a.norm(a.involute(h) - h)})
    r = spectral_radius(a, h)
    if r >= 1 - tol:
        raise SpectralRadiusTooLarge(f"r(h) = {r:.6g} >= 1", {"spectral_radius": r})
    target = tol * max(1.0, a.norm(h))
    y = np.zeros(a.dim, complex)
    res = a.norm(h)
    for it in range(1, max_iter + 1):
        y = 0.5 * (h + a.multiply(y, y))
        y = 0.5 * (y + a.involute(y))
        res = a.norm(2 * y - a.multiply(y, y) - h)
        if res <= target:
            return SquareRoot(y, res, a.norm(a.involute(y) - y), it)
    raise ConvergenceError(f"square-root iteration stalled at residual {res:.3g}",
                           {"residual": res, "iterations": max_iter})


def modulus_of_continuity_lower_bound(a, samples=200, seed=0):
    """``max r(x^* x)^{1/2} / |x|`` over basis vectors, the unit and seeded random ``x``."""
    rng = np.random.default_rng(seed)
    xs = [a.basis(i) for i in range(a.dim)]
    if a.unit is not None:
        xs.append(a.unit)
    xs += [rng.standard_normal(a.dim) + 1j * rng.standard_normal(a.dim) for _ in range(max(samples, 1))]
    best = 0.0
    for x in xs:
        nx = a.norm(x)
        if nx > 0:
            best = max(best, np.sqrt(spectral_radius(a, a.multiply(a.involute(x), x))) / nx)
    return float(best)


def left_ideal_basis(a, generators, rtol=RTOL):
    """Basis (columns) of the smallest left ideal containing ``generators``.

    Independent generators come first in their given order; further columns
    are products ``e_i b`` added greedily in a fixed order, so the result is
    deterministic.  Zero generators are dropped.
    """
    d = a.dim
    gens = [as_vector(g, d, "generator") for g in generators]
    cols = []

    def try_add(v):
        nv = np.linalg.norm(v)
        if nv <= 1e-14 * max(1.0, max_abs(a.c)):
            return False
        M = np.column_stack(cols + [v]) if cols else v[:, None]
        # rank test on column-normalized matrix so scale does not matter
        Mn = M / np.linalg.norm(M, axis=0)
        if numerical_rank(Mn, max(rtol, 1e-9)) > len(cols):
            cols.append(v)
            return True
        return False

    for g in gens:
        try_add(g)
    pos = 0
    while pos < len(cols):
        b = cols[pos]
        for i in range(d):
            try_add(a.multiply(a.basis(i), b))
        pos += 1
    if not cols:
        return np.zeros((d, 0), complex)
    B = np.column_stack(cols)
    if not is_left_ideal(a, B):
        raise InvalidAlgebra("left-ideal closure failed")
    return B


def is_left_ideal(a, B, tol=1e-9):
    if B.shape[1] == 0:
        return True
    Q, _ = np.linalg.qr(B)
    for i in range(a.dim):
        P = a.left_mult_matrix(a.basis(i)) @ B
        resid = P - Q @ (Q.conj().T @ P)
        if max_abs(resid) > tol * max(1.0, max_abs(P)):
            return False
    return True


# ---------------------------------------------------------------- constructors

def _matrix_units(sizes):
    """Structure, involution, representation and unit of ``M_{m1} + ... + M_{mr}``."""
    N = sum(sizes)
    idx = []
    o = 0
    for m in sizes:
        idx += [(o + p, o + q) for p in range(m) for q in range(m)]
        o += m
    d = len(idx)
    pos = {pq: i for i, pq in enumerate(idx)}
    c = np.zeros((d, d, d), complex)
    S = np.zeros((d, d), complex)
    R = np.zeros((d, N, N), complex)
    unit = np.zeros(d, complex)
    for i, (p, q) in enumerate(idx):
        R[i, p, q] = 1
        S[i, pos[(q, p)]] = 1
        if p == q:
            unit[i] = 1
        for j, (r, s) in enumerate(idx):
            if q == r:
                c[i, j, pos[(p, s)]] = 1
    return c, S, R, unit


def block_algebra(sizes):
    """Block-diagonal C*-algebra ``M_{m1} + ... + M_{mr}`` with the operator norm."""
    sizes = tuple(int(m) for m in sizes)
    if not sizes or any(m < 1 for m in sizes):
        raise InvalidAlgebra("block sizes must be positive")
    c, S, R, unit = _matrix_units(sizes)
    name = "+".join(f"M{m}" for m in sizes)
    return StarAlgebra(c, S, {"kind": "opnorm", "rep": R}, unit=unit, name=name)


def matrix_algebra(d):
    """``M_d(C)`` with the operator norm; basis ``E_pq`` at index ``p*d + q``."""
    return block_algebra((d,))


def function_algebra(n):
    """``C^n`` with pointwise operations and the sup norm."""
    a = block_algebra((1,) * n)
    a.name = f"C({n})"
    return a


def group_algebra(table, inverse, weights=None, name="group"):
    """``l1(G)`` for a finite group given by its multiplication table.

    ``table[g][h]`` is the index of ``g h``; ``inverse[g]`` of ``g^{-1}``.  The
    involution ``delta_g^* = delta_{g^{-1}}`` is isometric for unit weights.
    The left-regular representation is attached for building positive
    functionals.
    """
    table = np.asarray(table, dtype=int)
    n = table.shape[0]
    c = np.zeros((n, n, n), complex)
    R = np.zeros((n, n, n), complex)
    for g in range(n):
        for h in range(n):
            c[g, h, table[g, h]] = 1
            R[g, table[g, h], h] = 1
    S = np.zeros((n, n), complex)
    for g in range(n):
        S[g, inverse[g]] = 1
    e = [g for g in range(n) if all(table[g, h] == h for h in range(n))]
    if len(e) != 1:
        raise InvalidAlgebra("multiplication table has no identity")
    unit = np.zeros(n, complex)
    unit[e[0]] = 1
    norm = {"kind": "l1", "weights": None if weights is None else list(weights)}
    return StarAlgebra(c, S, norm, unit=unit, rep=R, name=name)


def cyclic_group(n):
    table = [[(g + h) % n for h in range(n)] for g in range(n)]
    return group_algebra(table, [(-g) % n for g in range(n)], name=f"l1(Z{n})")


def symmetric_group(k=3):
    """``l1(S_k)``; elements are permutations in lexicographic order (identity first)."""
    perms = list(itertools.permutations(range(k)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
    inverse = [pos[tuple(np.argsort(p))] for p in perms]
    a = group_algebra(table, inverse, name=f"l1(S{k})")
    a.elements = perms
    return a


def unitization(a):
    """``C + A`` with ``(l, b)(m, c) = (l m, l c + m b + b c)`` and norm ``|l| + |b|``.

    Coordinate 0 is the adjoined unit.  Only weighted-l1 algebras are
    supported, where the unitization norm is again weighted l1.
    """
    if a.norm_kind != "l1":
        raise InvalidAlgebra("unitization is implemented for l1 algebras only")
    d = a.dim
    D = d + 1
    c = np.zeros((D, D, D), complex)
    c[0, 0, 0] = 1
    for i in range(d):
        c[0, i + 1, i + 1] = 1
        c[i + 1, 0, i + 1] = 1
    c[1:, 1:, 1:] = a.c
    S = np.zeros((D, D), complex)
    S[0, 0] = 1
    S[1:, 1:] = a.S
    unit = np.zeros(D, complex)
    unit[0] = 1
    rep = None
    if a.rep is not None:
        I = np.eye(a.rep.shape[1], dtype=complex)[None]
        rep = np.concatenate([I, a.rep])
    w = np.concatenate([[1.0], a.weights])
    return StarAlgebra(c, S, {"kind": "l1", "weights": w}, unit=unit, rep=rep,
                       name=f"unitization({a.name})")


SHORTHANDS = ("matrix:d", "blocks:[m1,...]", "functions:n", "group:Zn", "group:S3")


def from_shorthand(spec):
    """``matrix:2``, ``blocks:[2,1]``, ``functions:3``, ``group:Z2``, ``group:S3``."""
    import json

    kind, _, arg = spec.partition(":")
    try:
        if kind == "matrix":
            return matrix_algebra(int(arg))
        if kind == "blocks":
            return block_algebra(json.loads(arg))
        if kind == "functions":
            return function_algebra(int(arg))
        if kind == "group":
            if arg.startswith("Z"):
                return cyclic_group(int(arg[1:]))
            if arg.startswith("S"):
                return symmetric_group(int(arg[1:]))
    except (ValueError, TypeError) as exc:
        raise InvalidAlgebra(f"bad algebra shorthand {spec!r}") from exc
    raise InvalidAlgebra(f"unknown algebra shorthand {spec!r}; known: {', '.join(SHORTHANDS)}")


def from_json(obj):
    """Algebra from a shorthand string or a full descriptor."""
    if isinstance(obj, str):
        return from_shorthand(obj)
    from .serialize import decode_complex

    d = int(obj["dim"])
    c = decode_complex(obj["structure"], 3)
    S = decode_complex(obj["involution"], 2)
    norm = dict(obj["norm"])
    if norm.get("kind") == "opnorm":
        norm["rep"] = decode_complex(norm["rep"], 3)
    unit = decode_complex(obj["unit"], 1) if obj.get("unit") is not None else None
    if c.shape != (d, d, d):
        raise DimensionError(f"structure has shape {c.shape}, expected {(d, d, d)}")
    return StarAlgebra(c, S, norm, unit=unit, name=obj.get("name", ""))
