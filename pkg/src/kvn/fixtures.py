"""Reference instances shared by tests, demos and the corpus.

Each functional fixture is a :class:`Fixture` holding the ideal functional,
an optional left unit of the ideal and the expected minimal extension when
it is known in closed form.
"""

from dataclasses import dataclass

import numpy as np

from . import algebra as alg
from .diagonal import DiagonalOperator, Tail
from .gns import IdealFunctional, discrete_measure_functional


@dataclass
class Fixture:
    name: str
    F: IdealFunctional
    left_unit: np.ndarray = None
    expected_fN: np.ndarray = None
    representable: bool = True


def z2_functional():
    """``l1(Z2)``, whole algebra, ``f(x) = x_e + x_g / 2``."""
    a = alg.cyclic_group(2)
    return Fixture("l1(Z2)", IdealFunctional.total(a, [1, 0.5]), a.unit, np.array([1, 0.5]))


def s3_functional():
    """``l1(S3)``, ideal generated by ``(delta_e + delta_t) / 2`` for the transposition ``t = (0 2 1)``,
    with ``f`` the ``delta_e`` coefficient."""
    a = alg.symmetric_group(3)
    p = np.zeros(6)
    p[0] = p[1] = 0.5
    phi = np.zeros(6)
    phi[0] = 1
    F = IdealFunctional.from_generators(a, [p], functional=phi)
    return Fixture("l1(S3)", F, a.unit, p.copy())


def m2_state():
    """``M2``, whole algebra, ``f(x) = x_11``."""
    a = alg.matrix_algebra(2)
    return Fixture("M2 state", IdealFunctional.total(a, [1, 0, 0, 0]), a.unit, np.array([1, 0, 0, 0]))


def m2_column_state():
    """``M2``, first-column ideal, ``f([[u, 0], [v, 0]]) = u``."""
    a = alg.matrix_algebra(2)
    F = IdealFunctional.from_generators(a, [[1, 0, 0, 0]], values=[1, 0])
    return Fixture("M2 column, f = u", F, a.unit, np.array([1, 0, 0, 0]))


def m2_counterexample():
    """``M2``, first-column ideal, ``f([[u, 0], [v, 0]]) = v``: positive but not representable."""
    a = alg.matrix_algebra(2)
    F = IdealFunctional.from_generators(a, [[1, 0, 0, 0]], values=[0, 1])
    return Fixture("M2 column, f = v", F, a.unit, None, representable=False)


def block_trace():
    """``M2 + M1``, ideal ``M2 + 0``, ``f`` = trace on the block."""
    a = alg.block_algebra((2, 1))
    e = np.array([1, 0, 0, 1, 0])
    F = IdealFunctional.from_generators(a, [e], functional=e)
    return Fixture("M2+M1 trace", F, e, e.astype(float))


def block_state():
    """``M2 + M1``, ideal ``M2 + 0``, ``f(x) = x_11``."""
    a = alg.block_algebra((2, 1))
    e = np.array([1, 0, 0, 1, 0])
    F = IdealFunctional.from_generators(a, [e], functional=[1, 0, 0, 0, 0])
    return Fixture("M2+M1 state", F, e, np.array([1, 0, 0, 0, 0.0]))


def discrete_measure():
    """``C({0,1,2})``, ``mu = (1, 2, 4)``, ``K = {0, 1}``."""
    F = discrete_measure_functional([1, 2, 4], [0, 1])
    return Fixture("discrete measure", F, np.array([1, 1, 0.0]), np.array([1, 2, 0.0]))


def representable_fixtures():
    return [z2_functional(), s3_functional(), m2_state(), m2_column_state(), block_trace(),
            block_state(), discrete_measure()]


def gns_fixtures():
    """The five families named for GNS acceptance: Z2, S3, M2, M2+M1, discrete measure."""
    return [z2_functional(), s3_functional(), m2_state(), block_trace(), discrete_measure()]


def diagonal_fixtures():
    """``(name, operator, sup s)``: decaying, finitely supported and constant sequences."""
    return [
        ("decay 1/(n+1)", DiagonalOperator((), (), Tail("decay", 1.0)), 1.0),
        ("prefix (5, 3)", DiagonalOperator((0, 1), (5, 3), Tail("zero", 0.0, "empty")), 5.0),
        ("constant 1", DiagonalOperator((), (), Tail("constant", 1.0)), 1.0),
    ]
