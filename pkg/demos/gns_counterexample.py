"""A positive functional on a left ideal with no representable extension.

On M2, the first-column ideal {[[u, 0], [v, 0]]} carries f(a) = v.  Every
a^* a has zero (2,1) entry, so f(a^* a) = 0 while f is not zero: f is
positive but fails |f(a)|^2 <= C f(a^* a).  The state f(a) = u on the
same ideal is fine and extends to x -> x_11.

Run: python3 demos/gns_counterexample.py
"""

import numpy as np

from kvn import gns
from kvn.errors import NotRepresentable
from kvn.fixtures import m2_column_state, m2_counterexample

np.set_printoptions(precision=4, suppress=True)

F = m2_counterexample().F
print("ideal basis (columns, row-major 2x2 units):")
print(F.D.real)
print("Gram matrix f(a_i^* a_j):")
print(F.gram().real)
try:
    gns.representability_check(F)
except NotRepresentable as exc:
    w = exc.witness
    print("\nrefused:", exc)
    print("  a =", w["a"].real.reshape(2, 2).tolist(), " f(a) =", w["f(a)"], " f(a*a) =", w["f(a*a)"])

G = m2_column_state().F
fN, data, cert = gns.minimal_extension(G)
print("\nstate on the same ideal: C =", data.C_min, " GNS dimension =", data.H_dim)
print("minimal representable extension:", fN.real.reshape(2, 2).tolist())
print("certificate ok:", cert.ok)
unital = gns.unital_minimal_extension(G, np.eye(2).ravel())
print("conj(A_N e) with e the unit:", unital.real.reshape(2, 2).tolist())
