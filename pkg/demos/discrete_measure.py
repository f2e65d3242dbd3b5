"""A measure restricted to functions supported in K, and two ways to extend it.

On Omega = {0, 1, 2} with weights mu = (1, 2, 4) and K = {0, 1}, the
minimal representable extension of mu|D(K) is mu restricted to K.  A
competitor g -> mu(e_K g) built from a cut-off e_K >= 1_K is also an
extension, but it is larger whenever e_K has mass outside K.  An
increasing net of cut-offs approaches the minimal one.

Run: python3 demos/discrete_measure.py
"""

import numpy as np

from kvn import gns

mu, K = [1, 2, 4], [0, 1]
for eK in ([1, 1, 0], [1, 1, 0.5]):
    r = gns.discrete_measure_scenario(mu, K, eK)
    print(f"e_K = {eK}: |mu_K| = {r.mu_K_norm}, |f_N| = {r.fN_norm:.6f}, "
          f"|e_K.mu| = {r.competitor_norm:.6f}, strictly larger = {r.strict}")

F = gns.discrete_measure_functional(mu, K)
units = gns.indicator_net(3, K, steps=8)
net = gns.approximate_unit_limit(F, units)
print("\nf_N =", np.real(net.fN))
print("distance of conj(A_N e_i) to f_N along the net:")
for e, dev in zip(units, net.deviations):
    print(f"  e = {np.round(e, 4)}  ->  {dev:.3e}")
print("monotone:", net.monotone)
