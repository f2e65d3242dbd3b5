"""Diagonal operators from l1 into l-infinity and their asymptotic predicates.

For a nonnegative sequence s the operator <Ax|y> = sum s(n) x(n) conj(y(n))
extends with constant sup s; the extension is compact iff s -> 0 and has
closed range iff s has finite support.  Truncations show each verdict.

Run: python3 demos/diagonal_model.py
"""

from kvn import diagonal as dg, extension as ext
from kvn.fixtures import diagonal_fixtures

for name, d, sup_s in diagonal_fixtures():
    _, M = dg.is_extendable(d)
    print(f"== {name}: M = {M}, compact = {dg.is_compact_extension(d)}, "
          f"closed range = {dg.has_closed_range_extension(d)}")
    trunc = [ext.schwarz_bound(dg.truncate(d, n)) for n in (4, 8, 16)]
    print("   truncated Schwarz constants:", [round(t, 6) for t in trunc])
    stable, counts = dg.net_stabilizes(d, 0.5)
    print("   0.5-net sizes along truncations:", [f"{float(c):.3g}" for c in counts], "stable" if stable else "growing")
    print("   truncated M' for m = 4, 8, 16, 32:", [dg.truncated_mprime(d, m) for m in (4, 8, 16, 32)])
    if not dg.is_compact_extension(d):
        _, dist = dg.separated_family(d, 10)
        print(f"   10 functionals in the unit set at mutual distance {dist}")
