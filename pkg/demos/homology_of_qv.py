"""Hom-space homology of QV(0) against the finite model with vw = 1.

    python demos/homology_of_qv.py [Q|F2|F3]
"""
import sys

from dgloc.constructions import qv
from dgloc.fields import Field
from dgloc.finite import kv_right_inverse
from dgloc.homology import stabilized_homology

field = Field.from_name(sys.argv[1] if len(sys.argv) > 1 else "Q")
P = qv(0, field)
model = kv_right_inverse(0, field)
window = (-2, 3)

print(f"QV(0) over {field.name}")
for a in ("O1", "O2"):
    for b in ("O1", "O2"):
        rep = stabilized_homology(P, a, b, window)
        want = model.hom_homology(a, b, window).dims
        raw = {W: d[0] for W, d in rep.samples["raw"].items()}
        flag = "stable" if all(rep.stable.values()) else "UNSTABLE"
        print(f"  Hom({a},{b}): H = {rep.nonzero()}  model {({k: d for k, d in want.items() if d})}  "
              f"raw H0 by bound {raw}  {flag}")
