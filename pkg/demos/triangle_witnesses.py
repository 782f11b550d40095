"""Killing vs localization on a few random cone triangles over F3."""
import random

from dgloc.fields import GF
from dgloc.verify.suites import (
    check_drinfeld_factorization,
    check_killing_vs_localization,
    check_rotation,
    random_triangle,
)

F = GF(3)
for i, kind in enumerate(("generic", "identity", "zero", "split_epi")):
    T = random_triangle(random.Random(i), F, rank_bound=3, kind=kind)
    for check in (check_killing_vs_localization, check_rotation, check_drinfeld_factorization):
        rep = check(T, name=f"{kind}-{i}")
        sides = {**rep.left, **rep.right}
        brief = {k: (f"{v['status']} #{v['cardinality']}" if isinstance(v, dict) else v) for k, v in sides.items()}
        print(f"{rep.suite:>9} {rep.name:<12} {'ok' if rep.matched else 'MISMATCH'}  {brief}")
