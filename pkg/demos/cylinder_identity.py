"""Build the cylinder of QV over KV and spot-check [d, f](x) = x1 - x2."""
import random

from dgloc.algebra import random_morphism
from dgloc.constructions import bracket_identity_check, cylinder, kv, qv
from dgloc.dsl import print_presentation
from dgloc.fields import GF

F = GF(3)
D = qv(0, F)
cyl = cylinder(kv(0, F), D)
print(print_presentation(cyl.presentation))

rng = random.Random(7)
samples = [random_morphism(D, rng, 4, 3) for _ in range(5)]
for x, check in zip(samples, bracket_identity_check(cyl, samples)):
    print(f"{'ok ' if check.ok else 'BAD'}  x = {x}")
