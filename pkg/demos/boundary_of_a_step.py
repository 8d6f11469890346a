"""
Reading the boundary of a Koenigs model
=======================================

A lower boundary that jumps from 0 to 1 at x = 1/2, plus a hole where the
boundary drops to -inf. We list the contact arcs, the boundary fixed points
and the flow time each boundary point spends on the circle.
"""

import math

from koenigs.boundary import analyse, life_time
from koenigs.model import strip_model
from koenigs.piecewise import PiecewiseFn, parse_piece

# the lower boundary beta, one branch per open interval
beta = PiecewiseFn.from_pieces([
    (0.0, 0.5, parse_piece("0")),
    (0.5, 0.7, parse_piece("1")),
    (0.7, 0.8, parse_piece("-inf")),
    (0.8, 1.0, parse_piece("-1/(x - 0.8)")),
])
model = strip_model(0.0, 1.0, beta)

report = analyse(model)
print("semigroup type:", report.model_type)

# every vertical segment of the boundary is a contact arc
for arc in report.arcs:
    tag = "exceptional" if arc.exceptional else "ordinary"
    print(f"arc at x = {arc.c:g} ({arc.side}), heights ({arc.d:g}, {arc.R:g}), {tag}, starts {arc.initial_class.value}")

# fixed points on the circle: the Denjoy-Wolff point at the top, the rest at the bottom
for fp in report.fixed_points:
    print(f"{fp.cls.value:>18}  {fp.where}")

# a boundary point at height y on an arc of top R leaves the circle after R - y
arc = next(a for a in report.arcs if not a.exceptional and math.isfinite(a.R))
for y in (arc.R - 0.5, arc.R - 0.1):
    print(f"life time from y = {y:g}: {life_time(arc, y):g}")
