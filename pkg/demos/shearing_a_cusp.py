"""
Conjugating by a shear
======================

The shear w -> u(x) + i(y + v(x)) commutes with the upward flow, so it
conjugates the semigroups of two models. Here v = 1/x lifts a cusp that
dives to -inf at the left wall into a flat floor.
"""

from koenigs.boundary import analyse
from koenigs.conjugation import compare_reports, pushforward_model, shear, transport_boundary_report, verify_conjugacy
from koenigs.model import strip_model

source = strip_model(0.0, 1.0, "-1/x")
tau = shear("x", "1/x", 0.0, 1.0)
target = pushforward_model(source, tau)

print("target floor:", target.lower.beta)

# the flows agree after conjugation, up to rounding
check = verify_conjugacy(source, target, tau)
print("conjugacy residual:", check)

# the cusp was a super-repelling fixed point of the third type; the flat floor has none
for name, m in (("source", source), ("target", target)):
    print(name, [fp.cls.value for fp in analyse(m).fixed_points])

# points away from the exceptional arcs keep their class when moved by the shear
moved = transport_boundary_report(analyse(source), tau, source)
print("disagreements outside the exceptional arcs:", compare_reports(moved, analyse(target)))
