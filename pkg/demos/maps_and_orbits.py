"""
From the model back to the disc
===============================

We build the Riemann map of a model with the geodesic zipper, push the flow
w -> w + it back to the disc, and follow one boundary point until it leaves
the circle.
"""

import numpy as np

from koenigs.boundary import BoundaryPoint
from koenigs.conformal import boundary_trajectory, build_map, disc_semigroup, generator_at
from koenigs.model import strip_model
from koenigs.piecewise import PiecewiseFn, parse_piece

beta = PiecewiseFn.from_pieces([(0.0, 0.5, parse_piece("0")), (0.5, 1.0, parse_piece("1"))])
model = strip_model(0.0, 1.0, beta)
h = build_map(model, resolution=200)
print(f"boundary residual {h.residual:.2e} in {h.build_seconds:.2f} s")

# orbits of interior points all head to the Denjoy-Wolff point
z = np.array([0.3 + 0.2j, -0.5j, -0.6 + 0.1j])
for t in (0.0, 1.0, 4.0, 16.0):
    print(f"t = {t:>4}:", np.round(disc_semigroup(h, z, t), 6))
print("Denjoy-Wolff point:", np.round(h.top_point, 6))

# the infinitesimal generator at the same points
print("generator:", np.round(generator_at(h, z), 6))

# a point on the jump, 0.4 below its top, stays on the circle for 0.4
tr = boundary_trajectory(h, BoundaryPoint.at(0.5, 0.6, "left"), t_max=1.0, dt=0.01)
print(f"left the circle at t = {tr.landing_time:.3f}")
