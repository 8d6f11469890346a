"""Numerical conformal maps and disc dynamics for Koenigs models."""
from .dynamics import (Cluster, Trajectory, boundary_trajectory, cluster_points, cluster_set,
                       composed_map, disc_semigroup, generator_at, locate)
from .riemann import (DEFAULT_RESOLUTION, ConvergenceError, RiemannMap, boundary_residual, build_map, strip_map_oracle,
                      strip_map_oracle_inverse)
from .zipper import GeodesicZipper

__all__ = ["DEFAULT_RESOLUTION", "ConvergenceError", "RiemannMap", "boundary_residual", "build_map", "strip_map_oracle",
           "strip_map_oracle_inverse", "GeodesicZipper", "disc_semigroup", "generator_at", "locate",
           "Trajectory", "boundary_trajectory", "Cluster", "cluster_points", "cluster_set",
           "composed_map"]
