"""Normalizing maps for elliptic semigroups with spiral rate lambda, Re lambda < 0.

Both maps send the orbit z -> e^{lambda t} z to the radial orbit z -> e^{-t} z.
"""
from __future__ import annotations

import numpy as np


def _check(lam: complex) -> tuple[float, float]:
    lam = complex(lam)
    if not lam.real < 0:
        raise ValueError(f"spiral rate needs a negative real part, got {lam}")
    return lam.real, lam.imag


def theta_lambda(lam: complex, z):
    """z |z|^{-(1+1/a)} exp(-i (b/a) ln|z|) with lambda = a + ib; 0 -> 0."""
    a, b = _check(lam)
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = z * r ** (-(1.0 + 1.0 / a)) * np.exp(-1j * (b / a) * np.log(r))
    out = np.where(r == 0, 0.0, out)
    return out if out.ndim else complex(out)


def elliptic_normalize(lam: complex, w):
    """rho e^{i theta} -> exp(-(1/a + i b/a) ln rho) e^{i theta}; 0 -> 0."""
    a, b = _check(lam)
    w = np.asarray(w, dtype=complex)
    rho = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(-(1.0 / a + 1j * b / a) * np.log(rho)) * np.exp(1j * np.angle(w))
    out = np.where(rho == 0, 0.0, out)
    return out if out.ndim else complex(out)


def elliptic_denormalize(lam: complex, z):
    """Inverse of :func:`elliptic_normalize`."""
    a, b = _check(lam)
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ln_rho = -a * np.log(r)            # |phi| = rho^{-1/a}
        out = np.exp(ln_rho + 1j * (np.angle(z) - b * np.log(r)))
    out = np.where(r == 0, 0.0, out)
    return out if out.ndim else complex(out)
