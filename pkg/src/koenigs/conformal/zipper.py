"""Geodesic zipper: conformal map of a polygonal Jordan domain onto the upper half-plane.

Boundary nodes P[0], P[1], ... run counterclockwise (domain on the left).  Each
step sends the next node to 0 along the hyperbolic geodesic through it and
opens the slit with z -> sqrt(z^2 + c^2).  Both directions are explicit
compositions of elementary maps, so no root-finding is involved.
"""
from __future__ import annotations

import numpy as np


def _g_fwd(z, c):
    # sqrt(z^2 + c^2) with the branch ~ z at infinity; the slit base 0 goes to -c
    zz = np.where(z == 0, 1.0, z)
    out = zz * np.sqrt(1.0 + (c / zz) ** 2)
    return np.where(z == 0, -c, out)


def _g_real(x, c):
    s = np.where(x > 0, 1.0, -1.0)
    return s * np.hypot(x, c)


def _mob_real(x, b):
    # x -> x/(1 - x/b) on the projective real line: b -> inf, inf -> -b
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x / (1 - x / b)
    out = np.where(x == b, np.inf, out)
    return np.where(np.isinf(x), -b, out)


def _g_inv(y, c):
    y = y.real + 1j * np.maximum(y.imag, 0.0)
    return np.sqrt(y - c) * np.sqrt(y + c)


class GeodesicZipper:
    """Map between the domain bounded by the closed polygon ``P`` and H."""

    def __init__(self, P):
        P = np.asarray(P, dtype=complex)
        if len(P) < 4:
            raise ValueError("need at least four boundary nodes")
        self.z0, self.z1 = P[0], P[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            Z = 1j * np.sqrt((P[2:] - self.z1) / (P[2:] - self.z0))
        if not np.all(np.isfinite(Z)):
            raise ValueError("repeated boundary node")
        n = len(Z)
        self.b = np.full(n, np.inf)
        self.c = np.zeros(n)
        pre = np.zeros(n + 1)        # images of P[1], P[2], ... once zipped
        zinf = np.inf                # image of P[0]
        for k in range(n):
            a = Z[k]
            if a.imag <= 0:
                raise ValueError(f"boundary node {k + 2} folds back over the zipped part")
            c = abs(a) ** 2 / a.imag
            rest = Z[k + 1:]
            p = pre[:k + 1]
            if a.real != 0:
                b = abs(a) ** 2 / a.real
                self.b[k] = b
                rest = rest / (1 - rest / b)
                p = _mob_real(p, b)
                zinf = float(_mob_real(np.array([zinf]), b)[0])
            self.c[k] = c
            Z[k + 1:] = _g_fwd(rest, c)
            pre[:k + 1] = _g_real(p, c)
            zinf = float(_g_real(np.array([zinf]), c)[0])
        self.zend = zinf
        p = _mob_real(pre, zinf)
        self.prevertices = np.concatenate([[np.inf], -p ** 2])   # P[k] -> prevertices[k] on R

    def forward(self, w):
        """Domain -> H."""
        w = np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = 1j * np.sqrt((w - self.z1) / (w - self.z0))
            for b, c in zip(self.b, self.c):
                if np.isfinite(b):
                    z = z / (1 - z / b)
                z = _g_fwd(z, c)
            z = z / (1 - z / self.zend)
            out = -z ** 2
        return np.where(w == self.z0, np.inf, out)

    def inverse(self, y, derivative: bool = False):
        """H -> domain; optionally also d/dy of the inverse."""
        y = np.asarray(y, dtype=complex)
        y = y.real + 1j * np.maximum(y.imag, 0.0)
        z = 1j * np.sqrt(y)
        d = -0.5 / z if derivative else None
        den = 1 + z / self.zend
        if derivative:
            d = d / den ** 2
        z = z / den
        for b, c in zip(self.b[::-1], self.c[::-1]):
            zn = _g_inv(z, c)
            if derivative:
                d = d * z / zn
            z = zn
            if np.isfinite(b):
                den = 1 + z / b
                if derivative:
                    d = d / den ** 2
                z = z / den
        u = -z ** 2
        w = (self.z1 - u * self.z0) / (1 - u)
        if derivative:
            d = d * (-2 * z) * (self.z1 - self.z0) / (1 - u) ** 2
            return w, d
        return w
