"""Closed-form charts taking the ambient domain Omega of a model into the unit disc.

Each chart sends the top prime end (Im w -> +inf) to ``top`` on the unit circle,
so truncating Q far up only costs a tiny neighbourhood of one boundary point.
"""
from __future__ import annotations

import numpy as np


class StripChart:
    """{a < Re w < b} -> D, w -> tanh(-i pi (u - 1/2)/2), u = (w - i y0 - a)/(b - a)."""

    top = 1.0 + 0j

    def __init__(self, a: float, b: float, y0: float = 0.0):
        self.a, self.b, self.y0 = float(a), float(b), float(y0)

    def fwd(self, w):
        u = (np.asarray(w, dtype=complex) - 1j * self.y0 - self.a) / (self.b - self.a)
        return np.tanh(-1j * np.pi * (u - 0.5) / 2)

    def inv(self, z, derivative=False):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 0.5 + (2j / np.pi) * np.arctanh(z)
            w = self.a + (self.b - self.a) * u + 1j * self.y0
            if derivative:
                return w, (self.b - self.a) * (2j / np.pi) / (1 - z * z)
        return w


class HalfPlaneChart:
    """{Re w > a} or {Re w < a} -> D by the Moebius map fixing w_ref -> 0, infinity -> 1."""

    top = 1.0 + 0j

    def __init__(self, a: float, w_ref: complex):
        self.A = complex(w_ref)
        self.B = 2 * a - np.conj(self.A)      # mirror image of w_ref across Re w = a

    def fwd(self, w):
        w = np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(np.isinf(w), 1.0 + 0j, (w - self.A) / (w - self.B))

    def inv(self, z, derivative=False):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = (self.A - z * self.B) / (1 - z)
            if derivative:
                return w, (self.A - self.B) / (1 - z) ** 2
        return w


class PlaneChart:
    """C minus the downward ray from p -> D: s = sqrt(-i (w - p)), then a Moebius map."""

    top = 1.0 + 0j

    def __init__(self, p: complex, w_ref: complex):
        self.p = complex(p)
        self.sr = complex(np.sqrt(-1j * (w_ref - self.p)))

    def fwd(self, w):
        w = np.asarray(w, dtype=complex)
        s = np.sqrt(-1j * (w - self.p))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(np.isinf(w), 1.0 + 0j, (s - self.sr) / (s + np.conj(self.sr)))

    def inv(self, z, derivative=False):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (self.sr + z * np.conj(self.sr)) / (1 - z)
            w = self.p + 1j * s * s
            if derivative:
                ds = (self.sr + np.conj(self.sr)) / (1 - z) ** 2
                return w, 2j * s * ds
        return w


class ScaleChart:
    """w -> w / R for bounded starlike domains; no distinguished top point."""

    top = None

    def __init__(self, R: float):
        self.R = float(R)

    def fwd(self, w):
        return np.asarray(w, dtype=complex) / self.R

    def inv(self, z, derivative=False):
        w = np.asarray(z, dtype=complex) * self.R
        if derivative:
            return w, np.full(w.shape, self.R, dtype=complex)
        return w
