"""Central finite-difference oracles in Wirtinger form.

These only ever call the function they are given; they share no code with
the analytic formulas they are used to check.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

# d/dz = (d/dx - i d/dy) / 2,  d/dzbar = (d/dx + i d/dy) / 2


def _shift(z: np.ndarray, k: int, delta: complex) -> np.ndarray:
    out = np.array(z, dtype=complex)
    out[k] += delta
    return out


def wirtinger_hessian(f: Callable, z, h: float = 1e-4) -> np.ndarray:
    """Mixed Hessian ``d^2 f / dz^I dzbar^J`` of a real function of complex ``z``."""
    z = np.asarray(z, dtype=complex)
    m = len(z)
    f0 = f(z)
    steps = (h, 1j * h)

    # real Hessian in the (x_I, y_I) variables
    D = np.empty((m, 2, m, 2))
    for a in range(m):
        for s in range(2):
            plus = f(_shift(z, a, steps[s]))
            minus = f(_shift(z, a, -steps[s]))
            D[a, s, a, s] = (plus - 2 * f0 + minus) / h**2
    for a in range(m):
        for s in range(2):
            for b in range(m):
                for t in range(2):
                    if (b, t) <= (a, s):
                        continue
                    pp = f(_shift(_shift(z, a, steps[s]), b, steps[t]))
                    pm = f(_shift(_shift(z, a, steps[s]), b, -steps[t]))
                    mp = f(_shift(_shift(z, a, -steps[s]), b, steps[t]))
                    mm = f(_shift(_shift(z, a, -steps[s]), b, -steps[t]))
                    D[a, s, b, t] = D[b, t, a, s] = (pp - pm - mp + mm) / (4 * h**2)
    xx, yy = D[:, 0, :, 0], D[:, 1, :, 1]
    xy = D[:, 0, :, 1]
    yx = D[:, 1, :, 0]
    return 0.25 * (xx + yy + 1j * (xy - yx))


def holomorphic_derivative(f: Callable, z, k: int, h: float = 1e-5):
    """``d f / dz^k`` by central differences; ``f`` may be array valued."""
    z = np.asarray(z, dtype=complex)
    dx = (np.asarray(f(_shift(z, k, h))) - np.asarray(f(_shift(z, k, -h)))) / (2 * h)
    dy = (np.asarray(f(_shift(z, k, 1j * h))) - np.asarray(f(_shift(z, k, -1j * h)))) / (2 * h)
    return 0.5 * (dx - 1j * dy)


def antiholomorphic_derivative(f: Callable, z, k: int, h: float = 1e-4):
    """``d f / dzbar^k`` by central differences."""
    z = np.asarray(z, dtype=complex)
    dx = (np.asarray(f(_shift(z, k, h))) - np.asarray(f(_shift(z, k, -h)))) / (2 * h)
    dy = (np.asarray(f(_shift(z, k, 1j * h))) - np.asarray(f(_shift(z, k, -1j * h)))) / (2 * h)
    return 0.5 * (dx + 1j * dy)
