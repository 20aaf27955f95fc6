"""Independent oracles shared by the test modules.

Everything here deliberately avoids the jet engine: finite differences with
Richardson extrapolation for derivatives, cofactor expansion for
determinants.  These provide the second route of every dual-route check.
"""

from __future__ import annotations

import numpy as np


def cofactor_det(m: np.ndarray) -> complex:
    """Determinant by cofactor expansion along the first row."""
    m = np.asarray(m)
    n = m.shape[0]
    if n == 1:
        return complex(m[0, 0])
    out = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        out += (-1) ** j * complex(m[0, j]) * cofactor_det(minor)
    return out


def fd_derivative(f, x, indices, h: float) -> float:
    """Nested central differences for a mixed partial derivative."""
    if not indices:
        return f(x)
    i, rest = indices[0], indices[1:]
    xp = np.array(x, dtype=float)
    xm = np.array(x, dtype=float)
    xp[i] += h
    xm[i] -= h
    return (fd_derivative(f, xp, rest, h) - fd_derivative(f, xm, rest, h)) / (2.0 * h)


def fd_richardson(f, x, indices, h: float = 1e-3) -> float:
    """Richardson-extrapolated central differences (O(h^4))."""
    d1 = fd_derivative(f, x, indices, h)
    d2 = fd_derivative(f, x, indices, h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def _real_view(pot):
    """Potential as a function of interleaved real coordinates."""

    def f(xs):
        zs = [complex(xs[2 * i], xs[2 * i + 1]) for i in range(len(xs) // 2)]
        return pot.value(np.asarray(zs, dtype=np.complex128))

    return f


def metric_fd(pot, p, h: float = 1e-3) -> np.ndarray:
    """g_{i jbar} by finite differences of the potential."""
    n = pot.n_coords
    f = _real_view(pot)
    x0 = np.empty(2 * n)
    x0[0::2] = np.real(p)
    x0[1::2] = np.imag(p)
    g = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            xx = fd_richardson(f, x0, (2 * i, 2 * j), h)
            yy = fd_richardson(f, x0, (2 * i + 1, 2 * j + 1), h)
            xy = fd_richardson(f, x0, (2 * i, 2 * j + 1), h)
            yx = fd_richardson(f, x0, (2 * i + 1, 2 * j), h)
            g[i, j] = 0.25 * (xx + yy + 1j * (xy - yx))
    return g


def dg_fd(pot, p, h: float = 2e-3) -> np.ndarray:
    """dg[i, j, l] = d^3 Phi / dz_i dz_j dzbar_l by finite differences."""
    n = pot.n_coords
    f = _real_view(pot)
    x0 = np.empty(2 * n)
    x0[0::2] = np.real(p)
    x0[1::2] = np.imag(p)
    out = np.empty((n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                acc = 0.0 + 0.0j
                # expand (1/2)(dx - i dy) twice and (1/2)(dx + i dy) once
                for bi, ci in ((2 * i, 1.0), (2 * i + 1, -1j)):
                    for bj, cj in ((2 * j, 1.0), (2 * j + 1, -1j)):
                        for bl, cl in ((2 * l, 1.0), (2 * l + 1, 1j)):
                            acc += ci * cj * cl * fd_richardson(f, x0, (bi, bj, bl), h)
                out[i, j, l] = acc / 8.0
    return out


def christoffel_fd(pot, p, h: float = 2e-3) -> np.ndarray:
    """Christoffel tensor from finite-difference metric data."""
    g = metric_fd(pot, p)
    dg = dg_fd(pot, p, h)
    h_inv = np.conj(np.linalg.inv(g))
    return np.einsum("kl,ijl->kij", h_inv, dg)
