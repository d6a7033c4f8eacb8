"""Independent numerical oracles for the test suite.

Everything here is deliberately jet-free: Richardson-extrapolated central
finite differences and the classical index-gymnastics formulas, so the jet
engine and the tensor code are checked against arithmetic that shares no
code path with them.
"""

import numpy as np


def fd_partial(f, x, i, h=1e-3):
    """Richardson-extrapolated central difference df/dx_i at x."""
    x = np.asarray(x, dtype=float)

    def shift(s):
        z = x.copy()
        z[i] += s
        return f(z)

    return (8.0 * (shift(h) - shift(-h)) - (shift(2 * h) - shift(-2 * h))) / (12.0 * h)


def fd_gradient(f, x, h=1e-3):
    return np.array([fd_partial(f, x, i, h) for i in range(len(x))])


def fd_second(f, x, i, j, h=1e-3):
    """Mixed second partial via nested Richardson differences."""
    return fd_partial(lambda z: fd_partial(f, z, j, h), x, i, h)


def christoffel(metric, x, h=1e-4):
    """Levi-Civita Christoffel symbols of a metric callable g(x) -> (n, n)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    g = metric(x)
    dg = np.empty((n, n, n))  # dg[i, j, k] = d g_ij / dx^k
    for k in range(n):
        dg[:, :, k] = fd_partial(metric, x, k, h)
    ginv = np.linalg.inv(g)
    gamma = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for l in range(n):
                    acc += ginv[i, l] * (dg[l, j, k] + dg[l, k, j] - dg[j, k, l])
                gamma[i, j, k] = 0.5 * acc
    return gamma


def riemann_classical(metric, x, h=1e-3):
    """Classical curvature R^i_{j kl} = d_k Gamma^i_jl - d_l Gamma^i_jk
    + Gamma^i_ks Gamma^s_jl - Gamma^s_jk Gamma^i_ls, from finite differences."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    gamma = christoffel(metric, x)
    dgamma = np.empty((n, n, n, n))  # dgamma[i, j, l, k] = d Gamma^i_jl / dx^k
    for k in range(n):
        dgamma[:, :, :, k] = fd_partial(lambda z: christoffel(metric, z), x, k, h)
    R = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    acc = dgamma[i, j, l, k] - dgamma[i, j, k, l]
                    for s in range(n):
                        acc += (gamma[i, k, s] * gamma[s, j, l]
                                - gamma[s, j, k] * gamma[i, l, s])
                    R[i, j, k, l] = acc
    return R


def spray_riemann_fd(coeff, x, y, h=1e-4):
    """Two-index spray curvature from finite differences of the coefficients.

    coeff(x, y) -> array of n values.  Implements
    R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
            - dG^i/dy^j dG^j/dy^k
    entirely with difference quotients.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    z0 = np.concatenate([x, y])

    def f(z):
        return np.asarray(coeff(z[:n], z[n:]), dtype=float)

    G = f(z0)
    dG = np.empty((n, 2 * n))
    for a in range(2 * n):
        dG[:, a] = fd_partial(f, z0, a, h)
    d2 = np.empty((n, 2 * n, n))  # d2[:, a, k] = d2 G / dz_a dy_k
    for a in range(2 * n):
        for k in range(n):
            d2[:, a, k] = fd_second(f, z0, a, n + k, h)
    R = np.empty((n, n))
    for i in range(n):
        for k in range(n):
            acc = 2.0 * dG[i, k]
            for j in range(n):
                acc -= y[j] * d2[i, j, k]
                acc += 2.0 * G[j] * d2[i, n + j, k]
                acc -= dG[i, n + j] * dG[j, n + k]
            R[i, k] = acc
    return R


def leibniz_partial(f_jet, g_jet, alpha):
    """d^alpha (f g) by the general Leibniz rule over sub-multi-indices."""
    from itertools import product
    from math import comb
    ranges = [range(a + 1) for a in alpha]
    total = 0.0
    for beta in product(*ranges):
        coeff = 1.0
        for a, b in zip(alpha, beta):
            coeff *= comb(a, b)
        rest = tuple(a - b for a, b in zip(alpha, beta))
        total += coeff * f_jet.partial(beta) * g_jet.partial(rest)
    return total
