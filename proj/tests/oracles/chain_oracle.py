"""Reference periodic eigenvalues for the cosine-envelope chain tests.

Envelope V(x) = 1 + cos(2 pi x / L), nu = 0.5, L = 1.  The chain trace is a
plain numpy product of transfer matrices; the continuum monodromy comes from
scipy's DOP853 at rtol 1e-13.  Close pairs are caught by maximizing
trace - 2 between scan points.
"""
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

L, NU = 1.0, 0.5
V = lambda x: 1 + np.cos(2 * np.pi * x / L)


def propagate(E, d):
    k = np.sqrt(E)
    return np.array([[np.cos(k * d), np.sin(k * d) / k], [-k * np.sin(k * d), np.cos(k * d)]])


def chain_trace(E, N):
    d = L / N
    m = np.eye(2)
    for n in range(1, N + 1):
        x = -L / 2 + (n - 0.5) * d
        m = propagate(E, d) @ np.array([[1.0, 0.0], [d * V(x) * (1 - E * NU ** 2), 1.0]]) @ m
    return np.trace(m)


def continuum_trace(E):
    def rhs(x, y):
        u = V(x) * (1 - E * NU ** 2) - E
        return [y[1], u * y[0], y[3], u * y[2]]
    s = solve_ivp(rhs, [-L / 2, L / 2], [1, 0, 0, 1], rtol=1e-13, atol=1e-14, method="DOP853")
    return s.y[0, -1] + s.y[3, -1]


def periodic_roots(trace, count, e_max=400.0, step=0.25):
    f = lambda E: trace(E) - 2
    es = np.arange(0.05, e_max, step)
    fs = [f(e) for e in es]
    out = []
    for i in range(len(es) - 1):
        if fs[i] * fs[i + 1] < 0:
            out.append(brentq(f, es[i], es[i + 1], xtol=1e-14))
        if 0 < i and fs[i] >= fs[i - 1] and fs[i] >= fs[i + 1] and fs[i] < 0:
            m = minimize_scalar(lambda e: -f(e), bounds=(es[i - 1], es[i + 1]), method="bounded",
                                options={"xatol": 1e-12})
            if -m.fun > 0:
                out.append(brentq(f, es[i - 1], m.x, xtol=1e-14))
                out.append(brentq(f, m.x, es[i + 1], xtol=1e-14))
        if len(out) >= count:
            break
    return sorted(out)[:count]


if __name__ == "__main__":
    np.set_printoptions(precision=15)
    print("chain N=64:", repr(periodic_roots(lambda E: chain_trace(E, 64), 5)))
    print("continuum:", repr(periodic_roots(continuum_trace, 5)))
