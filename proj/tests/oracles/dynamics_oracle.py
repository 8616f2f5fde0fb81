"""Reference capture probabilities on the infinite line.

p(t) = nu^4/pi^2 |int_0^inf exp(-i t k^2) / (1 + alpha(k)^2) dk|^2 evaluated
on the real k axis in 30-digit arithmetic: Gauss-Legendre panels between
consecutive zeros of the phase, k_n = sqrt(2 pi n / t), up to n = 4000,
and three integration-by-parts terms (in u = k^2) for the remainder.
Independent of the rotated-ray scheme used by the library.

mpmath.quadosc was tried first and found to lose accuracy for t >~ 1
(relative error 7e-6 at t = 10, 6e-4 at t = 100).
"""
import mpmath as mp

mp.mp.dps = 30


def spectral_weight(c, nu, k):
    a = c / (2 * k) - k * nu * nu / 2
    return 1 / (1 + a * a)


def p_inf(c, nu, t, zeros=4000):
    t = mp.mpf(t)
    pts = [mp.mpf(0)] + [mp.sqrt(2 * mp.pi * j / t) for j in range(1, zeros + 1)]
    f = lambda k: spectral_weight(c, nu, k) * mp.exp(-1j * t * k * k)
    body = mp.mpf(0)
    for a, b in zip(pts[:-1], pts[1:]):
        body += mp.quad(f, [a, (a + b) / 2, b])
    g = lambda u: spectral_weight(c, nu, mp.sqrt(u)) / (2 * mp.sqrt(u))
    U, it = pts[-1] ** 2, 1j * t
    tail = mp.exp(-it * U) * (g(U) / it + mp.diff(g, U) / it ** 2 + mp.diff(g, U, 2) / it ** 3)
    return nu ** 4 / mp.pi ** 2 * abs(body + tail) ** 2


if __name__ == "__main__":
    print("int dk/(1+alpha^2), c=1 nu=1:", mp.nstr(mp.quad(lambda k: spectral_weight(1, 1, k), [0, 1, mp.inf]), 20),
          "pi/nu^2 =", mp.nstr(mp.pi, 20))
    for t in ["0.001", "0.01", "0.05", "0.2", "1", "10", "100"]:
        print("c=1 nu=1 t=%s p=%s" % (t, mp.nstr(p_inf(1, 1, t), 16)))
    for t in ["0.05", "3"]:
        print("c=3 nu=1 t=%s p=%s" % (t, mp.nstr(p_inf(3, 1, t), 16)))
        print("c=0 nu=1.5 t=%s p=%s" % (t, mp.nstr(p_inf(0, 1.5, t), 16)))
