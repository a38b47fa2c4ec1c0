"""Independent high-precision oracles for the frozen values in the tests.

Run with ``python tests/oracles/compute_oracles.py``; needs mpmath.  Nothing
here imports the package.  The route is the spectral form of the
Mittag-Leffler function,

    E_b(-x^b) = int_0^inf exp(-r x) K_b(r) dr,
    K_b(r) = r^(b-1) sin(b pi) / (pi (r^(2b) + 2 r^b cos(b pi) + 1)),

which turns E exp(-s E_b(M(t))) into a one-dimensional integral against
the clock transform (mu / (mu + (r s^(1/b))^a))^(rho t).  Probabilities
follow by differentiating in s.
"""

import mpmath as mp

mp.mp.dps = 30


def K(r, b):
    return r ** (b - 1) * mp.sin(b * mp.pi) / (mp.pi * (r ** (2 * b) + 2 * r**b * mp.cos(b * mp.pi) + 1))


def clock_laplace(s, a, rho_t, mu):
    return (mu / (mu + s**a)) ** rho_t


def transform(s, a, b, rho_t, mu):
    """E exp(-s E_b(M(t)))."""
    if b == 1:
        return clock_laplace(s, a, rho_t, mu)
    c = s ** (1 / mp.mpf(b))
    return mp.quad(lambda r: K(r, b) * clock_laplace(r * c, a, rho_t, mu), [0, 1, mp.inf])


def gfnbp_pmf(n, a, b, rho_t, mu, lam):
    d = mp.diff(lambda s: transform(s, a, b, rho_t, mu), lam, n)
    return (-lam) ** n / mp.factorial(n) * d


def fpp_pmf(n, b, lam, t):
    f = lambda s: mp.quad(lambda r: K(r, b) * mp.exp(-r * s ** (1 / mp.mpf(b)) * t), [0, 1, mp.inf])
    return (-lam) ** n / mp.factorial(n) * mp.diff(f, lam, n)


def ml_levy_pdf_half(x, rho_t, mu):
    """Density of M(t) at alpha = 1/2 from M = G^2 S, S the Levy law with
    density x^(-3/2) exp(-1/(4x)) / (2 sqrt(pi))."""
    fs = lambda y: y ** mp.mpf(-1.5) * mp.exp(-1 / (4 * y)) / (2 * mp.sqrt(mp.pi))
    fg = lambda g: mu**rho_t * g ** (rho_t - 1) * mp.exp(-mu * g) / mp.gamma(rho_t)
    return mp.quad(lambda g: fg(g) * fs(x / g**2) / g**2, [0, 1, 5, mp.inf])


def ml_levy_moment(l, a, rho_t, mu):
    """E[M^l] = E[G^(l/a)] E[S_a^l] with E[S_a^l] = G(1 - l/a) / G(1 - l)."""
    r = l / a
    return mp.gamma(rho_t + r) / (mp.gamma(rho_t) * mu**r) * mp.gamma(1 - r) / mp.gamma(1 - l)


def main():
    print("ml_levy_pdf(1, 1) at alpha=0.5:", mp.nstr(ml_levy_pdf_half(1, 1, 1), 17))
    print("ml_levy_pdf(2.5, 1.7) at alpha=0.5, mu=2:", mp.nstr(ml_levy_pdf_half(mp.mpf("2.5"), mp.mpf("1.7"), 2), 17))
    print("ml_levy_moment(0.3, 1) at alpha=0.7:", mp.nstr(ml_levy_moment(mp.mpf("0.3"), mp.mpf("0.7"), 1, 1), 17))
    print("inc_beta(0.5, 1.5, 0.5):",
          mp.nstr(mp.quad(lambda x: x ** mp.mpf(-0.5) * (1 - x) ** mp.mpf(0.5), [0, 0.5]), 17))
    a, b = mp.mpf("0.9"), mp.mpf("0.5")
    print("gfnbp pmf (0.9, 0.5, 1, 1, 1), t=1:")
    for n in range(6):
        print(f"  n={n}: {mp.nstr(gfnbp_pmf(n, a, b, 1, 1, 1), 17)}")
    u = 1
    print("gfnbp laplace u=1:", mp.nstr(transform(1 - mp.exp(-u), a, b, 1, 1), 17))
    print("gfnbp pgf u=0.3 at (0.8, 0.6, 2, 1.5, 0.7), t=1.5:",
          mp.nstr(transform(mp.mpf("0.7") * (1 - mp.mpf("0.3")), mp.mpf("0.8"), mp.mpf("0.6"),
                            3, mp.mpf("1.5")), 17))
    print("fpp pmf beta=0.6, lam=1, t=1:")
    for n in range(4):
        print(f"  n={n}: {mp.nstr(fpp_pmf(n, mp.mpf('0.6'), 1, 1), 17)}")
    print("fpp pmf beta=0.9, lam=2, t=10, n=3:", mp.nstr(fpp_pmf(3, mp.mpf("0.9"), 2, 10), 17))


if __name__ == "__main__":
    main()
