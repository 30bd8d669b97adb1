"""Independent reference values frozen into the C++ tests.

Uses exact integer arithmetic (math.comb, fractions) and scipy root finding,
sharing no code with the library. Run: python3 tests/oracles/oracles.py
"""
from fractions import Fraction
from math import comb, exp, lgamma, log

import numpy as np
from scipy.optimize import brentq, fsolve, minimize


def states(energies, cap, n):
    q = 1
    for e in energies:
        q = q * e.denominator // np.gcd(q, e.denominator)
    a = [int(e * q) for e in energies]
    limit = (q * cap * n).__floor__()
    out = []

    def rec(level, rem, acc, cur):
        if level == len(a) - 1:
            if acc + a[level] * rem <= limit:
                out.append(cur + [rem])
            return
        for k in range(rem, -1, -1):
            rec(level + 1, rem - k, acc + a[level] * k, cur + [k])

    rec(0, n, 0, [])
    return out


def pmf(energies, cap, n, degs):
    sts = states(energies, cap, n)
    w = [np.prod([comb(k + g - 1, k) for k, g in zip(s, degs)]) for s in sts]
    total = sum(w)
    return sts, [Fraction(int(x), int(total)) for x in w]


def mean_error(energies, cap, n, degs, xstar):
    sts, p = pmf(energies, cap, n, degs)
    mean = [sum(float(pi) * s[i] / n for s, pi in zip(sts, p)) for i in range(len(degs))]
    return max(abs(m - x) for m, x in zip(mean, xstar))


def main():
    e12 = [Fraction(1), Fraction(2)]
    print("m2 N6 E1.4 G(18,18) pmf:", [(s, float(p)) for s, p in zip(*pmf(e12, Fraction(7, 5), 6, [18, 18]))])
    print("m2 N32 c=1 proportional mean err:", mean_error(e12, Fraction(7, 5), 32, [16, 16], [0.6, 0.4]))
    print("ln 4!", log(24), "ln 10!", log(3628800), "ln 9!", log(362880))
    for lam in (10.0, 18.0, 19.0):
        approx = -lam + (lam - 0.5) * log(lam) + 0.5 * log(2 * np.pi) + log(1 + 1 / (12 * lam) + 1 / (288 * lam**2))
        print("stirling2 rel err at", lam, abs(approx - lgamma(lam)) / lgamma(lam), "abs", abs(approx - lgamma(lam)))

    # regime 2, m=3, c=2, e=(1,3/2,5/2), g=(.2,.3,.5), E=1.6
    g = np.array([0.2, 0.3, 0.5]); e = np.array([1, 1.5, 2.5]); c = 2.0
    f = lambda v: [np.sum(g * c / np.expm1(v[0] * e + v[1])) - 1, np.sum(e * g * c / np.expm1(v[0] * e + v[1])) - 1.6]
    lam, nu = fsolve(f, [0.5, 0.2], xtol=1e-14)
    print("regime2 m3:", lam, nu, g * c / np.expm1(lam * e + nu))

    # regime 3, m=3, g=1/3, e=(1,2,3), E=1.7
    g = np.ones(3) / 3; e = np.array([1.0, 2, 3])
    def energy(t):
        w = g / (e - 1 + t)
        return np.sum(w * e) / np.sum(w) - 1.7
    t = brentq(energy, 1e-12, 1e6, xtol=1e-15)
    lam = np.sum(g / (e - 1 + t))
    print("regime3 m3:", lam, lam * (t - 1), g / (lam * (e - 1 + t)))

    # regime 1, m=3, g=(.2,.3,.5), e=(0,1,3), E=1.0 via direct constrained maximization
    g = np.array([0.2, 0.3, 0.5]); e = np.array([0.0, 1, 3])
    s1 = lambda x: -np.sum(x * np.log(g / x) + x)
    cons = [{"type": "eq", "fun": lambda x: np.sum(x) - 1}, {"type": "ineq", "fun": lambda x: 1.0 - e @ x}]
    r = minimize(s1, g, constraints=cons, bounds=[(1e-9, 1)] * 3, method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
    print("regime1 m3:", r.x)


if __name__ == "__main__":
    main()
