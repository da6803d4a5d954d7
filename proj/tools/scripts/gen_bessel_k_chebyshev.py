#!/usr/bin/env python3
"""Generate piecewise Chebyshev coefficients for exp(x)*sqrt(x)*K_nu(x), x >= 2.

Each piece [a, b] is expanded in t, linear in u = 1/x, with t = -1 at x = b
and t = 1 at x = a. The first coefficient is doubled. Output is pasted into
core/src/specfun.cpp.
"""
import mpmath as mp

mp.mp.dps = 50
N = 64
PIECES = [(2, 5), (5, 25), (25, mp.inf)]
CUTOFF = 5e-18


def scaled(nu, x):
    if x == mp.inf:
        return mp.sqrt(mp.pi / 2)
    return mp.e**x * mp.sqrt(x) * mp.besselk(nu, x)


def coeffs(nu, a, b):
    ua = mp.mpf(0) if b == mp.inf else 1 / mp.mpf(b)
    ub = 1 / mp.mpf(a)
    nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / N) for k in range(N)]
    vals = []
    for t in nodes:
        u = (ua + ub) / 2 + (ub - ua) / 2 * t
        vals.append(scaled(nu, mp.inf if u == 0 else 1 / u))
    out = []
    for j in range(N):
        s = mp.fsum(vals[k] * mp.cos(mp.pi * j * (k + mp.mpf(1) / 2) / N) for k in range(N))
        out.append(2 * s / N)
    return ua, ub, out


def main():
    for nu in (0, 1):
        for a, b in PIECES:
            ua, ub, c = coeffs(nu, a, b)
            keep = max(j for j in range(N) if abs(c[j]) > CUTOFF) + 1
            print(f"// nu = {nu}, x in [{a}, {b}]: u in [{mp.nstr(ua, 17)}, {mp.nstr(ub, 17)}], "
                  f"{keep} terms, first dropped |c| = {mp.nstr(abs(c[keep]), 3)}")
            for j in range(keep):
                print(f"    {mp.nstr(c[j], 20, min_fixed=-1, max_fixed=-1)},")


if __name__ == "__main__":
    main()
