"""Regenerate exact_steady_reference.json with 200-digit arithmetic.

    python3 gen_exact_steady.py > exact_steady_reference.json
"""
import json
import mpmath as mp

mp.mp.dps = 200
DELTA, CHI2, GAMMA = mp.mpf(-12), mp.mpf("1.5"), mp.mpf("6.28")


def series(p, q, z):
    # plain term recurrence; terms decay factorially so 2000 terms is ample
    total, term, n = mp.mpc(0), mp.mpc(1), 0
    while True:
        total += term
        term *= z / ((p + n) * (q + n) * (n + 1))
        n += 1
        if n > 50 and abs(term) < mp.mpf(10) ** (-150) * abs(total):
            return total


def c(x):
    x = mp.mpc(x)
    return [float(x.real), float(x.imag)]


rows = []
for k in range(1, 81):
    e = mp.mpf(k) / 4
    p = DELTA / CHI2 + GAMMA / (2j * CHI2)
    q = DELTA / CHI2 - GAMMA / (2j * CHI2)
    z = 2 * (e / CHI2) ** 2
    f00 = series(p, q, z)
    f10 = series(p + 1, q, z)
    f11 = series(p + 1, q + 1, z)
    f22 = series(p + 2, q + 2, z)
    mean = (e / (1j * CHI2)) * f10 / (p * f00)
    n = (z / 2) * f11 / (p * q * f00)
    g2 = p * q * f00 * f22 / ((p + 1) * (q + 1) * f11 ** 2)
    rows.append({"drive": float(e), "f_pq": c(f00), "f_p1q": c(f10), "mean_field": c(mean), "photon_number": float(mp.re(n)), "g2": float(mp.re(g2))})

print(json.dumps({"delta": -12.0, "chi2": 1.5, "gamma": 6.28, "rows": rows}, indent=1))
