"""Regenerate the frozen oracle fixtures under crates/pqbc/tests/data/.

Every value here is computed independently of the Rust code: bounds with
mpmath at 50 significant digits, field arithmetic with sympy's irreducibility
test and extended Euclid, Clopper-Pearson limits by root-finding on the
regularized incomplete beta function.

    python3 tools/gen_fixtures.py
"""

import random
from pathlib import Path

import mpmath as mp
from sympy import GF, Poly, symbols

mp.mp.dps = 50
OUT = Path(__file__).resolve().parent.parent / "crates" / "pqbc" / "tests" / "data"
X = symbols("x")


def p2(e):
    return mp.power(2, e)


def fx_pq(m, n, qc, qq, **_):
    if qc == 2**n:
        return qq**2 / p2(m)
    return 4 * qc * mp.sqrt(qq) / mp.sqrt(p2(m) * (p2(n) - qc + 1)) + 2 * qq * mp.sqrt(qc) / mp.sqrt(p2(m + n))


def lrw_hybrid(m, n, qc, qq, **_):
    return 6 * qc**2 / p2(n) + 4 * (qc * mp.sqrt(qq) + qq * mp.sqrt(qc)) / p2(mp.mpf(m + n) / 2)


def lrw_general(m, n, qc, qq, **_):
    return qq**2 / p2(m) + qc**2 / p2(n)


def xex2_pq(m, n, qc, qq, **_):
    return 2 * qq**2 / p2(m) + qc**2 / (p2(n) - 1)


def xex2_table(m, n, qc, qq, **_):
    return qq**2 / p2(m) + 3 * qc**2 / p2(n)


def cbc(m, n, qc, qq, ell, **_):
    return qq**2 * ell**2 / p2(m) + qc**2 * ell**2 / p2(n)


def ecbc(m, n, qc, qq, ell, **_):
    return 2 * qq**2 * ell**2 / p2(m) + 4 * qc**2 * ell**2 / p2(n)


def cmac(m, n, qc, qq, ell, **_):
    return (qq * ell + 1) ** 2 / p2(m) + 5 * (ell**2 + 1) * qc**2 / p2(n)


def gcm(m, n, qc, qq, ell, sigma, qd, s):
    return (
        qq**2 * ell**2 / p2(m)
        + (sigma + qc + qd + 1) ** 2 / p2(n + 1)
        + (sigma + qc + qd) / p2(n - 1)
        + qd * (ell + 1) / p2(s)
    )


def gcm_sst(m, n, qc, qq, ell, sigma, qd, s):
    return qq**2 * ell**2 / p2(m) + (sigma + 3 * (qc + qd)) ** 2 / p2(n + 1) + qd * ell / p2(n) + qd / p2(s)


FORMULAS = {
    "fx": fx_pq,
    "lrw-hybrid": lrw_hybrid,
    "lrw-general": lrw_general,
    "xex2": xex2_pq,
    "xex2-table": xex2_table,
    "mode-cbc": cbc,
    "mode-ecbc": ecbc,
    "mode-cmac": cmac,
    "mode-gcm": gcm,
    "mode-gcm-sst": gcm_sst,
    "mode-lrw": lrw_general,
    "mode-xex2": xex2_table,
}


def bounds():
    grid = [(8, 8), (12, 12), (16, 16), (24, 16), (64, 32), (128, 128)]
    counts = [0, 1, 4, 16, 2**10, 2**20]
    rows = []
    for name, f in FORMULAS.items():
        for m, n in grid:
            for qc in counts:
                for qq in counts:
                    if name == "fx" and qc > 2**n:
                        continue
                    ell, sigma, qd, s = 4, 8 * max(qc, 1), 2, 8
                    v = f(m, n, mp.mpf(qc), mp.mpf(qq), ell=ell, sigma=sigma, qd=qd, s=s)
                    rows.append(f"{name}\t{m}\t{n}\t{qc}\t{qq}\t{ell}\t{sigma}\t{qd}\t{s}\t{mp.nstr(v, 25)}")
    # The full-codebook edge of FX at a width where 2^n is exact.
    for m, n, qq in [(12, 12, 16), (8, 8, 1), (16, 10, 2**6)]:
        v = fx_pq(m, n, 2**n, mp.mpf(qq))
        rows.append(f"fx\t{m}\t{n}\t{2**n}\t{qq}\t4\t{8 * 2**n}\t2\t8\t{mp.nstr(v, 25)}")
    for n, q, eps in [(8, 64, mp.mpf(2) ** -24), (16, 2**10, mp.mpf(2) ** -40), (8, 8, 1)]:
        rows.append(f"resampling\t0\t{n}\t{q}\t0\t-\t-\t-\t{mp.nstr(eps, 25)}\t{mp.nstr(4 * mp.sqrt(p2(n) * q * eps), 25)}")
    for q, eps in [(16, mp.mpf(2) ** -12), (2**10, mp.mpf(2) ** -30), (0, 1)]:
        rows.append(f"reprogramming\t0\t0\t{q}\t0\t-\t-\t-\t{mp.nstr(eps, 25)}\t{mp.nstr(2 * q * mp.sqrt(eps), 25)}")
    header = "# formula\tm\tn\tq_c\tq_q\tell\tsigma\tq_c_dec\ts_or_eps\tvalue"
    (OUT / "bounds.tsv").write_text(header + "\n" + "\n".join(rows) + "\n")


def least_irreducible(n):
    for low in range(1, 2**n, 2):
        poly = (1 << n) | low
        coeffs = [(poly >> i) & 1 for i in range(n, -1, -1)]
        if Poly(coeffs, X, domain=GF(2)).is_irreducible:
            return poly
    raise ValueError(n)


def canonical(n):
    return {3: 0b1011, 4: 0x13, 8: 0x11B}.get(n) or least_irreducible(n)


def clmul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def reduce(p, mod):
    d = mod.bit_length() - 1
    while p.bit_length() - 1 >= d:
        p ^= mod << (p.bit_length() - 1 - d)
    return p


def pdivmod(a, b):
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def inverse(a, mod):
    r0, r1, s0, s1 = mod, a, 0, 1
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 ^ clmul(q, s1)
    assert r0 == 1
    return reduce(s0, mod)


def power(a, j, mod):
    acc = 1
    for bit in bin(j)[2:]:
        acc = reduce(clmul(acc, acc), mod)
        if bit == "1":
            acc = reduce(clmul(acc, a), mod)
    return acc


def gf2n():
    rng = random.Random(20241015)
    rows = []
    for n in [2, 3, 4, 5, 8, 12, 16, 20, 24, 32, 48, 63, 64]:
        mod = canonical(n)
        samples = [(1, 1), (2, 2 ** (n - 1)), (2**n - 1, 2**n - 1)]
        samples += [(rng.randrange(1, 2**n), rng.randrange(0, 2**n)) for _ in range(12)]
        for a, b in samples:
            j = rng.randrange(0, 2**20)
            rows.append(
                f"{n}\t{mod:#x}\t{a:#x}\t{b:#x}\t{reduce(clmul(a, b), mod):#x}\t{inverse(a, mod):#x}\t{j}\t{power(a, j, mod):#x}"
            )
    header = "# n\tmodulus\ta\tb\ta*b\ta^-1\tj\ta^j"
    (OUT / "gf2n.tsv").write_text(header + "\n" + "\n".join(rows) + "\n")


def clopper_pearson(k, n, conf):
    alpha = 1 - mp.mpf(conf)

    def quantile(p, a, b):
        if p <= 0:
            return mp.mpf(0)
        if p >= 1:
            return mp.mpf(1)
        lo, hi = mp.mpf(0), mp.mpf(1)
        for _ in range(200):
            mid = (lo + hi) / 2
            if mp.betainc(a, b, 0, mid, regularized=True) < p:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    lo = mp.mpf(0) if k == 0 else quantile(alpha / 2, k, n - k + 1)
    hi = mp.mpf(1) if k == n else quantile(1 - alpha / 2, k + 1, n - k)
    return lo, hi


def stats():
    rows = []
    for k, n, conf in [(0, 100, 0.99), (1, 100, 0.99), (50, 100, 0.99), (99, 100, 0.99), (100, 100, 0.99),
                       (3, 1000, 0.995), (500, 1000, 0.995), (17, 200, 0.995), (0, 10000, 0.995), (161, 10000, 0.995)]:
        lo, hi = clopper_pearson(k, n, conf)
        rows.append(f"cp\t{k}\t{n}\t{conf}\t{mp.nstr(lo, 20)}\t{mp.nstr(hi, 20)}")
    for w in [2, 4, 6, 8, 10, 12, 16]:
        theta = mp.asin(mp.power(2, -mp.mpf(w) / 2))
        for t in [0, 1, 2, 3, int(mp.floor(mp.pi / 4 * mp.power(2, mp.mpf(w) / 2)))]:
            rows.append(f"grover\t{w}\t{t}\t-\t{mp.nstr(mp.sin((2 * t + 1) * theta) ** 2, 20)}\t-")
    header = "# kind\tk_or_w\tn_or_t\tconfidence\tlow_or_p\thigh"
    (OUT / "stats.tsv").write_text(header + "\n" + "\n".join(rows) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    bounds()
    gf2n()
    stats()
