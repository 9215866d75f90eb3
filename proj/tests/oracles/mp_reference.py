"""Reference values for the C++ tests, computed at 50 significant digits.

The theta function comes from mpmath's Jacobi theta_1 and the determinants
from mpmath's own LU, so nothing here shares a code path with the library.
Inputs are rounded to doubles first, so the values are exact for what the
C++ side evaluates. Rerun with `python3 tests/oracles/mp_reference.py` and
paste the printed constants into tests/reference_values.hpp.
"""
import itertools

import mpmath as mp

mp.mp.dps = 50


def exact(v):
    # The value the C++ side actually sees: each part rounded to a double.
    v = mp.mpc(v)
    return mp.mpc(float(v.real), float(v.imag))


def br(u, q):
    # [u] = i q^(-1/4) theta_1(pi u; q)
    return 1j * mp.power(q, mp.mpf(-1) / 4) * mp.jtheta(1, mp.pi * u, q)


def build_x(z, w, h, q):
    n = len(z)
    m = mp.matrix(n, n)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            zk = z[k - 1]
            a = br(h + mp.mpf(j - n) / 2 + zk + w[j - 1], q)
            b = br(h + mp.mpf(j - n) / 2 - zk + w[j - 1], q)
            for l in range(1, j):
                a *= br(w[l - 1] + zk + mp.mpf(1) / 2, q)
                b *= br(w[l - 1] - zk + mp.mpf(1) / 2, q)
            for l in range(j + 1, n + 1):
                a *= br(w[l - 1] + zk, q)
                b *= br(w[l - 1] - zk, q)
            for l in range(1, n + 1):
                a *= br(w[l - 1] - zk, q)
                b *= br(w[l - 1] + zk, q)
            m[j - 1, k - 1] = a - b
    return m


def build_y(z, w, h, q):
    n = len(z)
    m = mp.matrix(n, n)
    s = mp.mpf(n - 1) / 2
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            wk = w[k - 1]
            a = br(h + s + wk + z[j - 1], q)
            b = br(-h - s - wk + z[j - 1], q)
            for l in range(1, n + 1):
                if l != j:
                    a *= br(z[l - 1] + wk, q)
                    b *= br(z[l - 1] - wk, q)
                a *= br(z[l - 1] - wk, q)
                b *= br(z[l - 1] + wk, q)
            m[j - 1, k - 1] = a - b
    return m


def prefactor(w, h, q):
    n = len(w)
    num = br(h, q)
    den = br(h - mp.mpf(n) / 2, q)
    for j in range(1, n + 1):
        num *= br(h - mp.mpf(j) / 2 + 1, q)
        den *= br(h + mp.mpf(n + 1) / 2 - j, q)
    out = num / den
    for j, k in itertools.combinations(range(n), 2):
        out *= br(w[k] - w[j] + mp.mpf(1) / 2, q) / br(w[k] - w[j], q)
    return out


def z_part(z, q):
    out = mp.mpc(1)
    for j, k in itertools.combinations(range(len(z)), 2):
        out *= br(z[j] - z[k] + mp.mpf(1) / 2, q) / br(z[j] - z[k], q)
    return out


def split(x):
    # Double-double pair: hi is the nearest double, lo the rounded remainder.
    hi = float(x)
    return hi, float(x - mp.mpf(hi))


def emit(name, value):
    c = mp.mpc(value)
    parts = split(c.real) + split(c.imag)
    print("inline constexpr Exact %s{%s};" % (name, ", ".join(repr(p) for p in parts)))


def sample(label, z, w, h, q):
    z = [exact(v) for v in z]
    w = [exact(v) for v in w]
    h = exact(h)
    q = exact(q).real
    q = mp.mpf(q)
    dx = mp.det(build_x(z, w, h, q))
    dy = mp.det(build_y(z, w, h, q))
    pf = prefactor(w, h, q)
    zp = z_part(z, q)
    emit(label + "_det_x", dx)
    emit(label + "_det_y", dy)
    emit(label + "_prefactor", pf)
    emit(label + "_lhs", zp * dx)
    emit(label + "_rhs", zp * pf * dy)


if __name__ == "__main__":
    emit("kTheta_u0p25_q0p5", br(exact("0.25"), exact("0.5").real))
    emit("kTheta_u0p17_0p05i_q0p6", br(exact(mp.mpc("0.17", "0.05")), exact("0.6").real))
    emit("kTheta_u0p3_0p1i_q0p5", br(exact(mp.mpc("0.3", "0.1")), exact("0.5").real))
    emit("kTheta_um1p3_0p1i_q0p8", br(exact(mp.mpc("-1.3", "0.1")), exact("0.8").real))
    emit("kTheta_u2p7_0p5i_q0p05", br(exact(mp.mpc("2.7", "0.5")), exact("0.05").real))
    sample("kN2", ["0.21", "-0.13"], [mp.mpc("0.08", "0.02"), "0.33"], "0.4", "0.5")
    sample("kN3", [mp.mpc("0.12", "0.03"), mp.mpc("-0.31", "0.01"), mp.mpc("0.27", "0.06")],
           [mp.mpc("0.05", "0.02"), mp.mpc("-0.22", "0.04"), mp.mpc("0.36", "0.01")],
           mp.mpc("0.17", "0.03"), "0.3")
