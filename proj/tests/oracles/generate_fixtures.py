#!/usr/bin/env python3
"""Independent oracles for the frozen test fixtures.

Every value written to tests/fixtures/oracle_fixtures.json is produced here
with mpmath at 50 significant digits, through routes that share no code with
the C++ library:

  * spherical Bessel values by power-series summation with exact rational
    coefficients, or by high-precision recurrences checked against mpmath's
    half-integer Bessel functions;
  * Dirichlet-to-Neumann entries for piecewise-constant radial potentials by
    transfer matrices of closed-form shell solutions;
  * scattered fields of a point source by the addition theorem combined with
    the transfer-matrix scattering coefficients.

Each entry records the oracle used so the C++ tests can report provenance.

Usage: python3 tests/oracles/generate_fixtures.py > tests/fixtures/oracle_fixtures.json
"""

import json
import sys
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 50


def sph_j(l, x):
    x = mp.mpf(x)
    return mp.sqrt(mp.pi / (2 * x)) * mp.besselj(l + mp.mpf(1) / 2, x)


def sph_y(l, x):
    x = mp.mpf(x)
    return mp.sqrt(mp.pi / (2 * x)) * mp.bessely(l + mp.mpf(1) / 2, x)


def sph_jp(l, x):
    # d/dx j_l = j_{l-1} - (l+1)/x j_l, and j_0' = -j_1
    if l == 0:
        return -sph_j(1, x)
    return sph_j(l - 1, x) - (l + 1) / mp.mpf(x) * sph_j(l, x)


def sph_yp(l, x):
    if l == 0:
        return -sph_y(1, x)
    return sph_y(l - 1, x) - (l + 1) / mp.mpf(x) * sph_y(l, x)


def sph_h(l, x):
    return sph_j(l, x) + 1j * sph_y(l, x)


def sph_hp(l, x):
    return sph_jp(l, x) + 1j * sph_yp(l, x)


def series_j(l, x, terms=40):
    """j_l(x) = x^l * sum_p (-x^2/2)^p / (p! (2l+2p+1)!!), exact rational coefficients."""
    coeff = Fraction(1, 1)
    for i in range(1, 2 * l + 2, 2):
        coeff /= i
    total = mp.mpf(0)
    x = mp.mpf(x)
    for p in range(terms):
        total += mp.mpf(coeff.numerator) / coeff.denominator * x ** (2 * p)
        # ratio of consecutive coefficients: -1 / (2 (p+1) (2l + 2p + 3))
        coeff *= Fraction(-1, 2 * (p + 1) * (2 * l + 2 * p + 3))
    return x**l * total


def downward_j(l, x, start=80):
    """Miller downward recurrence normalised against j_0 = sin x / x."""
    x = mp.mpf(x)
    f_next, f = mp.mpf(0), mp.mpf("1e-30")
    values = {}
    for n in range(start, -1, -1):
        values[n] = f
        f_prev = (2 * n + 1) / x * f - f_next
        f_next, f = f, f_prev
    scale = (mp.sin(x) / x) / values[0]
    return values[l] * scale


def upward_y(l, x):
    x = mp.mpf(x)
    y0 = -mp.cos(x) / x
    y1 = -mp.cos(x) / x**2 - mp.sin(x) / x
    if l == 0:
        return y0
    for n in range(1, l):
        y0, y1 = y1, (2 * n + 1) / x * y1 - y0
    return y1


def transfer_dtn(l, k, a, shells):
    """w'(a)/w(a) for a piecewise-constant potential, shells = [(r_outer, n), ...]."""
    k = mp.mpf(k)
    r0, n0 = shells[0]
    q = k * mp.sqrt(n0)
    val = sph_j(l, q * r0)
    der = q * sph_jp(l, q * r0)
    regions = list(shells[1:]) + [(a, 1)]
    r_in = mp.mpf(r0)
    for r_out, n in regions:
        q = k * mp.sqrt(n)
        # Cramer's rule with the Wronskian j y' - j' y = 1/x^2
        x = q * r_in
        A = (val * q * sph_yp(l, x) - der * sph_y(l, x)) * x**2 / q
        B = (der * sph_j(l, x) - val * q * sph_jp(l, x)) * x**2 / q
        r_out = mp.mpf(r_out)
        val = A * sph_j(l, q * r_out) + B * sph_y(l, q * r_out)
        der = q * (A * sph_jp(l, q * r_out) + B * sph_yp(l, q * r_out))
        r_in = r_out
    return der / val


def scattering_ratio(l, k, a, fn):
    """d/c for u_inc = c j_l(kr) Y, u_sc = d h_l(kr) Y matched at r=a with w'/w = fn."""
    x = k * mp.mpf(a)
    return (fn * sph_j(l, x) - k * sph_jp(l, x)) / (k * sph_hp(l, x) - fn * sph_h(l, x))


def point_source_scattered(x, y0, k, a, shells, lmax):
    """u_sc(x) for u_inc = exp(-ik|x-y0|)/|x-y0| via addition theorem + transfer matrices."""
    rx = mp.sqrt(sum(mp.mpf(v) ** 2 for v in x))
    ry = mp.sqrt(sum(mp.mpf(v) ** 2 for v in y0))
    cosg = sum(mp.mpf(u) * mp.mpf(v) for u, v in zip(x, y0)) / (rx * ry)
    total = mp.mpc(0)
    for l in range(lmax + 1):
        fn = transfer_dtn(l, k, a, shells)
        t = scattering_ratio(l, k, a, fn)
        total += -1j * k * (2 * l + 1) * t * mp.conj(sph_h(l, k * ry)) * sph_h(l, k * rx) * mp.legendre(l, cosg)
    return total


def num(v):
    return float(mp.nstr(v, 20))


def cnum(v):
    v = mp.mpc(v)
    return [num(v.real), num(v.imag)]


def main():
    fixtures = {}

    fixtures["specfun.j2_at_1"] = {
        "oracle": "power series, 40 terms, exact rational coefficients (fractions) evaluated at 50 digits",
        "l": 2, "x": 1.0,
        "value": num(series_j(2, 1.0)),
        "crosscheck_mpmath_besselj": num(sph_j(2, 1.0)),
    }

    j3 = downward_j(3, 4.0)
    y3 = upward_y(3, 4.0)
    assert abs(j3 - sph_j(3, 4.0)) < mp.mpf("1e-40")
    assert abs(y3 - sph_y(3, 4.0)) < mp.mpf("1e-40")
    fixtures["specfun.h3_at_4"] = {
        "oracle": "Miller downward recurrence for j (start 80, normalised to sin x/x) and upward recurrence for y, 50 digits; cross-checked with mpmath half-integer besselj/bessely",
        "l": 3, "x": 4.0,
        "j": num(j3), "y": num(y3),
        "dj": num(sph_jp(3, 4.0)), "dy": num(sph_yp(3, 4.0)),
    }

    samples = []
    for (l, m, th, ph) in [(1, 1, 0.7, 1.3), (2, -1, 1.1, -0.4), (3, 2, 2.5, 2.9), (5, -3, 0.3, 0.8), (8, 5, 1.9, 4.0)]:
        samples.append({"l": l, "m": m, "theta": th, "phi": ph, "value": cnum(mp.spherharm(l, m, th, ph))})
    fixtures["specfun.ylm_samples"] = {
        "oracle": "mpmath.spherharm (orthonormal, Condon-Shortley phase), 50 digits",
        "samples": samples,
    }

    k, a = 2, 1
    fixtures["dtn.free_and_exterior_l0"] = {
        "oracle": "closed forms from j_0 = sin x/x and h_0 = -i e^{ix}/x",
        "k": 2.0, "a": 1.0,
        "f0": num(k * mp.cot(k * a) - mp.mpf(1) / a),
        "fout": cnum(1j * k - mp.mpf(1) / a),
    }

    single = [(mp.mpf("0.5"), mp.mpf("1.5"))]
    fixtures["dtn.single_shell"] = {
        "oracle": "transfer matrix: j_l(k sqrt(n1) r) matched to A j_l(kr) + B y_l(kr) at r1, mpmath 50 digits",
        "k": 2.0, "a": 1.0, "breakpoints": [0.5], "values": [1.5],
        "fn": [num(transfer_dtn(l, 2, 1, single)) for l in range(11)],
    }

    two = [(mp.mpf("0.4"), mp.mpf("1.5")), (mp.mpf("0.7"), mp.mpf("0.8"))]
    fn_two = [transfer_dtn(l, 2, 1, two) for l in range(41)]
    f0_two = [k * sph_jp(l, k * a) / sph_j(l, k * a) for l in range(41)]
    fixtures["dtn.default_two_shell"] = {
        "oracle": "transfer matrix across shells [0,0.4):1.5, [0.4,0.7):0.8, [0.7,1]:1, mpmath 50 digits",
        "k": 2.0, "a": 1.0, "breakpoints": [0.4, 0.7], "values": [1.5, 0.8],
        "fn": [num(v) for v in fn_two],
        "fn_minus_f0": [num(v - w) for v, w in zip(fn_two, f0_two)],
    }

    y0 = ["3.2", "0.3", "-0.4"]
    points = [["2.7", "0.2", "0.1"], ["3.1", "-0.35", "0.25"], ["-0.5", "2.9", "0.4"], ["0.0", "0.0", "3.3"]]
    vals = []
    for p in points:
        vals.append({"x": [float(v) for v in p], "value": cnum(point_source_scattered(p, y0, 2, 1, single, 45))})
    fixtures["forward.single_shell_point_source"] = {
        "oracle": "addition theorem (l <= 45) with transfer-matrix scattering ratios, incoming kernel exp(-ik|x-y|)/|x-y|, mpmath 50 digits",
        "k": 2.0, "a": 1.0, "breakpoints": [0.5], "values": [1.5],
        "source": [float(v) for v in y0],
        "points": vals,
    }

    json.dump({"generator": "tests/oracles/generate_fixtures.py", "precision_digits": 50, "fixtures": fixtures},
              sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
