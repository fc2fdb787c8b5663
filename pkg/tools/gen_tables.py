"""Regenerate the polynomial coefficient tables shipped in src/oblivfp/data/.

Sine and cosine use weighted minimax fits (Remez exchange at 80 digits) in
the variable w = x^2 on [0, 1], where the argument in degrees is 90 x:

    cos(90 x deg) ~ P(x^2)          sin(90 x deg) ~ x P(x^2)

Arctangent uses the polynomials h_m with
t^(4m) (1-t)^(4m) - (-4)^m = (1 + t^2) Q_m(t) and
h_m(x) = -(-4)^(-m) * integral_0^x Q_m, whose error on [0, 1] is below 4^(-5m).

Usage:  python tools/gen_tables.py [output.json]
"""

import json
import math
import sys
from pathlib import Path

import mpmath as mp
import sympy as sp

mp.mp.dps = 80
TRIG_DEGREES = {16: 3, 32: 5, 64: 9}


def remez(f, weight, n, iters=40, grid=6000):
    """Coefficients c[0..n] minimizing max |weight(w) (P(w) - f(w))| on [0, 1]."""
    npts = n + 2
    xs = [mp.mpf(1) / 2 - mp.cos(mp.pi * i / (npts - 1)) / 2 for i in range(npts)]
    pts = [mp.mpf(i) / grid for i in range(grid + 1)]
    fv = [f(x) for x in pts]
    wv = [weight(x) for x in pts]
    best = None
    for _ in range(iters):
        A = mp.matrix(npts, npts)
        rhs = mp.matrix(npts, 1)
        for i, x in enumerate(xs):
            for j in range(n + 1):
                A[i, j] = x ** j
            A[i, n + 1] = (-1) ** i / weight(x)
            rhs[i] = f(x)
        sol = mp.lu_solve(A, rhs)
        c = [sol[j] for j in range(n + 1)]
        errs = [w * (mp.polyval(c[::-1], x) - y) for x, y, w in zip(pts, fv, wv)]
        mx = max(abs(e) for e in errs)
        if best is None or mx < best[1]:
            best = (c, mx)
        # new reference: alternating extrema of the error curve
        ext = [0] + [i for i in range(1, grid) if (errs[i] - errs[i - 1]) * (errs[i + 1] - errs[i]) <= 0] + [grid]
        alt = []
        for i in ext:
            if alt and mp.sign(errs[i]) == mp.sign(errs[alt[-1]]):
                if abs(errs[i]) > abs(errs[alt[-1]]):
                    alt[-1] = i
            else:
                alt.append(i)
        while len(alt) > npts:
            alt.pop(0 if abs(errs[alt[0]]) < abs(errs[alt[-1]]) else -1)
        if len(alt) < npts:
            break
        xs = [pts[i] for i in alt]
    return best


def cos_target(w):
    return mp.cos(mp.pi * mp.sqrt(w) / 2)


def sin_target(w):
    if w == 0:
        return mp.pi / 2
    return mp.sin(mp.pi * mp.sqrt(w) / 2) / mp.sqrt(w)


def sin_weight(w):
    return mp.sqrt(w) if w > 0 else mp.mpf(10) ** -40


def medina(m):
    t, x = sp.symbols("t x")
    num = sp.expand(t ** (4 * m) * (1 - t) ** (4 * m) - (-4) ** m)
    q, r = sp.div(num, 1 + t ** 2, t)
    assert r == 0
    h = sp.expand(-sp.integrate(q, (t, 0, x)) / sp.Integer(-4) ** m)
    coeffs = sp.Poly(h, x).all_coeffs()[::-1]
    return [sp.Rational(c) for c in coeffs]


def dec(v, digits=45):
    return mp.nstr(mp.mpf(v), digits, strip_zeros=False, min_fixed=-mp.inf, max_fixed=mp.inf)


def main(out):
    table = {"format": "oblivfp-approx-tables", "version": 1,
             "variable": {"sin": "x*P(x^2), x = degrees/90 in [0, 1]",
                          "cos": "P(x^2), x = degrees/90 in [0, 1]",
                          "arctan": "P(x), x in [0, 1], radians"},
             "sin": {}, "cos": {}, "arctan": {}}
    for prec, n in TRIG_DEGREES.items():
        c, e = remez(cos_target, lambda w: mp.mpf(1), n)
        table["cos"][str(prec)] = {"degree": n, "coefficients": [dec(v) for v in c],
                                   "fit_error_log2": float(mp.log(e, 2))}
        c, e = remez(sin_target, sin_weight, n)
        table["sin"][str(prec)] = {"degree": n, "coefficients": [dec(v) for v in c],
                                   "fit_error_log2": float(mp.log(e, 2))}
        print(f"prec {prec}: cos 2^{table['cos'][str(prec)]['fit_error_log2']:.2f}, "
              f"sin 2^{table['sin'][str(prec)]['fit_error_log2']:.2f}")
    for prec in (16, 32, 64):
        m = math.ceil(prec / 10)
        coeffs = medina(m)
        table["arctan"][str(prec)] = {"m": m, "degree": 8 * m - 1,
                                      "coefficients": [dec(mp.mpf(int(c.p)) / int(c.q)) for c in coeffs],
                                      "bound_log2": -10 * m}
    Path(out).write_text(json.dumps(table, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         Path(__file__).resolve().parent.parent / "src" / "oblivfp" / "data" / "approx_tables.json")
