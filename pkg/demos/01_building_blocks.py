# %% [markdown]
# # Building blocks and what they cost
#
# Every secret value lives as a Shamir sharing over GF(2^127 - 1). A program
# is an ordinary Python function of an engine `E`; running it with the
# plaintext engine gives the exact oracle, running it at three parties gives
# the secure result plus a cost report.

# %%
from fractions import Fraction

import numpy as np

from oblivfp.blocks import s_div, s_lt, s_mul_fx, s_sort
from oblivfp.execute import cost_report, run_plain, run_secure
from oblivfp.fixedpoint import DEFAULT_FORMAT, encode
from oblivfp.numerics import s_sin, s_sqrt

fmt = DEFAULT_FORMAT
k = fmt.k


def fx(values):
    return np.array([encode(v, fmt).raw for v in values], dtype=object)


def as_frac(raw):
    return [Fraction(int(r), 1 << k) for r in np.atleast_1d(raw)]


# %% [markdown]
# A small program: party 1 holds `a`, party 2 holds `b`. We ask for the
# product, the quotient, a comparison and a couple of numerics.

# %%
a_raw, b_raw = fx([1.5, -2.25, 30]), fx([0.5, 3, 7])


def program(E):
    a = E.input(1, a_raw.shape, a_raw, frac=k)
    b = E.input(2, b_raw.shape, b_raw, frac=k)
    with E.label("mul"):
        prod = s_mul_fx(a, b)
    with E.label("div"):
        quot = s_div(a, b)
    with E.label("lt"):
        less = s_lt(a, b)
    with E.label("sqrt"):
        root = s_sqrt(b)
    with E.label("sin"):
        sine = s_sin(b)
    return {"prod": prod, "quot": quot, "less": less, "root": root, "sin": sine}


plain, _ = run_plain(program, fmt)
secure, handle = run_secure(program, n=3, t=1, seed=1, fmt=fmt)
for key in plain:
    print(f"{key:5s} plain={plain[key]!s:60.60s} same={np.array_equal(plain[key], secure[key])}")

# %% [markdown]
# Probabilistic truncation is the default for `run_secure`, so fixed-point
# results can differ from the floor oracle in the last bit. Integer results
# (the comparison bits) always agree.

# %%
print("quotients:", [float(q) for q in as_frac(secure["quot"])])
print("sin(b deg):", [float(q) for q in as_frac(secure["sin"])])

# %% [markdown]
# One interactive operation is a multiplication or one opened element.
# The breakdown is per label and inclusive.

# %%
rep = cost_report(handle)
print("total ops", rep.interactive_ops, "rounds", rep.rounds, "bytes", rep.bytes_sent)
for lab, c in sorted(rep.breakdown.items()):
    print(f"  {lab:12s} ops={c['ops']:6d} rounds={c['rounds']:4d}")

# %% [markdown]
# Sorting uses a Batcher network; padding rows never touch the field.

# %%
keys = np.array([5, -3, 12, 0, 7], dtype=object)


def sort_program(E):
    x = E.input(1, keys.shape, keys)
    return {"sorted": s_sort(x, bits=8)[0]}


print(run_secure(sort_program, seed=2)[0]["sorted"])
