# %% [markdown]
# # Spectral matching walkthrough
#
# Spectral templates are M' x N' complex feature grids. Rotating a finger
# multiplies column j by a phase e^{2 pi i j alpha / N}; the matcher searches
# the shift alpha in [-17, 18] with a three-stage coarse-to-fine search, so
# only eight private scores are ever computed.

# %%
from oblivfp.fingerprint.pipelines import decode_values, run_pipeline, run_plaintext
from oblivfp.fingerprint.synth import planted_spectral

T, S, truth = planted_spectral(4, 6, alpha=7, seed=11)
print("dims", T.dims, "N", T.N, "planted shift", truth["alpha"])

# %% [markdown]
# The secure run in probabilistic-truncation mode is the fast setting.
# Its argmax must match the oracle; the score itself may move in the last
# bits.

# %%
oracle = run_plaintext("spectral", T, S)
secure = run_pipeline("spectral", T, S, seed=4, trunc_exact=False)
print("oracle alpha", oracle.values["alpha_max"], "secure alpha", secure.values["alpha_max"])
print("score", float(decode_values("spectral", secure.values)["C_max"]))

# %% [markdown]
# The counter records how many scores each stage evaluated.

# %%
scores = secure.extras["scores"]
print("scores evaluated:", scores)
print("costs:", secure.costs)
