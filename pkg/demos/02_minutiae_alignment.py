# %% [markdown]
# # Aligning two minutiae sets without revealing them
#
# Party 1 owns a gallery template, party 2 a probe that is a rotated and
# shifted copy. The geometric pipeline tries every reference pair, counts
# matches under each candidate motion and reveals only the best count and
# its motion.

# %%
from oblivfp.fingerprint.pipelines import decode_values, run_pipeline, run_plaintext
from oblivfp.fingerprint.synth import planted_minutiae

T, S, truth = planted_minutiae(5, seed=3, kind="rotate", extent=200)
print("planted motion:", truth)
for t, s in zip(T.minutiae, S.minutiae):
    print(f"  gallery ({t.x:4d},{t.y:4d},{t.theta:3d})   probe ({s.x:4d},{s.y:4d},{s.theta:3d})")

# %% [markdown]
# The plaintext run is the oracle: identical integer arithmetic with floor
# truncation. The secure run uses exact truncation by default, so both must
# agree bit for bit.

# %%
oracle = run_plaintext("geom", T, S, seed=0)
secure = run_pipeline("geom", T, S, seed=0)
print("oracle :", oracle.values)
print("secure :", secure.values)
print("equal  :", oracle.values == secure.values)

# %% [markdown]
# Decoded values: `C_max` minutiae pair up, `dtheta` is the recovered
# rotation and `dx, dy` the offsets in fixed point.

# %%
print(decode_values("geom", secure.values))
print("costs:", secure.costs)
