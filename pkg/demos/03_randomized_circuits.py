# coding: utf-8

# # Entanglement growth in randomized circuits
#
# With fresh random angles at every layer, entanglement grows until it
# saturates. On complete graphs it reaches the Page value after a few layers.
# On a chain it grows like sqrt(layer) and saturates much later and lower.

import math

from qaoa_entanglement import experiments as ex

# In[1]:

cfg = ex.ExperimentConfig(mode="randomized", graph_kind="complete", sizes=[8, 10],
                          depths=[12], n_problems=30, master_seed=1)
recs = ex.run_sweep(cfg)
for (n, _), (layers, means, errs) in ex.mean_curves(recs).items():
    print(f"N={n}: S(12) = {means[-1]:.3f} +/- {errs[-1]:.3f}, Page {n * math.log(2) / 2 - 0.5:.3f}")

# In[2]:

cfg = ex.ExperimentConfig(mode="randomized", graph_kind="linear", sizes=[12],
                          depths=[60], n_problems=20, master_seed=2)
(_, (layers, means, _)), = ex.mean_curves(ex.run_sweep(cfg)).items()
fit = ex.power_fit(*ex.window(layers, means, 4, 60))
print(f"chain N=12: S ~ {fit.amplitude:.3f} * layer^{fit.exponent:.3f}")

# Every record carries its seed, so a single point can be recomputed later.

# In[3]:

rec = recs[5]
print("replayed S:", ex.replay_record(ex.ExperimentConfig(
    mode="randomized", graph_kind="complete", sizes=[8, 10], depths=[12], n_problems=30,
    master_seed=1), rec).entropy, "stored:", rec.entropy)
