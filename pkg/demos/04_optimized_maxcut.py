# coding: utf-8

# # Optimized QAOA circuits
#
# Multi-start BFGS picks the angles minimizing <C>. Optimized circuits stay
# far less entangled than random ones, since they aim at a product state
# (the best cut, or a cat state of it and its flip).

import math

from qaoa_entanglement import entanglement as ent, graphs, optimize as opt, simulator as sim

# In[1]:

g = graphs.gen_regular3(10, seed=4)
exact, _ = graphs.maxcut_bruteforce(g)
part = ent.random_bipartition(10, seed=5)
prev = None
for p in (1, 2, 3, 4):
    extra = [prev.angles.padded(1)] if prev else []
    res = opt.minimize_multistart(g, p, restarts=10, seed=p, extra_inits=extra)
    psi = sim.run_qaoa(g, res.angles)
    print(f"p={p}: <C> = {res.cost:.4f} (exact {exact:.1f}), "
          f"S = {ent.entanglement_entropy(psi, part):.3f} of max {5 * math.log(2):.3f}")
    prev = res

# Padding the depth p-1 optimum with an identity layer as one extra start
# guarantees the best cost never gets worse with depth.
