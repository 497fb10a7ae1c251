# coding: utf-8

# # Simulating a QAOA circuit
#
# A MaxCut instance is a weighted graph. The cost of a spin configuration is
# C(s) = sum_ij w_ij s_i s_j and the best cut minimizes it. Here we build a
# small 3-regular graph, run a depth-3 QAOA circuit on the full state vector
# and compare the cost expectation with the brute-force optimum.

import numpy as np

from qaoa_entanglement import graphs, simulator as sim

# In[1]:

g = graphs.gen_regular3(10, seed=7)
print(g.n_vertices, "vertices,", len(g.edges), "edges")
best, cuts = graphs.maxcut_bruteforce(g)
print("exact minimum cost", best, "reached by", len(cuts), "spin configurations")

# Every optimal cut comes with its global spin flip, so the count is even.

# In[2]:

angles = sim.QaoaAngles(betas=[-0.6, -0.4, -0.2], gammas=[0.3, 0.5, 0.7])
psi = sim.run_qaoa(g, angles)
print("norm", np.linalg.norm(psi))
print("<C>", sim.qaoa_cost(g, angles))

# The mixer and the cost both commute with flipping every spin, so the state
# keeps amplitude[b] == amplitude[~b] exactly.

# In[3]:

print("Z2 asymmetry", sim.z2_asymmetry(psi))

# The observer hook sees the state after every layer without storing the trajectory.

# In[4]:

costs = []
sim.run_qaoa(g, angles, observer=lambda layer, state: costs.append(
    sim.cost_expectation(state, sim.build_cost_diagonal(g))))
print("cost per layer", np.round(costs, 4))
