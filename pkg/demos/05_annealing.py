# coding: utf-8

# # Trotterized quantum annealing
#
# Annealing is a QAOA circuit with a linear schedule: gamma grows and beta
# shrinks over total time T. Slow anneals reach the cut, fast ones scramble.

from qaoa_entanglement import entanglement as ent, experiments as ex, graphs, simulator as sim

# In[1]:

g = graphs.gen_regular3(10, seed=2)
exact, _ = graphs.maxcut_bruteforce(g)
diag = sim.build_cost_diagonal(g)
part = ent.random_bipartition(10, seed=3)
for T in (1, 5, 20):
    entropies = []
    sim.run_annealing(g, T, 0.1, observer=lambda t, s: entropies.append(ent.entanglement_entropy(s, part)))
    psi = sim.run_annealing(g, T, 0.1)
    print(f"T={T:>2}: <C> = {sim.cost_expectation(psi, diag):.3f} (exact {exact}), max S = {max(entropies):.3f}")

# The slope of max S against N shrinks with T. A small sweep shows it.

# In[2]:

cfg = ex.ExperimentConfig(mode="annealing", graph_kind="regular3", sizes=[6, 8, 10],
                          times=[2.0, 5.0, 10.0], dt=0.1, n_problems=10, master_seed=0)
table = ex.max_entropy_vs_n(ex.run_sweep(cfg))
for T in sorted(table):
    print(f"T={T:>4}: slope b(T) = {ex.linear_fit(*table[T]).slope:.4f}")
