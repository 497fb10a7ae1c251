# coding: utf-8

# # Entanglement entropy and spectrum
#
# Splitting the qubits into halves A and B, the Schmidt values of the state
# give the reduced density matrix spectrum and the von Neumann entropy. A
# random state sits close to the Page value N ln2 / 2 - 1/2.

import math

import numpy as np

from qaoa_entanglement import entanglement as ent, graphs, simulator as sim

# In[1]:

n = 12
rng = np.random.default_rng(0)
psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
psi /= np.linalg.norm(psi)
part = ent.random_bipartition(n, seed=1)
spec = ent.schmidt_spectrum(psi, part)
print("sum of lambda^2", spec.sum())
print("S =", ent.von_neumann_entropy(spec), " Page:", n * math.log(2) / 2 - 0.5)

# The rescaled spectrum 2^(N/2) lambda^2 against x = k / 2^(N/2) follows the
# Marchenko-Pastur curve.

# In[2]:

x, scaled = ent.rescaled_spectrum(spec)
for xi in (0.1, 0.3, 0.5, 0.7, 0.9):
    k = int(xi * len(x))
    print(f"x={x[k]:.3f}  state {scaled[k]:.3f}  MP {ent.marchenko_pastur_scaled(x[k]):.3f}")

# A QAOA state has a spin-flip symmetry, so the reduced density matrix splits
# into two parity blocks. Their union is the full spectrum.

# In[3]:

g = graphs.gen_complete(n, seed=3)
psi = sim.run_qaoa(g, sim.QaoaAngles(rng.uniform(0, np.pi, 10), rng.uniform(0, 2 * np.pi, 10)))
even, odd = ent.spectrum_blocks(psi, part)
print("block sizes", even.size, odd.size)
print("mean gap ratio, mixed  ", ent.mean_gap_ratio(ent.gap_ratios(ent.schmidt_spectrum(psi, part))))
print("mean gap ratio, blocks ", np.mean([ent.mean_gap_ratio(ent.gap_ratios(b)) for b in (even, odd)]))
