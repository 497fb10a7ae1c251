"""Dense-matrix oracles shared by the test modules.

These are written independently of the package kernels: operators are built
from explicit spin tables and Kronecker products, then exponentiated with
``scipy.linalg.expm``.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from qaoa_entanglement import graphs

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def spin_table(n):
    # row b holds the spins of basis state b, qubit q read from bit q
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    return 1 - 2 * bits


def oracle_cost_diagonal(g):
    s = spin_table(g.n_vertices)
    return sum(w * s[:, i] * s[:, j] for i, j, w in g.edges) + np.zeros(1 << g.n_vertices)


def oracle_mixer(n, beta):
    # qubit 0 is the least significant bit, so it is the last Kronecker factor
    one = expm(-0.5j * beta * PAULI_X)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, one)
    return out


def oracle_qaoa(g, betas, gammas):
    n = g.n_vertices
    diag = oracle_cost_diagonal(g)
    psi = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    for b, gm in zip(betas, gammas):
        psi = expm(-0.5j * gm * np.diag(diag)) @ psi
        psi = oracle_mixer(n, b) @ psi
    return psi


def oracle_schmidt(psi, side_a):
    """Eigenvalues of the reduced density matrix by explicit partial trace."""
    n = int(np.log2(psi.size))
    side_b = [q for q in range(n) if q not in side_a]
    # tensor axis k corresponds to qubit n-1-k in C order
    t = psi.reshape([2] * n)
    axes_a = [n - 1 - q for q in side_a]
    axes_b = [n - 1 - q for q in side_b]
    m = np.transpose(t, axes_a + axes_b).reshape(1 << len(side_a), -1)
    rho = m @ m.conj().T
    return np.sort(np.linalg.eigvalsh(rho))[::-1]


@pytest.fixture
def small_graphs():
    return [graphs.gen_linear(4, 1), graphs.gen_complete(4, 2), graphs.gen_regular3(4, 3),
            graphs.gen_complete(3, 4), graphs.gen_linear(2, 5)]


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
