import numpy as np
import pytest

from conftest import oracle_cost_diagonal, oracle_mixer, oracle_qaoa
from qaoa_entanglement import graphs
from qaoa_entanglement import simulator as sim
from qaoa_entanglement.errors import ParameterError
from qaoa_entanglement.rng import make_rng


def random_case(rng):
    n = int(rng.integers(2, 5))
    kinds = ["linear", "complete"] + (["regular3"] if n == 4 else [])
    g = graphs.generate(kinds[int(rng.integers(len(kinds)))], n, int(rng.integers(2**31)))
    p = int(rng.integers(0, 4))
    return g, rng.uniform(-4, 4, p), rng.uniform(-7, 7, p)


def test_oracle_equivalence_100_cases():
    rng = make_rng(2718)
    for _ in range(100):
        g, b, gm = random_case(rng)
        psi = sim.run_qaoa(g, sim.QaoaAngles(b, gm))
        assert np.max(np.abs(psi - oracle_qaoa(g, b, gm))) < 1e-10


def test_cost_diagonal_matches_oracle(small_graphs):
    for g in small_graphs:
        np.testing.assert_allclose(sim.build_cost_diagonal(g), oracle_cost_diagonal(g), atol=1e-14)


def test_cost_diagonal_minimum_is_maxcut():
    g = graphs.gen_regular3(10, 4)
    assert sim.build_cost_diagonal(g).min() == pytest.approx(graphs.maxcut_bruteforce(g)[0])


def test_mixer_matches_kronecker():
    rng = make_rng(1)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    out = psi.copy()
    sim.apply_mixer(out, 0.37)
    np.testing.assert_allclose(out, oracle_mixer(4, 0.37) @ psi, atol=1e-14)


def test_phase_edge_subsets_commute():
    g = graphs.gen_complete(5, 8)
    half = len(g.edges) // 2
    g1 = graphs.Graph(5, g.edges[:half], "custom")
    g2 = graphs.Graph(5, g.edges[half:], "custom")
    d1, d2 = sim.build_cost_diagonal(g1), sim.build_cost_diagonal(g2)
    rng = make_rng(3)
    psi = rng.normal(size=32) + 1j * rng.normal(size=32)
    a, b, full = psi.copy(), psi.copy(), psi.copy()
    sim.apply_phase(a, 0.9, d1); sim.apply_phase(a, 0.9, d2)
    sim.apply_phase(b, 0.9, d2); sim.apply_phase(b, 0.9, d1)
    sim.apply_phase(full, 0.9, sim.build_cost_diagonal(g))
    np.testing.assert_allclose(a, b, atol=1e-12)
    np.testing.assert_allclose(a, full, atol=1e-12)


def test_norm_drift_over_1000_layers():
    g = graphs.gen_complete(8, 2)
    diag = sim.build_cost_diagonal(g)
    psi = sim.init_plus_state(8)
    rng = make_rng(5)
    for _ in range(1000):
        sim.apply_layer(psi, *rng.uniform(0, 2 * np.pi, 2), diag)
    assert abs(np.linalg.norm(psi) - 1) < 1e-9
    assert sim.z2_asymmetry(psi) < 1e-10


def test_observer_sees_every_layer():
    seen = []
    sim.run_qaoa(graphs.gen_linear(4, 0), sim.QaoaAngles([0.1, 0.2], [0.3, 0.4]),
                 observer=lambda layer, psi: seen.append((layer, np.linalg.norm(psi))))
    assert [s[0] for s in seen] == [0, 1, 2]


def test_cost_expectation_of_plus_state_is_zero():
    g = graphs.gen_complete(6, 1)
    assert abs(sim.cost_expectation(sim.init_plus_state(6), sim.build_cost_diagonal(g))) < 1e-12


def test_adjoint_gradient_matches_finite_differences():
    g = graphs.gen_complete(6, 4)
    a = sim.QaoaAngles([0.4, 1.2, -0.3], [2.0, 0.5, 1.1])
    f, grad = sim.qaoa_cost_and_gradient(g, a)
    assert f == pytest.approx(sim.qaoa_cost(g, a), abs=1e-12)
    x = a.to_vector()
    h = 1e-5
    fd = [(sim.qaoa_cost(g, sim.QaoaAngles.from_vector(x + h * e))
           - sim.qaoa_cost(g, sim.QaoaAngles.from_vector(x - h * e))) / (2 * h) for e in np.eye(x.size)]
    np.testing.assert_allclose(grad, fd, atol=1e-8)
    # the uncached (recompute) path gives the same answer
    _, grad2 = sim.qaoa_cost_and_gradient(g, a, cache_bytes=0)
    np.testing.assert_allclose(grad, grad2, atol=1e-12)


def test_annealing_schedule_values():
    a = sim.annealing_schedule(1.0, 0.25)
    gammas, betas = a.gammas, a.betas
    t = np.arange(1, 5) * 0.25
    np.testing.assert_allclose(gammas, 2 * t * 0.25 / 1.0)
    np.testing.assert_allclose(betas, -2 * 0.25 * (1 - t / 1.0))


@pytest.mark.parametrize("T,dt", [(1.0, 0.3), (0.0, 0.1), (1.0, -0.1)])
def test_annealing_schedule_rejects(T, dt):
    with pytest.raises(ParameterError):
        sim.annealing_schedule(T, dt)


def test_k2_annealing_reaches_cat_state():
    g = graphs.Graph(2, ((0, 1, 1.0),), "custom")
    psi = sim.run_annealing(g, 50.0, 0.1)
    # exact diagonalization of the final cost Hamiltonian: ground space spanned by |01>, |10>
    h = np.diag(oracle_cost_diagonal(g))
    w, v = np.linalg.eigh(h)
    ground = v[:, np.isclose(w, w.min())]
    assert np.linalg.norm(ground.conj().T @ psi) ** 2 >= 0.99


def test_state_dump_round_trip(tmp_path):
    psi = sim.run_qaoa(graphs.gen_complete(5, 1), sim.QaoaAngles([0.3], [0.8]))
    path = tmp_path / "s.bin"
    sim.save_state(path, psi)
    assert np.array_equal(sim.load_state(path), psi)
    assert path.stat().st_size == 4 + 16 * 32


def test_angles_padding_is_identity():
    g = graphs.gen_regular3(6, 0)
    a = sim.QaoaAngles([0.3, 0.5], [1.0, 2.0])
    assert sim.qaoa_cost(g, a.padded(1)) == pytest.approx(sim.qaoa_cost(g, a), abs=1e-13)
