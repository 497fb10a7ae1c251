"""Quick consistency checks against dense linear algebra, runnable without pytest."""

import math
import time

import numpy as np
from scipy.linalg import expm

from . import entanglement as ent
from . import graphs
from . import simulator as sim
from .optimize import minimize_multistart
from .rng import make_rng

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


def _single(op, q, n):
    # little-endian: qubit 0 is the rightmost Kronecker factor
    out = np.eye(1, dtype=complex)
    for k in range(n - 1, -1, -1):
        out = np.kron(out, op if k == q else np.eye(2))
    return out


def dense_cost(g):
    n = g.n_vertices
    c = np.zeros((1 << n, 1 << n), dtype=complex)
    for i, j, w in g.edges:
        c += w * _single(_Z, i, n) @ _single(_Z, j, n)
    return c


def dense_qaoa(g, angles):
    n = g.n_vertices
    c = dense_cost(g)
    sx = sum(_single(_X, q, n) for q in range(n))
    psi = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    for b, gm in zip(angles.betas, angles.gammas):
        psi = expm(-0.5j * gm * c) @ psi
        psi = expm(-0.5j * b * sx) @ psi
    return psi


def _random_case(rng):
    n = int(rng.integers(2, 5))
    kind = ["linear", "complete"][int(rng.integers(0, 2))] if n != 4 else \
        ["linear", "complete", "regular3"][int(rng.integers(0, 3))]
    g = graphs.generate(kind, n, int(rng.integers(0, 2**31)))
    p = int(rng.integers(0, 4))
    angles = sim.QaoaAngles(rng.uniform(-np.pi, np.pi, p), rng.uniform(-np.pi, 2 * np.pi, p))
    return g, angles


def check_oracle(cases=100, seed=0):
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(cases):
        g, a = _random_case(rng)
        worst = max(worst, float(np.max(np.abs(sim.run_qaoa(g, a) - dense_qaoa(g, a)))))
    return worst < 1e-10, f"max |amp diff| = {worst:.2e} over {cases} cases"


def check_invariants(seed=1):
    rng = make_rng(seed)
    msgs = []
    ok = True
    for kind, n in (("complete", 8), ("regular3", 8), ("linear", 8)):
        g = graphs.generate(kind, n, int(rng.integers(0, 2**31)))
        p = 4
        a = sim.QaoaAngles(rng.uniform(0, np.pi, p), rng.uniform(0, 2 * np.pi, p))
        psi = sim.run_qaoa(g, a)
        part = ent.random_bipartition(n, int(rng.integers(0, 2**31))) if kind != "linear" \
            else ent.contiguous_bipartition(n)
        spec = ent.schmidt_spectrum(psi, part)
        s = ent.von_neumann_entropy(spec)
        checks = {
            "norm": abs(np.linalg.norm(psi) - 1) < 1e-10,
            "z2": sim.z2_asymmetry(psi) < 1e-10,
            "entropy bounds": -1e-12 <= s <= n / 2 * math.log(2) + 1e-12,
            "A/B symmetry": np.allclose(spec, ent.schmidt_spectrum(psi, part.complement()), atol=1e-10),
            "block union": np.allclose(np.sort(np.concatenate(ent.spectrum_blocks(psi, part))),
                                       np.sort(spec), atol=1e-9),
            "gap ratios in [0,1]": bool(np.all((lambda r: (r >= 0) & (r <= 1))(ent.gap_ratios(spec)))),
        }
        if kind == "linear":
            checks["light cone"] = s <= 2 * p * math.log(2) + 1e-9
        for name, passed in checks.items():
            ok &= bool(passed)
            if not passed:
                msgs.append(f"{kind}: {name}")
    return ok, "all hold" if ok else "failed: " + ", ".join(msgs)


def check_variational(seed=2):
    g = graphs.gen_regular3(6, seed)
    exact, _ = graphs.maxcut_bruteforce(g)
    best = minimize_multistart(g, 2, restarts=3, seed=seed)
    return best.cost >= exact - 1e-8, f"best {best.cost:.6f} >= exact {exact:.6f}"


CHECKS = (("oracle equivalence", check_oracle), ("invariants", check_invariants),
          ("variational bound", check_variational))


def run_selftest(out=print):
    """Run every check, print a pass/fail table, return ``True`` if all pass."""
    all_ok = True
    out(f"{'check':<22} {'result':<6} {'time':>7}  detail")
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        ok, detail = fn()
        all_ok &= ok
        out(f"{name:<22} {'PASS' if ok else 'FAIL':<6} {time.perf_counter() - t0:6.2f}s  {detail}")
    return all_ok
