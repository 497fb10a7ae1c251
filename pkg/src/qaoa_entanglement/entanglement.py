"""Bipartite entanglement of state vectors and random-matrix references.

Spectra are plain descending ``float`` arrays of reduced-density-matrix
eigenvalues (squared Schmidt coefficients) summing to one.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np
from scipy.linalg import hadamard

from .errors import (DomainError, InsufficientDataError, ParameterError, ShapeError,
                     SymmetryError)
from .rng import make_rng
from .simulator import n_qubits_of, z2_asymmetry

#: squared Schmidt values at or below this are treated as numerical noise
LEVEL_FLOOR = 1e-14

POISSON_MEAN_R = 2.0 * math.log(2.0) - 1.0
GUE_MEAN_R = 0.60266
GUE_Z2_MEAN_R = 0.422085


@dataclass(frozen=True)
class Bipartition:
    """Equal split of ``n_qubits`` qubits; ``side_a`` holds ``n_qubits // 2`` sorted indices."""

    side_a: tuple
    n_qubits: int

    def __post_init__(self):
        a = tuple(sorted(int(q) for q in self.side_a))
        n = int(self.n_qubits)
        if n % 2:
            raise ParameterError(f"bipartition needs an even number of qubits, got {n}")
        if len(a) != n // 2 or len(set(a)) != len(a) or (a and (a[0] < 0 or a[-1] >= n)):
            raise ParameterError(f"side A {a} is not a size-{n // 2} subset of range({n})")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "n_qubits", n)

    @property
    def side_b(self):
        a = set(self.side_a)
        return tuple(q for q in range(self.n_qubits) if q not in a)

    def complement(self):
        return Bipartition(self.side_b, self.n_qubits)


def random_bipartition(n, seed):
    """Uniformly random half of ``range(n)``."""
    if n % 2:
        raise ParameterError(f"bipartition needs an even number of qubits, got {n}")
    perm = make_rng(seed).permutation(n)
    return Bipartition(tuple(perm[: n // 2]), n)


def contiguous_bipartition(n):
    """Left half ``{0, ..., n/2 - 1}``."""
    if n % 2:
        raise ParameterError(f"bipartition needs an even number of qubits, got {n}")
    return Bipartition(tuple(range(n // 2)), n)


def amplitude_matrix(state, part):
    """Reshape amplitudes into ``M[s_A, s_B]``.

    Within each side, the first listed qubit is the most significant bit of
    the row/column index.
    """
    n = n_qubits_of(state)
    if n != part.n_qubits:
        raise ShapeError(f"state has {n} qubits, bipartition expects {part.n_qubits}")
    # C-order reshape puts qubit q on axis n-1-q
    tensor = state.reshape((2,) * n)
    axes = [n - 1 - q for q in part.side_a] + [n - 1 - q for q in part.side_b]
    dim_a = 1 << len(part.side_a)
    return tensor.transpose(axes).reshape(dim_a, -1)


def schmidt_spectrum(state, part):
    """Descending squared singular values of the amplitude matrix."""
    sv = np.linalg.svd(amplitude_matrix(state, part), compute_uv=False)
    lam2 = sv ** 2
    lam2[lam2 < 0] = 0.0
    return lam2


def von_neumann_entropy(spectrum):
    """``-sum p ln p`` with ``0 ln 0 = 0``."""
    p = np.asarray(spectrum, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def renyi_entropy(spectrum, q):
    if q <= 0:
        raise ParameterError(f"Renyi index must be positive, got {q}")
    if q == 1:
        raise ParameterError("Renyi index 1 is the von Neumann entropy; use von_neumann_entropy")
    p = np.asarray(spectrum, dtype=float)
    p = p[p > 0]
    return float(np.log(np.sum(p ** q)) / (1.0 - q))


def entanglement_entropy(state, part):
    return von_neumann_entropy(schmidt_spectrum(state, part))


def gap_ratios(spectrum, floor=LEVEL_FLOOR, convention="min/max"):
    """Adjacent gap ratios of the levels above ``floor``.

    With the default ``"min/max"`` convention each ratio lies in [0, 1] and a
    vanishing gap gives 0. ``"max/min"`` returns the reciprocals (inf for a
    vanishing gap).
    """
    levels = np.sort(np.asarray(spectrum, dtype=float))
    levels = levels[levels > floor]
    if levels.size < 3:
        raise InsufficientDataError(
            f"need at least 3 levels above {floor:g}, have {levels.size}")
    gaps = np.diff(levels)
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    if convention == "min/max":
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 0.0)
        r[lo == 0] = 0.0
        return r
    if convention == "max/min":
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(lo > 0, hi / np.where(lo > 0, lo, 1.0), np.inf)
    raise ParameterError(f"unknown gap-ratio convention {convention!r}")


def mean_gap_ratio(ratios):
    r = np.asarray(ratios, dtype=float)
    if r.size == 0:
        raise InsufficientDataError("no gap ratios to average")
    return float(r.mean())


def poisson_pdf(r):
    """Gap-ratio density ``2 / (1 + r)**2`` of uncorrelated levels on [0, 1]."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise DomainError("gap ratio must lie in [0, 1]")
    out = 2.0 / (1.0 + r) ** 2
    return float(out) if out.ndim == 0 else out


def _mp_phi(x, tol=1e-15, max_iter=200):
    # pi x / 2 = phi - sin(2 phi) / 2, left side increasing on [0, pi/2]
    target = 0.5 * math.pi * x
    lo, hi = 0.0, 0.5 * math.pi
    phi = 0.5 * (lo + hi)
    for _ in range(max_iter):
        phi = 0.5 * (lo + hi)
        resid = phi - 0.5 * math.sin(2.0 * phi) - target
        if resid > 0:
            hi = phi
        else:
            lo = phi
        if hi - lo < tol:
            break
    return phi


def marchenko_pastur_scaled(x):
    """Continuum random-state spectrum ``2**(n/2) * lambda^2(x) = 4 cos^2(phi(x))``."""
    xs = np.asarray(x, dtype=float)
    if np.any((xs < 0) | (xs > 1)):
        raise DomainError("x must lie in [0, 1]")
    if xs.ndim == 0:
        if xs == 0:
            return 4.0
        if xs == 1:
            return 0.0
        return 4.0 * math.cos(_mp_phi(float(xs))) ** 2
    return np.array([marchenko_pastur_scaled(v) for v in xs.ravel()]).reshape(xs.shape)


def marchenko_pastur_lambda2(x, n):
    """Expected ``lambda^2`` at rescaled index ``x`` for ``n`` qubits (equal halves)."""
    return marchenko_pastur_scaled(x) / 2.0 ** (n // 2)


def reduced_density_matrix(state, part):
    m = amplitude_matrix(state, part)
    return m @ m.conj().T


def spectrum_blocks(state, part, tol=1e-8):
    """Reduced-density-matrix eigenvalues resolved by subsystem X-parity.

    The global spin flip makes ``rho_A`` commute with the X-parity of side A.
    Conjugating by Hadamards on every A qubit turns that into bit parity, so
    ``rho_A`` splits into an even-popcount and an odd-popcount block.

    Returns ``(even, odd)``, each sorted descending.
    """
    if z2_asymmetry(state) > tol:
        raise SymmetryError("state is not invariant under the global spin flip")
    rho = reduced_density_matrix(state, part)
    dim = rho.shape[0]
    h = hadamard(dim) / math.sqrt(dim)
    rot = h @ rho @ h
    idx = np.arange(dim)
    parity = np.array([bin(i).count("1") & 1 for i in idx])
    blocks = []
    for par in (0, 1):
        sel = idx[parity == par]
        block = rot[np.ix_(sel, sel)]
        ev = np.linalg.eigvalsh(0.5 * (block + block.conj().T))
        ev[ev < 0] = 0.0
        blocks.append(ev[::-1])
    return blocks[0], blocks[1]


def rescaled_spectrum(spectrum):
    """``(x, 2**(n/2) lambda^2)`` with ``x = k / 2**(n/2)``."""
    s = np.asarray(spectrum, dtype=float)
    d = s.size
    return np.arange(d) / d, d * s


def write_spectrum_csv(path, spectrum):
    """CSV with columns ``k, lambda2, x, scaled_lambda2``."""
    s = np.asarray(spectrum, dtype=float)
    x, scaled = rescaled_spectrum(s)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "lambda2", "x", "scaled_lambda2"])
        for k in range(s.size):
            w.writerow([k, repr(float(s[k])), repr(float(x[k])), repr(float(scaled[k]))])
