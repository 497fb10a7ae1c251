"""Exact state-vector execution of QAOA and discretized annealing circuits.

States are plain ``complex128`` arrays of length ``2**n``. Basis index ``b``
stores qubit ``q`` in bit ``q`` (qubit 0 is the least significant bit), and
spin ``s_q = 1 - 2*bit_q``.

The cost unitary is applied as a pointwise multiply with a precomputed cost
diagonal; the mixer is applied qubit by qubit with in-place butterflies.
Kernels run single-threaded, so results are bit-reproducible.

Memory: one state takes ``16 * 2**n`` bytes plus ``8 * 2**n`` for the cost
diagonal, i.e. 96 MiB at ``n = 22``. :data:`MAX_QUBITS` caps allocation.
"""

from dataclasses import dataclass
import math
import struct

import numba
import numpy as np

from .errors import ParameterError, ShapeError

MAX_QUBITS = 26
GRADIENT_CACHE_BYTES = 1 << 28


@dataclass(frozen=True)
class QaoaAngles:
    """Mixer angles ``betas`` and phase angles ``gammas``, one pair per layer."""

    betas: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.betas, dtype=float)).copy()
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float)).copy()
        if b.ndim != 1 or b.shape != g.shape:
            raise ShapeError(f"betas {b.shape} and gammas {g.shape} must be equal-length vectors")
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "gammas", g)

    @property
    def p(self):
        return self.betas.size

    def to_vector(self):
        """Flatten to ``[betas..., gammas...]``."""
        return np.concatenate([self.betas, self.gammas])

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        if x.size % 2:
            raise ShapeError("angle vector must have even length")
        p = x.size // 2
        return cls(x[:p], x[p:])

    def padded(self, extra):
        """Append ``extra`` identity layers (beta = gamma = 0)."""
        z = np.zeros(extra)
        return QaoaAngles(np.concatenate([self.betas, z]), np.concatenate([self.gammas, z]))

    def to_dict(self):
        return {"betas": self.betas.tolist(), "gammas": self.gammas.tolist()}


def _floats(state):
    if state.dtype != np.complex128 or not state.flags.c_contiguous:
        raise ShapeError("state must be a contiguous complex128 array")
    return state.view(np.float64)


def n_qubits_of(state):
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if state.ndim != 1 or dim != 1 << n:
        raise ShapeError(f"state length {dim} is not a power of two")
    return n


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

# Kernels take the state as its interleaved float64 view (re, im, re, im, ...);
# complex-typed loops compile to much slower code.

@numba.njit(cache=True, nogil=True)
def _rx_all(v, n, c, s):
    # exp(-i beta/2 X) = [[c, -i s], [-i s, c]] on every qubit
    dim = v.shape[0] >> 1
    for q in range(n):
        stride = 1 << q
        for base in range(0, dim, stride << 1):
            for k in range(base, base + stride):
                i0 = 2 * k
                i1 = 2 * (k + stride)
                a0r = v[i0]
                a0i = v[i0 + 1]
                a1r = v[i1]
                a1i = v[i1 + 1]
                v[i0] = c * a0r + s * a1i
                v[i0 + 1] = c * a0i - s * a1r
                v[i1] = c * a1r + s * a0i
                v[i1 + 1] = c * a1i - s * a0r


@numba.njit(cache=True, nogil=True)
def _phase(v, diag, gamma):
    h = -0.5 * gamma
    dim = diag.shape[0]
    lo = diag[0]
    hi = diag[0]
    integral = True
    for b in range(dim):
        x = diag[b]
        if x != math.floor(x):
            integral = False
            break
        lo = min(lo, x)
        hi = max(hi, x)
    if integral and hi - lo < dim:
        # integer-valued cost (unit weights): tabulate the few distinct phases
        m = int(hi - lo) + 1
        tc = np.empty(m)
        ts = np.empty(m)
        for k in range(m):
            ang = h * (lo + k)
            tc[k] = math.cos(ang)
            ts[k] = math.sin(ang)
        off = int(lo)
        for b in range(dim):
            k = int(diag[b]) - off
            c = tc[k]
            s = ts[k]
            re = v[2 * b]
            im = v[2 * b + 1]
            v[2 * b] = c * re - s * im
            v[2 * b + 1] = s * re + c * im
        return
    for b in range(dim):
        ang = h * diag[b]
        c = math.cos(ang)
        s = math.sin(ang)
        re = v[2 * b]
        im = v[2 * b + 1]
        v[2 * b] = c * re - s * im
        v[2 * b + 1] = s * re + c * im


@numba.njit(cache=True, nogil=True)
def _im_lam_sum_x(lam, v, n):
    # Im <lam| (sum_j X_j) |v>
    dim = v.shape[0] >> 1
    acc = 0.0
    for b in range(dim):
        re = 0.0
        im = 0.0
        for q in range(n):
            f = b ^ (1 << q)
            re += v[2 * f]
            im += v[2 * f + 1]
        acc += lam[2 * b] * im - lam[2 * b + 1] * re
    return acc


@numba.njit(cache=True, nogil=True)
def _im_lam_diag(lam, v, diag):
    # Im <lam| C |v>
    acc = 0.0
    for b in range(diag.shape[0]):
        acc += diag[b] * (lam[2 * b] * v[2 * b + 1] - lam[2 * b + 1] * v[2 * b])
    return acc


@numba.njit(cache=True, nogil=True)
def _cost_diag(n, pi, pj, w, out):
    for b in range(out.shape[0]):
        acc = 0.0
        for e in range(w.shape[0]):
            par = ((b >> pi[e]) ^ (b >> pj[e])) & 1
            acc += w[e] * (1.0 - 2.0 * par)
        out[b] = acc


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

def build_cost_diagonal(g):
    """Cost operator ``sum w_ij Z_i Z_j`` of graph ``g`` as a length ``2**n`` vector."""
    n = g.n_vertices
    if n > MAX_QUBITS:
        raise ShapeError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit memory limit")
    pairs, weights = g.edge_array()
    out = np.empty(1 << n)
    _cost_diag(n, np.ascontiguousarray(pairs[:, 0]), np.ascontiguousarray(pairs[:, 1]),
               np.ascontiguousarray(weights), out)
    return out


def init_plus_state(n):
    """The product state ``|+>^n``."""
    if n < 1:
        raise ParameterError(f"need at least one qubit, got {n}")
    if n > MAX_QUBITS:
        raise ShapeError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit memory limit")
    dim = 1 << n
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)


def apply_mixer(state, beta):
    """Apply ``prod_j exp(-i beta X_j / 2)`` in place and return ``state``."""
    n = n_qubits_of(state)
    _rx_all(_floats(state), n, math.cos(0.5 * beta), math.sin(0.5 * beta))
    return state


def apply_phase(state, gamma, diag):
    """Apply ``exp(-i gamma C / 2)`` in place and return ``state``."""
    if diag.shape != state.shape:
        raise ShapeError(f"cost diagonal {diag.shape} does not match state {state.shape}")
    _phase(_floats(state), diag, float(gamma))
    return state


def apply_layer(state, beta, gamma, diag):
    """One QAOA layer: phase separator first, then mixer."""
    apply_phase(state, gamma, diag)
    return apply_mixer(state, beta)


def run_qaoa(g, angles, diag=None, observer=None):
    """Prepare ``|+>^n`` and apply the layers of ``angles`` in order.

    ``observer(layer, state)`` is called for ``layer = 0..p`` if given; the
    state passed in is the live buffer and must not be modified.
    """
    if diag is None:
        diag = build_cost_diagonal(g)
    state = init_plus_state(g.n_vertices)
    if observer is not None:
        observer(0, state)
    for layer, (b, gm) in enumerate(zip(angles.betas, angles.gammas), start=1):
        apply_layer(state, b, gm, diag)
        if observer is not None:
            observer(layer, state)
    return state


def cost_expectation(state, diag):
    """``<psi|C|psi>`` for a diagonal cost operator."""
    if diag.shape != state.shape:
        raise ShapeError(f"cost diagonal {diag.shape} does not match state {state.shape}")
    probs = state.real ** 2 + state.imag ** 2
    return float(probs @ diag)


def qaoa_cost(g, angles, diag=None):
    if diag is None:
        diag = build_cost_diagonal(g)
    return cost_expectation(run_qaoa(g, angles, diag), diag)


def qaoa_cost_and_gradient(g, angles, diag=None, cache_bytes=GRADIENT_CACHE_BYTES):
    """Cost and its exact gradient by reverse-mode (adjoint) propagation.

    Returns ``(cost, grad)`` with ``grad`` ordered like
    :meth:`QaoaAngles.to_vector`. Forward half-layer states are kept when
    they fit in ``cache_bytes``; otherwise the backward sweep un-computes
    them, at roughly twice the cost.
    """
    if diag is None:
        diag = build_cost_diagonal(g)
    n = g.n_vertices
    p = angles.p
    keep = 2 * p * diag.size * 16 <= cache_bytes
    psi = init_plus_state(n)
    saved = []
    for b, gm in zip(angles.betas, angles.gammas):
        apply_phase(psi, gm, diag)
        if keep:
            saved.append(psi.copy())
        apply_mixer(psi, b)
        if keep:
            saved.append(psi.copy())
    cost = cost_expectation(psi, diag)
    lam = diag * psi
    d_beta = np.empty(p)
    d_gamma = np.empty(p)
    lv = _floats(lam)
    for layer in range(p - 1, -1, -1):
        # d/dbeta exp(-i beta/2 sum X) = (-i/2) sum X (...), so dE = Im <lam| sum X |psi>
        cur = saved[2 * layer + 1] if keep else psi
        d_beta[layer] = _im_lam_sum_x(lv, _floats(cur), n)
        apply_mixer(lam, -angles.betas[layer])
        if keep:
            cur = saved[2 * layer]
        else:
            apply_mixer(psi, -angles.betas[layer])
        d_gamma[layer] = _im_lam_diag(lv, _floats(cur), diag)
        apply_phase(lam, -angles.gammas[layer], diag)
        if not keep:
            apply_phase(psi, -angles.gammas[layer], diag)
    return cost, np.concatenate([d_beta, d_gamma])


def annealing_schedule(T, dt):
    """Trotterized linear interpolation from the transverse field to the cost.

    Layer ``l = 1..L`` (``t = l*dt``, ``L = T/dt``) has
    ``gamma = 2 t dt / T`` and ``beta = -2 dt (1 - t/T)``.
    """
    if not (T > 0 and dt > 0):
        raise ParameterError(f"T and dt must be positive, got T={T}, dt={dt}")
    ratio = T / dt
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, ratio):
        raise ParameterError(f"T/dt = {ratio} is not an integer number of steps")
    t = dt * np.arange(1, steps + 1)
    return QaoaAngles(-2.0 * dt * (1.0 - t / T), 2.0 * t * dt / T)


def run_annealing(g, T, dt, observer=None, diag=None):
    """Run the annealing circuit; ``observer(t, state)`` fires at ``t = 0`` and after every step."""
    angles = annealing_schedule(T, dt)
    if observer is None:
        return run_qaoa(g, angles, diag)
    return run_qaoa(g, angles, diag, observer=lambda layer, st: observer(layer * dt, st))


def z2_asymmetry(state):
    """``max_b |amps[b] - amps[~b]|``; the complement of ``b`` is ``dim - 1 - b``."""
    return float(np.max(np.abs(state - state[::-1])))


def save_state(path, state):
    """Write ``u32`` qubit count then interleaved little-endian ``(re, im)`` doubles."""
    n = n_qubits_of(state)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", n))
        fh.write(np.ascontiguousarray(state, dtype="<c16").tobytes())


def load_state(path):
    with open(path, "rb") as fh:
        (n,) = struct.unpack("<I", fh.read(4))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != 1 << n:
        raise ShapeError(f"file holds {data.size} amplitudes, header says {n} qubits")
    return data.astype(np.complex128)
