"""Continuous-time quantum walk on the normalised adjacency.

The walk Hamiltonian is H = I - Gamma with Gamma = D^-1/2 A D^-1/2. Since the
identity commutes with Gamma, |<m|exp(-iHt)|m>| = |exp(i Gamma t)_mm|, so the
out-probability of a vertex follows from one symmetric eigendecomposition.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import ContractError, ParameterError
from .graph import Graph, normalized_gamma

SYMMETRY_TOL = 1e-12
CLAMP_TOL = 1e-10
DEFAULT_OMEGA = 1e6


def t_opt(n: int) -> float:
    """Evolution time 4 / (pi sqrt(n)) + 0.1."""
    if n < 1:
        raise ParameterError(f"t_opt needs at least one vertex, got {n}")
    return 4.0 / (math.pi * math.sqrt(n)) + 0.1


def _fingerprint(m: np.ndarray) -> str:
    m = np.ascontiguousarray(m, dtype=float)
    h = hashlib.blake2b(digest_size=16)
    h.update(str(m.shape).encode())
    h.update(m.tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class SpectralCache:
    """Eigendecomposition Gamma = Q diag(lam) Q^T of one coupling matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    graph_fingerprint: str
    active_mask: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def propagator(self, t: float) -> np.ndarray:
        """exp(i Gamma t) as a dense complex matrix."""
        q = self.eigenvectors
        return (q * np.exp(1j * self.eigenvalues * t)) @ q.T


def spectral_decompose(gamma: np.ndarray) -> SpectralCache:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {gamma.shape}")
    if gamma.size and np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL:
        raise ContractError("coupling matrix is not symmetric")
    lam, q = np.linalg.eigh(gamma)
    active = np.any(gamma != 0.0, axis=1)
    return SpectralCache(lam, q, _fingerprint(gamma), active)


@dataclass(frozen=True)
class TransitionProfile:
    time: float
    prob_out: np.ndarray
    active_mask: np.ndarray

    def argmax(self, candidates=None, tie_tol: float = CLAMP_TOL) -> int:
        """Highest-scoring vertex; near-ties go to the lowest id."""
        mask = self.active_mask if candidates is None else candidates
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            raise ParameterError("no candidate vertices")
        scores = self.prob_out[idx]
        return int(idx[np.flatnonzero(scores >= scores.max() - tie_tol)[0]])


def return_amplitudes(cache: SpectralCache, t: float) -> np.ndarray:
    """Diagonal of exp(i Gamma t), i.e. sum_k Q_mk^2 exp(i lam_k t)."""
    return (cache.eigenvectors ** 2) @ np.exp(1j * cache.eigenvalues * t)


def prob_out(cache: SpectralCache, t: float) -> TransitionProfile:
    """P(m -> out) = 1 - |exp(i Gamma t)_mm|^2 for every vertex m."""
    if t < 0:
        raise ParameterError(f"time must be >= 0, got {t}")
    p = 1.0 - np.abs(return_amplitudes(cache, t)) ** 2
    if p.size and p.min() < -CLAMP_TOL:
        raise ArithmeticError(f"out-probability {p.min():.3e} below clamp tolerance")
    p = np.clip(p, 0.0, 1.0)
    p[~cache.active_mask] = 0.0
    return TransitionProfile(float(t), p, cache.active_mask.copy())


def transition_profile(g: Graph, t: float) -> TransitionProfile:
    """Out-probabilities on ``g``, decomposing only its non-isolated part."""
    deg = g.degrees()
    active = deg > 0
    p = np.zeros(g.n)
    idx = np.flatnonzero(active)
    if idx.size:
        gamma = normalized_gamma(g)[np.ix_(idx, idx)]
        p[idx] = prob_out(spectral_decompose(gamma), t).prob_out
    return TransitionProfile(float(t), p, active)


def decouple(g: Graph, v: int) -> Graph:
    """Drop every edge incident to ``v``; the vertex stays, isolated."""
    return g.without_vertex_edges(v)


@dataclass(frozen=True)
class FreezeParams:
    omega: float = DEFAULT_OMEGA
    frozen: frozenset[int] = frozenset()

    def __post_init__(self):
        if not self.omega > 1:
            raise ParameterError(f"omega must exceed 1, got {self.omega}")
        object.__setattr__(self, "frozen", frozenset(int(v) for v in self.frozen))


@dataclass(frozen=True)
class LeakageReport:
    """Penalty freezing versus hard decoupling, worst case over [0, t].

    ``leakage`` and ``max_amplitude_deviation`` are maxima over a time grid
    that resolves the 2*pi/Omega beat between the two evolutions; the
    ``final_*`` fields are the same quantities at time t alone, which
    oscillate in Omega and are kept for reference.
    """

    omega: float
    time: float
    frozen: tuple[int, ...]
    leakage: float
    max_amplitude_deviation: float
    final_leakage: float = 0.0
    final_amplitude_deviation: float = 0.0
    samples: int = 0

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "time": self.time,
            "frozen": list(self.frozen),
            "leakage": self.leakage,
            "max_amplitude_deviation": self.max_amplitude_deviation,
            "final_leakage": self.final_leakage,
            "final_amplitude_deviation": self.final_amplitude_deviation,
            "samples": self.samples,
        }


SAMPLES_PER_PERIOD = 16
MIN_SAMPLES = 4001
_CHUNK = 1 << 17


def freezing_hamiltonians(g: Graph, frozen, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """(penalty Hamiltonian, hard-decoupled Hamiltonian) on the original graph.

    With P_j/P_m the projectors on active/frozen vertices and H = I - Gamma,
    the hard version keeps only the diagonal blocks P_j H P_j + P_m H P_m. The
    penalty version is H + (Omega - 1) P_m: the same blocks plus the penalty,
    but with the active-frozen couplings still present, so decoupling has to
    come from the energy gap.
    """
    n = g.n
    h = np.eye(n) - normalized_gamma(g)
    pm = np.zeros((n, n))
    for v in frozen:
        pm[v, v] = 1.0
    pj = np.eye(n) - pm
    hard = pj @ h @ pj + pm @ h @ pm
    penalty = h + (omega - 1.0) * pm
    return penalty, hard


def _trajectory(h: np.ndarray, psi: np.ndarray, times: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh(h)
    return q @ (np.exp(-1j * np.outer(w, times)) * (q.T @ psi)[:, None])


def freeze_evolution_check(g: Graph, params: FreezeParams, t: float,
                           samples: int | None = None) -> LeakageReport:
    """Compare penalty freezing against hard decoupling from the uniform state."""
    for v in params.frozen:
        if not 0 <= v < g.n:
            raise ParameterError(f"frozen vertex {v} out of range for n={g.n}")
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    frozen = sorted(params.frozen)
    if not frozen:
        return LeakageReport(params.omega, float(t), (), 0.0, 0.0)
    if samples is None:
        beats = params.omega * t / (2 * math.pi)
        samples = max(MIN_SAMPLES, int(math.ceil(SAMPLES_PER_PERIOD * beats)) + 1)
    penalty, hard = freezing_hamiltonians(g, frozen, params.omega)
    psi0 = np.full(g.n, 1.0 / math.sqrt(g.n), dtype=complex)
    mask = np.zeros(g.n, dtype=bool)
    mask[frozen] = True
    times = np.linspace(0.0, t, samples)
    leak = dev = 0.0
    for lo in range(0, samples, _CHUNK):
        ts = times[lo:lo + _CHUNK]
        a = _trajectory(penalty, psi0, ts)
        b = _trajectory(hard, psi0, ts)
        pops = np.abs(np.sum(np.abs(a[mask]) ** 2, axis=0) - np.sum(np.abs(b[mask]) ** 2, axis=0))
        step = np.abs(a[~mask] - b[~mask]).max(axis=0) if (~mask).any() else np.zeros(len(ts))
        leak = max(leak, float(pops.max()))
        dev = max(dev, float(step.max()))
    return LeakageReport(params.omega, float(t), tuple(frozen), leak, dev,
                         float(pops[-1]), float(step[-1]), samples)


def trotter_exactness(g: Graph, t: float) -> float:
    """max_m | |exp(-i(I-Gamma)t)_mm| - |exp(i Gamma t)_mm| |, via two routes.

    The left side is a Pade matrix exponential of the full Hamiltonian; the
    right side uses the spectrum of Gamma alone.
    """
    gamma = normalized_gamma(g)
    h = np.eye(g.n) - gamma
    lhs = np.abs(np.diag(expm(-1j * h * t)))
    rhs = np.abs(return_amplitudes(spectral_decompose(gamma), t))
    return float(np.max(np.abs(lhs - rhs))) if g.n else 0.0


def unitarity_defect(g: Graph, t: float) -> float:
    """max_m | sum_j |exp(i Gamma t)_jm|^2 - 1 |."""
    u = spectral_decompose(normalized_gamma(g)).propagator(t)
    return float(np.max(np.abs(np.sum(np.abs(u) ** 2, axis=0) - 1.0))) if g.n else 0.0
