"""RIS phase configuration: SNR objective and the co-phasing optimum.

The received-SNR objective ||A^H diag(exp(j w)) A||_F^2 depends on the phase
vector only through pairwise differences w_q - w_p, weighted by the
nonnegative row-correlation matrix |alpha_p^H alpha_q|^2. All summands are
co-phased by any constant vector, so the optimum needs no channel knowledge
and no optimizer at runtime; a randomized verifier double-checks the claim
empirically on concrete channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix


@dataclass(frozen=True)
class PhaseConfig:
    """Per-element RIS phase shifts, radians. Induces diag(exp(j omega))."""

    omega: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=np.float64)
        if om.ndim != 1:
            raise ValueError(f"omega must be a vector, got shape {om.shape}")
        if not np.all(np.isfinite(om)):
            raise ValueError("omega must be finite")
        object.__setattr__(self, "omega", om)

    @property
    def n(self) -> int:
        return self.omega.shape[0]


@dataclass(frozen=True)
class OptimalityReport:
    """Outcome of an empirical phase-optimality check."""

    optimum: float
    max_competitor: float
    margin: float
    trials: int
    seed: int


def snr_channel_term(a: ChannelMatrix, phase: PhaseConfig) -> float:
    """Phase-dependent SNR factor ||A^H diag(exp(j omega)) A||_F^2."""
    if phase.n != a.n:
        raise ValueError(
            f"phase vector length {phase.n} does not match element count {a.n}"
        )
    weighted = np.exp(1j * phase.omega)[:, None] * a.entries
    m = a.entries.conj().T @ weighted
    return float(np.sum(np.abs(m) ** 2))


def khatri_rao_gram(a: ChannelMatrix) -> np.ndarray:
    """Row-correlation matrix with entries |alpha_p^H alpha_q|^2.

    alpha_n is the n-th row of the channel matrix; the result is the real
    symmetric N x N Gram of the columnwise Kronecker lifting of A, with
    diagonal K^2.
    """
    g = a.entries.conj() @ a.entries.T
    return np.abs(g) ** 2


def optimal_phase(n: int) -> PhaseConfig:
    """SNR-maximizing phase vector: all elements co-phased (omega = 0)."""
    if n < 1:
        raise ValueError(f"element count must be >= 1, got {n}")
    return PhaseConfig(np.zeros(n))


def verify_optimality(a: ChannelMatrix, trials: int, rng_seed: int) -> OptimalityReport:
    """Compare the co-phased value against uniformly random phase vectors.

    Returns the co-phased objective value, the best value among ``trials``
    random competitors, and their difference (nonnegative up to rounding).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    optimum = snr_channel_term(a, optimal_phase(a.n))
    rng = np.random.default_rng(rng_seed)
    omegas = rng.uniform(0.0, 2.0 * np.pi, size=(trials, a.n))
    # Batched A^H diag(e^{j w}) A over all competitors.
    e = np.exp(1j * omegas)  # (T, N)
    m = np.einsum("nk,tn,nl->tkl", a.entries.conj(), e, a.entries, optimize=True)
    values = np.sum(np.abs(m) ** 2, axis=(1, 2)).real
    max_competitor = float(values.max())
    return OptimalityReport(
        optimum=optimum,
        max_competitor=max_competitor,
        margin=optimum - max_competitor,
        trials=trials,
        seed=rng_seed,
    )
