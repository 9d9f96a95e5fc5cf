"""Reference-sequence transmission, noisy reception, and equalization.

The UE transmits a K x L reference block S with S S^H = (P_T / K) I_K,
receives Y = A^H diag(exp(j w)) A S + W through the RIS round trip, and
equalizes with the pseudo-inverse to recover the effective Gram channel
plus colored-down noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix
from .geometry import SystemConfig
from .ris_phase import PhaseConfig


@dataclass(frozen=True)
class ReferenceSequence:
    """K x L reference block satisfying S S^H = (P_T / K) I_K."""

    entries: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 2 or self.entries.shape[1] < self.entries.shape[0]:
            raise ValueError(
                f"reference block must be K x L with L >= K, got {self.entries.shape}"
            )
        gram = self.entries @ self.entries.conj().T
        scale = gram[0, 0].real
        if not np.allclose(gram, scale * np.eye(self.entries.shape[0]), atol=1e-10 * max(scale, 1.0)):
            raise ValueError("reference block does not satisfy S S^H = (P_T / K) I")

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @property
    def l(self) -> int:
        return self.entries.shape[1]

    @property
    def p_t(self) -> float:
        """Transmit power recovered from the Gram constraint."""
        return float(np.trace(self.entries @ self.entries.conj().T).real)


@dataclass(frozen=True)
class Observation:
    """Equalized, vectorized effective channel observation.

    ``y_tilde`` is vec(Y S^+) in column-major order, so entry
    i = (q - 1) K + p (1-based) corresponds to Gram entry (p, q).
    """

    y_tilde: np.ndarray
    snr_db: float
    sigma2: float

    def __post_init__(self):
        k2 = self.y_tilde.shape[0]
        k = math.isqrt(k2)
        if self.y_tilde.ndim != 1 or k * k != k2:
            raise ValueError(
                f"y_tilde must be a length-K^2 vector, got shape {self.y_tilde.shape}"
            )

    @property
    def k(self) -> int:
        return math.isqrt(self.y_tilde.shape[0])


def make_reference_sequence(cfg: SystemConfig) -> ReferenceSequence:
    """Scaled partial-DFT reference block.

    Takes the first K rows of the L-point DFT matrix, normalized so the
    rows are orthonormal, then scales by sqrt(P_T / K).
    """
    k, l = cfg.k_ue, cfg.l_slots
    if l < k:
        raise ValueError(f"need l_slots >= k_ue, got L={l} < K={k}")
    rows = np.arange(k)[:, None]
    cols = np.arange(l)[None, :]
    u = np.exp(-2j * np.pi * rows * cols / l) / math.sqrt(l)
    return ReferenceSequence(math.sqrt(cfg.p_t / k) * u)


def simulate_received(
    a: ChannelMatrix,
    phase: PhaseConfig,
    s: ReferenceSequence,
    sigma2: float,
    rng_seed,
) -> np.ndarray:
    """One received block Y = A^H diag(exp(j w)) A S + W.

    Noise entries are independent circularly symmetric complex Gaussian
    with variance ``sigma2`` per complex entry (sigma2 / 2 per real and
    imaginary part). ``rng_seed`` may be an integer or a numpy Generator;
    output is deterministic given the seed.
    """
    if phase.n != a.n:
        raise ValueError(f"phase length {phase.n} does not match element count {a.n}")
    if s.k != a.k:
        raise ValueError(f"reference sequence has {s.k} rows, channel has {a.k} columns")
    if sigma2 < 0:
        raise ValueError(f"noise variance must be nonnegative, got {sigma2}")
    noiseless = (a.entries.conj().T * np.exp(1j * phase.omega)[None, :]) @ (
        a.entries @ s.entries
    )
    if sigma2 == 0:
        return noiseless
    rng = np.random.default_rng(rng_seed)
    scale = math.sqrt(sigma2 / 2.0)
    w = scale * (
        rng.standard_normal(noiseless.shape) + 1j * rng.standard_normal(noiseless.shape)
    )
    return noiseless + w


def equalize(y: np.ndarray, s: ReferenceSequence, sigma2: float = float("nan")) -> Observation:
    """Equalize a received block with the reference pseudo-inverse.

    Returns vec(Y S^+) in column-major order. ``sigma2`` is carried along
    for bookkeeping; the per-entry noise variance after equalization is
    sigma2 * K / P_T when L = K.
    """
    if y.shape[1] != s.l:
        raise ValueError(f"received block has {y.shape[1]} slots, sequence has {s.l}")
    if y.shape[0] != s.k:
        raise ValueError(f"received block has {y.shape[0]} rows, sequence has {s.k}")
    # Row-orthonormal construction: S^+ = (K / P_T) S^H exactly.
    s_pinv = (s.k / s.p_t) * s.entries.conj().T
    y_eff = y @ s_pinv
    y_tilde = y_eff.flatten(order="F")
    snr_db = 10.0 * math.log10(s.p_t / sigma2) if sigma2 > 0 else float("inf")
    return Observation(y_tilde=y_tilde, snr_db=snr_db, sigma2=sigma2)
