"""Line-of-sight UE-RIS channel synthesis.

Two phase models live behind one matrix type: the exact model uses true
Euclidean element-to-element distances, the Fresnel model uses the
second-order expansion that the refinement stage differentiates in closed
form. Entries are pure phase (no path-loss factor); received power is
controlled entirely through the noise variance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    SystemConfig,
    UePosition,
    direction,
    ris_element_position,
    ris_element_positions,
    ue_element_positions,
)

TWO_PI = 2.0 * math.pi


class ChannelModel(str, enum.Enum):
    EXACT = "exact"
    FRESNEL = "fresnel"


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex N x K response between the UE array and the RIS.

    Column k holds the per-element phases seen from the k-th UE antenna.
    Every entry has unit modulus.
    """

    entries: np.ndarray
    model_tag: ChannelModel

    def __post_init__(self):
        if self.entries.ndim != 2:
            raise ValueError(f"channel entries must be 2-D, got shape {self.entries.shape}")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return self.entries.shape[1]


def exact_channel(cfg: SystemConfig, pos: UePosition) -> ChannelMatrix:
    """Channel matrix with exact spherical-wavefront distances.

    Entry (n, k) is exp(-j 2 pi ||u_k - s_n|| / lambda).
    """
    sn = ris_element_positions(cfg)  # (N, 3)
    uk = ue_element_positions(cfg, pos)  # (K, 3)
    dist = np.linalg.norm(sn[:, None, :] - uk[None, :, :], axis=2)
    entries = np.exp(-1j * TWO_PI * dist / cfg.wavelength)
    return ChannelMatrix(entries, ChannelModel.EXACT)


def fresnel_phase_distance(cfg: SystemConfig, pos: UePosition, p: int, n: int) -> float:
    """Second-order approximation of the distance between UE element p and RIS element n.

    Expands ||u_p - s_n|| about the UE range r, keeping the quadratic
    aperture term; the approximation error shrinks as r grows.
    """
    if not 1 <= p <= cfg.k_ue:
        raise IndexError(f"UE element index {p} out of range 1..{cfg.k_ue}")
    return float(_fresnel_distances(cfg, pos)[n - 1, p - 1])


def _fresnel_distances(cfg: SystemConfig, pos: UePosition) -> np.ndarray:
    """All Fresnel-approximated distances as an (N, K) array."""
    r = pos.r
    sn = ris_element_positions(cfg)
    sn_norm2 = np.sum(sn * sn, axis=1)  # (N,)
    g_sn = sn[:, 1]  # y-component, the projection on the UE array axis
    e_sn = sn @ direction(pos.theta)  # (N,)
    poff = np.arange(cfg.k_ue) * cfg.d_u  # (p-1) d_u, (K,)
    sin_t = math.sin(pos.theta)
    return (
        r
        + (poff[None, :] ** 2 + sn_norm2[:, None]) / (2.0 * r)
        + poff[None, :] * (sin_t - g_sn[:, None] / r)
        - e_sn[:, None]
    )


def fresnel_channel(cfg: SystemConfig, pos: UePosition) -> ChannelMatrix:
    """Channel matrix built from Fresnel-approximated distances."""
    dist = _fresnel_distances(cfg, pos)
    entries = np.exp(-1j * TWO_PI * dist / cfg.wavelength)
    return ChannelMatrix(entries, ChannelModel.FRESNEL)


def channel(cfg: SystemConfig, pos: UePosition, model: ChannelModel | str) -> ChannelMatrix:
    """Dispatch to :func:`exact_channel` or :func:`fresnel_channel` by tag."""
    model = ChannelModel(model)
    if model is ChannelModel.EXACT:
        return exact_channel(cfg, pos)
    return fresnel_channel(cfg, pos)


def a_pq(cfg: SystemConfig, pos: UePosition, p: int, q: int, n: int) -> complex:
    """Cross-element phase term conj(a_{n,p}) * a_{n,q} under the Fresnel model.

    Only the terms that differ between UE elements p and q survive; the
    range-only and element-only phase contributions cancel, leaving

        exp(-j 2 pi / lambda * (d_u^2 D / (2 r) + d_u d (sin(theta) - g.s_n / r)))

    with D = (q-1)^2 - (p-1)^2 and d = q - p.
    """
    if not (1 <= p <= cfg.k_ue and 1 <= q <= cfg.k_ue):
        raise IndexError(f"UE element pair ({p}, {q}) out of range 1..{cfg.k_ue}")
    sn = ris_element_position(cfg, n)
    big_d = (q - 1) ** 2 - (p - 1) ** 2
    small_d = q - p
    phase = (
        -TWO_PI
        / cfg.wavelength
        * (
            cfg.d_u**2 * big_d / (2.0 * pos.r)
            + cfg.d_u * small_d * (math.sin(pos.theta) - sn[1] / pos.r)
        )
    )
    return complex(math.cos(phase), math.sin(phase))


def effective_channel(a: ChannelMatrix) -> np.ndarray:
    """Round-trip Gram matrix A^H A observed after equalization.

    Hermitian K x K with diagonal equal to N.
    """
    return a.entries.conj().T @ a.entries
