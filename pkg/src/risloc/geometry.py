"""System geometry: array element layout and near-field boundaries.

Coordinate frame: the reflecting surface is a uniform planar array in the
yz-plane anchored at ``ris_origin``; the user terminal carries a uniform
linear array on the z=0 plane, oriented along the y axis, and is described
in polar coordinates (range, azimuth) about the coordinate origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Unit vector along the UE array axis.
UE_AXIS = np.array([0.0, 1.0, 0.0])


def direction(theta: float) -> np.ndarray:
    """Unit vector [cos(theta), sin(theta), 0] for azimuth theta."""
    return np.array([math.cos(theta), math.sin(theta), 0.0])


@dataclass(frozen=True)
class SystemConfig:
    """Physical constants of one simulation setup.

    Attributes:
        wavelength: carrier wavelength in meters (config key ``lambda``).
        n_y, n_z: RIS element counts along the y and z axes.
        d_y, d_z: RIS inter-element spacings in meters.
        k_ue: number of UE antenna elements.
        d_u: UE inter-antenna spacing in meters.
        ris_origin: position of RIS element (1, 1) in meters.
        p_t: transmit power in watts.
        l_slots: number of transmission slots (defaults to ``k_ue``).
    """

    wavelength: float = 0.1
    n_y: int = 8
    n_z: int = 8
    d_y: float = 0.05
    d_z: float = 0.05
    k_ue: int = 8
    d_u: float = 0.05
    ris_origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    p_t: float = 1.0
    l_slots: int = 0  # 0 means "same as k_ue", resolved below

    def __post_init__(self):
        if self.l_slots == 0:
            object.__setattr__(self, "l_slots", self.k_ue)
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        for name in ("d_y", "d_z", "d_u"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_y < 1 or self.n_z < 1:
            raise ValueError(f"element counts must be >= 1, got n_y={self.n_y}, n_z={self.n_z}")
        if self.k_ue < 1:
            raise ValueError(f"k_ue must be >= 1, got {self.k_ue}")
        if self.l_slots < self.k_ue:
            raise ValueError(
                f"l_slots={self.l_slots} < k_ue={self.k_ue}: the equalizer needs at "
                "least as many slots as UE antennas"
            )
        if self.p_t <= 0:
            raise ValueError(f"p_t must be positive, got {self.p_t}")
        if len(self.ris_origin) != 3:
            raise ValueError("ris_origin must be a 3-vector")
        object.__setattr__(self, "ris_origin", tuple(float(v) for v in self.ris_origin))

    @property
    def n(self) -> int:
        """Total RIS element count N = n_y * n_z."""
        return self.n_y * self.n_z


@dataclass(frozen=True)
class UePosition:
    """UE reference-element location in polar coordinates about the origin."""

    r: float
    theta: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"range must be positive, got {self.r}")
        if not -math.pi / 2 < self.theta < math.pi / 2:
            raise ValueError(
                f"azimuth must lie in (-pi/2, pi/2), got {self.theta}"
            )

    @property
    def xyz(self) -> np.ndarray:
        """Cartesian position r * [cos(theta), sin(theta), 0]."""
        return self.r * direction(self.theta)


class NearFieldBounds(NamedTuple):
    fresnel: float
    rayleigh: float


def element_indices(cfg: SystemConfig, n: int) -> tuple[int, int]:
    """Decode a linear RIS element index n (1-based) into (n_y, n_z).

    The linear index counts z-fastest: n = (n_y - 1) * N_z + n_z.
    """
    if not 1 <= n <= cfg.n:
        raise IndexError(f"element index {n} out of range 1..{cfg.n}")
    q, rem = divmod(n - 1, cfg.n_z)
    return q + 1, rem + 1


def element_index(cfg: SystemConfig, n_y: int, n_z: int) -> int:
    """Inverse of :func:`element_indices`: (n_y, n_z) -> linear index."""
    if not (1 <= n_y <= cfg.n_y and 1 <= n_z <= cfg.n_z):
        raise IndexError(f"grid index ({n_y}, {n_z}) out of range")
    return (n_y - 1) * cfg.n_z + n_z


def ue_element_position(cfg: SystemConfig, pos: UePosition, k: int) -> np.ndarray:
    """Position of the k-th UE antenna element (1-based), in meters."""
    if not 1 <= k <= cfg.k_ue:
        raise IndexError(f"UE element index {k} out of range 1..{cfg.k_ue}")
    return pos.xyz + (k - 1) * cfg.d_u * UE_AXIS


def ris_element_position(cfg: SystemConfig, n: int) -> np.ndarray:
    """Position of the n-th RIS element (1-based), in meters."""
    ny, nz = element_indices(cfg, n)
    return np.asarray(cfg.ris_origin) + np.array(
        [0.0, (ny - 1) * cfg.d_y, (nz - 1) * cfg.d_z]
    )


def ue_element_positions(cfg: SystemConfig, pos: UePosition) -> np.ndarray:
    """All UE element positions stacked as a (K, 3) array."""
    offsets = np.arange(cfg.k_ue)[:, None] * cfg.d_u * UE_AXIS[None, :]
    return pos.xyz[None, :] + offsets


def ris_element_positions(cfg: SystemConfig) -> np.ndarray:
    """All RIS element positions stacked as an (N, 3) array, linear-index order."""
    idx = np.arange(cfg.n)
    ny = idx // cfg.n_z  # zero-based
    nz = idx % cfg.n_z
    out = np.zeros((cfg.n, 3))
    out[:, 1] = ny * cfg.d_y
    out[:, 2] = nz * cfg.d_z
    return out + np.asarray(cfg.ris_origin)[None, :]


def near_field_bounds(cfg: SystemConfig) -> NearFieldBounds:
    """Fresnel and Rayleigh distances of the RIS aperture, in meters.

    The aperture dimensions are a = (N_y - 1) d_y and b = (N_z - 1) d_z;
    the bounds are 0.62 * sqrt((a^2 + b^2)^1.5 / lambda) and
    2 (a^2 + b^2) / lambda.
    """
    a = (cfg.n_y - 1) * cfg.d_y
    b = (cfg.n_z - 1) * cfg.d_z
    ap2 = a * a + b * b
    fresnel = 0.62 * math.sqrt(ap2**1.5 / cfg.wavelength)
    rayleigh = 2.0 * ap2 / cfg.wavelength
    return NearFieldBounds(fresnel, rayleigh)
