"""Near-field grid and matched-channel dictionary for coarse estimation.

Grid points are sampled on a Cartesian lattice (resolution epsilon along x
and y), kept when they fall inside the near-field annulus, and converted to
polar coordinates. Each dictionary column is the normalized vectorized Gram
of the channel at one grid point; the coarse estimate is the column with
maximum correlation magnitude against the observation.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelModel, channel, effective_channel
from .geometry import SystemConfig, UePosition, near_field_bounds
from .signaling import Observation

_CACHE_MAGIC = b"RLDC"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class Grid:
    """Near-field sample points in both polar and Cartesian coordinates.

    ``points`` has one row (r, theta, x, y) per grid point, in a
    deterministic order (ascending y, then ascending x).
    """

    points: np.ndarray
    epsilon: float

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def r(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def theta(self) -> np.ndarray:
        return self.points[:, 1]

    def write_csv(self, path) -> None:
        """Byte-stable CSV export (r, theta, x, y per row)."""
        with open(path, "w", newline="") as fh:
            fh.write("r,theta,x,y\n")
            for row in self.points:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


@dataclass(frozen=True)
class Dictionary:
    """Unit-norm reference columns (K^2 x M) with their grid coordinates."""

    columns: np.ndarray
    grid: Grid

    @property
    def m(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class CoarseEstimate:
    """Best-matching grid point. ``index`` is 1-based, like element indices."""

    index: int
    r: float
    theta: float
    score: float


def build_grid(cfg: SystemConfig, epsilon: float) -> Grid:
    """Cartesian lattice restricted to the near-field annulus.

    x runs over {epsilon, 2 epsilon, ...} and y over integer multiples of
    epsilon (both signs), bounded by the Rayleigh distance; points are kept
    when fresnel <= r <= rayleigh.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    fresnel, rayleigh = near_field_bounds(cfg)
    n_steps = int(math.floor(rayleigh / epsilon))
    if n_steps < 1:
        raise ValueError(
            f"epsilon={epsilon} leaves no lattice point inside the near field "
            f"(rayleigh={rayleigh:.3f})"
        )
    xs = epsilon * np.arange(1, n_steps + 1)
    ys = epsilon * np.arange(-n_steps, n_steps + 1)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")  # y-major ordering
    xx = xx.ravel()
    yy = yy.ravel()
    rr = np.hypot(xx, yy)
    keep = (rr >= fresnel) & (rr <= rayleigh)
    if not np.any(keep):
        raise ValueError(
            f"epsilon={epsilon} leaves no lattice point inside the near-field "
            f"annulus [{fresnel:.3f}, {rayleigh:.3f}]"
        )
    xx, yy, rr = xx[keep], yy[keep], rr[keep]
    theta = np.arctan2(yy, xx)  # x > 0 keeps this inside (-pi/2, pi/2)
    return Grid(points=np.column_stack([rr, theta, xx, yy]), epsilon=float(epsilon))


def build_dictionary(
    cfg: SystemConfig, grid: Grid, model: ChannelModel | str = ChannelModel.EXACT
) -> Dictionary:
    """Normalized vec(A_m^H A_m) columns for every grid point, grid order."""
    if grid.m == 0:
        raise ValueError("grid is empty")
    model = ChannelModel(model)
    k2 = cfg.k_ue**2
    cols = np.empty((k2, grid.m), dtype=np.complex128)
    for j in range(grid.m):
        pos = UePosition(float(grid.points[j, 0]), float(grid.points[j, 1]))
        h = effective_channel(channel(cfg, pos, model)).flatten(order="F")
        cols[:, j] = h / np.linalg.norm(h)
    return Dictionary(columns=cols, grid=grid)


def coarse_estimate(obs: Observation, dictionary: Dictionary) -> CoarseEstimate:
    """Grid point whose column best correlates with the observation.

    Maximizes |y_tilde^H Phi_m| over columns; ties resolve to the lowest
    index. The score is the winning correlation magnitude, bounded by
    ||y_tilde|| since columns have unit norm.
    """
    if obs.y_tilde.shape[0] != dictionary.columns.shape[0]:
        raise ValueError(
            f"observation length {obs.y_tilde.shape[0]} does not match "
            f"dictionary row count {dictionary.columns.shape[0]}"
        )
    corr = np.abs(obs.y_tilde.conj() @ dictionary.columns)
    best = int(np.argmax(corr))  # first occurrence wins ties
    return CoarseEstimate(
        index=best + 1,
        r=float(dictionary.grid.points[best, 0]),
        theta=float(dictionary.grid.points[best, 1]),
        score=float(corr[best]),
    )


def config_digest(cfg: SystemConfig, epsilon: float, model: ChannelModel | str) -> bytes:
    """32-byte digest identifying a (config, epsilon, model) combination."""
    model = ChannelModel(model)
    parts = [
        f"{cfg.wavelength!r}|{cfg.n_y}|{cfg.n_z}|{cfg.d_y!r}|{cfg.d_z!r}",
        f"{cfg.k_ue}|{cfg.d_u!r}|{cfg.ris_origin!r}|{cfg.p_t!r}|{cfg.l_slots}",
        f"{epsilon!r}|{model.value}",
    ]
    return hashlib.sha256("|".join(parts).encode()).digest()


def save_dictionary(
    dictionary: Dictionary, path, cfg: SystemConfig, model: ChannelModel | str
) -> None:
    """Write the binary sidecar: header, grid rows, raw column data."""
    digest = config_digest(cfg, dictionary.grid.epsilon, model)
    header = struct.pack(
        "<4sB32sdII", _CACHE_MAGIC, _CACHE_VERSION, digest,
        dictionary.grid.epsilon, dictionary.m, cfg.k_ue,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(dictionary.grid.points).tobytes())
        fh.write(np.ascontiguousarray(dictionary.columns).tobytes())


def load_dictionary(path, cfg: SystemConfig, epsilon: float, model: ChannelModel | str) -> Dictionary:
    """Read a sidecar written by :func:`save_dictionary`, verifying the key."""
    head_size = struct.calcsize("<4sB32sdII")
    with open(path, "rb") as fh:
        head = fh.read(head_size)
        if len(head) < head_size:
            raise ValueError(f"{path}: truncated dictionary cache header")
        magic, version, digest, eps, m, k = struct.unpack("<4sB32sdII", head)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a dictionary cache file")
        if version != _CACHE_VERSION:
            raise ValueError(f"{path}: unsupported cache version {version}")
        if digest != config_digest(cfg, epsilon, model):
            raise ValueError(f"{path}: cache was built for a different configuration")
        points = np.frombuffer(fh.read(m * 4 * 8), dtype=np.float64).reshape(m, 4).copy()
        cols = (
            np.frombuffer(fh.read(m * k * k * 16), dtype=np.complex128)
            .reshape(k * k, m)
            .copy()
        )
    return Dictionary(columns=cols, grid=Grid(points=points, epsilon=eps))


def get_dictionary(
    cfg: SystemConfig,
    epsilon: float,
    model: ChannelModel | str = ChannelModel.EXACT,
    cache_dir=None,
) -> Dictionary:
    """Build a dictionary, reusing a disk cache when ``cache_dir`` is set."""
    if cache_dir is None:
        return build_dictionary(cfg, build_grid(cfg, epsilon), model)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    digest = config_digest(cfg, epsilon, model)
    path = cache_dir / f"dict_{digest.hex()[:16]}.bin"
    if path.exists():
        return load_dictionary(path, cfg, epsilon, model)
    dictionary = build_dictionary(cfg, build_grid(cfg, epsilon), model)
    save_dictionary(dictionary, path, cfg, model)
    return dictionary
