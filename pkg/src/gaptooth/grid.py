"""Multiscale patch geometries in one and two space dimensions.

A patch grid tiles a periodic macroscale interval with ``npatch`` equispaced
patches of half-width ``ratio * H``, each carrying its own fine micro lattice
of ``nsub`` points whose first and last points are the patch edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

VALID_ORDERS = (0, 2, 4, 6, 8, -1)


class ConfigError(ValueError):
    """A patch configuration parameter is unusable; names the offending field."""

    def __init__(self, fieldname: str, message: str):
        self.fieldname = fieldname
        super().__init__(f"{fieldname}: {message}")


@dataclass(frozen=True)
class CouplingSpec:
    """How patch edge values are built from patch centre values.

    mode is 'polynomial' (order = 2p Lagrange interpolation through 2p+1
    centres), 'spectral' (trigonometric shift), or 'staggered' (spectral on
    alternating patch parities). gamma scales the coupling strength; gamma=1
    is full coupling and gamma=0 isolates the patches.
    """

    mode: str
    order: int = 0          # 2p for polynomial mode, else 0
    gamma: float = 1.0

    def __post_init__(self):
        if self.mode not in ("polynomial", "spectral", "staggered"):
            raise ConfigError("mode", f"unknown coupling mode {self.mode!r}")
        if self.mode == "polynomial" and (self.order % 2 or not 2 <= self.order <= 8):
            raise ConfigError("order", f"polynomial order must be even in [2, 8], got {self.order}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma", f"coupling strength must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class PatchGrid1D:
    xlim: tuple[float, float]
    npatch: int
    ratio: float
    nsub: int
    H: float
    dx: float
    X: np.ndarray           # (npatch,) patch centres
    x: np.ndarray           # (nsub, npatch) micro points, x[i, j] in patch j
    periodic: bool = True

    @property
    def centre_index(self) -> int:
        return (self.nsub - 1) // 2

    def centre_values(self, u: np.ndarray) -> np.ndarray:
        return u[self.centre_index, :]

    def to_json(self) -> str:
        return json.dumps({
            "xlim": list(self.xlim), "npatch": self.npatch, "ratio": self.ratio,
            "nsub": self.nsub, "H": self.H, "dx": self.dx,
            "X": self.X.tolist(), "x": self.x.tolist(), "periodic": self.periodic,
        })


@dataclass(frozen=True)
class PatchGrid2D:
    xlim: tuple[float, float]
    ylim: tuple[float, float]
    npatch: tuple[int, int]
    ratio: tuple[float, float]
    nsub: tuple[int, int]
    H: tuple[float, float]
    dx: tuple[float, float]
    X: np.ndarray           # (Nx,)
    Y: np.ndarray           # (Ny,)
    x: np.ndarray           # (nx, Nx)
    y: np.ndarray           # (ny, Ny)
    periodic: bool = True

    @property
    def centre_index(self) -> tuple[int, int]:
        return ((self.nsub[0] - 1) // 2, (self.nsub[1] - 1) // 2)

    def to_json(self) -> str:
        return json.dumps({
            "xlim": list(self.xlim), "ylim": list(self.ylim),
            "npatch": list(self.npatch), "ratio": list(self.ratio),
            "nsub": list(self.nsub), "H": list(self.H), "dx": list(self.dx),
            "X": self.X.tolist(), "Y": self.Y.tolist(),
            "x": self.x.tolist(), "y": self.y.tolist(), "periodic": self.periodic,
        })


@dataclass(frozen=True)
class StaggeredTags:
    """Parity masks splitting a 1D patch grid into h-points and u-points."""

    h_mask: np.ndarray      # (nsub, npatch) bool
    u_mask: np.ndarray

    def __post_init__(self):
        if (self.h_mask & self.u_mask).any() or not (self.h_mask | self.u_mask).all():
            raise ConfigError("masks", "h and u masks must partition the micro points")


def _validate_1d(npatch, ordcc, ratio, nsub):
    if not isinstance(npatch, (int, np.integer)) or npatch < 1:
        raise ConfigError("npatch", f"need a positive integer, got {npatch}")
    if ordcc not in VALID_ORDERS:
        raise ConfigError("ordcc", f"coupling order must be one of {VALID_ORDERS}, got {ordcc}")
    if not 0.0 < ratio <= 1.0:
        raise ConfigError("ratio", f"need 0 < ratio <= 1, got {ratio}")
    if not isinstance(nsub, (int, np.integer)) or nsub < 3 or nsub % 2 == 0:
        raise ConfigError("nsub", f"need an odd integer >= 3, got {nsub}")


def _geometry(xlim, npatch, ratio, nsub):
    lo, hi = float(xlim[0]), float(xlim[1])
    if not hi > lo:
        raise ConfigError("xlim", f"need xlim[0] < xlim[1], got {xlim}")
    H = (hi - lo) / npatch
    dx = 2.0 * ratio * H / (nsub - 1)
    X = lo + (np.arange(1, npatch + 1) - 0.5) * H
    offsets = (np.arange(nsub) - (nsub - 1) // 2) * dx
    x = X[None, :] + offsets[:, None]
    return H, dx, X, x


def config_patches_1d(xlim, npatch: int, ordcc: int, ratio: float,
                      nsub: int, gamma: float = 1.0) -> tuple[PatchGrid1D, CouplingSpec]:
    """Configure a 1D patch grid plus its inter-patch coupling rule.

    ordcc 0 requests spectral interpolation, -1 staggered spectral, and an
    even value 2..8 polynomial interpolation of that order.
    """
    _validate_1d(npatch, ordcc, ratio, nsub)
    H, dx, X, x = _geometry(xlim, npatch, ratio, nsub)
    grid = PatchGrid1D(xlim=(float(xlim[0]), float(xlim[1])), npatch=int(npatch),
                       ratio=float(ratio), nsub=int(nsub), H=H, dx=dx, X=X, x=x)
    if ordcc == 0:
        spec = CouplingSpec(mode="spectral", gamma=gamma)
    elif ordcc == -1:
        spec = CouplingSpec(mode="staggered", gamma=gamma)
    else:
        spec = CouplingSpec(mode="polynomial", order=ordcc, gamma=gamma)
    return grid, spec


def _pair(value, name):
    if np.isscalar(value):
        return (value, value)
    value = tuple(value)
    if len(value) != 2:
        raise ConfigError(name, f"need a scalar or a pair, got {value}")
    return value


def config_patches_2d(xlim, ylim, npatch, ordcc: int, ratio,
                      nsub, gamma: float = 1.0) -> tuple[PatchGrid2D, CouplingSpec]:
    """Configure a 2D patch grid; scalar parameters broadcast to both directions."""
    npatch = _pair(npatch, "npatch")
    ratio = _pair(ratio, "ratio")
    nsub = _pair(nsub, "nsub")
    if ordcc == -1:
        raise ConfigError("ordcc", "staggered coupling is 1D only")
    for d, (np_, r_, ns_) in enumerate(zip(npatch, ratio, nsub)):
        _validate_1d(np_, ordcc, r_, ns_)
    Hx, dxx, X, x = _geometry(xlim, npatch[0], ratio[0], nsub[0])
    Hy, dyy, Y, y = _geometry(ylim, npatch[1], ratio[1], nsub[1])
    grid = PatchGrid2D(xlim=(float(xlim[0]), float(xlim[1])),
                       ylim=(float(ylim[0]), float(ylim[1])),
                       npatch=(int(npatch[0]), int(npatch[1])),
                       ratio=(float(ratio[0]), float(ratio[1])),
                       nsub=(int(nsub[0]), int(nsub[1])),
                       H=(Hx, Hy), dx=(dxx, dyy), X=X, Y=Y, x=x, y=y)
    if ordcc == 0:
        spec = CouplingSpec(mode="spectral", gamma=gamma)
    else:
        spec = CouplingSpec(mode="polynomial", order=ordcc, gamma=gamma)
    return grid, spec


def staggered_tags(grid: PatchGrid1D) -> StaggeredTags:
    """Tag micro points by (i+j) parity so that centre points alternate
    between h-patches (odd patch number) and u-patches (even)."""
    if not isinstance(grid, PatchGrid1D):
        raise ConfigError("grid", "staggered tags are defined for 1D grids")
    i = np.arange(grid.nsub)[:, None]
    j = np.arange(grid.npatch)[None, :]
    # parity referenced to the patch centre row: patch 1, 3, ... (1-based)
    # carry h at their centre point regardless of nsub
    h_mask = (i - grid.centre_index + j) % 2 == 0
    return StaggeredTags(h_mask=h_mask, u_mask=~h_mask)
