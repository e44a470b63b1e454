"""Coupled patch right-hand sides: interpolate edge values, call the user's
microscale RHS, and keep edge bookkeeping straight.

A microscale RHS is a callable (t, u, grid, ctx) -> du of the same shape; it
must fill interior points and may leave edge entries undefined. Edge entries
of the returned derivative are slaved variables and come back as zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .coupling import (edge_values_polynomial, edge_values_spectral,
                       edge_values_staggered)
from .grid import ConfigError, CouplingSpec, PatchGrid1D, PatchGrid2D, StaggeredTags
from .microsolve import SolverOptions, Trajectory, rk45_adaptive


class RHSError(RuntimeError):
    pass


@dataclass
class PatchContext:
    """Per-run parameter payload handed to the microscale RHS (for example a
    replicated heterogeneous diffusivity column or staggered tags)."""

    params: dict = field(default_factory=dict)
    tags: StaggeredTags | None = None

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)


def _edges_1d(U: np.ndarray, grid: PatchGrid1D, spec: CouplingSpec,
              ctx: PatchContext | None):
    if spec.mode == "spectral":
        return edge_values_spectral(U, grid)
    if spec.mode == "staggered":
        tags = ctx.tags if ctx is not None else None
        if tags is None:
            raise ConfigError("tags", "staggered coupling needs StaggeredTags in the context")
        return edge_values_staggered(U, grid, tags)
    return edge_values_polynomial(U, grid, spec)


def insert_edges_1d(u: np.ndarray, grid: PatchGrid1D, spec: CouplingSpec,
                    ctx: PatchContext | None = None) -> np.ndarray:
    """Copy of the field with edge rows overwritten by interpolated values."""
    work = np.array(u, dtype=float, copy=True)
    left, right = _edges_1d(work[grid.centre_index, :], grid, spec, ctx)
    work[0, :] = left
    work[-1, :] = right
    return work


def patch_smooth_1(t: float, state: np.ndarray, grid: PatchGrid1D,
                   spec: CouplingSpec, rhs: Callable,
                   ctx: PatchContext | None = None) -> np.ndarray:
    """Time derivative of a 1D patch field with edges slaved to the coupling."""
    flat = state.ndim == 1
    u = state.reshape(grid.nsub, grid.npatch) if flat else state
    if u.shape != (grid.nsub, grid.npatch):
        raise RHSError(f"state shape {state.shape} does not match grid "
                       f"({grid.nsub}, {grid.npatch})")
    work = insert_edges_1d(u, grid, spec, ctx)
    du = np.asarray(rhs(t, work, grid, ctx), dtype=float)
    if du.shape != work.shape:
        raise RHSError(f"rhs returned shape {du.shape}, expected {work.shape}")
    interior = du[1:-1, :]
    if not np.all(np.isfinite(interior)):
        bad = np.where(~np.isfinite(interior).all(axis=0))[0]
        raise RHSError(f"rhs produced non-finite interior values in patch(es) {bad.tolist()}")
    du = du.copy()
    du[0, :] = 0.0
    du[-1, :] = 0.0
    return du.ravel() if flat else du


def insert_edges_2d(u: np.ndarray, grid: PatchGrid2D, spec: CouplingSpec) -> np.ndarray:
    """Edge frames by direction-by-direction interpolation: x-edges from the
    centre micro-column of each patch row, then y-edges from centre micro-rows
    (corners picked up by the y pass)."""
    nx, ny = grid.nsub
    Nx, Ny = grid.npatch
    icx, icy = grid.centre_index
    work = np.array(u, dtype=float, copy=True)
    gx = PatchGrid1D(xlim=grid.xlim, npatch=Nx, ratio=grid.ratio[0], nsub=nx,
                     H=grid.H[0], dx=grid.dx[0], X=grid.X, x=grid.x)
    gy = PatchGrid1D(xlim=grid.ylim, npatch=Ny, ratio=grid.ratio[1], nsub=ny,
                     H=grid.H[1], dx=grid.dx[1], X=grid.Y, x=grid.y)
    for l in range(Ny):
        for j in range(ny):
            left, right = _edges_1d(work[icx, j, :, l], gx, spec, None)
            work[0, j, :, l] = left
            work[-1, j, :, l] = right
    for k in range(Nx):
        for i in range(nx):
            bottom, top = _edges_1d(work[i, icy, k, :], gy, spec, None)
            work[i, 0, k, :] = bottom
            work[i, -1, k, :] = top
    return work


def patch_smooth_2(t: float, state: np.ndarray, grid: PatchGrid2D,
                   spec: CouplingSpec, rhs: Callable,
                   ctx: PatchContext | None = None) -> np.ndarray:
    """Time derivative of a 2D patch field with edge frames slaved."""
    nx, ny = grid.nsub
    Nx, Ny = grid.npatch
    flat = state.ndim == 1
    u = state.reshape(nx, ny, Nx, Ny) if flat else state
    if u.shape != (nx, ny, Nx, Ny):
        raise RHSError(f"state shape {state.shape} does not match grid "
                       f"({nx}, {ny}, {Nx}, {Ny})")
    work = insert_edges_2d(u, grid, spec)
    du = np.asarray(rhs(t, work, grid, ctx), dtype=float)
    if du.shape != work.shape:
        raise RHSError(f"rhs returned shape {du.shape}, expected {work.shape}")
    interior = du[1:-1, 1:-1, :, :]
    if not np.all(np.isfinite(interior)):
        bad = np.argwhere(~np.isfinite(interior).reshape(-1, Nx, Ny).all(axis=0))
        raise RHSError(f"rhs produced non-finite interior values in patch(es) "
                       f"{bad.tolist()}")
    du = du.copy()
    du[0, :, :, :] = 0.0
    du[-1, :, :, :] = 0.0
    du[:, 0, :, :] = 0.0
    du[:, -1, :, :] = 0.0
    return du.ravel() if flat else du


def simulate_patches(grid, spec: CouplingSpec, rhs: Callable, u0: np.ndarray,
                     tspan: tuple[float, float], opts: SolverOptions | None = None,
                     ctx: PatchContext | None = None) -> Trajectory:
    """Integrate the coupled patch system; stored states have their edge
    entries refreshed by interpolation so plots show consistent edges."""
    if isinstance(grid, PatchGrid2D):
        smooth = patch_smooth_2
        shape = (*grid.nsub, *grid.npatch)
    else:
        smooth = patch_smooth_1
        shape = (grid.nsub, grid.npatch)

    def f(t, v):
        return smooth(t, v, grid, spec, rhs, ctx)

    traj = rk45_adaptive(f, tspan[0], tspan[1], np.asarray(u0, float).ravel(), opts)
    refreshed = np.empty_like(traj.states)
    for i, row in enumerate(traj.states):
        u = row.reshape(shape)
        if isinstance(grid, PatchGrid2D):
            refreshed[i] = insert_edges_2d(u, grid, spec).ravel()
        else:
            refreshed[i] = insert_edges_1d(u, grid, spec, ctx).ravel()
    return Trajectory(traj.times, refreshed)
