"""Hot microscale stencil kernels.

Every kernel has a pure-numpy implementation and, when numba is importable
and ``GAPTOOTH_NO_NUMBA`` is unset, an @njit twin compiled from the same
source function. The jitted path matters inside stiff time loops where the
same small stencil is evaluated tens of thousands of times.

Kernels write interior derivatives only; edge rows are the caller's business
(they are slaved to the inter-patch coupling).
"""

import os

import numpy as np

_FLAG = os.environ.get("GAPTOOTH_NO_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in ("1", "true", "yes")

if NUMBA_REQUESTED:
    try:
        from numba import njit
        NUMBA_ACTIVE = True
    except ImportError:  # pragma: no cover
        NUMBA_ACTIVE = False
else:
    NUMBA_ACTIVE = False

if not NUMBA_ACTIVE:
    def njit(*args, **kwargs):
        """Identity decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _diffusion_1d(u, dx, out):
    n, npatch = u.shape
    for j in range(npatch):
        for i in range(1, n - 1):
            out[i, j] = (u[i + 1, j] - 2.0 * u[i, j] + u[i - 1, j]) / (dx * dx)


def _burgers_1d(u, dx, advect, out):
    n, npatch = u.shape
    for j in range(npatch):
        for i in range(1, n - 1):
            out[i, j] = (u[i + 1, j] - 2.0 * u[i, j] + u[i - 1, j]) / (dx * dx) \
                - advect * u[i, j] * (u[i + 1, j] - u[i - 1, j]) / (2.0 * dx)


def _hetero_diffusion_1d(u, c, dx, out):
    # c[g] is the diffusivity of the bond between micro points g and g+1
    n, npatch = u.shape
    for j in range(npatch):
        for i in range(1, n - 1):
            out[i, j] = (c[i] * (u[i + 1, j] - u[i, j])
                         - c[i - 1] * (u[i, j] - u[i - 1, j])) / (dx * dx)


def _staggered_wave_1d(u, dx, c1, c2, hmask, out):
    # both parities' candidate derivatives, masked by parity: h-points take
    # the depth equation (-c1 u_x), u-points the velocity one (-c2 h_x)
    n, npatch = u.shape
    for j in range(npatch):
        for i in range(1, n - 1):
            d = -(u[i + 1, j] - u[i - 1, j]) / (2.0 * dx)
            out[i, j] = c1 * d if hmask[i, j] else c2 * d


def _cubic_diffusion_2d(u, dx, dy, out):
    nx, ny, npx, npy = u.shape
    for k in range(npx):
        for l in range(npy):
            for i in range(1, nx - 1):
                for j in range(1, ny - 1):
                    uc = u[i, j, k, l] ** 3
                    out[i, j, k, l] = (
                        (u[i + 1, j, k, l] ** 3 - 2.0 * uc + u[i - 1, j, k, l] ** 3) / (dx * dx)
                        + (u[i, j + 1, k, l] ** 3 - 2.0 * uc + u[i, j - 1, k, l] ** 3) / (dy * dy)
                    )


def _nonlin_patch_1d(u, dx, out):
    # single-patch u * u_xx
    n = u.shape[0]
    for i in range(1, n - 1):
        out[i] = u[i] * (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx)


# numpy reference implementations (vectorised, identical results)

def _diffusion_1d_numpy(u, dx, out):
    out[1:-1, :] = (u[2:, :] - 2.0 * u[1:-1, :] + u[:-2, :]) / dx**2


def _burgers_1d_numpy(u, dx, advect, out):
    out[1:-1, :] = (u[2:, :] - 2.0 * u[1:-1, :] + u[:-2, :]) / dx**2 \
        - advect * u[1:-1, :] * (u[2:, :] - u[:-2, :]) / (2.0 * dx)


def _hetero_diffusion_1d_numpy(u, c, dx, out):
    flux = c[:, None] * np.diff(u, axis=0)
    out[1:-1, :] = np.diff(flux, axis=0) / dx**2


def _staggered_wave_1d_numpy(u, dx, c1, c2, hmask, out):
    ht = -c1 * (u[2:, :] - u[:-2, :]) / (2.0 * dx)
    ut = -c2 * (u[2:, :] - u[:-2, :]) / (2.0 * dx)
    out[1:-1, :] = np.where(hmask[1:-1, :], ht, ut)


def _cubic_diffusion_2d_numpy(u, dx, dy, out):
    w = u**3
    out[1:-1, 1:-1, :, :] = (
        (w[2:, 1:-1] - 2.0 * w[1:-1, 1:-1] + w[:-2, 1:-1]) / dx**2
        + (w[1:-1, 2:] - 2.0 * w[1:-1, 1:-1] + w[1:-1, :-2]) / dy**2
    )


def _nonlin_patch_1d_numpy(u, dx, out):
    out[1:-1] = u[1:-1] * (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2


if NUMBA_ACTIVE:
    diffusion_1d = njit(cache=True)(_diffusion_1d)
    burgers_1d = njit(cache=True)(_burgers_1d)
    hetero_diffusion_1d = njit(cache=True)(_hetero_diffusion_1d)
    staggered_wave_1d = njit(cache=True)(_staggered_wave_1d)
    cubic_diffusion_2d = njit(cache=True)(_cubic_diffusion_2d)
    nonlin_patch_1d = njit(cache=True)(_nonlin_patch_1d)
else:
    diffusion_1d = _diffusion_1d_numpy
    burgers_1d = _burgers_1d_numpy
    hetero_diffusion_1d = _hetero_diffusion_1d_numpy
    staggered_wave_1d = _staggered_wave_1d_numpy
    cubic_diffusion_2d = _cubic_diffusion_2d_numpy
    nonlin_patch_1d = _nonlin_patch_1d_numpy

NUMPY_KERNELS = {
    "diffusion_1d": _diffusion_1d_numpy,
    "burgers_1d": _burgers_1d_numpy,
    "hetero_diffusion_1d": _hetero_diffusion_1d_numpy,
    "staggered_wave_1d": _staggered_wave_1d_numpy,
    "cubic_diffusion_2d": _cubic_diffusion_2d_numpy,
    "nonlin_patch_1d": _nonlin_patch_1d_numpy,
}

LOOP_KERNELS = {
    "diffusion_1d": _diffusion_1d,
    "burgers_1d": _burgers_1d,
    "hetero_diffusion_1d": _hetero_diffusion_1d,
    "staggered_wave_1d": _staggered_wave_1d,
    "cubic_diffusion_2d": _cubic_diffusion_2d,
    "nonlin_patch_1d": _nonlin_patch_1d,
}
