"""Patch edge values from patch centre values.

Three coupling families:

* polynomial: truncated shift-operator expansion in the centred difference
  delta and mean mu, equivalent at full coupling strength to Lagrange
  interpolation through 2p+1 neighbouring centres evaluated at the patch
  edge offsets +-r;
* spectral: exact trigonometric shift of the periodic centre sequence;
* staggered: spectral interpolation of one patch parity's centres onto the
  other parity's edges, for staggered-field systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ConfigError, CouplingSpec, PatchGrid1D, StaggeredTags


@dataclass(frozen=True)
class StencilWeights:
    """Centre-value weights giving the edge values at offsets -r and +r.

    minus/plus have length 2p+1 and act on centres U_{j-p} .. U_{j+p}.
    """

    r: float
    p: int
    gamma: float
    minus: np.ndarray
    plus: np.ndarray

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.p, self.p + 1)


def _convolve_ops(a: np.ndarray, b: np.ndarray, width: int) -> np.ndarray:
    """Compose two difference operators given as coefficients over offsets."""
    centre = (width - 1) // 2
    out = np.zeros(width)
    for i, ai in enumerate(a):
        if ai == 0.0:
            continue
        shift = i - centre
        lo, hi = max(0, -shift), min(width, width - shift)
        out[lo + shift:hi + shift] += ai * b[lo:hi]
    return out


def stencil_weights(r: float, p: int, gamma: float = 1.0) -> StencilWeights:
    """Expand the gamma-graded edge-shift operator onto centre-value weights.

    The operator is 1 + sum_k gamma^k r prod_{j<k}(r^2-j^2)
    (+- mu delta^{2k-1}/(2k-1)! + r delta^{2k}/(2k)!) for k = 1..p, with
    delta and mu the centred difference and mean on the patch index.
    """
    if not 1 <= p <= 4:
        raise ConfigError("p", f"stencil half-width must lie in 1..4, got {p}")
    if not 0.0 <= r <= 1.0:
        raise ConfigError("r", f"need 0 <= r <= 1, got {r}")
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError("gamma", f"need 0 <= gamma <= 1, got {gamma}")
    width = 2 * p + 1
    centre = p
    ident = np.zeros(width)
    ident[centre] = 1.0
    mudelta = np.zeros(width)
    mudelta[centre - 1], mudelta[centre + 1] = -0.5, 0.5
    delta2 = np.zeros(width)
    delta2[centre - 1], delta2[centre], delta2[centre + 1] = 1.0, -2.0, 1.0

    plus = ident.copy()
    minus = ident.copy()
    odd_op = mudelta.copy()     # mu delta^(2k-1)
    even_op = delta2.copy()     # delta^(2k)
    prefactor = r
    for k in range(1, p + 1):
        if k > 1:
            prefactor *= r * r - (k - 1) ** 2
            odd_op = _convolve_ops(odd_op, delta2, width)
            even_op = _convolve_ops(even_op, delta2, width)
        g = gamma ** k
        c_odd = prefactor / math.factorial(2 * k - 1)
        c_even = prefactor * r / math.factorial(2 * k)
        plus = plus + g * (c_odd * odd_op + c_even * even_op)
        minus = minus + g * (-c_odd * odd_op + c_even * even_op)
    return StencilWeights(r=r, p=p, gamma=gamma, minus=minus, plus=plus)


def edge_values_polynomial(U: np.ndarray, grid: PatchGrid1D,
                           spec: CouplingSpec) -> tuple[np.ndarray, np.ndarray]:
    """Left and right edge values of every patch by polynomial coupling,
    with periodic wraparound of the centre sequence."""
    U = np.asarray(U)
    p = spec.order // 2
    if grid.npatch < 2 * p + 1:
        raise ConfigError("npatch",
                          f"order-{spec.order} coupling needs at least {2*p+1} patches, "
                          f"got {grid.npatch}")
    w = stencil_weights(grid.ratio, p, spec.gamma)
    left = np.zeros_like(U, dtype=float)
    right = np.zeros_like(U, dtype=float)
    for m, wm, wp in zip(w.offsets, w.minus, w.plus):
        shifted = np.roll(U, -m)        # shifted[j] = U[(j+m) mod N]
        left = left + wm * shifted
        right = right + wp * shifted
    return left, right


def spectral_shift(U: np.ndarray, shift: float, spacing: float) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a periodic sequence at all
    points displaced by ``shift``; the Nyquist mode shifts as a cosine so
    real input stays real."""
    U = np.asarray(U, dtype=float)
    N = U.shape[0]
    k = 2.0 * np.pi * np.fft.fftfreq(N, d=spacing)
    phase = np.exp(1j * k * shift)
    if N % 2 == 0:
        phase[N // 2] = np.cos(k[N // 2] * shift)
    return np.fft.ifft(np.fft.fft(U) * phase).real


def edge_values_spectral(U: np.ndarray, grid: PatchGrid1D) -> tuple[np.ndarray, np.ndarray]:
    """Edge values as exact Fourier shifts of the centre sequence by -+rH."""
    s = grid.ratio * grid.H
    return spectral_shift(U, -s, grid.H), spectral_shift(U, +s, grid.H)


def edge_values_staggered(U: np.ndarray, grid: PatchGrid1D,
                          tags: StaggeredTags) -> tuple[np.ndarray, np.ndarray]:
    """Edge values on a staggered patch grid: each parity's edges come from
    spectral interpolation of the other parity's centre subsequence."""
    if grid.npatch % 2:
        raise ConfigError("npatch", "staggered coupling needs an even patch count, "
                                    f"got {grid.npatch}")
    U = np.asarray(U, dtype=float)
    N = grid.npatch
    H, r = grid.H, grid.ratio
    left = np.zeros(N)
    right = np.zeros(N)
    # 0-based class A = patches 0,2,..., class B = patches 1,3,...
    for cls, other in ((np.arange(0, N, 2), np.arange(1, N, 2)),
                       (np.arange(1, N, 2), np.arange(0, N, 2))):
        src = U[other]                          # centres at spacing 2H
        fwd = spectral_shift(src, (1.0 - r) * H, 2.0 * H)
        bwd = spectral_shift(src, -(1.0 - r) * H, 2.0 * H)
        # patch cls[m] sits one H after other[m-1] and one H before other[m]
        left[cls] = np.roll(fwd, 1) if cls[0] == 0 else fwd
        right[cls] = bwd if cls[0] == 0 else np.roll(bwd, -1)
    return left, right
