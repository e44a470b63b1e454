"""Closed-form homogenisation results for period-two lattice diffusion and
waves, boundary coefficients via cell transfer matrices, one-patch effective
diffusivities (formula and matrix spectrum), a Bloch dispersion oracle, and
the overlapping-patch holistic closure.

All formulas are verified against independent numeric oracles in the test
suite (Bloch wavenumber matrix, residual substitution, dense spectra).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _check_positive(**kwargs):
    for name, v in kwargs.items():
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class HeteroLattice:
    """Periodic diffusivity sequence c_1..c_m on a microscale lattice."""

    c: np.ndarray

    def __init__(self, c):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if np.any(c <= 0):
            raise ValueError("all diffusivities must be positive")
        object.__setattr__(self, "c", c)

    @property
    def period(self) -> int:
        return self.c.shape[0]

    @property
    def c_homo(self) -> float:
        """Harmonic mean: the effective macroscale diffusivity."""
        return self.period / float(np.sum(1.0 / self.c))

    def normalised(self) -> "HeteroLattice":
        """Scaled so the harmonic mean is exactly one."""
        return HeteroLattice(self.c / self.c_homo)

    def bonds(self, nbond: int) -> np.ndarray:
        """The sequence replicated onto nbond consecutive lattice bonds."""
        reps = nbond // self.period + 1
        return np.tile(self.c, reps)[:nbond]


@dataclass(frozen=True)
class CellTransferMap:
    """2x2 steady-state map from one period-two cell (u0, u1) to the next."""

    T: np.ndarray

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.T))


@dataclass(frozen=True)
class HomogenisedModel:
    D: float        # effective diffusivity
    c4: float       # fourth-order spatial coefficient
    s1: float       # slow-manifold gradient coefficient
    theta: float    # Robin boundary coefficient


def effective_diffusivity(a: float, b: float) -> float:
    """Harmonic mean of the two alternating diffusivities."""
    _check_positive(a=a, b=b)
    return 2.0 * a * b / (a + b)


def fourth_order_coefficient(a: float, b: float) -> float:
    """Coefficient of the fourth spatial derivative in the refined
    macroscale model, in terms of the mean and half-difference."""
    _check_positive(a=a, b=b)
    abar = 0.5 * (a + b)
    ahat = 0.5 * (a - b)
    return abar / 12.0 + ahat**2 / (6.0 * abar) - ahat**4 / (4.0 * abar**3)


def bloch_matrix(a: float, b: float, k: float) -> np.ndarray:
    """Wavenumber-resolved 2x2 operator of the doubled lattice system."""
    _check_positive(a=a, b=b)
    eik, emk = np.exp(1j * k), np.exp(-1j * k)
    return np.array([[-(a + b), a * eik + b * emk],
                     [b * eik + a * emk, -(a + b)]])


def bloch_slow_eigenvalue(a: float, b: float, k: float) -> float:
    """The eigenvalue branch with lambda(0) = 0 of the Bloch matrix; real
    for real wavenumbers."""
    _check_positive(a=a, b=b)
    prod = (a * np.exp(1j * k) + b * np.exp(-1j * k)) * \
           (b * np.exp(1j * k) + a * np.exp(-1j * k))
    return float((-(a + b) + np.sqrt(prod)).real)


def bloch_fast_eigenvalue(a: float, b: float, k: float) -> float:
    _check_positive(a=a, b=b)
    prod = (a * np.exp(1j * k) + b * np.exp(-1j * k)) * \
           (b * np.exp(1j * k) + a * np.exp(-1j * k))
    return float((-(a + b) - np.sqrt(prod)).real)


def slow_manifold_coefficient(a: float, b: float) -> float:
    """Gradient coefficient s1 in the micro-field shape u_{1,2} = U +- s1 U_x.
    The same coefficient closes the staggered wave system."""
    _check_positive(a=a, b=b)
    return (a - b) / (2.0 * (a + b))


def cell_transfer_matrix(a: float, b: float) -> CellTransferMap:
    """Compose the two steady-state eliminations across one period-two cell:
    u2 = ((a+b) u1 - b u0)/a then u3 = ((a+b) u2 - a u1)/b."""
    _check_positive(a=a, b=b)
    T = np.array([[-b / a, (a + b) / a],
                  [-(a + b) / a, (2.0 * a + b) / a]])
    return CellTransferMap(T=T)


def robin_boundary_coefficient(a: float, b: float, adjacent: str = "b") -> float:
    """theta in the macroscale boundary condition U + theta U_x = u0 at the
    left boundary. 'adjacent' names the diffusivity of the bond next to the
    boundary; the mirrored orientation swaps a and b."""
    _check_positive(a=a, b=b)
    if adjacent == "b":
        return (b - a) / (2.0 * (a + b))
    if adjacent == "a":
        return (a - b) / (2.0 * (a + b))
    raise ValueError("adjacent must be 'a' or 'b'")


def homogenised_model(a: float, b: float) -> HomogenisedModel:
    return HomogenisedModel(D=effective_diffusivity(a, b),
                            c4=fourth_order_coefficient(a, b),
                            s1=slow_manifold_coefficient(a, b),
                            theta=robin_boundary_coefficient(a, b))


def one_patch_diffusivity_formula(n: int, a: float, b: float) -> float:
    """Effective diffusivity of a single patch spanning [-n d, n d]: exact
    harmonic mean for even n, and a rational correction for odd n."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"patch half-size n must be a positive integer, got {n}")
    _check_positive(a=a, b=b)
    if n % 2 == 0:
        return 2.0 * a * b / (a + b)
    return 2.0 * a * b * (a + b) / ((a + b) ** 2 - (a - b) ** 2 / n**2)


def one_patch_matrix(n: int, a: float, b: float, d: float) -> np.ndarray:
    """Interior operator of the single-patch system on [-n d, n d] with the
    parabolic edge closure u_{+-n} = (1 - n^2 d^2) u_0, scaled by 1/d^2.

    Bond between lattice sites j and j+1 carries diffusivity a for odd j and
    b for even j (period-two alternation about the centre site 0).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"patch half-size n must be a positive integer, got {n}")
    _check_positive(a=a, b=b, d=d)
    size = 2 * n - 1
    sites = np.arange(-(n - 1), n)      # interior lattice indices
    centre = n - 1                      # row of site 0

    def bond(j: int) -> float:
        # diffusivity of the bond (j, j+1)
        return a if (j % 2 != 0) else b

    A = np.zeros((size, size))
    closure = 1.0 - (n * d) ** 2
    for row, j in enumerate(sites):
        cr = bond(j)        # to the right neighbour j+1
        cl = bond(j - 1)    # to the left neighbour j-1
        A[row, row] -= (cr + cl)
        if j + 1 <= n - 1:
            A[row, row + 1] += cr
        else:
            A[row, centre] += cr * closure
        if j - 1 >= -(n - 1):
            A[row, row - 1] += cl
        else:
            A[row, centre] += cl * closure
    return A / d**2


def one_patch_diffusivity_numeric(n: int, a: float, b: float, d: float = 1e-3) -> float:
    """Effective diffusivity from the eigenvalue of smallest magnitude of the
    single-patch operator; the macroscale parabola decays at rate -2 D."""
    A = one_patch_matrix(n, a, b, d)
    ev = np.linalg.eigvals(A)
    lam_small = ev[np.argmin(np.abs(ev))]
    if abs(lam_small.imag) > 1e-8 * max(1.0, abs(lam_small.real)):
        raise ArithmeticError("smallest eigenvalue unexpectedly complex")
    return -0.5 * float(lam_small.real)


def holistic_closure(cH: float):
    """Effective macroscale three-point closure for advection-diffusion on
    fully overlapping patches: dU_j/dt = -(mu delta) U_j / H
    + nu1 (delta^2) U_j / H^2, with nu1 = (cH/2) coth(cH/2).

    Returns (nu1, stencil) where the stencil maps offsets (-1, 0, 1) to the
    advective and dissipative weight rows.
    """
    x = 0.5 * cH
    if abs(x) < 1e-4:
        nu1 = 1.0 + x * x / 3.0 - x**4 / 45.0
    else:
        nu1 = x / math.tanh(x)
    stencil = {
        "offsets": (-1, 0, 1),
        "advection_over_H": (0.5, 0.0, -0.5),          # -(mu delta)/H
        "dissipation_over_H2": (nu1, -2.0 * nu1, nu1),  # nu1 delta^2 / H^2
    }
    return nu1, stencil


def holistic_subpatch_field(xi: float, cH: float, mu_delta_U: float,
                            delta2_U: float) -> float:
    """Sub-patch correction field v(xi) on an overlapping patch, |xi| <= 1;
    the cH -> 0 limit is the classic parabola xi^2/2 delta^2 U + xi mu delta U."""
    if abs(xi) > 1.0 + 1e-12:
        raise ValueError(f"xi must satisfy |xi| <= 1, got {xi}")
    if abs(cH) < 1e-6:
        shape = 0.5 * xi * xi + (cH * xi / 6.0) * (xi * xi - 1.0) * 0.5
    else:
        sh = math.sinh(0.5 * cH)
        ch = math.cosh(0.5 * cH)
        shape = (math.exp(cH * xi) - 1.0) / (4.0 * sh * sh) - (ch / (2.0 * sh)) * xi
    return shape * delta2_U + xi * mu_delta_U
