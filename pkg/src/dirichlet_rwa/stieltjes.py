"""Stieltjes transforms on [-1, 1] and contour-integral derivative checks.

Implements the arcsine transform, the power-semicircle family (n=2 uniform,
n=3 Wigner semicircle), spectrally accurate Cauchy-integral derivatives, and
residuals of the differential identity relating the (n-1)-th derivative of
the power-semicircle transform to (z^2-1)^{-n/2}.

Branch handling: every square root of z^2 - c^2 is evaluated as
sqrt(z-c)*sqrt(z+c) with principal square roots, which selects the branch
with cut [-c, c] and z*S(z) -> 1 at infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "StieltjesFn",
    "PowerSemicircleParams",
    "SupportError",
    "QuadratureError",
    "arcsine_transform",
    "power_semicircle_transform",
    "power_semicircle_fn",
    "arcsine_fn",
    "cauchy_derivative",
    "equation3_residual",
    "equation1_check",
    "transform_moments",
    "GRID_STANDOFF",
]

# Grid points must stay at least this far to the right of the support edge,
# leaving room for contour disks.
GRID_STANDOFF = 0.25


class SupportError(ValueError):
    """Evaluation on (or a contour touching) the support interval."""


class QuadratureError(RuntimeError):
    def __init__(self, msg, achieved):
        super().__init__(f"{msg} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class StieltjesFn:
    """A Stieltjes transform: complex evaluator plus its support interval."""

    evaluator: Callable
    support: tuple = (-1.0, 1.0)

    def __call__(self, z):
        z = complex(z)
        lo, hi = self.support
        if z.imag == 0 and lo <= z.real <= hi:
            raise SupportError(f"z={z} lies on the support [{lo}, {hi}]")
        return self.evaluator(z)


@dataclass(frozen=True)
class PowerSemicircleParams:
    """Member of the power-semicircle family; n=2 is uniform on [-1,1], n=3
    the Wigner semicircle."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")


def _sqrt_branch(z: complex, c: float) -> complex:
    """sqrt(z^2 - c^2) with branch cut [-c, c] and ~z at infinity."""
    return np.sqrt(z - c) * np.sqrt(z + c)


def _check_off_support(z: complex):
    if z.imag == 0 and -1.0 <= z.real <= 1.0:
        raise SupportError(f"z={z} lies on the branch cut [-1, 1]")


def arcsine_transform(z) -> complex:
    """Stieltjes transform of the arcsine law on [-1,1]: (z^2-1)^{-1/2}."""
    z = complex(z)
    _check_off_support(z)
    return complex(1.0 / _sqrt_branch(z, 1.0))


def _gauss_legendre_01(f, atol: float = 1e-12, rtol: float = 1e-13, max_order: int = 2048):
    """Integrate a smooth complex-valued function on [0,1] by Gauss-Legendre
    with node doubling until two successive orders agree."""
    prev = None
    order = 16
    err = math.inf
    while order <= max_order:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        x = 0.5 * (nodes + 1.0)
        val = 0.5 * np.sum(weights * f(x))
        if prev is not None:
            err = abs(val - prev)
            if err <= max(atol, rtol * abs(val)):
                return val
        prev = val
        order *= 2
    raise QuadratureError("quadrature did not converge on [0,1]", err)


def _power_semicircle_integral(n: int, z: complex) -> complex:
    """int_0^1 (1-t)^{(n-3)/2} (z^2-t)^{-1/2} dt via the substitution
    u = sqrt(1-t), which removes the endpoint singularity at t=1 for n=2."""

    def integrand(u):
        r = np.sqrt(1.0 - u * u)
        return 2.0 * u ** (n - 2) / (np.sqrt(z - r) * np.sqrt(z + r))

    return _gauss_legendre_01(integrand)


def power_semicircle_transform(p: PowerSemicircleParams, z) -> complex:
    """Stieltjes transform of the power-semicircle law:
    (n-1)/2 * int_0^1 (1-t)^{(n-3)/2} (z^2-t)^{-1/2} dt.

    The (n-1)/2 coefficient is fixed by the normalization z*S(z) -> 1: the
    alternative (n-2)/2 would make the n=2 transform vanish identically.
    """
    z = complex(z)
    _check_off_support(z)
    return complex((p.n - 1) / 2.0 * _power_semicircle_integral(p.n, z))


def arcsine_fn() -> StieltjesFn:
    return StieltjesFn(lambda z: 1.0 / _sqrt_branch(z, 1.0))


def power_semicircle_fn(n: int) -> StieltjesFn:
    p = PowerSemicircleParams(n)
    return StieltjesFn(lambda z: (n - 1) / 2.0 * _power_semicircle_integral(n, z))


def cauchy_derivative(f, z: float, order: int, radius: float,
                      rtol: float = 1e-9, max_nodes: int = 8192) -> complex:
    """order-th derivative of f at z via trapezoidal quadrature of the Cauchy
    integral on a circle of the given radius.

    The trapezoid rule is spectrally accurate for periodic integrands; node
    counts double until two successive estimates agree within rtol relative.
    The closed disk must avoid the support [-1, 1].
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if radius <= 0:
        raise ValueError("radius must be > 0")
    if z - radius <= 1.0 and (z + radius >= -1.0):
        raise SupportError(
            f"disk of radius {radius} about z={z} intersects the support [-1, 1]"
        )
    ev = f if callable(f) else f.evaluator
    n_nodes = 32
    prev = None
    err = math.inf
    fact = math.factorial(order)
    while n_nodes <= max_nodes:
        theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
        w = z + radius * np.exp(1j * theta)
        vals = np.asarray([ev(complex(wi)) for wi in w])
        est = fact / (n_nodes * radius**order) * np.sum(vals * np.exp(-1j * order * theta))
        if prev is not None:
            err = abs(est - prev)
            if err <= rtol * max(abs(est), 1e-300):
                return complex(est)
        prev = est
        n_nodes *= 2
    raise QuadratureError("contour derivative did not converge", err)


def _contour_radius(z: float) -> float:
    return min(z - 1.0 - GRID_STANDOFF, 1.0)


def _check_grid(z_grid):
    zs = [float(z) for z in np.atleast_1d(np.asarray(z_grid, dtype=float))]
    for z in zs:
        if z <= 1.0 + GRID_STANDOFF:
            raise ValueError(f"grid point {z} must exceed 1 + {GRID_STANDOFF}")
    return zs


def equation3_residual(n: int, z_grid) -> np.ndarray:
    """|LHS - RHS| of the identity
    (-1)^{n-1}/(n-1)! * d^{n-1}/dz^{n-1} S_Z(z) = (z^2-1)^{-n/2}
    where S_Z is the power-semicircle transform of parameter n."""
    p = PowerSemicircleParams(n)
    zs = _check_grid(z_grid)
    out = np.empty(len(zs))
    sign = (-1.0) ** (n - 1) / math.factorial(n - 1)
    fn = power_semicircle_fn(n)
    for i, z in enumerate(zs):
        deriv = cauchy_derivative(fn, z, n - 1, _contour_radius(z))
        lhs = sign * deriv
        rhs = _sqrt_branch(complex(z), 1.0) ** (-n)
        out[i] = abs(lhs - rhs)
    return out


def equation1_check(n: int, z_grid) -> np.ndarray:
    """Residual of the integral form of the same identity: the (n-1)-th
    derivative is applied to the raw integral, with the (n-1)/2 prefactor kept
    outside the derivative."""
    zs = _check_grid(z_grid)
    out = np.empty(len(zs))
    pref = (-1.0) ** (n - 1) / math.factorial(n - 1) * (n - 1) / 2.0

    def raw(z):
        return _power_semicircle_integral(n, complex(z))

    for i, z in enumerate(zs):
        deriv = cauchy_derivative(raw, z, n - 1, _contour_radius(z))
        rhs = _sqrt_branch(complex(z), 1.0) ** (-n)
        out[i] = abs(pref * deriv - rhs)
    return out


def transform_moments(f, max_order: int, radius: float = 3.0, n_nodes: int = 512) -> np.ndarray:
    """Moments m_j = int x^j dF(x) recovered from a Stieltjes transform by the
    contour integral m_j = (1/2 pi i) oint z^j S(z) dz on |z| = radius."""
    ev = f if callable(f) else f.evaluator
    theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    w = radius * np.exp(1j * theta)
    vals = np.asarray([ev(complex(wi)) for wi in w])
    out = np.empty(max_order + 1)
    for j in range(max_order + 1):
        mj = radius ** (j + 1) / n_nodes * np.sum(np.exp(1j * (j + 1) * theta) * vals)
        out[j] = mj.real
    return out
