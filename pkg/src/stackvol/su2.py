"""Adjoint-quotient model for SU(2), with computed normalizations.

Everything that could be a magic constant is computed at runtime from
the chosen Lie-algebra basis: the exponential period along the Cartan
line (by minimizing the defect of the matrix exponential), the root
value entering the orbit density (from the eigenvalues of the adjoint
representation), and the Euclidean-coordinate volume of the group (by
integrating the exponential Jacobian over a ball).  A Monte Carlo /
quadrature cross-check of the Weyl integration identity then validates
the whole normalization chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .quadrature import NonConvergenceError, QuadratureResult, integrate_1d, integrate_mc


@dataclass(frozen=True)
class CartanData:
    """Computed normalization data for the rank-one compact group."""

    period: float
    sigma: tuple
    volume_norm: float
    basis: tuple

    @property
    def rank(self) -> int:
        return len(self.sigma)


def _basis():
    h = np.array([[1j, 0.0], [0.0, -1j]])
    x = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    y = np.array([[0.0, 1j], [1j, 0.0]])
    return h, x, y


def _bracket(a, b):
    return a @ b - b @ a


def _coords(m, basis):
    # the basis is orthonormal for <A,B> = Re tr(A B*)/2
    return np.array([float(np.real(np.trace(m @ b.conj().T))) / 2.0 for b in basis])


def _adjoint_matrix(v, basis):
    """ad_v as a real 3x3 matrix in the given orthonormal basis."""
    cols = [_coords(_bracket(v, b), basis) for b in basis]
    return np.column_stack(cols)


def _exp_defect(t, h):
    d = expm(t * h) - np.eye(2)
    return float(np.real(np.sum(d * d.conj())))


def _find_period(h) -> float:
    """Smallest t > 0 with exp(t h) = identity, found numerically.

    The defect is also small near t = 0, so the scan first waits for the
    exponential to leave the identity before accepting a dip.
    """
    ts = np.arange(0.01, 10.0, 0.01)
    departed = False
    hit = None
    for t in ts:
        defect = _exp_defect(t, h)
        if not departed:
            departed = defect > 1.0
        elif defect < 0.5:
            hit = t
            break
    if hit is None:
        raise ArithmeticError("no exponential period found below t=10")
    res = minimize_scalar(
        lambda t: _exp_defect(t, h),
        bounds=(hit - 0.05, hit + 0.7),
        method="bounded",
        options={"xatol": 1e-12},
    )
    period = float(res.x)
    if math.sqrt(_exp_defect(period, h)) > 1e-7:
        raise ArithmeticError(f"exponential defect too large at candidate period {period}")
    return period


def _phi1(a):
    """phi1(A) = (exp(A) - 1)/A evaluated by an augmented exponential."""
    n = a.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = a
    block[:n, n:] = np.eye(n)
    return expm(block)[:n, n:]


def _exp_jacobian(rho, ad_h):
    """|det d exp| at a Cartan point of norm rho, in basis coordinates."""
    return abs(float(np.linalg.det(_phi1(-rho * ad_h))))


@lru_cache(maxsize=1)
def su2_cartan() -> CartanData:
    """Compute period, root normalization, and group volume for SU(2).

    The basis satisfies [h, x] = 2y, [h, y] = -2x, [x, y] = 2h and is
    orthonormal for an invariant inner product, so conjugation acts by
    rotations on coordinates and the exponential Jacobian only depends
    on the radius.
    """
    h, x, y = _basis()
    basis = (h, x, y)

    period = _find_period(h)

    # the root value on h is the rotation speed of ad_h on the normal plane
    ad_h = _adjoint_matrix(h, basis)
    eigs = np.linalg.eigvals(ad_h)
    speed = float(np.max(np.abs(eigs.imag)))
    if speed <= 0:
        raise ArithmeticError("adjoint representation has no rotation component")
    # lattice basis vector is period*h, so the root evaluates to speed*period
    sigma1 = speed * period

    # group volume in basis-Lebesgue coordinates: exp is injective on the
    # ball of radius period/2 (its boundary collapses to a point)
    def shell(rho):
        return 4.0 * math.pi * rho * rho * _exp_jacobian(rho, ad_h)

    vol = integrate_1d(shell, 0.0, period / 2.0, tol=1e-10)

    return CartanData(period=period, sigma=(sigma1,), volume_norm=vol.value, basis=basis)


# ---------------------------------------------------------------------------
# orbit density on the chamber


@dataclass(frozen=True)
class OrbitDensity:
    value: float
    on_wall: bool


def adjoint_orbit_density(t: float, cartan: CartanData = None) -> OrbitDensity:
    """Density of orbit volumes at chamber parameter t, lattice-normalized.

    The parameter measures the chamber in units of the lattice basis
    vector; the density is the product over roots of the squared root
    values there.  On a chamber wall the density vanishes and the result
    is flagged.
    """
    if t < 0:
        raise ValueError("chamber parameter must be nonnegative")
    if cartan is None:
        cartan = su2_cartan()
    value = 1.0
    wall = False
    for s in cartan.sigma:
        factor = t * s
        if factor == 0.0:
            wall = True
        value *= factor * factor
    return OrbitDensity(value if not wall else 0.0, wall)


def chamber_parameters(points: np.ndarray, cartan: CartanData = None) -> np.ndarray:
    """Project Lie-algebra coordinate vectors to their chamber parameters.

    Each row is the coordinate vector of an algebra element; the class
    invariant sqrt(det) of the corresponding matrix gives the conjugate
    Cartan point, converted to lattice units by the period.
    """
    if cartan is None:
        cartan = su2_cartan()
    h, x, y = cartan.basis
    pts = np.asarray(points, dtype=float)
    m = (
        pts[:, 0, None, None] * h
        + pts[:, 1, None, None] * x
        + pts[:, 2, None, None] * y
    )
    dets = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    theta = np.sqrt(np.clip(dets.real, 0.0, None))
    return theta / cartan.period


def gaussian_test_function(width: float = 0.25):
    """Centered Gaussian in the chamber parameter, vectorization-friendly."""
    if width <= 0:
        raise ValueError("width must be positive")
    inv = 1.0 / (2.0 * width * width)

    def phi(s):
        return np.exp(-inv * np.square(s))

    phi.width = width
    return phi


@dataclass(frozen=True)
class WeylReport:
    lhs: float
    rhs: float
    relative_error: float
    mc_stderr: float
    evaluations: int
    passed: bool

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (f"weyl check {status}: lhs {self.lhs:.6g} vs rhs {self.rhs:.6g} "
                f"(rel err {self.relative_error:.3%}, mc se {self.mc_stderr:.3g})")


def weyl_integration_check(phi, mc_samples: int = 1_000_000, seed: int = 94720,
                           tol: float = 0.02, s_max: float = None,
                           cartan: CartanData = None,
                           require_convergence: bool = True) -> WeylReport:
    """Cross-check the chamber density against direct algebra integration.

    The left side averages phi of the chamber projection over the Lie
    algebra, with coordinates normalized by the computed group volume;
    the right side integrates the orbit density times phi over the
    chamber.  Agreement validates the period, root, and volume
    normalizations simultaneously.
    """
    if cartan is None:
        cartan = su2_cartan()
    if s_max is None:
        s_max = 5.0 * getattr(phi, "width", 0.25)
    if s_max <= 0:
        raise ValueError("s_max must be positive")

    half = s_max * cartan.period
    bounds = [(-half, half)] * 3

    def integrand(points):
        return phi(chamber_parameters(points, cartan))

    mc = integrate_mc(integrand, bounds, mc_samples, seed, vectorized=True)
    lhs = mc.value / cartan.volume_norm
    lhs_se = mc.error_estimate / cartan.volume_norm

    def rhs_integrand(s):
        return adjoint_orbit_density(s, cartan).value * float(phi(s))

    rhs = integrate_1d(rhs_integrand, 0.0, s_max, tol=1e-10)

    scale = max(abs(lhs), abs(rhs.value), 1e-300)
    rel_se = lhs_se / scale
    if require_convergence and rel_se > tol / 3.0:
        raise NonConvergenceError(
            f"Monte Carlo standard error {rel_se:.3%} exceeds a third of tol {tol:.3%}",
            QuadratureResult(lhs, lhs_se, mc.evaluations),
        )

    rel_err = abs(lhs - rhs.value) / max(abs(rhs.value), 1e-300)
    return WeylReport(
        lhs=lhs,
        rhs=rhs.value,
        relative_error=rel_err,
        mc_stderr=lhs_se,
        evaluations=mc.evaluations + rhs.evaluations,
        passed=rel_err < tol,
    )
