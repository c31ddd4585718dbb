"""Numerical stack volumes for transformation-groupoid models.

A model packages a compact group (given by an explicit parametrization
with its Haar measure), a coordinate chart for the space acted on, the
action in those coordinates, and a pair of densities: ``a_density``
along the group directions and ``b_density`` on the chart.  The stack
volume integrates b against the reciprocal of the fiber integral of a,
mirroring the exact finite formula.  Models may also carry an orbit
chart describing the regular part of the orbit space, which supports
the pushforward-density route and the consistency check between the
two.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NumericalFailure, ValidationFailure
from .quadrature import QuadratureResult, integrate_1d, integrate_box

TWO_PI = 2.0 * math.pi


class NonCompactChartError(ValidationFailure):
    """The requested computation needs a bounded chart."""


class DegenerateModelError(ValidationFailure):
    """A fiber integral vanished, so the volume integrand is undefined."""


class SingularOrbitError(ValidationFailure):
    """The pushforward density is defined on the strongly regular part only."""


class DivergentIntegralError(NumericalFailure):
    """Truncated integrals kept growing instead of converging."""


# ---------------------------------------------------------------------------
# groups


class GroupModel:
    """A compact group in a fixed parametrization with scaled Haar measure.

    Kinds: "finite" (explicit multiplication table), "circle" (angle in
    [0, 2pi)), "torus" (tuple of angles, ``rank`` of them), "o2" (pairs
    (flag, angle) with flag 1 for reflections), "su2" (volume bookkeeping
    only; its integration lives in the Cartan-model module).  The scale
    multiplies the Haar measure coming from the parametrization.
    """

    KINDS = ("finite", "circle", "torus", "o2", "su2")

    def __init__(self, kind: str, haar_scale: float = 1.0, rank: int = 1, group=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown group kind {kind!r}")
        if haar_scale <= 0:
            raise ValueError("haar_scale must be positive")
        self.kind = kind
        self.haar_scale = float(haar_scale)
        self.rank = int(rank)
        self.group = group
        if kind == "finite" and group is None:
            raise ValueError("finite kind needs a multiplication-table group")
        if kind == "torus" and not 1 <= self.rank <= 2:
            raise ValueError("torus rank must be 1 or 2")

    def modular(self, h) -> float:
        # all catalog kinds are unimodular
        return 1.0

    @property
    def volume(self) -> float:
        if self.kind == "finite":
            return self.group.order * self.haar_scale
        if self.kind == "circle":
            return TWO_PI * self.haar_scale
        if self.kind == "torus":
            return TWO_PI ** self.rank * self.haar_scale
        if self.kind == "o2":
            return 2.0 * TWO_PI * self.haar_scale
        # su2: the caller supplies the already-normalized total volume
        return self.haar_scale

    def identity_element(self):
        if self.kind == "finite":
            return self.group.identity
        if self.kind == "circle":
            return 0.0
        if self.kind == "torus":
            return (0.0,) * self.rank
        if self.kind == "o2":
            return (0, 0.0)
        raise NotImplementedError("su2 elements are not parametrized here")

    def compose_elements(self, h1, h2):
        if self.kind == "finite":
            return self.group.mult(h1, h2)
        if self.kind == "circle":
            return (h1 + h2) % TWO_PI
        if self.kind == "torus":
            return tuple((u + v) % TWO_PI for u, v in zip(h1, h2))
        if self.kind == "o2":
            s1, p1 = h1
            s2, p2 = h2
            sign = -1.0 if s1 else 1.0
            return (s1 ^ s2, (p1 + sign * p2) % TWO_PI)
        raise NotImplementedError("su2 elements are not parametrized here")

    def random_element(self, rng: random.Random):
        if self.kind == "finite":
            return rng.choice(self.group.elements)
        if self.kind == "circle":
            return rng.uniform(0.0, TWO_PI)
        if self.kind == "torus":
            return tuple(rng.uniform(0.0, TWO_PI) for _ in range(self.rank))
        if self.kind == "o2":
            return (rng.randint(0, 1), rng.uniform(0.0, TWO_PI))
        raise NotImplementedError("su2 elements are not parametrized here")

    def integrate(self, fn: Callable, tol: float = 1e-9):
        """Haar integral of fn over the group; returns (value, evaluations)."""
        if self.kind == "finite":
            return self.haar_scale * sum(fn(h) for h in self.group.elements), self.group.order
        if self.kind == "circle":
            res = integrate_1d(fn, 0.0, TWO_PI, tol=tol)
            return self.haar_scale * res.value, res.evaluations
        if self.kind == "torus":
            if self.rank == 1:
                res = integrate_1d(lambda t: fn((t,)), 0.0, TWO_PI, tol=tol)
            else:
                res = integrate_box(lambda u, v: fn((u, v)),
                                    [(0.0, TWO_PI), (0.0, TWO_PI)], tol=tol)
            return self.haar_scale * res.value, res.evaluations
        if self.kind == "o2":
            total, evals = 0.0, 0
            for flag in (0, 1):
                res = integrate_1d(lambda t: fn((flag, t)), 0.0, TWO_PI, tol=tol)
                total += res.value
                evals += res.evaluations
            return self.haar_scale * total, evals
        raise NotImplementedError("integrate over su2 is handled by the Cartan model")

    def __repr__(self):
        return f"GroupModel({self.kind}, scale={self.haar_scale})"


def group_volume(gm: GroupModel) -> float:
    """Total Haar volume of the group in its chosen scale."""
    return gm.volume


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class BoxChart:
    """A coordinate box; ``periods[i]`` is the period of axis i or None."""

    bounds: tuple
    periods: tuple

    def __post_init__(self):
        if len(self.bounds) != len(self.periods):
            raise ValueError("bounds and periods must have equal length")
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds))

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def compact(self) -> bool:
        return all(math.isfinite(lo) and math.isfinite(hi) for lo, hi in self.bounds)


@dataclass(frozen=True)
class PointChart:
    """A finite point set, for actions of finite groups on finite sets."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))


@dataclass(frozen=True)
class OrbitChart:
    """Analytic description of the strongly regular part of an orbit space.

    ``param_axis`` names the chart coordinate that descends to the orbit
    parameter, ``orbit_density`` is the orbit-space density in that
    parameter, and ``isotropy_volume`` the volume of the isotropy group
    over each regular orbit.  Singular parameter values are declared,
    not detected.
    """

    param_axis: int
    param_range: tuple
    orbit_density: Callable[[float], float]
    isotropy_volume: Callable[[float], float]
    singular_params: tuple = ()
    description: str = ""

    def is_singular(self, t: float) -> bool:
        return any(abs(t - s) < 1e-12 for s in self.singular_params)


@dataclass(frozen=True)
class ActionModel:
    """A group action on a chart together with the volume densities."""

    name: str
    group: GroupModel
    chart: object
    act: Callable
    a_density: Callable
    b_density: Callable
    a_constant: bool = False
    orbit_chart: Optional[OrbitChart] = None
    density_mode: str = "unsigned-density"

    def __post_init__(self):
        if self.density_mode not in ("unsigned-density", "signed-form"):
            raise ValueError(f"unknown density mode {self.density_mode!r}")
        if self.density_mode == "signed-form":
            # orientable-chart input given as a form; volumes use densities
            a, b = self.a_density, self.b_density
            object.__setattr__(self, "a_density", lambda p: abs(a(p)))
            object.__setattr__(self, "b_density", lambda p: abs(b(p)))
            object.__setattr__(self, "density_mode", "unsigned-density")


# ---------------------------------------------------------------------------
# volume computations


def fiber_integral(am: ActionModel, y, tol: float = 1e-9) -> float:
    """Haar integral of a_density along the orbit through y.

    For a constant a this is a(y) times the group volume, the direct
    analog of the finite fiber sum.
    """
    if am.a_constant:
        return float(am.a_density(y)) * am.group.volume
    value, _ = am.group.integrate(lambda h: float(am.a_density(am.act(h, y))), tol=tol)
    return value


def _restrict_bounds(am: ActionModel, param_region):
    chart = am.chart
    if param_region is None:
        return chart.bounds
    if am.orbit_chart is None:
        raise ValueError("param_region needs a model with an orbit chart")
    axis = am.orbit_chart.param_axis
    t0, t1 = float(param_region[0]), float(param_region[1])
    lo, hi = chart.bounds[axis]
    if t0 > t1:
        raise ValueError("param_region must be an interval (lo, hi)")
    new = list(chart.bounds)
    new[axis] = (max(lo, t0), min(hi, t1))
    if new[axis][0] > new[axis][1]:
        raise ValueError("param_region does not meet the chart")
    return tuple(new)


def stack_volume(am: ActionModel, tol: float = 1e-6, param_region=None) -> QuadratureResult:
    """Volume of the quotient stack: integral of b over the reciprocal fibers.

    ``param_region`` restricts the chart to the saturation of an orbit
    parameter interval (the orbit parameter must be a chart coordinate,
    which holds for every catalog model).
    """
    if isinstance(am.chart, PointChart):
        if param_region is not None:
            raise ValueError("param_region is meaningless for point charts")
        total = 0.0
        for p in am.chart.points:
            fib = fiber_integral(am, p)
            if abs(fib) < 1e-12:
                raise DegenerateModelError(f"fiber integral vanishes at {p!r}")
            total += float(am.b_density(p)) / fib
        return QuadratureResult(total, 0.0, len(am.chart.points))

    if not am.chart.compact:
        raise NonCompactChartError(f"model {am.name} has an unbounded chart")
    bounds = _restrict_bounds(am, param_region)

    def integrand(*p):
        fib = fiber_integral(am, p)
        if abs(fib) < 1e-12:
            raise DegenerateModelError(f"fiber integral vanishes at {p!r}")
        return float(am.b_density(p)) / fib

    return integrate_box(integrand, bounds, tol=tol)


def _truncations(bounds):
    """Nested finite boxes exhausting a chart with some infinite sides."""
    for k in range(26):
        cut = 2.0 ** k
        box = []
        for lo, hi in bounds:
            lo_k = lo if math.isfinite(lo) else -cut
            hi_k = hi if math.isfinite(hi) else cut
            box.append((lo_k, hi_k))
        yield box


def homogeneous_volume(am: ActionModel, tol: float = 1e-6) -> QuadratureResult:
    """Total b mass divided by the group volume, for constant a.

    Valid when the action is transitive with trivial isotropy up to a
    group of measure zero, where the stack volume collapses to the ratio
    of total volumes.  Unbounded charts are probed through a doubling
    sequence of truncations and reported divergent if the values keep
    growing.
    """
    if isinstance(am.chart, PointChart):
        total = sum(float(am.b_density(p)) for p in am.chart.points)
        a0 = float(am.a_density(am.chart.points[0]))
        return QuadratureResult(total / (a0 * am.group.volume), 0.0, len(am.chart.points))

    if not am.a_constant:
        raise ValueError("homogeneous_volume requires a constant a_density")
    probe = tuple(
        lo if math.isfinite(lo) else 0.0 for lo, _ in am.chart.bounds
    )
    a0 = float(am.a_density(probe))
    denom = a0 * am.group.volume
    if abs(denom) < 1e-12:
        raise DegenerateModelError("group volume weighted by a vanishes")

    def b_only(*p):
        return float(am.b_density(p))

    if am.chart.compact:
        res = integrate_box(b_only, am.chart.bounds, tol=tol)
        return QuadratureResult(res.value / denom, res.error_estimate / abs(denom),
                                res.evaluations)

    prev = None
    evals = 0
    stable = 0
    for box in _truncations(am.chart.bounds):
        res = integrate_box(b_only, box, tol=tol)
        evals += res.evaluations
        if prev is not None:
            if abs(res.value - prev) <= tol * max(1.0, abs(res.value)):
                stable += 1
                if stable >= 2:
                    return QuadratureResult(res.value / denom,
                                            (res.error_estimate + abs(res.value - prev)) / abs(denom),
                                            evals)
            else:
                stable = 0
        prev = res.value
    raise DivergentIntegralError(
        f"truncated b integrals of {am.name} keep growing (last {prev:.6g})"
    )


# ---------------------------------------------------------------------------
# invariance checking


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    max_defect: float
    witness: Optional[tuple]
    samples: int
    tol: float

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"invariance {status}: max defect {self.max_defect:.3g} over {self.samples} samples"


def _jacobian_det(am: ActionModel, h, p) -> float:
    """|det| of the chart Jacobian of the action of h at p, by central differences."""
    chart = am.chart
    d = chart.dim
    mat = np.empty((d, d))
    for j in range(d):
        lo, hi = chart.bounds[j]
        eps = 1e-6 * (hi - lo)
        plus = list(p)
        minus = list(p)
        plus[j] += eps
        minus[j] -= eps
        fp = am.act(h, tuple(plus))
        fm = am.act(h, tuple(minus))
        for i in range(d):
            diff = fp[i] - fm[i]
            period = chart.periods[i]
            if period:
                # wrapped coordinates may jump by a full period
                diff -= period * round(diff / period)
            mat[i, j] = diff / (2.0 * eps)
    return abs(float(np.linalg.det(mat)))


def invariance_defect(am: ActionModel, h, p) -> float:
    """|b(h p) |Jac| - modular(h) b(p)| at one sample."""
    if isinstance(am.chart, PointChart):
        jac = 1.0
    else:
        jac = _jacobian_det(am, h, p)
    moved = am.act(h, p)
    return abs(float(am.b_density(moved)) * jac - am.group.modular(h) * float(am.b_density(p)))


def _sample_point(am: ActionModel, rng: random.Random):
    chart = am.chart
    if isinstance(chart, PointChart):
        return rng.choice(chart.points)
    coords = []
    for (lo, hi), period in zip(chart.bounds, chart.periods):
        margin = 0.0 if period else 0.02 * (hi - lo)
        coords.append(rng.uniform(lo + margin, hi - margin))
    return tuple(coords)


def check_invariance(am: ActionModel, samples: int = 200, tol: float = 1e-8,
                     seed: int = 0) -> InvarianceReport:
    """Sample (h, p) pairs and verify the density transformation law for b."""
    rng = random.Random(seed)
    worst = 0.0
    witness = None
    for _ in range(samples):
        h = am.group.random_element(rng)
        p = _sample_point(am, rng)
        defect = invariance_defect(am, h, p)
        if defect > worst:
            worst = defect
            witness = (h, p)
    return InvarianceReport(worst <= tol, worst, witness if worst > tol else None,
                            samples, tol)


# ---------------------------------------------------------------------------
# pushforward route


def pushforward_density(am: ActionModel, t: float) -> float:
    """Density of the stack measure on the orbit space at parameter t."""
    oc = am.orbit_chart
    if oc is None:
        raise ValueError(f"model {am.name} declares no orbit chart")
    lo, hi = oc.param_range
    if not lo <= t <= hi:
        raise ValueError(f"parameter {t} outside orbit range [{lo}, {hi}]")
    if oc.is_singular(t):
        raise SingularOrbitError(
            f"parameter {t} is singular; the density lives on the strongly regular part only"
        )
    return float(oc.orbit_density(t)) / float(oc.isotropy_volume(t))


@dataclass(frozen=True)
class ComparisonReport:
    stack_result: QuadratureResult
    pushforward_result: QuadratureResult
    difference: float
    tolerance: float
    passed: bool

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (f"{status}: stack {self.stack_result.value:.12g} vs pushforward "
                f"{self.pushforward_result.value:.12g} (diff {self.difference:.3g})")


def stack_volume_vs_pushforward(am: ActionModel, region, tol: float = 1e-6) -> ComparisonReport:
    """Compare the chart-integral volume with the orbit-space integral.

    ``region`` is an orbit-parameter interval, compact inside the orbit
    range; its endpoints may touch the declared singular set since that
    set carries no volume.
    """
    oc = am.orbit_chart
    if oc is None:
        raise ValueError(f"model {am.name} declares no orbit chart")
    t0, t1 = float(region[0]), float(region[1])
    lo, hi = oc.param_range
    if not (lo <= t0 <= t1 <= hi):
        raise ValueError(f"region [{t0}, {t1}] outside orbit range [{lo}, {hi}]")
    via_chart = stack_volume(am, tol=tol, param_region=(t0, t1))

    def density(t):
        # raw ratio: region endpoints may touch the singular set
        return float(oc.orbit_density(t)) / float(oc.isotropy_volume(t))

    via_orbit = integrate_1d(density, t0, t1, tol=tol)
    diff = abs(via_chart.value - via_orbit.value)
    budget = via_chart.error_estimate + via_orbit.error_estimate + tol
    return ComparisonReport(via_chart, via_orbit, diff, budget, diff <= budget)


# ---------------------------------------------------------------------------
# finite bridge


def finite_action_model(group, points, act, a, b, haar_scale: float = 1.0,
                        name: str = "finite-action") -> ActionModel:
    """Wrap a finite group action as a smooth-engine model.

    ``a`` and ``b`` map points to weights (rationals welcome); they are
    evaluated to floats here, so exact agreement with the finite engine
    holds up to float rounding only.
    """
    pts = tuple(points)
    a_map = {p: float(a[p]) for p in pts}
    b_map = {p: float(b[p]) for p in pts}
    gm = GroupModel("finite", haar_scale=haar_scale, group=group)
    values = set(a_map.values())
    return ActionModel(
        name=name,
        group=gm,
        chart=PointChart(pts),
        act=act,
        a_density=lambda p: a_map[p],
        b_density=lambda p: b_map[p],
        a_constant=len(values) == 1,
    )
