"""Analytic action models: fibers, volumes, invariance, pushforward."""

import dataclasses
import math

import pytest

from stackvol.catalog import plane_o2, plane_so2, torus_free
from stackvol.groups import FiniteGroup
from stackvol.smooth import (
    TWO_PI,
    ActionModel,
    BoxChart,
    ComparisonReport,
    DegenerateModelError,
    DivergentIntegralError,
    GroupModel,
    NonCompactChartError,
    OrbitChart,
    PointChart,
    SingularOrbitError,
    check_invariance,
    fiber_integral,
    finite_action_model,
    group_volume,
    homogeneous_volume,
    invariance_defect,
    pushforward_density,
    stack_volume,
    stack_volume_vs_pushforward,
)

# frozen oracles:
#   rotations of the radius-2 disk: volume = 2^2/2 = 2, orbit density r
#   rotations+reflections of the same disk: volume 1, orbit density r/2
#   free circle translation on the flat 2-torus: volume = (2pi)^2/(2pi) = 2pi
#   disk fiber integral for a(r, theta) = 1 + r^2: 2pi (1 + r^2)
#   annulus 1 <= r <= 2 under rotations: (4 - 1)/2 = 3/2


class TestGroupModels:
    def test_volumes(self):
        assert group_volume(GroupModel("circle")) == pytest.approx(TWO_PI)
        assert group_volume(GroupModel("o2")) == pytest.approx(2 * TWO_PI)
        assert group_volume(GroupModel("torus", rank=2)) == pytest.approx(TWO_PI ** 2)
        s3 = GroupModel("finite", group=FiniteGroup.symmetric(3))
        assert group_volume(s3) == 6.0
        assert group_volume(GroupModel("su2", haar_scale=19.74)) == 19.74

    def test_scale_multiplies(self):
        assert group_volume(GroupModel("circle", haar_scale=0.5)) == pytest.approx(math.pi)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            GroupModel("quaternionic")
        with pytest.raises(ValueError):
            GroupModel("circle", haar_scale=0.0)
        with pytest.raises(ValueError):
            GroupModel("torus", rank=3)
        with pytest.raises(ValueError):
            GroupModel("finite")

    def test_integrate_circle(self):
        gm = GroupModel("circle")
        value, evals = gm.integrate(lambda t: 1.0)
        assert value == pytest.approx(TWO_PI)
        assert evals > 0

    def test_integrate_o2_sees_both_components(self):
        gm = GroupModel("o2")
        value, _ = gm.integrate(lambda h: 1.0 if h[0] else 0.0)
        assert value == pytest.approx(TWO_PI)

    def test_su2_has_no_parametrized_elements(self):
        gm = GroupModel("su2", haar_scale=1.0)
        import random
        with pytest.raises(NotImplementedError):
            gm.random_element(random.Random(0))
        with pytest.raises(NotImplementedError):
            gm.integrate(lambda h: 1.0)

    def test_o2_composition_law(self):
        gm = GroupModel("o2")
        h = gm.compose_elements((1, 1.0), (1, 2.0))
        assert h[0] == 0
        assert h[1] == pytest.approx((1.0 - 2.0) % TWO_PI)
        assert gm.modular((1, 1.0)) == 1.0


class TestCharts:
    def test_box_chart_shape_mismatch(self):
        with pytest.raises(ValueError):
            BoxChart(bounds=((0.0, 1.0),), periods=(None, None))

    def test_compactness(self):
        assert BoxChart(((0.0, 1.0),), (None,)).compact
        assert not BoxChart(((0.0, math.inf),), (None,)).compact

    def test_singular_parameter_window(self):
        oc = plane_so2().orbit_chart
        assert oc.is_singular(0.0)
        assert oc.is_singular(1e-13)
        assert not oc.is_singular(1e-10)

    def test_density_mode_validation(self):
        with pytest.raises(ValueError):
            dataclasses.replace(plane_so2(), density_mode="mystery")


class TestFiberIntegral:
    def test_constant_density_fast_path(self):
        am = plane_so2()
        assert fiber_integral(am, (1.0, 0.3)) == pytest.approx(TWO_PI)

    def test_orbitwise_constant_nonconstant_density(self):
        am = dataclasses.replace(plane_so2(),
                                 a_density=lambda p: 1.0 + p[0] ** 2,
                                 a_constant=False)
        for r in (0.25, 1.0, 1.75):
            expect = TWO_PI * (1.0 + r * r)
            assert fiber_integral(am, (r, 1.0)) == pytest.approx(expect, rel=1e-9)

    def test_finite_fiber_matches_group_sum(self):
        s3 = FiniteGroup.symmetric(3)
        a = {0: 2.0, 1: 3.0, 2: 5.0}
        am = finite_action_model(s3, [0, 1, 2], lambda p, x: p[x], a,
                                 {0: 1.0, 1: 1.0, 2: 1.0})
        for y in (0, 1, 2):
            expect = sum(a[p[y]] for p in s3.elements)
            assert fiber_integral(am, y) == pytest.approx(expect)


class TestStackVolume:
    def test_disk_rotations(self):
        res = stack_volume(plane_so2(R=2.0))
        assert abs(res.value - 2.0) <= res.error_estimate + 1e-9
        assert res.evaluations > 0

    def test_disk_full_orthogonal_group(self):
        res = stack_volume(plane_o2(R=2.0))
        assert abs(res.value - 1.0) <= res.error_estimate + 1e-9

    def test_torus_translation(self):
        res = stack_volume(torus_free())
        assert abs(res.value - TWO_PI) <= res.error_estimate + 1e-9

    def test_annulus_restriction(self):
        res = stack_volume(plane_so2(R=2.0), param_region=(1.0, 2.0))
        assert abs(res.value - 1.5) <= res.error_estimate + 1e-9

    def test_point_chart_is_exact(self):
        s3 = FiniteGroup.symmetric(3)
        unit = {x: 1 for x in range(3)}
        am = finite_action_model(s3, range(3), lambda p, x: p[x], unit, unit)
        res = stack_volume(am)
        assert res.value == pytest.approx(0.5, abs=1e-15)
        assert res.error_estimate == 0.0
        assert res.evaluations == 3

    def test_param_region_needs_orbit_chart(self):
        s3 = FiniteGroup.symmetric(3)
        unit = {x: 1 for x in range(3)}
        am = finite_action_model(s3, range(3), lambda p, x: p[x], unit, unit)
        with pytest.raises(ValueError):
            stack_volume(am, param_region=(0.0, 1.0))

    def test_param_region_must_be_interval(self):
        with pytest.raises(ValueError):
            stack_volume(plane_so2(), param_region=(2.0, 1.0))
        with pytest.raises(ValueError):
            stack_volume(plane_so2(), param_region=(5.0, 6.0))

    def test_vanishing_fiber_is_degenerate(self):
        am = dataclasses.replace(plane_so2(), a_density=lambda p: 0.0)
        with pytest.raises(DegenerateModelError):
            stack_volume(am)

    def test_unbounded_chart_rejected(self):
        am = _half_line_model(lambda x: math.exp(-x))
        with pytest.raises(NonCompactChartError):
            stack_volume(am)

    def test_signed_form_input(self):
        am = dataclasses.replace(plane_so2(), b_density=lambda p: -p[0],
                                 density_mode="signed-form")
        assert am.density_mode == "unsigned-density"
        assert am.b_density((1.5, 0.0)) == 1.5
        res = stack_volume(am)
        assert abs(res.value - 2.0) <= res.error_estimate + 1e-9

    def test_volume_unchanged_by_noninvariant_rescale(self):
        # multiplying a and b by the same positive chart function must not
        # move the volume, even when that function is not orbit-constant
        def theta(p):
            r, phi = p
            return 1.5 + 0.5 * math.sin(phi) + 0.1 * r

        am = dataclasses.replace(
            plane_so2(R=2.0),
            a_density=lambda p: theta(p),
            b_density=lambda p: theta(p) * p[0],
            a_constant=False,
        )
        res = stack_volume(am, tol=1e-5)
        assert abs(res.value - 2.0) < 5e-4


class TestHomogeneousVolume:
    def test_torus_agrees_with_stack(self):
        am = torus_free()
        homog = homogeneous_volume(am)
        stack = stack_volume(am)
        assert abs(homog.value - stack.value) <= 1e-8

    def test_point_chart_ratio(self):
        z4 = FiniteGroup.cyclic(4)
        unit = {x: 1 for x in range(3)}
        am = finite_action_model(z4, range(3), lambda h, x: x, unit, unit)
        res = homogeneous_volume(am)
        assert res.value == pytest.approx(3 / 4)

    def test_convergent_half_line(self):
        am = _half_line_model(lambda x: math.exp(-x))
        res = homogeneous_volume(am)
        assert res.value == pytest.approx(1.0, abs=1e-5)

    def test_divergent_half_line(self):
        am = _half_line_model(lambda x: 1.0)
        with pytest.raises(DivergentIntegralError):
            homogeneous_volume(am)

    def test_requires_constant_a(self):
        am = dataclasses.replace(torus_free(), a_constant=False)
        with pytest.raises(ValueError):
            homogeneous_volume(am)


def _half_line_model(b):
    """Trivial group acting on [0, inf) with the given transverse density."""
    triv = FiniteGroup.trivial()
    return ActionModel(
        name="half-line",
        group=GroupModel("finite", group=triv),
        chart=BoxChart(bounds=((0.0, math.inf),), periods=(None,)),
        act=lambda h, p: p,
        a_density=lambda p: 1.0,
        b_density=lambda p: b(p[0]),
        a_constant=True,
    )


class TestInvariance:
    def test_rotations_preserve_lebesgue(self):
        report = check_invariance(plane_so2(), samples=100, seed=3)
        assert report.passed, str(report)
        assert report.witness is None

    def test_reflections_preserve_lebesgue(self):
        report = check_invariance(plane_o2(), samples=100, seed=3)
        assert report.passed, str(report)

    def test_non_invariant_density_caught(self):
        # r |cos theta| is the distance to the vertical axis, not rotation
        # invariant; the report must carry a concrete witness
        am = dataclasses.replace(plane_so2(),
                                 b_density=lambda p: p[0] * abs(math.cos(p[1])))
        report = check_invariance(am, samples=100, seed=3)
        assert not report.passed
        assert report.max_defect > 1e-3
        assert report.witness is not None
        h, p = report.witness
        assert invariance_defect(am, h, p) == pytest.approx(report.max_defect)

    def test_finite_orbit_constant_section(self):
        s3 = FiniteGroup.symmetric(3)
        unit = {x: 1 for x in range(3)}
        am = finite_action_model(s3, range(3), lambda p, x: p[x], unit, unit)
        assert check_invariance(am, samples=60, seed=1).passed

    def test_finite_non_invariant_section(self):
        s3 = FiniteGroup.symmetric(3)
        unit = {x: 1 for x in range(3)}
        skew = {0: 1.0, 1: 2.0, 2: 3.0}
        am = finite_action_model(s3, range(3), lambda p, x: p[x], unit, skew)
        assert not check_invariance(am, samples=60, seed=1).passed

    def test_report_formatting(self):
        report = check_invariance(plane_so2(), samples=10)
        assert "pass" in str(report)


class TestPushforward:
    def test_disk_density_is_radius(self):
        am = plane_so2(R=2.0)
        for r in (0.5, 1.0, 1.5, 2.0):
            assert pushforward_density(am, r) == pytest.approx(r, abs=1e-12)

    def test_reflections_halve_the_density(self):
        am = plane_o2(R=2.0)
        for r in (0.5, 1.0, 1.5, 2.0):
            assert pushforward_density(am, r) == pytest.approx(r / 2, abs=1e-12)

    def test_singular_orbit_rejected(self):
        with pytest.raises(SingularOrbitError) as exc:
            pushforward_density(plane_so2(), 0.0)
        assert "strongly regular" in str(exc.value)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            pushforward_density(plane_so2(R=2.0), 3.0)

    def test_needs_orbit_chart(self):
        z2 = FiniteGroup.cyclic(2)
        unit = {0: 1, 1: 1}
        am = finite_action_model(z2, [0, 1], lambda h, x: (x + h) % 2, unit, unit)
        with pytest.raises(ValueError):
            pushforward_density(am, 0.5)

    def test_compensating_rescale_of_orbit_data(self):
        # scaling orbit density and isotropy volume together cancels exactly
        am = plane_so2(R=2.0)
        oc = am.orbit_chart
        scaled = dataclasses.replace(
            am,
            orbit_chart=OrbitChart(
                param_axis=oc.param_axis,
                param_range=oc.param_range,
                orbit_density=lambda t: (1.0 + t * t) * oc.orbit_density(t),
                isotropy_volume=lambda t: (1.0 + t * t) * oc.isotropy_volume(t),
                singular_params=oc.singular_params,
            ),
        )
        for r in (0.5, 1.3, 2.0):
            assert abs(pushforward_density(scaled, r)
                       - pushforward_density(am, r)) < 1e-12


class TestTwoRouteComparison:
    def test_disk_full_range(self):
        report = stack_volume_vs_pushforward(plane_so2(R=2.0), (0.0, 2.0))
        assert report.passed, str(report)
        assert report.stack_result.value == pytest.approx(2.0, abs=1e-6)
        assert report.pushforward_result.value == pytest.approx(2.0, abs=1e-9)

    def test_disk_annulus(self):
        report = stack_volume_vs_pushforward(plane_so2(R=2.0), (1.0, 2.0))
        assert report.passed
        assert report.pushforward_result.value == pytest.approx(1.5, abs=1e-9)

    def test_reflection_quotient(self):
        report = stack_volume_vs_pushforward(plane_o2(R=2.0), (0.0, 2.0))
        assert report.passed
        assert report.pushforward_result.value == pytest.approx(1.0, abs=1e-9)

    def test_torus_partial_transverse_window(self):
        report = stack_volume_vs_pushforward(torus_free(), (0.0, math.pi))
        assert report.passed
        assert report.pushforward_result.value == pytest.approx(math.pi, abs=1e-9)

    def test_region_outside_orbit_range(self):
        with pytest.raises(ValueError):
            stack_volume_vs_pushforward(plane_so2(R=2.0), (1.0, 3.0))

    def test_report_formatting(self):
        report = stack_volume_vs_pushforward(plane_so2(), (0.5, 1.0))
        assert isinstance(report, ComparisonReport)
        assert "stack" in str(report)


class TestFiniteBridge:
    def test_chart_and_group(self):
        z2 = FiniteGroup.cyclic(2)
        unit = {0: 1, 1: 1}
        am = finite_action_model(z2, [0, 1], lambda h, x: (x + h) % 2, unit, unit)
        assert isinstance(am.chart, PointChart)
        assert am.a_constant
        assert group_volume(am.group) == 2.0

    def test_nonconstant_a_detected(self):
        z2 = FiniteGroup.cyclic(2)
        am = finite_action_model(z2, [0, 1], lambda h, x: (x + h) % 2,
                                 {0: 1, 1: 2}, {0: 1, 1: 1})
        assert not am.a_constant

    def test_haar_scale_cancels_in_volume(self):
        s3 = FiniteGroup.symmetric(3)
        unit = {x: 1 for x in range(3)}
        plain = finite_action_model(s3, range(3), lambda p, x: p[x], unit, unit)
        scaled = finite_action_model(s3, range(3), lambda p, x: p[x],
                                     unit, unit, haar_scale=7.0)
        v1 = stack_volume(plain).value
        v2 = stack_volume(scaled).value
        # scaling Haar measure rescales fibers but b is per-point mass
        assert v2 == pytest.approx(v1 / 7.0)
