import math

import numpy as np
import pytest

from conftest import point_mask
from spoonvol.calibration import (
    UtensilCalibration,
    UtensilKind,
    calibrate,
    curve_gradient,
    detect_bend,
    scale_from_bowl_length,
    smooth_curve,
)
from spoonvol.errors import DegenerateCurve, EmptyCurve, NoBendFound
from spoonvol.masks import Label, PixelPoint, mask_from_grid
from spoonvol.synth import SpoonSpec, spoon_grid


def curve_of(ys, xs=None):
    if xs is None:
        xs = range(len(ys))
    return [PixelPoint(float(x), float(y)) for x, y in zip(xs, ys)]


def kinked_curve(kink_x=100, length=200, slope_after_deg=30.0, y0=0.0):
    """Flat until kink_x, then rising at the given angle."""
    m = math.tan(math.radians(slope_after_deg))
    return [
        PixelPoint(float(x), y0 if x <= kink_x else y0 - m * (x - kink_x))
        for x in range(length + 1)
    ]


class TestUtensilKind:
    def test_constants(self):
        assert UtensilKind.SPOON.bend_angle_threshold_deg == 15.0
        assert UtensilKind.FORK.bend_angle_threshold_deg == 7.0
        assert UtensilKind.SPOON.reference_length_cm == 6.0
        assert UtensilKind.FORK.reference_length_cm == 7.5

    def test_from_label(self):
        assert UtensilKind.from_label(Label.SPOON) is UtensilKind.SPOON
        with pytest.raises(ValueError):
            UtensilKind.from_label(Label.FOOD)


class TestSmoothCurve:
    def test_constant_curve_unchanged(self):
        curve = curve_of([7.0] * 9)
        assert smooth_curve(curve) == curve

    def test_center_of_alternating_curve(self):
        # oracle: (0 + 10 + 0 + 10 + 0) / 5 = 4
        smoothed = smooth_curve(curve_of([0, 10, 0, 10, 0]), window=5)
        assert smoothed[2].y == pytest.approx(4.0)
        # truncated windows at the ends
        assert smoothed[0].y == pytest.approx((0 + 10 + 0) / 3)
        assert smoothed[1].y == pytest.approx((0 + 10 + 0 + 10) / 4)

    def test_single_point_unchanged(self):
        curve = curve_of([3.0])
        assert smooth_curve(curve) == curve

    def test_x_passes_through(self):
        curve = curve_of([1, 5, 2], xs=[0, 3, 9])
        assert [p.x for p in smooth_curve(curve)] == [0.0, 3.0, 9.0]

    def test_empty_curve_rejected(self):
        with pytest.raises(EmptyCurve):
            smooth_curve([])

    @pytest.mark.parametrize("window", [0, 2, 4, -1])
    def test_bad_window_rejected(self, window):
        with pytest.raises(ValueError):
            smooth_curve(curve_of([1.0, 2.0]), window=window)


class TestCurveGradient:
    def test_unit_slope(self):
        assert curve_gradient(curve_of([0, 1])) == [1.0]

    def test_horizontal_curve(self):
        assert curve_gradient(curve_of([5.0] * 10)) == [0.0] * 9

    def test_wide_step(self):
        assert curve_gradient(curve_of([0, 1], xs=[0, 2])) == [0.5]

    def test_repeated_x_rejected(self):
        with pytest.raises(DegenerateCurve):
            curve_gradient(curve_of([0, 1], xs=[3, 3]))

    def test_too_short(self):
        with pytest.raises(DegenerateCurve):
            curve_gradient(curve_of([1.0]))


class TestDetectBend:
    def test_kink_at_known_x(self):
        assert detect_bend(kinked_curve(), UtensilKind.SPOON, "left") == 100.0

    def test_kink_upward_also_detected(self):
        m = math.tan(math.radians(30))
        curve = [
            PixelPoint(float(x), 0.0 if x <= 100 else m * (x - 100))
            for x in range(201)
        ]
        assert detect_bend(curve, UtensilKind.SPOON, "left") == 100.0

    def test_straight_line_no_bend(self):
        line = curve_of([0.7 * x for x in range(50)])  # steep but straight
        with pytest.raises(NoBendFound):
            detect_bend(line, UtensilKind.SPOON, "left")

    def test_subthreshold_kink_no_bend(self):
        curve = kinked_curve(slope_after_deg=10.0)
        with pytest.raises(NoBendFound):
            detect_bend(curve, UtensilKind.SPOON, "left")

    def test_same_kink_found_by_fork_threshold(self):
        curve = kinked_curve(slope_after_deg=10.0)
        assert detect_bend(curve, UtensilKind.FORK, "left") == 100.0

    def test_vertical_translation_invariant(self):
        base = kinked_curve()
        shifted = [PixelPoint(p.x, p.y + 137.0) for p in base]
        assert detect_bend(base, UtensilKind.SPOON, "left") == detect_bend(
            shifted, UtensilKind.SPOON, "left"
        )

    def test_traversal_from_right_tip(self):
        # mirror image: handle on the left, flat bowl on the right
        m = math.tan(math.radians(30))
        curve = [
            PixelPoint(float(x), 0.0 if x >= 100 else m * (100 - x))
            for x in range(201)
        ]
        assert detect_bend(curve, UtensilKind.SPOON, "right") == 100.0

    def test_first_crossing_wins(self):
        # two kinks; traversal from the left tip must return the nearer one
        m = math.tan(math.radians(40))
        curve = []
        for x in range(301):
            if x <= 100:
                y = 0.0
            elif x <= 200:
                y = -m * (x - 100)
            else:
                y = -m * 100 + m * (x - 200)
            curve.append(PixelPoint(float(x), y))
        assert detect_bend(curve, UtensilKind.SPOON, "left") == 100.0

    def test_too_short_curve(self):
        with pytest.raises(DegenerateCurve):
            detect_bend(curve_of([0, 1]), UtensilKind.SPOON, "left")


def render_spoon(bowl_length_px, tip_x=20.0, top_y=180.0, width=520, height=360, **kw):
    spoon = SpoonSpec(bowl_length_px=bowl_length_px, **kw)
    grid, bend_x = spoon_grid(width, height, tip_x, top_y, spoon)
    return mask_from_grid(grid, Label.SPOON, 0.95), bend_x


class TestCalibrate:
    def test_known_silhouette(self):
        mask, true_bend = render_spoon(100.0, tip_x=20.0)
        cal = calibrate(mask, UtensilKind.SPOON, PixelPoint(70.0, 160.0))
        assert true_bend == 120.0
        assert abs(cal.bend_x - true_bend) <= 3.0
        assert cal.bowl_length_px == pytest.approx(100.0, abs=3.0)
        assert cal.cm_per_px == pytest.approx(0.06, rel=0.03)

    def test_scale_covariance(self):
        mask1, bend1 = render_spoon(200.0, tip_x=20.0)
        mask2, bend2 = render_spoon(400.0, tip_x=20.0, width=900, handle_length_px=120.0)
        cal1 = calibrate(mask1, UtensilKind.SPOON, PixelPoint(120.0, 160.0))
        cal2 = calibrate(mask2, UtensilKind.SPOON, PixelPoint(220.0, 160.0))
        assert abs(cal1.bend_x - bend1) <= 2.0
        assert abs(cal2.bend_x - bend2) <= 2.0
        assert cal2.bowl_length_px == pytest.approx(2 * cal1.bowl_length_px, abs=4.0)
        assert cal2.cm_per_px == pytest.approx(cal1.cm_per_px / 2, rel=0.02)

    def test_tip_picked_near_food(self):
        mask, true_bend = render_spoon(120.0, tip_x=30.0)
        cal = calibrate(mask, UtensilKind.SPOON, PixelPoint(90.0, 160.0))
        assert cal.tip_x == pytest.approx(30.0, abs=1.0)
        assert abs(cal.bend_x - true_bend) <= 3.0

    def test_straight_utensil_has_no_bend(self):
        mask, _ = render_spoon(120.0, bend_angle_deg=0.0)
        with pytest.raises(NoBendFound):
            calibrate(mask, UtensilKind.SPOON, PixelPoint(80.0, 160.0))

    def test_single_pixel_mask_degenerate(self):
        mask = point_mask(5, 5, 20, 20, label=Label.SPOON)
        with pytest.raises(DegenerateCurve):
            calibrate(mask, UtensilKind.SPOON, PixelPoint(5.0, 4.0))

    def test_bend_accuracy_over_seeded_silhouettes(self):
        rng = np.random.Generator(np.random.PCG64(7))
        for _ in range(50):
            bowl = float(rng.uniform(100, 220))
            tip_x = float(rng.uniform(5, 40))
            top_y = float(rng.uniform(80, 200))
            spoon = SpoonSpec(
                bowl_length_px=bowl,
                handle_length_px=float(rng.uniform(60, 100)),
                bowl_depth_px=float(rng.uniform(18, 30)),
            )
            grid, true_bend = spoon_grid(480, 360, tip_x, top_y, spoon)
            mask = mask_from_grid(grid, Label.SPOON, 0.95)
            cal = calibrate(mask, UtensilKind.SPOON, PixelPoint(tip_x + bowl / 2, top_y - 10))
            assert abs(cal.bend_x - true_bend) <= 3.0
            assert cal.cm_per_px == pytest.approx(6.0 / bowl, rel=0.03)


class TestUtensilCalibration:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            UtensilCalibration(
                cm_per_px=0.05, tip_x=0.0, bend_x=100.0, bowl_length_px=100.0,
                kind=UtensilKind.SPOON,
            )

    def test_helper_constructor(self):
        cal = scale_from_bowl_length(UtensilKind.SPOON, 120.0)
        assert cal.cm_per_px == pytest.approx(0.05)
        cal = scale_from_bowl_length(UtensilKind.FORK, 150.0)
        assert cal.cm_per_px == pytest.approx(0.05)
