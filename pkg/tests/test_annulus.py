import math

import numpy as np
import pytest

from knotflow.annulus import (
    AnnulusSurface,
    CircleMap,
    NotMonotone,
    SlopeSignViolation,
    SurfacePatch,
    annulus_from_monodromy,
    annulus_monodromy,
    characteristic_slope,
    circle_map_distance,
    transversality_check,
)

TWO_PI = 2 * math.pi


def sine_map(drift, amplitude):
    return CircleMap.from_function(lambda t: t + drift + amplitude * math.sin(t))


class TestCharacteristicSlope:
    def test_values(self):
        assert characteristic_slope(0.5) == -0.25
        assert characteristic_slope(0.0) == 0.0
        assert characteristic_slope(1.0) == -1.0

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            characteristic_slope(-0.1)


class TestCircleMap:
    def test_rotation_lift(self):
        f = CircleMap.rotation(-2.0)
        assert f.lift(0.0) == pytest.approx(-2.0)
        assert f.lift(TWO_PI + 1.0) == pytest.approx(TWO_PI - 1.0)

    def test_call_reduces(self):
        f = CircleMap.rotation(-2.0)
        assert 0.0 <= f(0.3) < TWO_PI

    def test_orientation_detection(self):
        assert CircleMap.rotation(1.0).is_orientation_preserving()
        assert sine_map(-4.0, 0.5).is_orientation_preserving()
        assert not sine_map(0.0, 1.5).is_orientation_preserving()

    def test_compose(self):
        f = CircleMap.rotation(-1.0)
        g = sine_map(-2.0, 0.3)
        composed = f.compose(g)
        grid = np.linspace(0, TWO_PI, 50)
        expected = g.lift(grid) - 1.0
        assert np.max(np.abs(composed.lift(grid) - expected)) < 1e-8

    def test_distance_mod_two_pi(self):
        f = CircleMap.rotation(0.5)
        g = CircleMap.rotation(0.5 - TWO_PI)
        assert circle_map_distance(f, g) < 1e-12


class TestMonodromyOfKnownSurfaces:
    def test_unit_cylinder_rotates_by_minus_two(self):
        m = annulus_monodromy(AnnulusSurface.constant(1.0))
        assert circle_map_distance(m, CircleMap.rotation(-2.0)) < 1e-8

    def test_constant_two(self):
        m = annulus_monodromy(AnnulusSurface.constant(2.0))
        assert circle_map_distance(m, CircleMap.rotation(-1.0)) < 1e-8


ROUNDTRIP_BANK = [
    ("rotation -2", CircleMap.rotation(-2.0)),
    ("rotation -0.7 (needs winding)", CircleMap.rotation(-0.7)),
    ("sine drift -4", sine_map(-4.0, 0.5)),
    ("composite rot o sine", CircleMap.rotation(-1.0).compose(sine_map(-2.0, 0.3))),
    ("composite sine o sine", sine_map(-1.5, 0.25).compose(sine_map(-2.5, 0.4))),
]


class TestRoundtrip:
    @pytest.mark.parametrize("label,f", ROUNDTRIP_BANK, ids=[b[0] for b in ROUNDTRIP_BANK])
    def test_bank(self, label, f):
        surface = annulus_from_monodromy(f, eps=1.0)
        recovered = annulus_monodromy(surface)
        assert circle_map_distance(recovered, f) < 1e-4
        assert transversality_check(surface).transverse

    def test_identity_needs_one_wrap(self):
        surface = annulus_from_monodromy(CircleMap.rotation(0.0), eps=1.0)
        assert surface.winding == -1
        recovered = annulus_monodromy(surface)
        assert circle_map_distance(recovered, CircleMap.rotation(0.0)) < 1e-4

    def test_extra_winding_is_equally_valid(self):
        # steeper leaves need a finer z grid for the same roundtrip accuracy
        f = sine_map(-4.0, 0.5)
        surface = annulus_from_monodromy(f, eps=1.0, grid=(256, 257), winding=-2)
        assert surface.winding == -2
        recovered = annulus_monodromy(surface)
        assert circle_map_distance(recovered, f) < 1e-4

    def test_rotation_minus_two_gives_constant_surface(self):
        surface = annulus_from_monodromy(CircleMap.rotation(-2.0), eps=1.0)
        assert np.max(np.abs(surface.g - 1.0)) < 1e-9

    def test_boundary_rows_exact(self):
        eps = 0.8
        surface = annulus_from_monodromy(sine_map(-4.0, 0.5), eps=eps)
        assert np.all(surface.g[:, 0] == eps**2)
        assert np.all(surface.g[:, -1] == eps**2)

    def test_leaf_slopes_negative(self):
        surface = annulus_from_monodromy(sine_map(-4.0, 0.5), eps=1.0)
        assert np.all(surface.g > 0)
        drops = annulus_monodromy(surface)
        grid = np.linspace(0, TWO_PI, 64)
        assert np.all(drops.lift(grid) - grid < 0)

    def test_monodromy_is_orientation_preserving(self):
        surface = annulus_from_monodromy(sine_map(-3.0, 0.45), eps=1.0)
        assert annulus_monodromy(surface).is_orientation_preserving()


class TestErrors:
    def test_not_monotone(self):
        with pytest.raises(NotMonotone):
            annulus_from_monodromy(sine_map(-2.0, 1.5), eps=1.0)

    def test_insufficient_winding(self):
        with pytest.raises(SlopeSignViolation):
            annulus_from_monodromy(sine_map(-4.0, 0.5), eps=1.0, winding=1)

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            annulus_from_monodromy(CircleMap.rotation(-2.0), eps=0.0)

    def test_surface_validation(self):
        theta = np.linspace(0, TWO_PI, 32, endpoint=False)
        z = np.linspace(-1, 1, 9)
        with pytest.raises(ValueError):
            AnnulusSurface(theta, z, np.zeros((32, 9)), eps=1.0)
        bad_boundary = np.ones((32, 9))
        bad_boundary[:, 0] = 2.0
        with pytest.raises(ValueError):
            AnnulusSurface(theta, z, bad_boundary, eps=1.0)


class TestTransversality:
    def test_cylinder_is_transverse(self):
        report = transversality_check(AnnulusSurface.constant(1.0))
        assert report.transverse
        assert report.tangencies == ()

    def test_radial_cap_tangency_at_axis(self):
        s = np.linspace(0.0, 1.0, 11)
        phi = np.linspace(0.0, TWO_PI, 32, endpoint=False)
        ss, pp = np.meshgrid(s, phi, indexing="ij")
        cap = SurfacePatch(r=ss, theta=pp, z=np.zeros_like(ss), periodic_axis=1)
        report = transversality_check(cap)
        assert not report.transverse
        # the flagged points are exactly the axis point r = 0
        assert all(t[2] == 0.0 for t in report.tangencies)

    def test_tilted_patch_away_from_axis_is_transverse(self):
        s = np.linspace(0.5, 1.0, 11)
        phi = np.linspace(0.0, TWO_PI, 32, endpoint=False)
        ss, pp = np.meshgrid(s, phi, indexing="ij")
        patch = SurfacePatch(r=ss, theta=pp, z=0.3 * ss, periodic_axis=1)
        report = transversality_check(patch)
        assert report.transverse
