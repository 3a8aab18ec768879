import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from skimage.color import rgb2lab

from lbpseg.errors import DegenerateVarianceError, ParameterError, RangeError, SizeError
from lbpseg.features import build_features, rgb255_to_lab, write_feature_csv, yl_to_ab, znormalize
from lbpseg.lbp import flatness_map, lbp_map
from lbpseg.phantom import disk_phantom
from lbpseg.raster import gaussian_smooth, rescale_minmax, to_luminance


def ab_at(y, l):
    return yl_to_ab(np.array([[float(y)]]), np.array([[float(l)]]))[0, 0]


# --- znormalize -----------------------------------------------------------------

def test_znormalize_two_values():
    assert np.allclose(znormalize(np.array([[0.0, 10.0]])), [[-1.0, 1.0]])


@settings(max_examples=50)
@given(st.lists(st.floats(-1e4, 1e4), min_size=2, max_size=50).filter(lambda v: np.ptp(v) > 1e-3))
def test_znormalize_moments(values):
    out = znormalize(np.array([values]))
    assert abs(out.mean()) < 1e-9
    assert out.var() == pytest.approx(1.0, abs=1e-9)


def test_znormalize_constant():
    with pytest.raises(DegenerateVarianceError):
        znormalize(np.full((3, 3), 2.0))


# --- a*b* mapping ---------------------------------------------------------------

def test_white_and_black_are_achromatic():
    assert np.all(np.abs(ab_at(255, 255)) < 0.05)
    assert np.array_equal(ab_at(0, 0), [0.0, 0.0])


def test_pure_green():
    a, b = ab_at(255, 0)
    assert a == pytest.approx(-86.18, abs=0.01)
    assert b == pytest.approx(83.18, abs=0.01)


@pytest.mark.parametrize("v", [0, 64, 128, 255])
def test_grays_are_achromatic(v):
    assert np.all(np.abs(ab_at(v, v)) < 0.05)


@pytest.mark.parametrize("y", [64, 128, 192])
def test_a_increases_with_flatness(y):
    a = [ab_at(y, l)[0] for l in (0, 64, 128, 192, 255)]
    assert all(x < z for x, z in zip(a, a[1:]))


def test_matches_reference_colorimetry(rng):
    # skimage uses the unrounded sRGB matrix, hence the small tolerance
    y = rng.uniform(0, 255, size=(30, 30))
    l = rng.uniform(0, 255, size=(30, 30))
    ref = rgb2lab(np.stack([l, y, l], axis=-1) / 255.0)[..., 1:]
    assert np.max(np.abs(yl_to_ab(y, l) - ref)) < 0.05
    assert np.allclose(yl_to_ab(y, l), rgb255_to_lab(np.stack([l, y, l], axis=-1))[..., 1:], atol=1e-10)


def test_yl_to_ab_errors():
    with pytest.raises(SizeError):
        yl_to_ab(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(RangeError):
        yl_to_ab(np.full((2, 2), 256.0), np.zeros((2, 2)))
    with pytest.raises(RangeError):
        yl_to_ab(np.zeros((2, 2)), np.full((2, 2), -1.0))


# --- build_features -------------------------------------------------------------

def _phantom_maps(seed=0):
    img, gt = disk_phantom(seed=seed)
    y = to_luminance(img)
    l = rescale_minmax(gaussian_smooth(flatness_map(lbp_map(y)), 8.0))
    return y, l, gt


@pytest.mark.parametrize("variant", ["ab", "zn"])
def test_one_point_per_pixel(rng, variant):
    y = rng.uniform(0, 255, size=(7, 11))
    l = rng.uniform(0, 255, size=(7, 11))
    cloud = build_features(y, l, variant)
    assert cloud.points.shape == (77, 2)
    idx = np.arange(77)
    r, c = cloud.pixel_coords(idx)
    assert np.array_equal(cloud.point_index(r, c), idx)
    assert np.array_equal(cloud.to_grid(idx)[r, c], idx)


def test_zn_cloud_is_centred(rng):
    y, l, _ = _phantom_maps()
    pts = build_features(y, l, "zn").points
    assert np.allclose(pts.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(pts.var(axis=0), 1.0, atol=1e-9)


def test_ab_separates_phantom_regions():
    y, l, gt = _phantom_maps()
    pts = build_features(y, l, "ab").points
    inside, outside = pts[gt.ravel()], pts[~gt.ravel()]
    c_in, c_out = inside.mean(axis=0), outside.mean(axis=0)
    spread = max(np.linalg.norm(inside - c_in, axis=1).mean(), np.linalg.norm(outside - c_out, axis=1).mean())
    assert np.linalg.norm(c_in - c_out) > 4 * spread
    # lesion toward magenta (+a*), skin toward green (-a*)
    assert c_in[0] > 0 > c_out[0]


def test_ab_invariant_to_affine_prescale(rng):
    y = rng.uniform(10, 200, size=(16, 16))
    l = rng.uniform(0, 1, size=(16, 16))
    a = build_features(y, l, "ab").points
    b = build_features(3.0 * y + 7.0, 0.25 * l - 4.0, "ab").points
    assert np.allclose(a, b, atol=1e-9)


def test_unknown_variant():
    with pytest.raises(ParameterError):
        build_features(np.zeros((3, 3)), np.zeros((3, 3)), "xy")


def test_zn_propagates_degenerate_variance(rng):
    with pytest.raises(DegenerateVarianceError):
        build_features(rng.normal(size=(4, 4)), np.zeros((4, 4)), "zn")


def test_feature_csv(tmp_path):
    cloud = build_features(np.array([[0.0, 255.0], [10.0, 20.0]]), np.array([[0.0, 0.0], [255.0, 1.0]]))
    write_feature_csv(cloud, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "pixel_x,pixel_y,a,b"
    assert len(lines) == 5
    assert lines[2].startswith("1,0,-86.18")
