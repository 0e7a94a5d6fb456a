import numpy as np
import pytest

from orbitbench.errors import InvalidParameterError
from orbitbench.noise import NoiseParams, cellular2, fbm2, perlin2
from orbitbench.rng import RngKey, Stream, uniform


KEY = RngKey(global_seed=77, env_index=0, stream_id=Stream.TERRAIN)


def test_perlin_zero_at_lattice_corners():
    cell = 0.5
    xs = np.arange(-3, 4) * cell
    ys = np.arange(-3, 4) * cell
    gx, gy = np.meshgrid(xs, ys)
    np.testing.assert_array_equal(perlin2(gx, gy, cell, KEY), np.zeros_like(gx))


def test_perlin_pure_in_key():
    v1 = perlin2(1.234, -5.678, 0.7, KEY)
    v2 = perlin2(1.234, -5.678, 0.7, KEY)
    assert np.array_equal(v1, v2)
    assert v1 != perlin2(1.234, -5.678, 0.7, KEY.advance())


def test_perlin_bounded():
    rng = np.random.default_rng(0)
    x = rng.uniform(-100, 100, 1_000_000)
    y = rng.uniform(-100, 100, 1_000_000)
    v = perlin2(x, y, 1.3, KEY)
    assert float(np.abs(v).max()) <= 1.0


def test_perlin_rejects_bad_cell():
    with pytest.raises(InvalidParameterError):
        perlin2(0.0, 0.0, 0.0, KEY)
    with pytest.raises(InvalidParameterError):
        perlin2(0.0, 0.0, -1.0, KEY)


def test_perlin_c1_smoothness():
    # finite-difference gradient must vary smoothly along a transect
    xs = np.arange(2000) * 1e-4 + 0.123
    y = 0.456
    h = 1e-5
    grad = (perlin2(xs + h, y, 1.0, KEY) - perlin2(xs - h, y, 1.0, KEY)) / (2 * h)
    assert float(np.abs(np.diff(grad)).max()) < 1e-2


def test_cellular_f2_ge_f1():
    rng = np.random.default_rng(1)
    x = rng.uniform(-20, 20, 20_000)
    y = rng.uniform(-20, 20, 20_000)
    f1, f2, _ = cellular2(x, y, 0.8, KEY)
    assert np.all(f2 >= f1)
    assert np.all(f1 >= 0.0)


def test_cellular_zero_at_feature_point():
    # reconstruct the feature point of cell (3, -2) and query it exactly
    cell = 0.6
    ci, cj = 3, -2
    jx = uniform(KEY, 0x76, ci, cj, 0)
    jy = uniform(KEY, 0x76, ci, cj, 1)
    px = (ci + jx) * cell
    py = (cj + jy) * cell
    f1, _, _ = cellular2(px, py, cell, KEY)
    assert f1 == 0.0


def _brute_force_f1(x, y, cell, key):
    # independent oracle: direct scan of the 5x5 neighborhood, in meters
    import itertools

    bx, by = int(np.floor(x / cell)), int(np.floor(y / cell))
    best = np.inf
    for di, dj in itertools.product(range(-2, 3), repeat=2):
        ci, cj = bx + di, by + dj
        px = (ci + uniform(key, 0x76, ci, cj, 0)) * cell
        py = (cj + uniform(key, 0x76, ci, cj, 1)) * cell
        best = min(best, float(np.hypot(x - px, y - py)))
    return best


def test_cellular_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(200):
        x = float(rng.uniform(-10, 10))
        y = float(rng.uniform(-10, 10))
        f1, _, _ = cellular2(x, y, 0.9, KEY)
        assert float(f1) == _brute_force_f1(x, y, 0.9, KEY)


def test_cellular_id_stable():
    _, _, id_a = cellular2(0.31, 0.62, 1.0, KEY)
    _, _, id_b = cellular2(0.32, 0.63, 1.0, KEY)
    assert id_a == id_b  # same nearest feature point


def test_fbm_single_octave_equals_perlin():
    p = NoiseParams(frequency=0.5, amplitude=2.5, octaves=1)
    rng = np.random.default_rng(3)
    x = rng.uniform(-5, 5, 100)
    y = rng.uniform(-5, 5, 100)
    np.testing.assert_array_equal(fbm2(x, y, p, KEY), 2.5 * perlin2(x, y, 2.0, KEY))


def test_fbm_zero_amplitude():
    p = NoiseParams(frequency=1.0, amplitude=0.0, octaves=3)
    x = np.linspace(-2, 2, 50)
    np.testing.assert_array_equal(fbm2(x, x, p, KEY), np.zeros(50))


def test_fbm_geometric_bound():
    p = NoiseParams(frequency=0.8, amplitude=1.7, octaves=3, gain=0.5)
    rng = np.random.default_rng(4)
    x = rng.uniform(-50, 50, 100_000)
    y = rng.uniform(-50, 50, 100_000)
    v = fbm2(x, y, p, KEY)
    assert float(np.abs(v).max()) <= 1.75 * 1.7
    assert p.amplitude_bound() == pytest.approx(1.75 * 1.7)


def test_noise_params_validation():
    with pytest.raises(InvalidParameterError):
        NoiseParams(frequency=1.0, amplitude=1.0, octaves=0).validate()
    with pytest.raises(InvalidParameterError):
        NoiseParams(frequency=-1.0, amplitude=1.0).validate()
    with pytest.raises(InvalidParameterError):
        NoiseParams(frequency=1.0, amplitude=1.0, lacunarity=1.0).validate()
    with pytest.raises(InvalidParameterError):
        NoiseParams(frequency=1.0, amplitude=1.0, gain=0.0).validate()
    with pytest.raises(InvalidParameterError):
        NoiseParams(frequency=np.inf, amplitude=1.0).validate()
