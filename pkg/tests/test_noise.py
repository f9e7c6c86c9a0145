import numpy as np
import pytest

from itc.cells import Geometry, build_complex
from itc.code import build_itc
from itc.noise import NoiseModel, sample, stream
from itc.syndrome import REDUNDANT, build_maps


@pytest.fixture(scope="module")
def slab_maps():
    return build_maps(build_itc(build_complex(Geometry("slab", 3)), "kvc"))


@pytest.fixture(scope="module")
def torus_maps():
    return build_maps(build_itc(build_complex(Geometry("torus3", 3)), "kvc"))


def test_extremes(slab_maps):
    eps, mu = sample(NoiseModel(0.0, 0.0), slab_maps, 0, 0)
    assert not eps.any() and not mu.any()
    eps, mu = sample(NoiseModel(1.0, 0.0), slab_maps, 0, 0)
    assert eps.all() and not mu.any()


@pytest.mark.parametrize("p,q", [(-0.1, 0.0), (0.0, 1.5)])
def test_rejects_bad_rates(p, q):
    with pytest.raises(ValueError):
        NoiseModel(p, q)


def test_mean_weight_binomial(torus_maps):
    n = torus_maps.dims["C_Q"]
    model = NoiseModel(0.1, 0.0, seed=11)
    weights = np.array([sample(model, torus_maps, t, 0)[0].sum() for t in range(10_000)])
    mean, sd = 0.1 * n, np.sqrt(n * 0.1 * 0.9 / 10_000)
    assert abs(weights.mean() - mean) < 3 * sd


def test_determinism_and_independence(slab_maps):
    model = NoiseModel(0.3, 0.3, seed=5)
    a = sample(model, slab_maps, 7, 2)
    b = sample(model, slab_maps, 7, 2)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = sample(model, slab_maps, 7, 3)
    d = sample(model, slab_maps, 8, 2)
    assert not np.array_equal(a[0], c[0]) and not np.array_equal(a[0], d[0])
    # order of draws does not matter
    later = [sample(model, slab_maps, t, 0)[0] for t in (3, 2, 1)]
    assert np.array_equal(later[2], sample(model, slab_maps, 1, 0)[0])
    assert not np.array_equal(stream(5, 0, 0, "Z").random(8), stream(5, 0, 0, "X").random(8))


def test_boundary_measurement_flag(slab_maps):
    mask = slab_maps.family_mask(*REDUNDANT)
    assert mask.any()
    quiet = NoiseModel(0.0, 1.0, include_boundary_measurement_noise=False)
    _, mu = sample(quiet, slab_maps, 0, 0)
    assert not mu[mask].any() and mu[~mask].all()
    _, mu = sample(NoiseModel(0.0, 1.0), slab_maps, 0, 0)
    assert mu.all()
