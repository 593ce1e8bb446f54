import numpy as np
import pytest

from eulerlab import grid as g


@pytest.fixture(scope="session")
def grid16():
    return g.GridSpec(16)


@pytest.fixture(scope="session")
def grid24():
    return g.GridSpec(24)


@pytest.fixture(scope="session")
def grid32():
    return g.GridSpec(32)


def random_band_limited(gr, shape, kmax, rng, zero_mean=False):
    """Random real field with modes only inside |m_i| <= kmax."""
    out = np.zeros(shape + (gr.n,) * 3)
    m = gr.modes
    keep = np.abs(m) <= kmax
    mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    spec = (rng.standard_normal(out.shape) + 1j * rng.standard_normal(out.shape)) * mask
    phys = g.ifftn(spec)
    if zero_mean:
        phys -= phys.mean(axis=(-3, -2, -1), keepdims=True)
    # normalize amplitude
    scale = np.abs(phys).max()
    return phys / scale if scale > 0 else phys


def random_solenoidal(gr, kmax, rng):
    from eulerlab.fields import leray_project_arr
    v = random_band_limited(gr, (3,), kmax, rng, zero_mean=True)
    return leray_project_arr(gr, v)
