import math

import pytest

from ksrg import oracles
from ksrg.params import ModelParams


@pytest.mark.parametrize("n", [16, 64, 256])
@pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
def test_boundary_oracles_agree(n, beta):
    params = ModelParams(d=1, alpha=1.5, profile="polynomial", vertex_process="lattice", beta=beta)
    a = oracles.expected_downward_boundary_lattice(n, params)
    b = oracles.expected_downward_boundary_lrp_1d(n, params)
    assert a == pytest.approx(b, rel=1e-10)


def test_quadratic_root():
    z = oracles.quadratic_pgf_root(0.5, 0.5, 0.25)
    assert z == pytest.approx((-1 + math.sqrt(3)) / 2, abs=1e-15)
    assert 0.5 * z + 0.5 * z * z == pytest.approx(0.25, abs=1e-15)
