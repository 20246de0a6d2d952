import os
import subprocess
import sys

import numpy as np
import pytest

from levynet import kernels
from levynet.errors import ParameterError
from levynet.stable_forest import brute_force_heights, offspring_law, sample_forest

py = kernels.get_backend("python")
try:
    cy = kernels.get_backend("cython")
except ImportError:  # extension not built
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled extension not built")


class TestFallbackSelection:
    def test_backend_name(self):
        assert kernels.BACKEND in ("cython", "python")
        with pytest.raises(ParameterError):
            kernels.get_backend("fortran")

    def test_environment_forces_python(self):
        env = dict(os.environ, LEVYNET_BACKEND="python")
        out = subprocess.run(
            [sys.executable, "-c", "from levynet import kernels; print(kernels.BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "python"


@needs_cython
class TestParity:
    def test_minplus(self, rng):
        for _ in range(5):
            a = rng.integers(0, 20, (40, 40)).astype(float)
            a = np.minimum(a, a.T)
            np.fill_diagonal(a, 0)
            b, c = a.copy(), a.copy()
            while py.minplus_closure(b):
                pass
            while cy.minplus_closure(c):
                pass
            np.testing.assert_array_equal(b, c)

    def test_height(self, rng):
        for _ in range(10):
            walk = sample_forest(1.5, 20, rng).walk
            h = py.height_process(walk)
            np.testing.assert_array_equal(h, cy.height_process(walk))
            np.testing.assert_array_equal(h, brute_force_heights(walk))

    def test_snake(self, rng):
        y = np.abs(np.cumsum(rng.normal(size=500)))
        y[0] = 0.0
        z = rng.normal(size=500)
        np.testing.assert_allclose(py.snake_retrace(y, z), cy.snake_retrace(y, z), rtol=0, atol=1e-12)

    @pytest.mark.parametrize("target", [-5, -1000])
    def test_offspring_walk(self, rng, target):
        law = offspring_law(1.5)
        u = rng.random(5000)
        u[3000] = 1.0 - 1e-15  # force a tail draw
        out = []
        for mod in (py, cy):
            xi = np.zeros(u.size, dtype=np.int64)
            res = mod.offspring_walk(u, 0, law.cdf, law.guide, xi, 0, target)
            out.append((tuple(int(v) for v in res), xi))
        assert out[0][0] == out[1][0]
        np.testing.assert_array_equal(out[0][1], out[1][1])
