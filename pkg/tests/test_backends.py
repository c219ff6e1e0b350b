import subprocess
import sys

import numpy as np
import pytest

from prida import backends

RNG = np.random.default_rng(0)


def _pairs():
    if "numba" not in backends.IMPLEMENTATIONS:
        pytest.skip("numba backend unavailable")
    return backends.IMPLEMENTATIONS["numpy"], backends.IMPLEMENTATIONS["numba"]


@pytest.mark.parametrize("op", ["conv2d_circular", "conv2d_replicate"])
def test_conv_backends_agree(op):
    np_impl, nb_impl = _pairs()
    f = RNG.uniform(size=(17, 23))
    k = RNG.dirichlet(np.ones(25)).reshape(5, 5)
    assert np.max(np.abs(np_impl[op](f, k) - nb_impl[op](f, k))) < 1e-12


@pytest.mark.parametrize("op", ["adjoint2d_circular", "adjoint2d_replicate"])
def test_adjoint_backends_agree(op):
    np_impl, nb_impl = _pairs()
    r = RNG.standard_normal((17, 23))
    k = RNG.dirichlet(np.ones(25)).reshape(5, 5)
    assert np.max(np.abs(np_impl[op](k, r) - nb_impl[op](k, r))) < 1e-12


@pytest.mark.parametrize("op", ["gradk2d_circular", "gradk2d_replicate"])
def test_gradk_backends_agree(op):
    np_impl, nb_impl = _pairs()
    f = RNG.uniform(size=(15, 19))
    r = RNG.standard_normal((15, 19))
    assert np.max(np.abs(np_impl[op](f, r, 5) - nb_impl[op](f, r, 5))) < 1e-12


def test_entropic_core_backends_agree():
    np_impl, nb_impl = _pairs()
    for _ in range(50):
        s = int(RNG.integers(2, 40))
        k = np.maximum(RNG.dirichlet(np.ones(s)), 1e-12)
        k /= k.sum()
        z = RNG.normal(0, 100, size=s)
        a = np_impl["entropic_core"](k, z, np.log(1000.0))
        b = nb_impl["entropic_core"](k, z, np.log(1000.0))
        assert np.max(np.abs(a - b)) < 1e-12


def test_project_simplex_backends_agree():
    np_impl, nb_impl = _pairs()
    for _ in range(50):
        s = int(RNG.integers(2, 60))
        v = RNG.normal(0, 5, size=s)
        a = np_impl["project_simplex_core"](v)
        b = nb_impl["project_simplex_core"](v)
        assert np.max(np.abs(a - b)) < 1e-12


def test_env_flag_selects_numpy_backend():
    code = ("import os; os.environ['PRIDA_NO_NUMBA'] = '1'; "
            "import prida.backends as b; print(b.ACTIVE)")
    out = subprocess.run([sys.executable, "-c", code],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_active_backend_registered():
    assert backends.ACTIVE in backends.IMPLEMENTATIONS
    assert set(backends.IMPLEMENTATIONS["numpy"]) == {
        "conv2d_circular", "conv2d_replicate", "adjoint2d_circular",
        "adjoint2d_replicate", "gradk2d_circular", "gradk2d_replicate",
        "entropic_core", "project_simplex_core"}
