import numpy as np
import pytest

from qdomain import kernels

from conftest import SPECS

needs_cython = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled extension not built")


def both(fn, *args):
    out = {}
    for name in ("python", "cython"):
        prev = kernels.use_backend(name)
        try:
            out[name] = fn(*args)
        finally:
            kernels.use_backend(prev)
    return out["python"], out["cython"]


@needs_cython
@pytest.mark.parametrize("name", sorted(SPECS))
def test_backends_agree_bitwise(name):
    t = SPECS[name]
    rng = np.random.default_rng(7)
    x, y = rng.random((2, 40, 40))
    x[::5] = 0.25          # hit piece bounds and the diagonal
    y[:, ::7] = x[:, ::7]
    arrs = t.piece_arrays
    for fn in (kernels.conj, kernels.residuum, kernels.compose_max, kernels.residuum_meet):
        a, b = both(fn, x, y, *arrs)
        assert np.array_equal(a, b), fn.__name__


@needs_cython
def test_approach_violations_agree():
    t = SPECS["lukasiewicz"]
    rng = np.random.default_rng(3)
    delta = rng.random((4, 16))
    a, b = both(kernels.approach_violations, delta, *t.piece_arrays)
    assert a[0] == b[0] and a[2] == b[2]
    assert a[1] == b[1] and a[3] == b[3]


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")
