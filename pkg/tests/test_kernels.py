import numpy as np
import pytest

from qct import _kernels_py, ekert91, kernels, qsdc
from qct.eve import EveModel
from qct.statevec import make_rng

compiled = pytest.mark.skipif(kernels.compiled_impl is None, reason="extension not built")


def _angles(rng, n):
    t = rng.uniform(0, np.pi, n)
    return np.ascontiguousarray(np.cos(t / 2)), np.ascontiguousarray(np.sin(t / 2))


@pytest.fixture
def teleport_inputs():
    rng = make_rng(21)
    g = rng.standard_normal((5000, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return tuple(np.ascontiguousarray(g[:, i]) for i in range(4)) + (rng.random(5000),)


@pytest.fixture
def pair_inputs():
    rng = make_rng(22)
    n = 5000
    ac, as_ = _angles(rng, n)
    bc, bs = _angles(rng, n)
    ec, es = _angles(rng, n)
    mask = (rng.random(n) < 0.5).astype(np.int8)
    return ac, as_, bc, bs, mask, ec, es, rng.random((n, 3))


@pytest.fixture
def trip_inputs():
    rng = make_rng(23)
    n = 5000
    pc, ps = _angles(rng, n)
    bit = rng.integers(0, 2, n).astype(np.int8)
    mask = (rng.random(n) < 0.5).astype(np.int8)
    ec, es = _angles(rng, n)
    flip = rng.integers(0, 2, n).astype(np.int8)
    mc, ms = _angles(rng, n)
    return pc, ps, bit, mask, ec, es, flip, mc, ms, rng.random((n, 2))


class TestSelection:
    def test_default_is_first_available(self):
        assert kernels.BACKEND == kernels.available()[0]
        assert kernels.get() is kernels.impl

    def test_python_always_available(self):
        assert "python" in kernels.available()
        assert kernels.get("python") is _kernels_py

    def test_unknown(self):
        with pytest.raises(ValueError):
            kernels.get("fortran")


@compiled
class TestBitIdentical:
    def test_bell_teleport(self, teleport_inputs):
        a = kernels.get("cython").bell_teleport(*teleport_inputs)
        b = _kernels_py.bell_teleport(*teleport_inputs)
        for x, y in zip(a, b):
            assert np.asarray(x).tobytes() == np.asarray(y).tobytes()

    def test_singlet_pairs(self, pair_inputs):
        a = kernels.get("cython").singlet_pairs(*pair_inputs)
        b = _kernels_py.singlet_pairs(*pair_inputs)
        for x, y in zip(a, b):
            assert np.array_equal(np.asarray(x), np.asarray(y))

    def test_photon_trips(self, trip_inputs):
        a = kernels.get("cython").photon_trips(*trip_inputs)
        b = _kernels_py.photon_trips(*trip_inputs)
        for x, y in zip(a, b):
            assert np.array_equal(np.asarray(x), np.asarray(y))


@pytest.mark.parametrize("name", kernels.available())
class TestAgainstStatevec:
    def test_ekert(self, name):
        eve = EveModel.intercept_resend(0.5)
        a = ekert91.run_session(3000, eve, make_rng(31), backend=kernels.get(name))
        b = ekert91.run_session(3000, eve, make_rng(31), engine="statevec")
        assert np.array_equal(a.alice_bits, b.alice_bits)
        assert np.array_equal(a.agent_bits, b.agent_bits)
        assert np.array_equal(a.eve_bits[a.eve_touched], b.eve_bits[b.eve_touched])

    def test_qsdc(self, name):
        eve = EveModel.intercept_resend(0.5)
        msg = (1, 0, 1, 1)
        a = qsdc.run_session(msg, 800, 0.25, eve, make_rng(32), backend=kernels.get(name))
        b = qsdc.run_session(msg, 800, 0.25, eve, make_rng(32), engine="statevec")
        assert a.decoded_bits == b.decoded_bits
        assert a.qber_forward == b.qber_forward
        assert a.qber_backward == b.qber_backward

    def test_bell_teleport_shapes(self, name, teleport_inputs):
        pick, re, im = kernels.get(name).bell_teleport(*teleport_inputs)
        assert np.asarray(pick).shape == (5000,)
        assert np.asarray(re).shape == (5000, 2) == np.asarray(im).shape
        assert set(np.unique(pick)) <= {0, 1, 2, 3}
