import numpy as np
import pytest

from vqss import _pykernels, kernels, qudit as qd


def test_default_backend_selected():
    assert kernels.backend() in kernels.BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


compiled = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")


@compiled
@pytest.mark.parametrize("d", [3, 7, 31, 101, 257])
def test_backends_agree(d):
    c = kernels.BACKENDS["compiled"]
    roots = qd.space(d).roots
    g = np.random.default_rng(d)
    for _ in range(20):
        v = g.normal(size=d) + 1j * g.normal(size=d)
        v /= np.linalg.norm(v)
        p, q, k, l = (int(x) for x in g.integers(0, d, 4))
        a, b = v.copy(), v.copy()
        c.phase_apply(a, roots, p, q)
        _pykernels.phase_apply(b, roots, p, q)
        assert np.allclose(a, b, atol=1e-12)
        pa, pb = np.empty(d), np.empty(d)
        c.mub_probs(v, roots, k, pa)
        _pykernels.mub_probs(v, roots, k, pb)
        assert np.allclose(pa, pb, atol=1e-12)
        fa, fb = np.empty(d, complex), np.empty(d, complex)
        c.mub_fill(fa, roots, l, k)
        _pykernels.mub_fill(fb, roots, l, k)
        assert np.allclose(fa, fb, atol=1e-12)
        u = float(g.random())
        assert c.sample_index(pa.copy(), u) == _pykernels.sample_index(pb.copy(), u)


@pytest.mark.parametrize("mod", [_pykernels, kernels.BACKENDS.get("compiled")])
def test_sample_index_edges(mod):
    if mod is None:
        pytest.skip("extension not built")
    probs = np.array([0.0, 0.5, -1e-17, 0.5, 0.0])
    assert mod.sample_index(probs.copy(), 0.0) == 1
    assert mod.sample_index(probs.copy(), 0.49999) == 1
    assert mod.sample_index(probs.copy(), 0.5) == 3
    # u at the top edge never selects a zero-probability tail entry
    assert mod.sample_index(probs.copy(), 1.0) == 3
    assert mod.sample_index(np.array([1.0 + 1e-15, 0.0]), 0.9999999) == 0


def test_env_forces_fallback():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "import vqss; print(vqss.backend())"],
        env={"VQSS_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@compiled
@pytest.mark.parametrize("d", [kernels.DIRECT_PROBS_MAX_D, 101])
def test_compiled_probs_dispatch_either_side_of_threshold(d, backend):
    roots = qd.space(d).roots
    v = qd.mub_vector(qd.MubLabel.of(d, 4, 9)).amplitudes.copy()
    out, ref = np.empty(d), np.empty(d)
    kernels.mub_probs(v, roots, 9, out)
    _pykernels.mub_probs(v, roots, 9, ref)
    assert np.allclose(out, ref, atol=1e-12) and out[4] == pytest.approx(1.0)
