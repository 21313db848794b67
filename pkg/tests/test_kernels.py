import numpy as np
import pytest

from helpers import dense_lindblad_rhs, propagate_exact, random_density
from pseudochain import kernels
from pseudochain.model import SinkSpec, SystemSpec
from pseudochain.spectral import SpectralDensity, extract_pseudomodes
from pseudochain.system import build_site_hamiltonian
from pseudochain.dynamics import build_generator


def small_model(n=2, m=3, terms=((0.4, 0.97, 0.1), (0.6, 1.05, 0.3))):
    pm = extract_pseudomodes(SpectralDensity.sum_of_lorentzians(terms))
    h = build_site_hamiltonian(SystemSpec(n_chains=n, chain_len=m, j_coupling=0.13), pm)
    gen = build_generator(h, pm, SinkSpec(0.6))
    return h.matrix, gen


def make(kernel_cls, gen):
    d = gen.dissipators
    return kernel_cls(np.array(gen.hamiltonian.matrix), [x.src for x in d], [x.dst for x in d],
                      [x.rate for x in d])


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")


def test_apply_matches_dense_products(kernel_cls, rng):
    h, gen = small_model()
    k = make(kernel_cls, gen)
    for rho in (random_density(gen.dim, rng),
                rng.normal(size=(gen.dim, gen.dim)) + 1j * rng.normal(size=(gen.dim, gen.dim))):
        np.testing.assert_allclose(k.apply(rho), dense_lindblad_rhs(h, gen.jump_operators(), rho), atol=1e-13)


def test_apply_writes_into_out(kernel_cls, rng):
    _, gen = small_model()
    k = make(kernel_cls, gen)
    rho = random_density(gen.dim, rng)
    out = np.empty_like(rho)
    res = k.apply(rho, out)
    np.testing.assert_array_equal(out, k.apply(rho))
    assert res is out or np.shares_memory(res, out)


def test_apply_rejects_wrong_shape(kernel_cls):
    _, gen = small_model()
    with pytest.raises(ValueError):
        make(kernel_cls, gen).apply(np.zeros((3, 3), dtype=complex))


def test_advance_against_matrix_exponential(kernel_cls, rng):
    h, gen = small_model(n=1, m=2)
    k = make(kernel_cls, gen)
    rho0 = random_density(gen.dim, rng, rank=1)
    y = rho0.copy()
    t, step = 0.0, -0.01
    samples = np.linspace(0, 12, 7)
    got = [y.copy()]
    for target in samples[1:]:
        t, step, acc, rej, nfev, ok = k.advance(y, t, target, step, 1e-11, 1e-11, 1e-12)
        assert ok and t == target and acc > 0
        got.append(y.copy())
    ref = propagate_exact(h, gen.jump_operators(), rho0, samples)
    np.testing.assert_allclose(np.array(got), ref, atol=1e-9)


def test_backends_agree_on_adaptive_run():
    if kernels.BACKEND != "cython":
        pytest.skip("compiled core not built")
    _, gen = small_model()
    rho0 = np.zeros((gen.dim, gen.dim), dtype=complex)
    rho0[1, 1] = 1.0
    results = []
    for cls in (kernels.LindbladKernel, kernels.PythonKernel):
        k = make(cls, gen)
        y = rho0.copy()
        t, step = 0.0, -0.05
        stats = []
        for target in np.linspace(0, 30, 31)[1:]:
            t, step, acc, rej, nfev, ok = k.advance(y, t, target, step, 1e-9, 1e-9, 1e-12)
            stats.append((acc, rej))
        results.append((y, stats))
    np.testing.assert_allclose(results[0][0], results[1][0], atol=1e-12)
    assert results[0][1] == results[1][1]


def test_advance_reports_collapse(kernel_cls):
    _, gen = small_model(n=1, m=1)
    k = make(kernel_cls, gen)
    y = np.zeros((gen.dim, gen.dim), dtype=complex)
    y[1, 1] = 1.0
    # a minimum step larger than any admissible step forces the collapse flag
    *_, ok = k.advance(y, 0.0, 50.0, -1.0, 1e-14, 1e-14, 10.0)
    assert not ok
