import numpy as np
import pytest

import pybamg


def dense(coo):
    rows, cols, vals, shape = coo
    m = np.zeros(shape)
    np.add.at(m, (rows, cols), vals)
    return m


def null_vector(b):
    _, _, vt = np.linalg.svd(b)
    x = np.abs(vt[-1])
    return x / x.sum()


def test_generate_is_column_stochastic():
    chain = pybamg.generate("uniform2d", n=81)
    a = dense(chain.A_coo())
    assert chain.n == 81
    assert np.allclose(a.sum(axis=0), 1.0, atol=1e-14)
    assert np.allclose(dense(chain.B_coo()), np.eye(81) - a)


@pytest.mark.parametrize("family,n", [("birth-death", 129), ("planar", 200), ("petri", 91)])
def test_solve_matches_numpy_null_vector(family, n):
    chain = pybamg.generate(family, n=n)
    report = pybamg.solve(chain, cycles=1, options={"stop_size": 20})
    assert report["converged"]
    x = np.asarray(report["x"])
    ref = null_vector(dense(chain.B_coo()))
    assert np.abs(x - ref).sum() < 1e-6
    assert report["levels"] >= 2


def test_setup_reports_small_sigma():
    chain = pybamg.generate("birth-death", n=65)
    s = pybamg.setup(chain, cycles=2, options={"stop_size": 20})
    assert min(abs(s["sigmas"])) < 1e-6
    assert len(s["level_sizes"]) == s["levels"]


def test_field_of_values_against_hermitian_part():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((12, 12)) + 8 * np.eye(12)
    f = pybamg.fov(m, n_angles=64)
    h = 0.5 * (m + m.T)
    assert np.linalg.eigvalsh(h)[0] > 0
    assert not f["contains_origin"]
    assert f["nu"] >= np.linalg.eigvalsh(h)[0] - 1e-9
    assert f["nu"] <= np.abs(np.linalg.eigvals(m)).min() + 1e-9
    assert np.allclose(np.sort_complex(pybamg.eigenvalues(m)), np.sort_complex(np.linalg.eigvals(m)), atol=1e-10)


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        pybamg.generate("nonsense", n=10)
    chain = pybamg.generate("birth-death", n=33)
    with pytest.raises(ValueError):
        pybamg.solve(chain, options={"bogus": 1})
    with pytest.raises(OSError):
        pybamg.import_chain("/nonexistent/a.mtx")
