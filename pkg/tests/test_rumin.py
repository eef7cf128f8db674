from fractions import Fraction

import numpy as np
import pytest

from carnot import linalg
from carnot.algebra import all_builtins, builtin, random_step2
from carnot.cohomology import compute_cohomology
from carnot.rumin import build_rumin, script_E, verify_rumin_identities

ALGS = all_builtins(max_m=2)


@pytest.fixture(scope="module")
def data():
    return {alg.name: build_rumin(alg) for alg in ALGS}


@pytest.mark.parametrize("alg", ALGS, ids=lambda a: a.name)
def test_identities_hold(alg, data):
    report = verify_rumin_identities(data[alg.name])
    assert report.ok, report.failures
    assert report.E_dims == report.betti
    assert data[alg.name].iterations == 1


def test_abelian_everything_identity(data):
    d = data["abelian3"]
    assert d.summary()["F"] == [0, 0, 0, 0]
    assert d.summary()["E"] == [1, 3, 3, 1]
    for q in range(4):
        assert d.full("R", q) == linalg.identity(len(d.full("R", q)))
        assert d.full("p", q) == d.full("R", q)


@pytest.mark.parametrize("name, dims", [
    ("heisenberg1", [1, 2, 2, 1]),
    ("engel", [1, 2, 2, 2, 1]),
    ("heisenberg2", [1, 4, 5, 5, 4, 1]),
])
def test_E_dims(name, dims, data):
    assert data[name].degree_dims("E") == dims


def test_heisenberg_degree_two(data):
    d = data["heisenberg1"]
    sp = d.space
    p = d.full("p", 2)
    basis = sp.basis(2)
    e12 = [Fraction(int(idx == (0, 1))) for idx in basis]
    # theta^1 ^ theta^2 = d0(-theta^3) is exact, so p kills it
    assert not any(linalg.matvec(p, e12))
    image = linalg.column_basis(p, len(basis))
    harmonic = [[Fraction(int(idx == target)) for idx in basis] for target in ((0, 2), (1, 2))]
    assert linalg.same_span(image, harmonic)


def test_heisenberg_script_E_degree_one(data):
    d = data["heisenberg1"]
    assert script_E(d, 1, 1) == [[1, 0], [0, 1]]
    assert script_E(d, 1, 2) == []
    pi = d.pi[(1, 1)]
    p = d.p[(1, 1)]
    for v in script_E(d, 1, 1):
        assert linalg.matvec(p, linalg.matvec(pi, v)) == v


def _float(m):
    return np.array([[float(x) for x in row] for row in m], dtype=float).reshape(len(m), -1)


@pytest.mark.parametrize("alg", ALGS, ids=lambda a: a.name)
def test_partial_inverse_is_moore_penrose(alg, data):
    # with orthogonal complements the partial inverse is the Moore-Penrose inverse
    d = data[alg.name]
    sp = d.space
    for (q, w), dinv in d.dinv.items():
        if not sp.dim(q, w) or not sp.dim(q + 1, w):
            continue
        block = _float(d.maps.block(q, w))
        assert np.allclose(_float(dinv), np.linalg.pinv(block), atol=1e-12)


@pytest.mark.parametrize("alg", ALGS, ids=lambda a: a.name)
def test_projector_is_orthogonal_harmonic_projector(alg, data):
    d = data[alg.name]
    sp = d.space
    for (q, w), p in d.p.items():
        size = sp.dim(q, w)
        out = _float(d.maps.block(q, w)) if sp.dim(q + 1, w) else np.zeros((0, size))
        inc = _float(d.maps.block(q - 1, w)) if q > 0 and sp.dim(q - 1, w) else np.zeros((size, 0))
        lap_proj = np.eye(size)
        if inc.size:
            lap_proj -= inc @ np.linalg.pinv(inc)
        if out.size:
            lap_proj -= np.linalg.pinv(out) @ out
        assert np.allclose(_float(p), lap_proj, atol=1e-12)
        assert d.pi[(q, w)] == p


def test_random_step2_algebras():
    rng = np.random.default_rng(5)
    for _ in range(6):
        d1 = int(rng.integers(3, 6))
        d2 = int(rng.integers(1, min(3, d1 * (d1 - 1) // 2) + 1))
        alg = random_step2(d1, d2, rng)
        d = build_rumin(alg)
        report = verify_rumin_identities(d, compute_cohomology(alg, d.maps))
        assert report.ok, (alg.brackets, report.failures)


def test_report_detects_corruption(data):
    d = build_rumin(builtin("heisenberg", 1))
    d.p[(1, 1)] = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(1)]]
    report = verify_rumin_identities(d)
    assert not report.checks["projector"]
    assert not report.ok


def test_report_json():
    d = build_rumin(builtin("heisenberg", 1))
    report = verify_rumin_identities(d)
    assert report.checks["weight_filtration"]
    assert report.to_json()["E_dims"] == [1, 2, 2, 1]
