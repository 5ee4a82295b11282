import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

import saptvqe.casci as casci_mod
from saptvqe.active_space import monomer_active_hamiltonian, select_window
from saptvqe.casci import CASCIError, CISpace, StringSpace, casci, rdm_energy, spin_square
from saptvqe.scf import rhf_monomer

import oracles
from systems import h2, h_chain, random_hamiltonian


@pytest.fixture(scope="module")
def water_cas(water_ints):
    scf = rhf_monomer(water_ints, "B")
    ham = monomer_active_hamiltonian(water_ints, "B", scf, select_window(scf, 2, 2))
    return scf, ham, casci(ham)


def test_string_space():
    s = StringSpace(5, 2)
    assert len(s) == 10
    assert_allclose(s.occupation.sum(1), 2)
    assert tuple(s.occ[0]) == (0, 1)


@pytest.mark.parametrize("R", [1.0, 1.4, 3.0, 6.0])
def test_h2_fci_vs_dense_oracle(R):
    ham = h2(R).full_space_hamiltonian()
    ref = oracles.dense_fci(ham.h, ham.v, 2, 1, 1)
    assert casci(ham).e_active == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("norb, na, nb", [(3, 1, 1), (3, 2, 1), (4, 2, 2)])
def test_random_hamiltonian_vs_dense_oracle(norb, na, nb, rng):
    ham = random_hamiltonian(norb, na, rng)
    ham = type(ham)(ham.h, ham.v, 0.0, na, nb)
    ci = CISpace(norb, na, nb)
    H = np.column_stack([ci.sigma(ham, e.reshape(ci.shape)).ravel() for e in np.eye(ci.dim)])
    assert_allclose(H, H.T, atol=1e-12)
    assert np.linalg.eigvalsh(H)[0] == pytest.approx(oracles.dense_fci(ham.h, ham.v, norb, na, nb),
                                                     abs=1e-12)


def _random_ci(rng, norb, na, nb):
    ci = CISpace(norb, na, nb)
    C = rng.normal(size=ci.shape)
    return ci, C / np.linalg.norm(C)


def test_rdms_match_brute_force(rng):
    for _ in range(100):
        norb = int(rng.integers(2, 5))
        na = int(rng.integers(1, norb + 1))
        nb = int(rng.integers(0, na + 1))
        ci, C = _random_ci(rng, norb, na, nb)
        g, G = ci.rdms(C)
        gb, Gb = oracles.brute_rdms(norb, na, nb, C)
        assert_allclose(g, gb, atol=1e-12)
        assert_allclose(G, Gb, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), norb=st.integers(2, 5), na=st.integers(1, 3),
       nb=st.integers(1, 3))
def test_rdm_invariants(seed, norb, na, nb):
    na, nb = min(na, norb), min(nb, norb)
    ci, C = _random_ci(np.random.default_rng(seed), norb, na, nb)
    g, G = ci.rdms(C)
    N = na + nb
    assert np.trace(g) == pytest.approx(N, abs=1e-12)
    assert np.einsum("pqpq->", G) == pytest.approx(N * (N - 1), abs=1e-10)
    assert_allclose(np.einsum("pqrq->pr", G), (N - 1) * g, atol=1e-11)
    assert_allclose(g, g.T, atol=1e-12)
    assert_allclose(G, G.transpose(1, 0, 3, 2), atol=1e-12)
    assert_allclose(G, G.transpose(2, 3, 0, 1), atol=1e-12)
    occ = np.linalg.eigvalsh(g)
    assert occ.min() > -1e-12 and occ.max() < 2 + 1e-12


def test_energy_from_rdms_equals_expectation(rng):
    for norb, n in ((3, 1), (4, 2), (5, 2)):
        ham = random_hamiltonian(norb, n, rng)
        ci, C = _random_ci(rng, norb, n, n)
        g, G = ci.rdms(C)
        assert rdm_energy(ham.h, ham.v, g, G) == pytest.approx(np.sum(C * ci.sigma(ham, C)),
                                                                 abs=1e-11)


def test_single_determinant_rdms():
    ci = CISpace(4, 2, 2)
    C = np.zeros(ci.shape)
    C[0, 0] = 1.0
    g, G = ci.rdms(C)
    assert_allclose(g, np.diag([2.0, 2, 0, 0]), atol=1e-14)
    d = np.diag(g)
    hf = np.einsum("p,q,pr,qs->pqrs", d, d, np.eye(4), np.eye(4)) \
        - 0.5 * np.einsum("p,q,ps,qr->pqrs", d, d, np.eye(4), np.eye(4))
    assert_allclose(G, hf, atol=1e-14)
    assert spin_square(g, G) == pytest.approx(0.0, abs=1e-14)


def test_stretched_h2_is_diradical():
    res = casci(h2(10.0).full_space_hamiltonian())
    occ = np.sort(np.linalg.eigvalsh(res.gamma))
    assert_allclose(occ, [1.0, 1.0], atol=0.05)
    near = np.sort(np.linalg.eigvalsh(casci(h2(1.4).full_space_hamiltonian()).gamma))
    assert near[1] > 1.9


def test_water_casci(water_cas):
    scf, ham, res = water_cas
    assert res.energy <= scf.energy
    assert res.dim == 400 and res.method == "dense"
    assert rdm_energy(ham.h, ham.v, res.gamma, res.Gamma, ham.e_frozen) == pytest.approx(res.energy,
                                                                                       abs=1e-10)
    assert abs(res.s2) < 1e-8
    assert np.linalg.norm(res.ci) == pytest.approx(1.0, abs=1e-12)


def test_davidson_agrees_with_dense(water_cas, monkeypatch):
    _, ham, dense = water_cas
    monkeypatch.setattr(casci_mod, "DENSE_LIMIT", 0)
    dav = casci(ham)
    assert dav.method == "davidson"
    assert dav.energy == pytest.approx(dense.energy, abs=1e-10)
    assert_allclose(dav.gamma, dense.gamma, atol=1e-7)


def test_two_by_two_window(water_ints):
    scf = rhf_monomer(water_ints, "B")
    ham = monomer_active_hamiltonian(water_ints, "B", scf, select_window(scf, 0, 0))
    ci = CISpace(2, 1, 1)
    h, v = ham.h, ham.v

    def det(i):
        C = np.zeros(ci.shape)
        C[i, i] = 1.0
        return C
    HH, LL = det(0), det(1)
    assert np.sum(HH * ci.sigma(ham, HH)) == pytest.approx(2 * h[0, 0] + v[0, 0, 0, 0], abs=1e-12)
    assert np.sum(LL * ci.sigma(ham, LL)) == pytest.approx(2 * h[1, 1] + v[1, 1, 1, 1], abs=1e-12)
    assert np.sum(LL * ci.sigma(ham, HH)) == pytest.approx(v[0, 1, 0, 1], abs=1e-12)
    assert casci(ham).energy <= scf.energy + 1e-12


def test_full_space_h4_matches_dense_oracle():
    ham = h_chain(4).full_space_hamiltonian()
    assert casci(ham).e_active == pytest.approx(oracles.dense_fci(ham.h, ham.v, 4, 2, 2), abs=1e-11)


def test_dimension_limit(water_cas, monkeypatch):
    monkeypatch.setattr(casci_mod, "MAX_DIM", 100)
    with pytest.raises(CASCIError, match="exceeds"):
        casci(water_cas[1])
