"""States, GNS representations, intertwiners, superselection and transitions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supmech import gns as G

M2 = G.FiniteAlgebra.by_name("mat:2")
M3 = G.FiniteAlgebra.by_name("mat:3")
M23 = G.FiniteAlgebra.by_name("sum:2,3")
C = G.FiniteAlgebra.by_name("mat:1")
CC = G.FiniteAlgebra.by_name("sum:1,1")


def entry_state(alg, i, j):
    """``A -> A_ij`` on the defining realization."""
    return G.StateFunctional(np.array([alg.to_matrix(np.eye(alg.dim)[k])[i, j] for k in range(alg.dim)]))


# -- algebras ----------------------------------------------------------------------


def test_matrix_algebra_dimensions():
    assert (C.dim, M2.dim, M3.dim, M23.dim, CC.dim) == (1, 4, 9, 13, 2)
    assert M2.labels[0] == "I"


def test_text_format_roundtrip():
    alg = G.loads_algebra(
        """
        basis I a      # C[Z2]
        mul a a = 1*I
        """
    )
    assert alg.dim == 2
    a = alg.basis("a")
    assert np.allclose(alg.mul(a, a), alg.unit())


@pytest.mark.parametrize(
    "text",
    [
        "basis a I",
        "basis I a\nmul a a = 1*b",
        "basis I a\nfrobnicate a",
        "basis I a\nmul a a = 1*a\nstar a = 1j*a",  # not an involution
        "basis I a b\nmul a b = 1*a\nmul b a = 1*b\nmul a a = 1*a\nmul b b = 1*I",  # not associative
    ],
)
def test_text_format_errors(text):
    with pytest.raises(ValueError):
        G.loads_algebra(text)


# -- states ------------------------------------------------------------------------


def test_check_state_examples():
    assert G.check_state(M2, entry_state(M2, 0, 0)).ok
    assert not G.check_state(M2, entry_state(M2, 0, 1)).ok
    tr = G.named_state(M2, "trace")
    chk = G.check_state(M2, tr)
    assert chk.ok
    # in the matrix-unit basis the Gram matrix of half the trace is diagonal
    assert np.allclose(chk.gram, chk.gram.conj().T)


def test_check_state_dimension_mismatch():
    with pytest.raises(ValueError):
        G.check_state(M2, G.StateFunctional(np.ones(3)))


def test_gns_examples():
    r = G.gns(M2, G.named_state(M2, "e11"))
    assert (r.dim, r.commutant_dim()) == (2, 1)
    assert r.reconstruction_residual() < 1e-12
    r = G.gns(M2, G.named_state(M2, "trace"))
    assert (r.dim, r.commutant_dim()) == (4, 4)
    r = G.gns(C, G.StateFunctional(np.array([1.0])))
    assert r.dim == 1


def test_gns_rejects_non_states():
    with pytest.raises(G.StateError):
        G.gns(M2, G.StateFunctional(np.array([1, -3, 0, 0], dtype=complex)))


def test_purity_examples():
    assert G.is_pure(M2, G.named_state(M2, "e11"))
    assert not G.is_pure(M2, G.named_state(M2, "trace"))
    assert G.is_pure(CC, G.named_state(CC, "e11"))


def test_state_from_vector_examples():
    phi = G.named_state(M2, "e11")
    I = M2.unit()
    for B in (I, 2 * I):
        assert np.allclose(G.state_from_vector(M2, phi, B).values, phi.values)
    e21 = M2.from_matrix(np.array([[0, 0], [1, 0]]))
    phiB = G.state_from_vector(M2, phi, e21)
    assert np.allclose(phiB.values, entry_state(M2, 1, 1).values)
    assert G.is_pure(M2, phiB)
    e12 = M2.from_matrix(np.array([[0, 1], [0, 0]]))
    with pytest.raises(G.StateError):
        G.state_from_vector(M2, phi, e12)


def test_intertwiner_examples():
    r11 = G.gns(M2, G.named_state(M2, "e11"))
    r22 = G.gns(M2, entry_state(M2, 1, 1))
    U = G.find_intertwiner(r11, r11)
    assert U is not None and G.intertwiner_residual(U, r11, r11) < 1e-10
    U = G.find_intertwiner(r11, r22)
    assert U is not None and np.allclose(U.conj().T @ U, np.eye(2))
    a = G.gns(M23, G.named_state(M23, "e11"))
    b = G.gns(M23, G.named_state(M23, "e33"))
    assert (a.dim, b.dim) == (2, 3)
    assert G.find_intertwiner(a, b) is None


def test_inequivalent_same_dimension_has_no_intertwiner():
    a = G.gns(CC, G.named_state(CC, "e11"))
    b = G.gns(CC, G.named_state(CC, "e22"))
    assert G.find_intertwiner(a, b) is None


def test_faithfulness_examples():
    assert G.direct_sum_faithful(M2, [G.named_state(M2, "e11"), entry_state(M2, 1, 1)])[1]
    assert not G.direct_sum_faithful(CC, [G.named_state(CC, "e11")])[1]
    assert G.direct_sum_faithful(M2, [G.named_state(M2, "e11")])[1]
    with pytest.raises(ValueError):
        G.direct_sum_faithful(M2, [])


def test_superselection_examples():
    ss = G.superselection_decompose(G.gns(M2, G.named_state(M2, "e11")))
    assert ss.sector_dims == [2]
    rep, _ = G.direct_sum_faithful(CC, [G.named_state(CC, "e11"), G.named_state(CC, "e22")])
    ss = G.superselection_decompose(rep)
    assert ss.sector_dims == [1, 1]
    assert np.array_equal(sum(ss.projectors), np.eye(2))
    rep, ok = G.direct_sum_faithful(M23, [G.named_state(M23, "e11"), G.named_state(M23, "e33")])
    ss = G.superselection_decompose(rep)
    assert ok and ss.faithful and sorted(ss.sector_dims) == [2, 3]
    assert ss.center_dim == 2
    assert ss.commutation_residual <= 1e-12
    assert np.array_equal(sum(ss.projectors), np.eye(5))
    Q = ss.charge_operator([1.0, -1.0])
    assert all(np.allclose(Q @ p, p @ Q) for p in rep.matrices)
    with pytest.raises(ValueError):
        ss.charge_operator([1.0])


def test_transition_probability_examples():
    e1 = np.array([1, 0], dtype=complex)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    proj = lambda v: np.outer(v, v.conj())  # noqa: E731
    assert G.transition_probability(proj(e1), proj(e1)).probability == pytest.approx(1)
    assert G.transition_probability(proj(e1), proj(np.array([0, 1]))).probability == pytest.approx(0)
    t = G.transition_probability(proj(e1), proj(plus))
    assert t.probability == pytest.approx(0.5)
    assert t.povm_probability == pytest.approx(0.5)
    assert np.allclose(sum(t.povm), np.eye(2))


@pytest.mark.parametrize(
    "rho",
    [np.eye(2), np.array([[1, 1], [0, 0]]), np.diag([1.5, -0.5]), np.eye(3) / 3],
)
def test_transition_probability_rejects_bad_input(rho):
    with pytest.raises(ValueError):
        G.transition_probability(np.eye(2) / 2, rho)


# -- properties --------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["mat:2", "mat:3", "sum:2,3", "sum:1,1"]), st.integers(0, 2**32 - 1), st.sampled_from([None, 1]))
def test_gns_reconstructs_random_states(spec, seed, rank):
    alg = G.FiniteAlgebra.by_name(spec)
    rng = np.random.default_rng(seed)
    rho = G.random_density(alg, rng, rank=rank)
    r = G.gns(alg, G.state_from_density(alg, rho))
    assert r.reconstruction_residual() <= 1e-12
    assert r.homomorphism_residual() <= 1e-10
    assert r.star_residual() <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_vector_states_of_pure_states_stay_pure(seed):
    rng = np.random.default_rng(seed)
    phi = G.state_from_density(M2, G.random_density(M2, rng, rank=1))
    B = rng.normal(size=4) + 1j * rng.normal(size=4)
    phiB = G.state_from_vector(M2, phi, B)
    assert G.check_state(M2, phiB).ok
    assert G.is_pure(M2, phiB)
