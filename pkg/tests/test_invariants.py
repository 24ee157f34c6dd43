"""Property-based checks of the structural invariants."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_profile
from bosonsep import classify, find_properties
from bosonsep.decompose import takagi
from bosonsep.formats import dumps_state, loads_state
from bosonsep.properties import expectation_profile, residual_objective
from bosonsep.propsearch import SearchConfig, majorana_roots
from bosonsep.symstate import change_basis, projective_distance, random_state, random_unitary, sym_product

seeds = st.integers(min_value=0, max_value=2**32 - 1)
shapes = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)])
FAST = settings(max_examples=40, deadline=None)


def _cplx(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _set_distance(xs, ys):
    return max(min(projective_distance(x, y) for y in ys) for x in xs)


@FAST
@given(seeds, shapes)
def test_partition_identity_and_dense_agreement(seed, shape):
    rng = np.random.default_rng(seed)
    d, n = shape
    psi = random_state(d, n, rng)
    phi = _cplx(rng, d)
    prof = expectation_profile(psi, phi)
    assert abs(sum(prof.exactly) + prof.residual - 1) <= 1e-12
    assert all(-1e-12 <= x <= 1 + 1e-12 for x in prof.exactly)
    dense = dense_profile(psi.vector, phi, n).real
    assert np.allclose(prof.exactly, dense[1:], atol=1e-12)


@FAST
@given(seeds, shapes, st.floats(0, 2 * np.pi))
def test_phase_invariance_and_covariance(seed, shape, theta):
    rng = np.random.default_rng(seed)
    d, n = shape
    psi = random_state(d, n, rng)
    phi = _cplx(rng, d)
    U = random_unitary(d, rng)
    base = expectation_profile(psi, phi)
    moved = expectation_profile(change_basis(psi, U), U @ phi)
    assert np.allclose(base.exactly, moved.exactly, atol=1e-12)
    assert abs(residual_objective(psi, np.exp(1j * theta) * phi) - base.residual) <= 1e-12


@FAST
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_takagi_reconstruction(seed, d, rank):
    rng = np.random.default_rng(seed)
    rank = min(rank, d)
    X = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    M = X @ X.T
    s, U = takagi(M)
    assert np.allclose(U @ np.diag(s) @ U.T, M, atol=1e-11)
    assert np.allclose(U.conj().T @ U, np.eye(d), atol=1e-11)
    assert np.all(np.diff(s) <= 1e-12)


@FAST
@given(seeds)
def test_properties_are_equivariant(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(2, 3, rng)
    U = random_unitary(2, rng)
    before = [U @ v for v in majorana_roots(psi).vectors]
    after = majorana_roots(change_basis(psi, U)).vectors
    assert _set_distance(before, after) <= 1e-7
    assert _set_distance(after, before) <= 1e-7


@FAST
@given(seeds)
def test_symmetrized_product_determines_its_factors(seed):
    # for qubits every factor of Sym(a, b, c) is a property, and nothing else is
    rng = np.random.default_rng(seed)
    vs = [_cplx(rng, 2) for _ in range(3)]
    psi, _ = sym_product(*vs)
    found = majorana_roots(psi).vectors
    assert _set_distance(vs, found) <= 1e-6
    assert _set_distance(found, vs) <= 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_qutrit_products_equivariant_search(seed):
    rng = np.random.default_rng(seed)
    vs = [_cplx(rng, 3) for _ in range(3)]
    psi, _ = sym_product(*vs)
    U = random_unitary(3, rng)
    cfg = SearchConfig(n_starts=64, seed=seed % 1000)
    found = find_properties(change_basis(psi, U), cfg).vectors
    assert _set_distance([U @ v for v in vs], found) <= 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_classification_is_deterministic(seed):
    rng = np.random.default_rng(seed)
    vs = [_cplx(rng, 3) for _ in range(3)]
    psi, _ = sym_product(*vs)
    cfg = SearchConfig(n_starts=48, seed=7)
    a = classify(psi, cfg, transcript_starts=0)
    b = classify(psi, cfg, transcript_starts=0)
    assert a.separability_class is b.separability_class
    assert [m.vector.tobytes() for m in a.property_set] == [m.vector.tobytes() for m in b.property_set]


@FAST
@given(seeds, shapes)
def test_load_save_idempotent(seed, shape):
    psi = random_state(*shape, np.random.default_rng(seed))
    text = dumps_state(psi)
    again, _ = loads_state(text)
    assert dumps_state(again) == text
