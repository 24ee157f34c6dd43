"""Pure states of two or three indistinguishable bosons.

A bosonic pure state is a permutation-symmetric tensor of order ``N`` over a
``d``-dimensional single-particle space.  Only one coefficient per occupation
orbit (sorted multi-index) is stored; the dense tensor is rebuilt on demand.
The norm convention is the full-tensor one: the squared moduli summed over
*every* multi-index equal one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import factorial

import numpy as np

from .exceptions import (
    DimensionMismatch,
    NonSymmetricInput,
    NotUnitary,
    ZeroSymmetrization,
)

ZERO_NORM = 1e-14
UNITARY_TOL = 1e-10
SYMMETRY_TOL = 1e-12
SUPPORTED_N = (2, 3)


@lru_cache(maxsize=None)
def orbits(dim: int, nparticles: int) -> tuple[tuple[int, ...], ...]:
    """Sorted multi-indices, one per occupation orbit, in lexicographic order."""
    return tuple(itertools.combinations_with_replacement(range(dim), nparticles))


@lru_cache(maxsize=None)
def orbit_sizes(dim: int, nparticles: int) -> np.ndarray:
    """Number of distinct permutations of each sorted multi-index."""
    sizes = []
    for idx in orbits(dim, nparticles):
        size = factorial(nparticles)
        for k in set(idx):
            size //= factorial(idx.count(k))
        sizes.append(size)
    out = np.array(sizes, dtype=float)
    out.setflags(write=False)
    return out


def symmetrize_dense(tensor: np.ndarray) -> np.ndarray:
    """Project a dense tensor onto the permutation-symmetric subspace."""
    n = tensor.ndim
    acc = np.zeros_like(tensor, dtype=complex)
    for perm in itertools.permutations(range(n)):
        acc += np.transpose(tensor, perm)
    return acc / factorial(n)


def unit(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if norm < ZERO_NORM:
        raise ValueError("cannot normalize a zero vector")
    return v / norm


def abs_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|`` for unit vectors; global phase drops out."""
    return float(abs(np.vdot(a, b)))


def projective_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Fubini-Study chordal distance ``sqrt(1 - |<a|b>|^2)`` between rays."""
    # norm of the component of b orthogonal to a; avoids the cancellation in 1 - |<a|b>|^2
    a, b = unit(a), unit(b)
    return float(np.linalg.norm(b - np.vdot(a, b) * a))


def align_phase(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Multiply ``v`` by the phase that makes ``<reference|v>`` real positive."""
    ov = np.vdot(reference, v)
    if abs(ov) < ZERO_NORM:
        return v
    return v * (abs(ov) / ov)


def canonical_phase(v: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Representative of the ray of ``v`` whose first sizeable entry is real positive."""
    for k, x in enumerate(v):
        if abs(x) > tol:
            out = v * (abs(x) / x)
            out[k] = abs(x)
            return out
    return v


@dataclass(frozen=True, eq=False)
class BosonicPureState:
    """Normalized symmetric ``N``-boson state over a ``d``-dimensional mode space.

    Parameters
    ----------
    dim : int
        Single-particle dimension ``d``.
    nparticles : int
        Number of bosons ``N`` (2 or 3).
    coeffs : array_like
        One complex coefficient per sorted multi-index, ordered as
        :func:`orbits`.  The coefficient is the tensor entry ``C_{i...k}``,
        not the occupation-number amplitude.
    """

    dim: int
    nparticles: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.nparticles not in SUPPORTED_N:
            raise ValueError(f"nparticles must be 2 or 3, got {self.nparticles}")
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (len(orbits(self.dim, self.nparticles)),):
            raise DimensionMismatch(
                f"expected {len(orbits(self.dim, self.nparticles))} orbit coefficients, got {c.size}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_tensor(cls, tensor, tol: float = SYMMETRY_TOL) -> "BosonicPureState":
        """Wrap a dense tensor that is already symmetric (checked, not repaired)."""
        t = np.asarray(tensor, dtype=complex)
        _check_cubical(t)
        if np.max(np.abs(t - symmetrize_dense(t)), initial=0.0) > tol:
            raise NonSymmetricInput("tensor is not permutation symmetric")
        return cls(t.shape[0], t.ndim, np.array([t[idx] for idx in orbits(t.shape[0], t.ndim)]))

    @cached_property
    def tensor(self) -> np.ndarray:
        """Dense ``d x ... x d`` coefficient tensor (read-only)."""
        t = np.zeros((self.dim,) * self.nparticles, dtype=complex)
        for idx, c in zip(orbits(self.dim, self.nparticles), self.coeffs):
            if c != 0:
                for perm in set(itertools.permutations(idx)):
                    t[perm] = c
        t.setflags(write=False)
        return t

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def norm(self) -> float:
        w = orbit_sizes(self.dim, self.nparticles)
        return float(np.sqrt(np.sum(w * np.abs(self.coeffs) ** 2)))

    def amplitude(self, idx) -> complex:
        """Tensor coefficient at any (unsorted) multi-index."""
        key = tuple(sorted(int(i) for i in idx))
        return complex(self.coeffs[orbits(self.dim, self.nparticles).index(key)])

    def occupations(self) -> dict[tuple[int, ...], complex]:
        """Occupation-number amplitudes ``{(n_0, ..., n_{d-1}): a}`` of nonzero orbits."""
        out = {}
        w = orbit_sizes(self.dim, self.nparticles)
        for idx, c, size in zip(orbits(self.dim, self.nparticles), self.coeffs, w):
            if c != 0:
                occ = tuple(idx.count(k) for k in range(self.dim))
                out[occ] = complex(c * np.sqrt(size))
        return out

    def __repr__(self):
        return f"BosonicPureState(dim={self.dim}, nparticles={self.nparticles})"


def _check_cubical(t: np.ndarray) -> None:
    if t.ndim not in SUPPORTED_N:
        raise ValueError(f"tensor must have 2 or 3 indices, got {t.ndim}")
    if len(set(t.shape)) != 1:
        raise DimensionMismatch(f"all indices must share one range, got shape {t.shape}")


def symmetrize(raw) -> BosonicPureState:
    """Normalized projection of a dense order-``N`` tensor onto the symmetric subspace.

    Raises
    ------
    ZeroSymmetrization
        If the symmetric part has norm below ``1e-14``.
    """
    t = np.asarray(raw, dtype=complex)
    _check_cubical(t)
    sym = symmetrize_dense(t)
    norm = np.linalg.norm(sym)
    if norm < ZERO_NORM:
        raise ZeroSymmetrization("symmetric part of the tensor vanishes")
    sym = sym / norm
    return BosonicPureState(t.shape[0], t.ndim, np.array([sym[idx] for idx in orbits(t.shape[0], t.ndim)]))


def sym_product(*vectors) -> tuple[BosonicPureState, float]:
    """Normalized symmetrization of a product of single-particle vectors.

    Returns the state together with the factor ``f`` such that
    ``state = f * sum over all N! orderings of v_1 x ... x v_N``.
    """
    vs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if len(vs) not in SUPPORTED_N:
        raise ValueError("sym_product takes two or three vectors")
    if len({v.size for v in vs}) != 1:
        raise DimensionMismatch("constituent vectors differ in dimension")
    raw = vs[0]
    for v in vs[1:]:
        raw = np.multiply.outer(raw, v)
    total = symmetrize_dense(raw) * factorial(len(vs))
    norm = np.linalg.norm(total)
    if norm < ZERO_NORM:
        raise ZeroSymmetrization("product of zero vectors")
    state = total / norm
    d, n = vs[0].size, len(vs)
    return BosonicPureState(d, n, np.array([state[idx] for idx in orbits(d, n)])), float(1.0 / norm)


def apply_local(tensor: np.ndarray, op: np.ndarray) -> np.ndarray:
    """Apply the single-particle operator ``op`` to every slot of ``tensor``."""
    if tensor.ndim == 2:
        return op @ tensor @ op.T
    return np.einsum("ai,bj,ck,ijk->abc", op, op, op, tensor, optimize=True)


def change_basis(psi: BosonicPureState, U) -> BosonicPureState:
    """Return ``(U x ... x U) psi`` for a unitary ``U``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (psi.dim, psi.dim):
        raise DimensionMismatch(f"unitary must be {psi.dim}x{psi.dim}, got {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(psi.dim))) > UNITARY_TOL:
        raise NotUnitary("matrix is not unitary within 1e-10")
    t = apply_local(psi.tensor, U)
    return BosonicPureState(psi.dim, psi.nparticles, np.array([t[idx] for idx in orbits(psi.dim, psi.nparticles)]))


def overlap(psi: BosonicPureState, xi: BosonicPureState) -> complex:
    """Inner product ``<psi|xi>``."""
    if (psi.dim, psi.nparticles) != (xi.dim, xi.nparticles):
        raise DimensionMismatch("states live in different spaces")
    w = orbit_sizes(psi.dim, psi.nparticles)
    return complex(np.sum(w * np.conj(psi.coeffs) * xi.coeffs))


@dataclass(frozen=True, eq=False)
class ReducedTwoBosonDensity:
    """Two-particle reduced density matrix acting on ``C^d x C^d``."""

    dim: int
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in decreasing order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


def partial_trace_one(psi: BosonicPureState, traced: int = 0) -> ReducedTwoBosonDensity:
    """Trace one particle out of a three-boson state.

    All choices of ``traced`` give the same result for a symmetric state; the
    argument exists so that this can be checked.
    """
    if psi.nparticles != 3:
        raise ValueError("partial_trace_one needs a three-boson state")
    t = np.moveaxis(psi.tensor, traced, 0).reshape(psi.dim, psi.dim**2)
    rho = t.T @ t.conj()
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedTwoBosonDensity(psi.dim, rho)


@dataclass(frozen=True, eq=False)
class TwoBosonState:
    """Two-boson state ``sum_ij M_ij |i>|j>`` with ``M`` complex symmetric, unit Frobenius norm."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"matrix must be {self.dim}x{self.dim}")
        if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
            raise NonSymmetricInput("two-boson coefficient matrix must equal its transpose")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def to_state(self) -> BosonicPureState:
        return BosonicPureState(self.dim, 2, np.array([self.matrix[idx] for idx in orbits(self.dim, 2)]))

    @classmethod
    def from_state(cls, psi: BosonicPureState) -> "TwoBosonState":
        if psi.nparticles != 2:
            raise ValueError("expected a two-boson state")
        return cls(psi.dim, psi.tensor.copy())


def from_matrix(M) -> TwoBosonState:
    """Build a :class:`TwoBosonState` from a symmetric matrix, normalizing it."""
    m = np.asarray(M, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("expected a square matrix")
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise NonSymmetricInput("matrix is not symmetric within 1e-12")
    norm = np.linalg.norm(m)
    if norm < ZERO_NORM:
        raise ZeroSymmetrization("zero two-boson matrix")
    if abs(norm - 1.0) > 1e-15:
        m = m / norm
    return TwoBosonState(m.shape[0], m)


def two_boson_matrix(chi) -> np.ndarray:
    """Coefficient matrix of a two-boson state (accepts N=2 :class:`BosonicPureState` too)."""
    if isinstance(chi, BosonicPureState):
        chi = TwoBosonState.from_state(chi)
    return np.array(chi.matrix)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(dim: int, nparticles: int, rng: np.random.Generator) -> BosonicPureState:
    """Random symmetric state: Gaussian dense tensor projected and normalized."""
    shape = (dim,) * nparticles
    return symmetrize(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
