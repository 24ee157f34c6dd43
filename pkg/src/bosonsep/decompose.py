"""Split a property off a three-boson state and factor what is left.

Once ``phi`` is a property, ``psi = Sym(phi x chi)`` for a unique symmetric
two-boson cofactor ``chi``.  The Autonne-Takagi factorization of ``chi``'s
coefficient matrix tells whether the remaining pair is a symmetrized product
and recovers its two constituents.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .exceptions import NotAProperty
from .properties import residual_objective
from .propsearch import polish_property
from .symstate import (
    BosonicPureState,
    TwoBosonState,
    abs_overlap,
    align_phase,
    canonical_phase,
    from_matrix,
    overlap,
    sym_product,
    unit,
)

RANK_TOL = 1e-10
EQUAL_VALUES_TOL = 1e-8
RELATION_TOL = 1e-7
COFACTOR_TOL = 1e-6
TRIPLE_FIDELITY_TOL = 1e-8
FIT_TOL = 1e-6
SNAP_TOL = 1e-6


class TwoBosonVerdict(str, enum.Enum):
    PRODUCT_IDENTICAL = "ProductIdentical"
    SYM_ORTHOGONAL = "SymOrthogonal"
    SYM_OBLIQUE = "SymOblique"
    NON_DECOMPOSABLE = "NonDecomposable"


class GramRelation(str, enum.Enum):
    EQUAL = "Equal"
    ORTHOGONAL = "Orthogonal"
    OBLIQUE = "Oblique"


def gram_relation(a, b, tol: float = RELATION_TOL) -> GramRelation:
    ov = abs_overlap(unit(a), unit(b))
    if ov >= 1.0 - tol:
        return GramRelation.EQUAL
    if ov <= tol:
        return GramRelation.ORTHOGONAL
    return GramRelation.OBLIQUE


@dataclass(frozen=True, eq=False)
class TwoBosonAnalysis:
    """Takagi data of a two-boson state.

    ``values`` are nonincreasing and ``vectors[:, k]`` is the Takagi vector of
    ``values[k]``, so that ``M = sum_k values[k] u_k u_k^T``.
    """

    values: np.ndarray
    vectors: np.ndarray
    sym_rank: int
    verdict: TwoBosonVerdict
    constituents: tuple[np.ndarray, np.ndarray] | None

    def range_basis(self) -> np.ndarray:
        return self.vectors[:, : self.sym_rank]

    def to_dict(self) -> dict:
        out = {
            "takagiValues": [float(x) for x in self.values],
            "symRank": self.sym_rank,
            "verdict": self.verdict.value,
        }
        if self.constituents is not None:
            out["constituents"] = [vector_to_json(v) for v in self.constituents]
        return out


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=complex)
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def vector_from_json(obj) -> np.ndarray:
    return np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)


def takagi(M) -> tuple[np.ndarray, np.ndarray]:
    """Autonne-Takagi factorization ``M = U diag(s) U^T`` of a complex symmetric matrix.

    Uses the real symmetric embedding ``[[Re M, Im M], [Im M, -Re M]]``, whose
    eigenpairs ``(s, [x; y])`` with ``s >= 0`` give Takagi vectors ``x + iy``.
    Directions with ``s`` below ``RANK_TOL`` are completed to an orthonormal
    basis separately because the embedding mixes them with their ``-s``
    partners.

    Returns
    -------
    values : ndarray
        Nonincreasing nonnegative Takagi values (the singular values of ``M``).
    U : ndarray
        Unitary whose columns are the Takagi vectors.
    """
    M = np.asarray(M, dtype=complex)
    d = M.shape[0]
    A, B = M.real, M.imag
    w, X = np.linalg.eigh(np.block([[A, B], [B, -A]]))
    values = w[::-1][:d].clip(min=0.0)
    X = X[:, ::-1][:, :d]
    U = X[:d] + 1j * X[d:]
    rank = int(np.sum(values > RANK_TOL))
    if rank < d:
        values[rank:] = 0.0
        U[:, rank:] = null_space(U[:, :rank].conj().T) if rank else np.eye(d)
    return values, U


def takagi_factorize(chi: TwoBosonState) -> TwoBosonAnalysis:
    """Classify a two-boson state by its Takagi values.

    Rank one is ``a x a``.  Rank two is ``Sym(a x b)`` with
    ``a, b = sqrt(l1) u1 +- i sqrt(l2) u2``; the pair is orthogonal exactly when
    the two values coincide.  Anything of rank three or more does not factor.
    """
    values, U = takagi(chi.matrix)
    rank = int(np.sum(values > RANK_TOL))
    constituents = None
    if rank == 1:
        verdict = TwoBosonVerdict.PRODUCT_IDENTICAL
        a = canonical_phase(U[:, 0])
        constituents = (a, a.copy())
    elif rank == 2:
        l1, l2 = np.sqrt(values[:2])
        a = unit(l1 * U[:, 0] + 1j * l2 * U[:, 1])
        b = unit(l1 * U[:, 0] - 1j * l2 * U[:, 1])
        constituents = (canonical_phase(a), canonical_phase(b))
        if abs(values[0] - values[1]) <= EQUAL_VALUES_TOL:
            verdict = TwoBosonVerdict.SYM_ORTHOGONAL
        else:
            verdict = TwoBosonVerdict.SYM_OBLIQUE
    else:
        verdict = TwoBosonVerdict.NON_DECOMPOSABLE
    return TwoBosonAnalysis(values, U, rank, verdict, constituents)


@dataclass(frozen=True, eq=False)
class Cofactor:
    """Two-boson factor ``chi`` with ``psi ~ Sym(phi x chi)`` and the fit's relative residual."""

    property: np.ndarray
    chi: TwoBosonState
    residual: float


def _sym_phi_columns(phi: np.ndarray):
    d = phi.size
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    cols = []
    for i, j in pairs:
        E = np.zeros((d, d), dtype=complex)
        E[i, j] = E[j, i] = 1
        t = np.einsum("a,bc->abc", phi, E)
        t = (t + t.transpose(1, 0, 2) + t.transpose(2, 1, 0)) / 3.0
        cols.append(t.reshape(-1))
    return pairs, np.array(cols).T


def extract_cofactor(psi: BosonicPureState, phi) -> Cofactor:
    """Least-squares solve of ``Sym(phi x chi) = psi`` over symmetric ``chi``.

    Raises
    ------
    NotAProperty
        If the relative residual exceeds ``1e-6``.
    """
    if psi.nparticles != 3:
        raise ValueError("extract_cofactor needs a three-boson state")
    v = unit(phi)
    pairs, L = _sym_phi_columns(v)
    target = psi.vector
    x, *_ = np.linalg.lstsq(L, target, rcond=None)
    residual = float(np.linalg.norm(L @ x - target) / np.linalg.norm(target))
    if residual > COFACTOR_TOL:
        raise NotAProperty(f"vector does not factor out of the state (relative residual {residual:.3e})")
    M = np.zeros((psi.dim, psi.dim), dtype=complex)
    for (i, j), c in zip(pairs, x):
        M[i, j] += c
        if i != j:
            M[j, i] += c
    return Cofactor(v, from_matrix(M), residual)


@dataclass(frozen=True, eq=False)
class ConstituentTriple:
    """Three single-particle vectors whose symmetrized product reproduces the state.

    ``relations`` and ``overlaps`` refer to the pairs (0,1), (0,2), (1,2).
    """

    vectors: tuple[np.ndarray, np.ndarray, np.ndarray]
    relations: tuple[GramRelation, GramRelation, GramRelation]
    overlaps: tuple[float, float, float]
    fidelity: float

    @classmethod
    def from_vectors(cls, vectors, fidelity: float) -> "ConstituentTriple":
        vs = tuple(canonical_phase(unit(v)) for v in vectors)
        pairs = ((0, 1), (0, 2), (1, 2))
        return cls(
            vs,
            tuple(gram_relation(vs[i], vs[j]) for i, j in pairs),
            tuple(abs_overlap(vs[i], vs[j]) for i, j in pairs),
            float(fidelity),
        )

    def to_dict(self) -> dict:
        return {
            "vectors": [vector_to_json(v) for v in self.vectors],
            "gram": [r.value for r in self.relations],
            "overlaps": list(self.overlaps),
            "fidelity": self.fidelity,
        }


@dataclass(frozen=True, eq=False)
class NoTriple:
    """Evidence that no symmetrized product was found."""

    reason: str
    property: np.ndarray | None = None
    cofactor: TwoBosonAnalysis | None = None
    best_fidelity: float | None = None

    def to_dict(self) -> dict:
        out: dict = {"reason": self.reason}
        if self.property is not None:
            out["property"] = vector_to_json(self.property)
        if self.cofactor is not None:
            out["cofactor"] = self.cofactor.to_dict()
        if self.best_fidelity is not None:
            out["bestFidelity"] = self.best_fidelity
        return out


def product_fidelity(psi: BosonicPureState, vectors) -> float:
    state, _ = sym_product(*vectors)
    return abs(overlap(psi, state)) ** 2


def _power_refine(psi_t, a, iters: int = 100):
    # fixed point of a -> psi(conj a, conj a, .) maximizes |<psi|a a a>|
    for _ in range(iters):
        nxt = unit(np.einsum("ijk,j,k->i", psi_t, a.conj(), a.conj()))
        nxt = align_phase(nxt, a)
        if np.linalg.norm(nxt - a) < 1e-15:
            return nxt
        a = nxt
    return a


_MERGE_PATTERNS = ((), ((0, 1),), ((0, 2),), ((1, 2),), ((0, 1, 2),))


def _refined(psi, raw):
    """Pick the merge pattern of the three vectors with the best fidelity.

    Merged candidates win ties, so repeated roots come out exactly repeated.
    """
    best_vectors, best_fid = list(raw), product_fidelity(psi, raw)
    vs = [unit(v) for v in raw]
    for pattern in _MERGE_PATTERNS[1:]:
        cand = list(vs)
        for group in pattern:
            ref = vs[group[0]]
            mean = unit(sum(align_phase(vs[i], ref) for i in group))
            if len(group) == 3:
                mean = _power_refine(psi.tensor, mean)
            for i in group:
                cand[i] = mean
        fid = product_fidelity(psi, cand)
        if fid >= best_fid - 1e-15:
            best_vectors, best_fid = cand, fid
    return best_vectors, best_fid


def constituent_triple(psi: BosonicPureState, phi) -> ConstituentTriple | NoTriple:
    """Factor ``psi`` as ``Sym(phi x a x b)`` when the cofactor allows it.

    Raises
    ------
    NotAProperty
        Propagated from :func:`extract_cofactor`.
    """
    cof = extract_cofactor(psi, phi)
    analysis = takagi_factorize(cof.chi)
    if analysis.constituents is None:
        return NoTriple("cofactor is not a symmetrized product", cof.property, analysis)
    vectors, fid = _refined(psi, [cof.property, *analysis.constituents])
    if fid < 1.0 - TRIPLE_FIDELITY_TOL:
        return NoTriple(f"symmetrized product fidelity {fid:.3e} too low", cof.property, analysis, fid)
    return ConstituentTriple.from_vectors(vectors, fid)


def _snap(psi, vectors, fidelity):
    """Sharpen a fitted triple through any constituent that is (nearly) a property.

    Fidelity is quadratic in the vector error, so the fit alone pins the
    vectors only to about the square root of machine precision.  The residual
    is a sum of squares with an exact zero, which polishing resolves fully.
    """
    best = (vectors, fidelity)
    for v in vectors:
        if residual_objective(psi, v) > SNAP_TOL:
            continue
        phi = polish_property(psi, v)
        try:
            trip = constituent_triple(psi, phi)
        except NotAProperty:
            continue
        if isinstance(trip, ConstituentTriple) and trip.fidelity >= best[1] - 1e-12:
            best = (list(trip.vectors), trip.fidelity)
    return best


def _haar_vectors(rng, shape, d):
    z = rng.standard_normal(shape + (d,)) + 1j * rng.standard_normal(shape + (d,))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def _best_update(psi_t, b, c):
    # maximize |<psi|a b c>|^2 / ||Sym(a b c)||^2 over a with b, c fixed (all batched)
    v = np.einsum("ijk,sj,sk->si", psi_t, b.conj(), c.conj())
    g23 = np.einsum("si,si->s", b.conj(), c)
    d = b.shape[1]
    K = (1.0 + np.abs(g23) ** 2)[:, None, None] * np.eye(d)
    K = K + b[:, :, None] * b.conj()[:, None, :] + c[:, :, None] * c.conj()[:, None, :]
    K = K + g23[:, None, None] * b[:, :, None] * c.conj()[:, None, :]
    K = K + g23.conj()[:, None, None] * c[:, :, None] * b.conj()[:, None, :]
    a = np.linalg.solve(K, v[:, :, None])[:, :, 0]
    fid = 6.0 * np.real(np.einsum("si,si->s", v.conj(), a))
    return a / np.linalg.norm(a, axis=1, keepdims=True), fid


def sym_product_fit(
    psi: BosonicPureState, n_starts: int = 32, max_iter: int = 400, seed: int = 0
) -> ConstituentTriple | NoTriple:
    """Best symmetrized-product approximation by alternating single-vector updates.

    Each update solves the one-vector subproblem exactly (a generalized
    Rayleigh quotient with a rank-one numerator), so the fidelity never
    decreases.  Independent of the property search; used as a cross-check.
    """
    if psi.nparticles != 3:
        raise ValueError("sym_product_fit needs a three-boson state")
    rng = np.random.default_rng(seed)
    a, b, c = (_haar_vectors(rng, (n_starts,), psi.dim) for _ in range(3))
    psi_t = psi.tensor
    fid = np.zeros(n_starts)
    for _ in range(max_iter):
        a, _ = _best_update(psi_t, b, c)
        b, _ = _best_update(psi_t, c, a)
        c, new = _best_update(psi_t, a, b)
        if np.all(np.abs(new - fid) <= 1e-15):
            fid = new
            break
        fid = new
    best = int(np.argmax(fid))
    vectors, fidelity = _refined(psi, [a[best], b[best], c[best]])
    vectors, fidelity = _snap(psi, vectors, fidelity)
    if fidelity < 1.0 - FIT_TOL:
        return NoTriple("no symmetrized product within tolerance", best_fidelity=float(fidelity))
    return ConstituentTriple.from_vectors(vectors, fidelity)
