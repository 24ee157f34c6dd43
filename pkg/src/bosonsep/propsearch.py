"""Search for all rank-one properties of a bosonic pure state.

A unit vector ``phi`` is a property when the residual
``r(phi) = ||(I - |phi><phi|)^{xN} psi||^2`` vanishes.  For three qubits the
zero set is read off the roots of a binary cubic.  In every other case the
residual is driven to zero by a batched Levenberg-Marquardt iteration on the
unit sphere from many Haar-random starts, and the converged points are
deduplicated as rays.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from math import comb

import numpy as np
from scipy.linalg import null_space

from .properties import residual_objective
from .symstate import BosonicPureState, abs_overlap, canonical_phase, unit

RESIDUAL_FLOOR = 1e-30
CLUSTER_TOL = 1e-4
COARSE_FLOOR = 1e-16
PLATEAU = 1e-3


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the multi-start property search.

    ``tol_property`` is the acceptance threshold on the residual after
    polishing; points with residual below ``near_tol`` but above
    ``tol_property`` are kept as near-properties only.
    """

    n_starts: int = 200
    max_iter: int = 150
    polish_iter: int = 200
    tol_property: float = 1e-9
    near_tol: float = 1e-4
    dedupe_tol: float = 1e-6
    continuum_limit: int = 12
    seed: int = 0

    def __post_init__(self):
        for name in ("n_starts", "max_iter", "polish_iter", "tol_property", "near_tol", "dedupe_tol", "continuum_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PropertyMember:
    vector: np.ndarray
    residual: float
    multiplicity: int | None = None
    hits: int = 1


@dataclass(frozen=True, eq=False)
class PropertySet:
    """Properties found for a state, with search bookkeeping."""

    members: tuple[PropertyMember, ...]
    method: str
    n_starts: int = 0
    n_basins: int = 0
    min_residual: float = 0.0
    near: tuple[PropertyMember, ...] = ()
    continuum_suspected: bool = False

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def vectors(self) -> list[np.ndarray]:
        return [m.vector for m in self.members]

    def overlaps(self) -> np.ndarray:
        """Matrix of ``|<phi_i|phi_j>|`` between members."""
        v = np.array(self.vectors)
        if len(v) == 0:
            return np.zeros((0, 0))
        return np.abs(v.conj() @ v.T)

    def contains(self, vector, tol: float = 1e-6) -> bool:
        v = unit(vector)
        return any(1.0 - abs_overlap(v, m.vector) <= tol for m in self.members)


def _sort_key(v: np.ndarray) -> tuple:
    c = canonical_phase(v)
    return tuple(np.round(np.concatenate([c.real, c.imag]), 6).tolist())


def _dedupe(vectors, residuals, tol):
    """Greedy projective dedup in canonical order; the lowest residual represents a cluster."""
    order = sorted(range(len(vectors)), key=lambda i: (_sort_key(vectors[i]), residuals[i]))
    clusters: list[list[int]] = []
    for i in order:
        for cl in clusters:
            if abs_overlap(vectors[i], vectors[cl[0]]) >= 1.0 - tol:
                cl.append(i)
                break
        else:
            clusters.append([i])
    reps = []
    for cl in clusters:
        best = min(cl, key=lambda i: (residuals[i], _sort_key(vectors[i])))
        reps.append((best, len(cl)))
    reps.sort(key=lambda bc: _sort_key(vectors[bc[0]]))
    return reps


# Majorana path: three qubits ---------------------------------------------

def _cubic_coefficients(psi: BosonicPureState) -> np.ndarray:
    # p(s) = sum_m C(3,m) C_m s^m, C_m the coefficient of the orbit with m ones
    return np.array([comb(3, m) * psi.coeffs[m] for m in range(4)])


def _vector_from_chart(s: complex | None) -> np.ndarray:
    # root s of p  <->  property (s, -1); s = None is the root at infinity -> (1, 0)
    if s is None:
        return np.array([1.0, 0.0], dtype=complex)
    if abs(s) <= 1:
        return unit([s, -1.0])
    return unit([1.0, -1.0 / s])


def _polish_root(coeffs_low_first: np.ndarray, x0: complex, order: int) -> complex:
    poly = np.polynomial.Polynomial(coeffs_low_first)
    target = poly.deriv(order) if order else poly
    if target.degree() < 1:
        return x0
    dtarget = target.deriv()
    x = x0
    for _ in range(30):
        den = dtarget(x)
        if den == 0:
            break
        step = target(x) / den
        x = x - step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return complex(x)


def majorana_roots(psi: BosonicPureState) -> PropertySet:
    """Exact property set of a three-qubit bosonic state.

    For ``d = 2`` the vector ``(I - P)^{x3} psi`` is proportional to
    ``phi_perp^{x3}`` with weight ``<phi_perp^{x3}|psi>``, so properties are
    the orthogonal complements of the roots of a binary cubic.  Roots are
    reported with multiplicity (summing to three).
    """
    if psi.dim != 2 or psi.nparticles != 3:
        raise ValueError("majorana_roots needs three qubits")
    c = _cubic_coefficients(psi)
    scale = np.max(np.abs(c))
    deg = 3
    while deg > 0 and abs(c[deg]) <= 1e-13 * scale:
        deg -= 1
    finite = list(np.roots(c[: deg + 1][::-1])) if deg > 0 else []
    roots: list[complex | None] = finite + [None] * (3 - deg)
    vecs = [_vector_from_chart(s) for s in roots]

    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if 1.0 - abs_overlap(vecs[i], vecs[j]) < CLUSTER_TOL**2:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(roots)):
        groups.setdefault(find(i), []).append(i)

    members = []
    for idx in groups.values():
        mult = len(idx)
        rs = [roots[i] for i in idx]
        if any(s is None or abs(s) > 1 for s in rs):
            # chart t = 1/s around infinity; reversed coefficients
            ts = [0.0 if s is None else 1.0 / s for s in rs]
            t = _polish_root(c[::-1], complex(np.mean(ts)), mult - 1)
            v = _vector_from_chart(None if t == 0 else 1.0 / t)
        else:
            s = _polish_root(c, complex(np.mean(rs)), mult - 1)
            v = _vector_from_chart(s)
        v = canonical_phase(v)
        members.append(PropertyMember(v, residual_objective(psi, v), multiplicity=mult))
    members.sort(key=lambda m: _sort_key(m.vector))
    return PropertySet(tuple(members), method="majorana", min_residual=min(m.residual for m in members))


# Numeric path -------------------------------------------------------------

def _contract_rest(psi_t: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (T, V): T = Q^{xN} psi and V = psi with Q on all slots but the first."""
    S, d = Q.shape[0], Q.shape[1]
    QT = Q.transpose(0, 2, 1)
    if psi_t.ndim == 3:
        X = np.matmul(psi_t.reshape(1, d * d, d), QT).reshape(S, d, d, d)
        V = np.matmul(Q[:, None], X)
    else:
        V = np.matmul(psi_t[None], QT)
    T = np.matmul(Q, V.reshape(S, d, -1)).reshape(V.shape)
    return T, V


def _complements(phi: np.ndarray) -> np.ndarray:
    d = phi.shape[1]
    return np.eye(d) - phi[:, :, None] * phi.conj()[:, None, :]


def _residuals(psi_t: np.ndarray, phi: np.ndarray) -> np.ndarray:
    T, _ = _contract_rest(psi_t, _complements(phi))
    return np.sum(np.abs(T.reshape(len(phi), -1)) ** 2, axis=1)


def _normal_equations(psi_t, phi, dirs):
    S = len(phi)
    n = psi_t.ndim
    Q = _complements(phi)
    T, V = _contract_rest(psi_t, Q)
    # directions tangent to the sphere: remove the radial part of each ambient direction
    radial = np.real(phi.conj() @ dirs.T)
    dphi = dirs[None, :, :] - radial[:, :, None] * phi[:, None, :]
    # dQ V = -(dphi (phi^H V) + phi (dphi^H V)), formed as outer products
    d = phi.shape[1]
    Vm = V.reshape(S, d, -1)
    u = np.matmul(phi.conj()[:, None, :], Vm)
    w = np.matmul(dphi.conj(), Vm)
    K = dirs.shape[0]
    left = np.stack([dphi, np.broadcast_to(phi[:, None, :], (S, K, d))], axis=-1)
    right = np.stack([np.broadcast_to(u, (S, K, u.shape[-1])), w], axis=-2)
    W = -np.matmul(left, right).reshape((S, K) + (d,) * n)
    if n == 3:
        dT = W + W.transpose(0, 1, 3, 2, 4) + W.transpose(0, 1, 4, 3, 2)
    else:
        dT = W + W.transpose(0, 1, 3, 2)
    F = T.reshape(S, -1)
    J = dT.reshape(S, K, -1)
    Jr = np.concatenate([J.real, J.imag], axis=2)
    A = np.matmul(Jr, Jr.transpose(0, 2, 1))
    g = np.real(np.matmul(J.conj(), F[:, :, None]))[:, :, 0]
    r = np.sum(np.abs(F) ** 2, axis=1)
    return A, g, r


def _levenberg_marquardt(psi_t, phi, dirs, max_iter, stop_on_stall=True, floor=RESIDUAL_FLOOR):
    """Drive r(phi) down for every row of ``phi`` simultaneously."""
    phi = phi.copy()
    S = len(phi)
    K = dirs.shape[0]
    r = _residuals(psi_t, phi)
    mu = np.full(S, -1.0)
    active = r > floor
    eye = np.eye(K)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        A, g, r_cur = _normal_equations(psi_t, phi[idx], dirs)
        m = mu[idx]
        fresh = m < 0
        diag_max = np.max(np.diagonal(A, axis1=1, axis2=2), axis=1)
        m[fresh] = 1e-3 * diag_max[fresh]
        # the global-phase direction is always in the null space of A, so damping must not vanish
        m = np.maximum(m, 1e-14 * diag_max + 1e-300)
        lhs = A + m[:, None, None] * eye
        try:
            step = -np.linalg.solve(lhs, g[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = -(np.linalg.pinv(lhs, hermitian=True) @ g[:, :, None])[:, :, 0]
        trial = phi[idx] + step @ dirs
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        r_new = _residuals(psi_t, trial)
        accept = r_new < r_cur
        gain = r_cur - r_new
        phi[idx[accept]] = trial[accept]
        r[idx] = np.where(accept, r_new, r_cur)
        m = np.where(accept, m / 3.0, m * 4.0)
        mu[idx] = m
        done = (r[idx] <= floor) | (m > 1e14)
        if stop_on_stall:
            done |= accept & (gain <= 1e-10 * r_cur) & (r[idx] > 1e-20)
            # far from zero, a crawl means a positive local minimum; zeros are approached quadratically
            done |= accept & (gain <= 1e-6 * r_cur) & (r[idx] > PLATEAU)
        active[idx[done]] = False
    return phi, r


def _search(psi: BosonicPureState, basis: np.ndarray, cfg: SearchConfig):
    """Multi-start minimization of the residual over unit vectors in span(basis)."""
    d, m = basis.shape
    rng = np.random.default_rng(cfg.seed)
    y = rng.standard_normal((cfg.n_starts, m)) + 1j * rng.standard_normal((cfg.n_starts, m))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    phi = y @ basis.T
    psi_t = psi.tensor
    if m == 1:
        return phi, _residuals(psi_t, phi)
    dirs = np.concatenate([basis.T, 1j * basis.T])
    phi, r = _levenberg_marquardt(psi_t, phi, dirs, cfg.max_iter, floor=COARSE_FLOOR)
    # polish one representative per basin and hand its result to the whole basin
    close = [int(i) for i in np.flatnonzero(r < cfg.near_tol)]
    basins: list[list[int]] = []
    for i in sorted(close, key=lambda i: r[i]):
        for b in basins:
            if abs_overlap(phi[i], phi[b[0]]) >= 1.0 - cfg.dedupe_tol:
                b.append(i)
                break
        else:
            basins.append([i])
    if basins:
        reps = [b[0] for b in basins]
        phi_p, r_p = _levenberg_marquardt(psi_t, phi[reps], dirs, cfg.polish_iter, stop_on_stall=False)
        for b, v, x in zip(basins, phi_p, r_p):
            phi[b], r[b] = v, x
    return phi, r


def polish_property(psi: BosonicPureState, phi, iters: int = 200) -> np.ndarray:
    """Drive the residual of a single near-property to its floor."""
    start = unit(phi)[None, :]
    dirs = np.concatenate([np.eye(psi.dim), 1j * np.eye(psi.dim)]).astype(complex)
    out, _ = _levenberg_marquardt(psi.tensor, start, dirs, iters, stop_on_stall=False)
    return canonical_phase(out[0])


def _assemble(psi, phi, r, cfg: SearchConfig, method: str) -> PropertySet:
    vecs = [canonical_phase(v) for v in phi]
    res = [float(x) for x in r]
    basins = _dedupe(vecs, res, cfg.dedupe_tol)
    members, near = [], []
    for i, hits in basins:
        # recompute with the single-state routine so the reported value is independent of the batch
        val = residual_objective(psi, vecs[i])
        if val <= cfg.tol_property:
            members.append(PropertyMember(vecs[i], val, hits=hits))
        elif val < cfg.near_tol:
            near.append(PropertyMember(vecs[i], val, hits=hits))
    continuum = len(members) > cfg.continuum_limit
    return PropertySet(
        tuple(members),
        method=method,
        n_starts=len(phi),
        n_basins=len(basins),
        min_residual=float(min(res)) if res else float("nan"),
        near=tuple(near),
        continuum_suspected=continuum,
    )


def find_properties(psi: BosonicPureState, cfg: SearchConfig | None = None, method: str = "auto") -> PropertySet:
    """All properties of ``psi``: exact for three qubits, multi-start otherwise.

    ``method`` is ``"auto"``, ``"majorana"`` or ``"numeric"``; the last forces
    the optimizer even where the exact solver applies.
    """
    cfg = cfg or SearchConfig()
    if method not in ("auto", "majorana", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    if method == "majorana" or (method == "auto" and psi.dim == 2 and psi.nparticles == 3):
        return majorana_roots(psi)
    phi, r = _search(psi, np.eye(psi.dim, dtype=complex), cfg)
    return _assemble(psi, phi, r, cfg, "numeric")


def find_property_in_subspace(psi: BosonicPureState, anchor, cfg: SearchConfig | None = None) -> PropertySet:
    """Properties that are equal to ``anchor`` or orthogonal to it."""
    cfg = cfg or SearchConfig()
    a = unit(anchor)
    members = []
    r_anchor = residual_objective(psi, a)
    if r_anchor <= cfg.tol_property:
        members.append(PropertyMember(canonical_phase(a), r_anchor))
    basis = null_space(a.conj()[None, :])
    if basis.shape[1] == 0:
        return PropertySet(tuple(members), method="subspace", min_residual=r_anchor)
    phi, r = _search(psi, basis.astype(complex), cfg)
    found = _assemble(psi, phi, r, cfg, "subspace")
    return PropertySet(
        tuple(members) + found.members,
        method="subspace",
        n_starts=found.n_starts,
        n_basins=found.n_basins,
        min_residual=min(r_anchor, found.min_residual),
        near=found.near,
        continuum_suspected=found.continuum_suspected,
    )
