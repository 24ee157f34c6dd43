"""Expectation values of the symmetrized property observables.

For a rank-one property ``P = |phi><phi|`` and ``Q = I - P`` the observable
"exactly ``k`` particles have ``P``" is the symmetrized sum of all slot
placements of ``k`` copies of ``P`` and ``N - k`` copies of ``Q``.  On a
symmetric state every placement contributes equally, so only one placement
per ``k`` is contracted.  Nothing of size ``d^N x d^N`` is ever built.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .exceptions import BosonSepError, DimensionMismatch
from .symstate import BosonicPureState

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class ExpectationProfile:
    """Probabilities that exactly 1..N particles carry the property, plus the rest.

    ``exactly[k-1]`` is the expectation of the "exactly k" observable,
    ``at_least_one`` their sum and ``residual`` the weight of the
    no-particle-has-it component ``||Q^{xN} psi||^2``.
    """

    exactly: tuple[float, ...]
    at_least_one: float
    residual: float

    def to_dict(self) -> dict:
        return {"exactly": list(self.exactly), "atLeastOne": self.at_least_one, "residual": self.residual}


def projector_pair(phi, dim: int) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(phi, dtype=complex).reshape(-1)
    if v.size != dim:
        raise DimensionMismatch(f"property vector has dimension {v.size}, state has {dim}")
    v = v / np.linalg.norm(v)
    P = np.outer(v, v.conj())
    return P, np.eye(dim) - P


def _slotwise(tensor: np.ndarray, ops) -> np.ndarray:
    out = tensor
    for axis, op in enumerate(ops):
        out = np.moveaxis(np.tensordot(op, out, axes=([1], [axis])), 0, axis)
    return out


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise BosonSepError(f"{what} has imaginary part {value.imag:.3e}; state is not symmetric")
    return float(value.real)


def expectation_profile(psi: BosonicPureState, phi) -> ExpectationProfile:
    P, Q = projector_pair(phi, psi.dim)
    n = psi.nparticles
    t = psi.tensor
    exactly = []
    for k in range(1, n + 1):
        image = _slotwise(t, [P] * k + [Q] * (n - k))
        exactly.append(comb(n, k) * _real(np.vdot(t, image), f"<E_P{k}>"))
    rest = _slotwise(t, [Q] * n)
    residual = _real(np.vdot(t, rest), "residual")
    return ExpectationProfile(tuple(exactly), float(sum(exactly)), residual)


def residual_objective(psi: BosonicPureState, phi) -> float:
    """``||(I - P)^{xN} psi||^2``; zero exactly when ``phi`` is a property."""
    _, Q = projector_pair(phi, psi.dim)
    rest = _slotwise(psi.tensor, [Q] * psi.nparticles)
    return float(np.vdot(rest, rest).real)


def at_least_one(psi: BosonicPureState, phi) -> float:
    """Probability that at least one boson has the property ``phi``."""
    return 1.0 - residual_objective(psi, phi)
