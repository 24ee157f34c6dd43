"""Named example states with their known separability class."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .classify import SeparabilityClass, TwoBosonClass
from .exceptions import BadParams, UnknownName
from .symstate import BosonicPureState, symmetrize, sym_product

NORM_TOL = 1e-10


def _basis(d, i):
    e = np.zeros(d, dtype=complex)
    e[i] = 1
    return e


def _dense(d, n, terms):
    t = np.zeros((d,) * n, dtype=complex)
    for idx, c in terms:
        t[idx] += c
    return t


def w_qubit() -> BosonicPureState:
    return symmetrize(_dense(2, 3, [((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 1)]))


def c000_c100_family(c000: complex = 0.8, c100: complex | None = None) -> BosonicPureState:
    """``C000 |000> + C100 (|100> + |010> + |001>)``; ``c100`` defaults to the value fixed by normalization."""
    if c100 is None:
        rest = 1.0 - abs(c000) ** 2
        if rest < 0:
            raise BadParams("|c000| must not exceed 1")
        c100 = np.sqrt(rest / 3.0)
    if abs(abs(c000) ** 2 + 3 * abs(c100) ** 2 - 1.0) > NORM_TOL:
        raise BadParams("c000_c100_family needs |c000|^2 + 3|c100|^2 = 1")
    if c000 == 0 or c100 == 0:
        raise BadParams("both coefficients must be nonzero")
    t = _dense(2, 3, [((0, 0, 0), c000), ((1, 0, 0), c100), ((0, 1, 0), c100), ((0, 0, 1), c100)])
    return symmetrize(t)


def ghz_qubit() -> BosonicPureState:
    return symmetrize(_dense(2, 3, [((0, 0, 0), 1), ((1, 1, 1), 1)]))


def hadamard_cube() -> BosonicPureState:
    return symmetrize(np.ones((2, 2, 2), dtype=complex))


def qutrit_biseparable_family(c011: complex = 1 / 3, c012: complex = 1 / 3) -> BosonicPureState:
    """``C011`` on the {011} orbit plus ``C012`` on the {012} orbit of three qutrits."""
    if abs(3 * abs(c011) ** 2 + 6 * abs(c012) ** 2 - 1.0) > NORM_TOL:
        raise BadParams("qutrit_biseparable_family needs 3|c011|^2 + 6|c012|^2 = 1")
    if c012 == 0:
        raise BadParams("c012 must be nonzero")
    terms = [((0, 1, 1), c011), ((1, 0, 1), c011), ((1, 1, 0), c011)]
    terms += [(p, c012) for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))]
    return symmetrize(_dense(3, 3, terms))


def qutrit_ortho_product() -> BosonicPureState:
    state, _ = sym_product(_basis(3, 0), _basis(3, 1), _basis(3, 2))
    return state


def ghz_qutrit() -> BosonicPureState:
    return symmetrize(_dense(3, 3, [((i, i, i), 1) for i in range(3)]))


def w_qutrit() -> BosonicPureState:
    terms = [((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 1), ((2, 0, 0), 1), ((0, 2, 0), 1), ((0, 0, 2), 1)]
    return symmetrize(_dense(3, 3, terms))


def ghz2_qubit() -> BosonicPureState:
    return symmetrize(_dense(2, 2, [((0, 0), 1), ((1, 1), 1)]))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[..., BosonicPureState]
    expected: SeparabilityClass | TwoBosonClass
    description: str
    params: dict = field(default_factory=dict)


ENTRIES = {
    e.name: e
    for e in (
        CatalogEntry("w_qubit", w_qubit, SeparabilityClass.FULLY_SEPARABLE, "W state of three qubits"),
        CatalogEntry(
            "c000_c100_family",
            c000_c100_family,
            SeparabilityClass.PARTIALLY_ENTANGLED_TWO_DEFINED,
            "two particles share phi0, the third is oblique to it",
            {"c000": 0.8, "c100": float(np.sqrt(0.12))},
        ),
        CatalogEntry(
            "ghz_qubit", ghz_qubit, SeparabilityClass.PARTIALLY_ENTANGLED_OBLIQUE_TRIPLE, "(|000> + |111>)/sqrt2"
        ),
        CatalogEntry("hadamard_cube", hadamard_cube, SeparabilityClass.FULLY_SEPARABLE, "H x H x H |000>"),
        CatalogEntry(
            "qutrit_biseparable_family",
            qutrit_biseparable_family,
            SeparabilityClass.BISEPARABLE,
            "Sym(phi0 x phi1 x Theta) with Theta orthogonal to phi0",
            {"c011": 1 / 3, "c012": 1 / 3},
        ),
        CatalogEntry(
            "qutrit_ortho_product",
            qutrit_ortho_product,
            SeparabilityClass.FULLY_SEPARABLE,
            "symmetrized product of three orthogonal qutrit states",
        ),
        CatalogEntry(
            "ghz_qutrit", ghz_qutrit, SeparabilityClass.GENUINELY_ENTANGLED, "(|000> + |111> + |222>)/sqrt3"
        ),
        CatalogEntry("w_qutrit", w_qutrit, SeparabilityClass.FULLY_SEPARABLE, "qutrit generalization of W"),
        CatalogEntry("ghz2_qubit", ghz2_qubit, TwoBosonClass.SEPARABLE, "(|00> + |11>)/sqrt2, two bosons"),
    )
}


def catalog_state(name: str, params: dict | None = None) -> BosonicPureState:
    """Build a catalog state by name, overriding default parameters with ``params``."""
    try:
        entry = ENTRIES[name]
    except KeyError:
        raise UnknownName(f"unknown catalog state {name!r}; known: {', '.join(ENTRIES)}") from None
    params = dict(params or {})
    unknown = set(params) - set(entry.params)
    if unknown:
        raise BadParams(f"{name} does not take parameter(s) {sorted(unknown)}")
    kwargs = dict(entry.params)
    if name == "c000_c100_family" and "c000" in params and "c100" not in params:
        kwargs.pop("c100")
    kwargs.update(params)
    return entry.builder(**kwargs)
