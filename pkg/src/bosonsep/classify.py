"""Degree-of-separability classification of three-boson pure states.

The ladder: find a property ``P``; look for ``Q`` equal or orthogonal to it;
then ``R`` equal or orthogonal to both.  In practice every property is split
off the state, the remaining pair is factored, and the pairwise relations of
the resulting constituent triple decide the class.  When several properties
give witnesses the most separable class wins.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .decompose import (
    RELATION_TOL,
    ConstituentTriple,
    GramRelation,
    NoTriple,
    TwoBosonAnalysis,
    TwoBosonVerdict,
    constituent_triple,
    takagi_factorize,
    vector_to_json,
)
from .exceptions import InconsistentGram, NotAProperty
from .properties import ExpectationProfile, expectation_profile
from .propsearch import PropertySet, SearchConfig, find_properties, find_property_in_subspace
from .symstate import BosonicPureState, TwoBosonState

E, O, B = GramRelation.EQUAL, GramRelation.ORTHOGONAL, GramRelation.OBLIQUE
_PAIRS = ((0, 1), (0, 2), (1, 2))


class SeparabilityClass(str, enum.Enum):
    FULLY_SEPARABLE = "FullySeparable"
    BISEPARABLE = "Biseparable"
    PARTIALLY_ENTANGLED_TWO_DEFINED = "PartiallyEntangledTwoDefined"
    PARTIALLY_ENTANGLED_OBLIQUE_TRIPLE = "PartiallyEntangledObliqueTriple"
    GENUINELY_ENTANGLED = "GenuinelyEntangled"

    @property
    def rank(self) -> int:
        """Higher is more separable."""
        return 4 - list(SeparabilityClass).index(self)


def taxonomy_from_gram(relations) -> SeparabilityClass:
    """Map the relations of pairs (0,1), (0,2), (1,2) to a separability class.

    Raises
    ------
    InconsistentGram
        For patterns no three rays can realize, e.g. ``x = y``, ``x`` orthogonal
        to ``z`` and ``y`` oblique to ``z``.
    """
    rel = tuple(GramRelation(r) for r in relations)
    if len(rel) != 3:
        raise ValueError("need three pairwise relations")
    _check_consistent(rel)
    oblique = [p for p, r in zip(_PAIRS, rel) if r is B]
    if not oblique:
        return SeparabilityClass.FULLY_SEPARABLE
    if len(oblique) == 3:
        return SeparabilityClass.PARTIALLY_ENTANGLED_OBLIQUE_TRIPLE
    if len(oblique) == 2:
        return SeparabilityClass.PARTIALLY_ENTANGLED_TWO_DEFINED
    # one oblique pair: the third vector must be orthogonal to both
    return SeparabilityClass.BISEPARABLE


def _check_consistent(rel) -> None:
    lookup = dict(zip(_PAIRS, rel))

    def r(i, j):
        return lookup[(min(i, j), max(i, j))]

    for x, y, z in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        if r(x, y) is E and r(x, z) is not r(y, z):
            raise InconsistentGram(f"relations {[v.value for v in rel]} cannot hold for three rays")


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    """Class of a three-boson state together with everything that supports it."""

    separability_class: SeparabilityClass
    property_set: PropertySet
    witnesses: tuple[ConstituentTriple | NoTriple, ...]
    profiles: tuple[ExpectationProfile, ...]
    min_residual: float | None
    transcript: tuple[dict, ...]
    flags: tuple[str, ...] = ()
    subspace: PropertySet | None = None
    config: SearchConfig = field(default_factory=SearchConfig)

    def best_witness(self) -> ConstituentTriple | None:
        triples = [w for w in self.witnesses if isinstance(w, ConstituentTriple)]
        if not triples:
            return None
        return max(triples, key=lambda t: taxonomy_from_gram(t.relations).rank)


def _ladder(triple: ConstituentTriple | None, nprops: int) -> list[dict]:
    steps = [{"step": 1, "question": "some property P exists", "answer": nprops > 0, "properties": nprops}]
    if nprops == 0:
        return steps
    if triple is None:
        steps.append({"step": 2, "question": "Q equal or orthogonal to P exists", "answer": False})
        return steps
    defined = [p for p, r in zip(_PAIRS, triple.relations) if r is not B]
    if defined:
        i, j = defined[0]
        k = 3 - i - j
        order = (i, j, k)
    else:
        order = (0, 1, 2)
    named = dict(zip("PQR", (triple.vectors[n] for n in order)))
    step2 = bool(defined)
    steps.append(
        {
            "step": 2,
            "question": "Q equal or orthogonal to P exists",
            "answer": step2,
            "P": vector_to_json(named["P"]),
            "Q": vector_to_json(named["Q"]) if step2 else None,
        }
    )
    if step2:
        step3 = all(r is not B for r in triple.relations)
        steps.append(
            {
                "step": 3,
                "question": "R equal or orthogonal to P and Q exists",
                "answer": step3,
                "R": vector_to_json(named["R"]) if step3 else None,
            }
        )
    return steps


def _orthogonal_to_range(phi: np.ndarray, analysis: TwoBosonAnalysis) -> bool:
    basis = analysis.range_basis()
    return bool(np.max(np.abs(basis.conj().T @ phi), initial=0.0) <= RELATION_TOL)


def classify(
    psi: BosonicPureState, cfg: SearchConfig | None = None, transcript_starts: int | None = None
) -> ClassificationReport:
    """Run the property ladder on a three-boson state.

    ``transcript_starts`` sets the number of starts of the restricted search
    (properties equal or orthogonal to the first one) that is attached to the
    report for inspection; it does not influence the class.  Pass ``0`` to
    skip it.
    """
    if psi.nparticles != 3:
        raise ValueError("classify needs a three-boson state; use classify_two_boson for pairs")
    cfg = cfg or SearchConfig()
    props = find_properties(psi, cfg)
    flags = ["ContinuumSuspected"] if props.continuum_suspected else []
    if not props.members:
        return ClassificationReport(
            SeparabilityClass.GENUINELY_ENTANGLED,
            props,
            (),
            (),
            props.min_residual,
            tuple(_ladder(None, 0)),
            tuple(flags),
            None,
            cfg,
        )

    profiles = tuple(expectation_profile(psi, m.vector) for m in props)
    witnesses = []
    for m in props:
        try:
            witnesses.append(constituent_triple(psi, m.vector))
        except NotAProperty as exc:
            witnesses.append(NoTriple(str(exc), m.vector))
    triples = [w for w in witnesses if isinstance(w, ConstituentTriple)]
    if any(isinstance(w, NoTriple) and w.cofactor is not None and w.cofactor.verdict is TwoBosonVerdict.NON_DECOMPOSABLE for w in witnesses):
        flags.append("NonDecomposable")

    if triples:
        cls = max((taxonomy_from_gram(t.relations) for t in triples), key=lambda c: c.rank)
        best = max(triples, key=lambda t: taxonomy_from_gram(t.relations).rank)
    else:
        best = None
        bisep = any(
            w.cofactor is not None and w.property is not None and _orthogonal_to_range(w.property, w.cofactor)
            for w in witnesses
        )
        cls = SeparabilityClass.BISEPARABLE if bisep else SeparabilityClass.PARTIALLY_ENTANGLED_TWO_DEFINED

    subspace = None
    n_sub = max(16, cfg.n_starts // 8) if transcript_starts is None else transcript_starts
    if n_sub > 0:
        anchor = props.members[0].vector
        sub_cfg = SearchConfig(
            n_starts=n_sub,
            max_iter=cfg.max_iter,
            polish_iter=cfg.polish_iter,
            tol_property=cfg.tol_property,
            near_tol=cfg.near_tol,
            dedupe_tol=cfg.dedupe_tol,
            continuum_limit=cfg.continuum_limit,
            seed=cfg.seed,
        )
        subspace = find_property_in_subspace(psi, anchor, sub_cfg)

    return ClassificationReport(
        cls,
        props,
        tuple(witnesses),
        profiles,
        None,
        tuple(_ladder(best, len(props))),
        tuple(flags),
        subspace,
        cfg,
    )


class TwoBosonClass(str, enum.Enum):
    SEPARABLE = "Separable"
    ENTANGLED = "Entangled"


@dataclass(frozen=True, eq=False)
class TwoBosonReport:
    verdict: TwoBosonClass
    analysis: TwoBosonAnalysis

    @property
    def constituents(self):
        return self.analysis.constituents

    def to_dict(self) -> dict:
        return {"class": self.verdict.value, "takagi": self.analysis.to_dict()}


def classify_two_boson(chi) -> TwoBosonReport:
    """Two bosons are separable iff their state is ``a x a`` or ``Sym(a x b)`` with ``a`` orthogonal to ``b``."""
    if isinstance(chi, BosonicPureState):
        chi = TwoBosonState.from_state(chi)
    analysis = takagi_factorize(chi)
    separable = analysis.verdict in (TwoBosonVerdict.PRODUCT_IDENTICAL, TwoBosonVerdict.SYM_ORTHOGONAL)
    return TwoBosonReport(TwoBosonClass.SEPARABLE if separable else TwoBosonClass.ENTANGLED, analysis)
