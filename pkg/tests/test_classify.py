import itertools

import numpy as np
import pytest

from bosonsep import catalog_state
from bosonsep.classify import (
    SeparabilityClass as SC,
    TwoBosonClass,
    classify,
    classify_two_boson,
    taxonomy_from_gram,
)
from bosonsep.decompose import GramRelation
from bosonsep.exceptions import InconsistentGram
from bosonsep.symstate import from_matrix, sym_product, symmetrize, unit

E, O, B = GramRelation.EQUAL, GramRelation.ORTHOGONAL, GramRelation.OBLIQUE


@pytest.mark.parametrize(
    "rel,expected",
    [
        ((E, E, E), SC.FULLY_SEPARABLE),
        ((O, O, O), SC.FULLY_SEPARABLE),
        ((E, O, O), SC.FULLY_SEPARABLE),
        ((B, O, O), SC.BISEPARABLE),
        ((O, O, B), SC.BISEPARABLE),
        ((E, B, B), SC.PARTIALLY_ENTANGLED_TWO_DEFINED),
        ((O, B, B), SC.PARTIALLY_ENTANGLED_TWO_DEFINED),
        ((B, B, B), SC.PARTIALLY_ENTANGLED_OBLIQUE_TRIPLE),
    ],
)
def test_taxonomy(rel, expected):
    assert taxonomy_from_gram(rel) is expected


def _realizable(rel):
    # equality is transitive on rays: x = y forces rel(x, z) == rel(y, z)
    r = dict(zip(((0, 1), (0, 2), (1, 2)), rel))
    get = lambda i, j: r[(min(i, j), max(i, j))]  # noqa: E731
    return all(get(x, y) is not E or get(x, z) is get(y, z) for x, y, z in itertools.permutations(range(3)))


def test_taxonomy_rejects_exactly_the_impossible_patterns():
    for rel in itertools.product((E, O, B), repeat=3):
        if _realizable(rel):
            assert isinstance(taxonomy_from_gram(rel), SC)
        else:
            with pytest.raises(InconsistentGram):
                taxonomy_from_gram(rel)


def test_taxonomy_accepts_strings():
    assert taxonomy_from_gram(["Oblique", "Oblique", "Oblique"]) is SC.PARTIALLY_ENTANGLED_OBLIQUE_TRIPLE


def test_rank_order():
    ranks = [c.rank for c in SC]
    assert ranks == sorted(ranks, reverse=True)


def _triple(a, b, c):
    return sym_product(unit(a), unit(b), unit(c))[0]


@pytest.mark.parametrize(
    "vectors,expected",
    [
        (([1, 0, 0], [0, 1, 0], [0, 0, 1]), SC.FULLY_SEPARABLE),
        (([1, 0, 0], [1, 0, 0], [0, 1, 0]), SC.FULLY_SEPARABLE),
        (([1, 0, 0], [0, 1, 0], [0, 1, 1]), SC.BISEPARABLE),
        (([1, 0, 0], [1, 0, 0], [1, 1, 0]), SC.PARTIALLY_ENTANGLED_TWO_DEFINED),
        (([1, 0, 0], [1, 1, 0], [1, 0, 1j]), SC.PARTIALLY_ENTANGLED_OBLIQUE_TRIPLE),
        (([1, 0, 0], [0, 1, 0], [1, 0, 1]), SC.BISEPARABLE),
        (([1, 0, 0], [0, 1, 0], [1, 1, 0]), SC.PARTIALLY_ENTANGLED_TWO_DEFINED),
    ],
)
def test_classify_constructed_products(vectors, expected):
    rep = classify(_triple(*vectors), transcript_starts=0)
    assert rep.separability_class is expected


def test_report_contents():
    rep = classify(catalog_state("qutrit_biseparable_family"))
    assert rep.separability_class is SC.BISEPARABLE
    assert len(rep.witnesses) == len(rep.property_set) == len(rep.profiles)
    steps = [s["step"] for s in rep.transcript]
    assert steps == [1, 2, 3]
    assert rep.transcript[1]["answer"] is True
    assert rep.transcript[2]["answer"] is False
    assert rep.subspace is not None and len(rep.subspace) >= 1
    assert rep.best_witness() is not None


def test_genuinely_entangled_report():
    rep = classify(catalog_state("ghz_qutrit"))
    assert rep.witnesses == ()
    assert rep.min_residual > 0.1
    assert rep.transcript[0]["answer"] is False
    assert rep.best_witness() is None


def test_non_decomposable_cofactor_is_flagged():
    phi = np.array([1, 0, 0])
    chi = np.diag([1.0, 0.8, 0.6]) + 0.1 * np.ones((3, 3))
    t = np.einsum("a,bc->abc", phi, chi)
    psi = symmetrize(t + t.transpose(1, 0, 2) + t.transpose(2, 1, 0))
    rep = classify(psi, transcript_starts=0)
    assert "NonDecomposable" in rep.flags
    assert rep.separability_class is SC.PARTIALLY_ENTANGLED_TWO_DEFINED


def test_classify_rejects_two_bosons():
    with pytest.raises(ValueError):
        classify(catalog_state("ghz2_qubit"))


def test_two_boson_classes(rng):
    a, b = unit(rng.standard_normal(3)), unit(rng.standard_normal(3))
    oblique = from_matrix(np.outer(a, b) + np.outer(b, a))
    assert classify_two_boson(oblique).verdict is TwoBosonClass.ENTANGLED
    assert classify_two_boson(from_matrix(np.outer(a, a))).verdict is TwoBosonClass.SEPARABLE
    assert classify_two_boson(from_matrix(np.eye(3))).verdict is TwoBosonClass.ENTANGLED
    d = classify_two_boson(catalog_state("ghz2_qubit")).to_dict()
    assert d["class"] == "Separable"
