"""JSON state files and analysis reports.

State file::

    {"d": 3, "n": 3, "symmetrize": true, "name": "...", "comment": "...",
     "amplitudes": [{"idx": [0, 1, 2], "re": 0.5, "im": 0.0}, ...]}

With ``symmetrize`` true (the default) the amplitudes are raw tensor
components in any index order; they are symmetrized and normalized on load.
With ``symmetrize`` false each amplitude is the coefficient of a whole
occupation orbit and listing two members of one orbit with different values is
an error.  Saved files are canonical: one sorted ``idx`` per nonzero orbit,
``symmetrize`` false, keys sorted.  Floats are written with ``repr``, which
round-trips every double exactly.
"""

from __future__ import annotations

import json
import math
from numbers import Integral, Real

import numpy as np

from .classify import ClassificationReport, TwoBosonReport
from .decompose import ConstituentTriple, vector_from_json, vector_to_json
from .exceptions import StateFileError, ZeroSymmetrization
from .propsearch import PropertyMember, PropertySet
from .symstate import BosonicPureState, orbit_sizes, orbits, symmetrize

NORM_SQ_TOL = 1e-13
KNOWN_KEYS = {"d", "n", "amplitudes", "symmetrize", "name", "comment"}


def _field_error(path: str, message: str) -> StateFileError:
    err = StateFileError(f"{path}: {message}")
    err.field = path
    return err


def _int(obj, key, path):
    if key not in obj:
        raise _field_error(path, "missing")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, Integral):
        raise _field_error(path, f"expected an integer, got {v!r}")
    return int(v)


def _real(entry, key, path):
    v = entry.get(key, 0.0)
    if isinstance(v, bool) or not isinstance(v, Real) or not math.isfinite(v):
        raise _field_error(path, f"expected a finite number, got {v!r}")
    return float(v)


def parse_state(obj) -> tuple[BosonicPureState, dict]:
    """Validate a decoded state file and build the state.

    Returns the state and a dict with the optional ``name``/``comment``.

    Raises
    ------
    StateFileError
        With the offending field (e.g. ``amplitudes[3].idx``) in the message.
    """
    if not isinstance(obj, dict):
        raise _field_error("<root>", "expected a JSON object")
    extra = set(obj) - KNOWN_KEYS
    if extra:
        raise _field_error(sorted(extra)[0], "unknown key")
    d = _int(obj, "d", "d")
    if d < 1:
        raise _field_error("d", f"must be positive, got {d}")
    n = _int(obj, "n", "n")
    if n not in (2, 3):
        raise _field_error("n", f"must be 2 or 3, got {n}")
    sym = obj.get("symmetrize", True)
    if not isinstance(sym, bool):
        raise _field_error("symmetrize", f"expected true or false, got {sym!r}")
    meta = {}
    for key in ("name", "comment"):
        if key in obj:
            if not isinstance(obj[key], str):
                raise _field_error(key, "expected a string")
            meta[key] = obj[key]
    amps = obj.get("amplitudes")
    if not isinstance(amps, list):
        raise _field_error("amplitudes", "expected a list")

    raw = np.zeros((d,) * n, dtype=complex)
    seen: dict[tuple, int] = {}
    orbit_value: dict[tuple, tuple[complex, int]] = {}
    for k, entry in enumerate(amps):
        path = f"amplitudes[{k}]"
        if not isinstance(entry, dict):
            raise _field_error(path, "expected an object")
        bad = set(entry) - {"idx", "re", "im"}
        if bad:
            raise _field_error(f"{path}.{sorted(bad)[0]}", "unknown key")
        idx = entry.get("idx")
        if not isinstance(idx, list) or len(idx) != n:
            raise _field_error(f"{path}.idx", f"expected a list of {n} indices, got {idx!r}")
        if any(isinstance(i, bool) or not isinstance(i, Integral) or not 0 <= i < d for i in idx):
            raise _field_error(f"{path}.idx", f"indices must be integers in [0, {d}), got {idx!r}")
        idx = tuple(int(i) for i in idx)
        value = complex(_real(entry, "re", f"{path}.re"), _real(entry, "im", f"{path}.im"))
        if idx in seen:
            raise _field_error(f"{path}.idx", f"duplicate of amplitudes[{seen[idx]}]")
        seen[idx] = k
        if sym:
            raw[idx] = value
            continue
        key = tuple(sorted(idx))
        if key in orbit_value and orbit_value[key][0] != value:
            other = orbit_value[key][1]
            raise _field_error(
                f"{path}.idx", f"asymmetric: orbit {list(key)} already has a different value at amplitudes[{other}]"
            )
        orbit_value[key] = (value, k)

    if sym:
        try:
            state = symmetrize(raw)
        except ZeroSymmetrization:
            raise _field_error("amplitudes", "symmetric part of the state is zero") from None
        return state, meta

    coeffs = np.array([orbit_value.get(o, (0j, -1))[0] for o in orbits(d, n)])
    norm_sq = float(np.sum(orbit_sizes(d, n) * np.abs(coeffs) ** 2))
    if norm_sq < 1e-28:
        raise _field_error("amplitudes", "state is zero")
    if abs(norm_sq - 1.0) > NORM_SQ_TOL:
        coeffs = coeffs / np.sqrt(norm_sq)
    return BosonicPureState(d, n, coeffs), meta


def loads_state(text: str) -> tuple[BosonicPureState, dict]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        err = StateFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}")
        err.field = f"line {exc.lineno}"
        raise err from None
    return parse_state(obj)


def load_state(path) -> tuple[BosonicPureState, dict]:
    with open(path, encoding="utf-8") as fh:
        return loads_state(fh.read())


def state_to_dict(psi: BosonicPureState, name: str | None = None, comment: str | None = None) -> dict:
    amps = [
        {"idx": list(idx), "re": float(c.real), "im": float(c.imag)}
        for idx, c in zip(orbits(psi.dim, psi.nparticles), psi.coeffs)
        if c != 0
    ]
    out = {"d": psi.dim, "n": psi.nparticles, "symmetrize": False, "amplitudes": amps}
    if name is not None:
        out["name"] = name
    if comment is not None:
        out["comment"] = comment
    return out


def dumps_state(psi: BosonicPureState, name: str | None = None, comment: str | None = None) -> str:
    return json.dumps(state_to_dict(psi, name, comment), indent=2, sort_keys=True, allow_nan=False) + "\n"


def save_state(path, psi: BosonicPureState, name: str | None = None, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_state(psi, name, comment))


# Reports ---------------------------------------------------------------------

def _finite(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _member_dict(m: PropertyMember) -> dict:
    return {
        "vector": vector_to_json(m.vector),
        "residual": float(m.residual),
        "multiplicity": m.multiplicity,
        "hits": m.hits,
    }


def property_set_to_dict(props: PropertySet) -> dict:
    return {
        "method": props.method,
        "members": [_member_dict(m) for m in props.members],
        "near": [_member_dict(m) for m in props.near],
        "nStarts": props.n_starts,
        "nBasins": props.n_basins,
        "minResidual": _finite(props.min_residual),
        "continuumSuspected": props.continuum_suspected,
    }


def property_set_from_dict(obj: dict) -> PropertySet:
    def member(m):
        return PropertyMember(vector_from_json(m["vector"]), m["residual"], m["multiplicity"], m["hits"])

    mr = obj["minResidual"]
    return PropertySet(
        tuple(member(m) for m in obj["members"]),
        method=obj["method"],
        n_starts=obj["nStarts"],
        n_basins=obj["nBasins"],
        min_residual=float("nan") if mr is None else mr,
        near=tuple(member(m) for m in obj["near"]),
        continuum_suspected=obj["continuumSuspected"],
    )


def report_to_dict(report, version: str, meta: dict | None = None) -> dict:
    """Serializable form of a three- or two-boson classification report."""
    head = {"toolVersion": version}
    if meta:
        head["state"] = dict(meta)
    if isinstance(report, TwoBosonReport):
        return {**head, **report.to_dict()}
    if not isinstance(report, ClassificationReport):
        raise TypeError(f"cannot serialize {type(report).__name__}")
    props = report.property_set
    min_res = report.min_residual if report.min_residual is not None else props.min_residual
    return {
        **head,
        "class": report.separability_class.value,
        "propertySet": property_set_to_dict(props),
        "witnesses": [
            {"kind": "triple" if isinstance(w, ConstituentTriple) else "none", **w.to_dict()} for w in report.witnesses
        ],
        "expectations": [
            {"property": vector_to_json(m.vector), **p.to_dict()} for m, p in zip(props.members, report.profiles)
        ],
        "minResidual": _finite(min_res),
        "flags": list(report.flags),
        "transcript": list(report.transcript),
        "subspace": None if report.subspace is None else property_set_to_dict(report.subspace),
        "config": report.config.to_dict(),
    }


def dumps_json(obj) -> str:
    """Deterministic JSON text: sorted keys, exact float repr, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
