"""Command-line front end.

Every analysis command reads a JSON state file, prints a short human summary
(unless ``--quiet``) and, with ``--json PATH``, writes the full report
(``-`` writes it to stdout instead of the summary).

Exit codes: 0 success, 2 bad input (the message names the offending field),
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .catalog import ENTRIES, catalog_state
from .classify import ClassificationReport, classify, classify_two_boson
from .decompose import ConstituentTriple, NoTriple, constituent_triple, sym_product_fit, takagi_factorize, vector_to_json
from .exceptions import (
    BadParams,
    BosonSepError,
    DimensionMismatch,
    NonSymmetricInput,
    NotAProperty,
    StateFileError,
    UnknownName,
    ZeroSymmetrization,
)
from .formats import dumps_json, dumps_state, load_state, property_set_to_dict, report_to_dict
from .properties import expectation_profile
from .propsearch import SearchConfig, find_properties
from .symstate import TwoBosonState, partial_trace_one

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
INPUT_ERRORS = (StateFileError, UnknownName, BadParams, DimensionMismatch, NonSymmetricInput, ZeroSymmetrization)


class UsageError(Exception):
    pass


def _fmt_vec(v) -> str:
    return np.array2string(np.asarray(v), precision=6, suppress_small=True, separator=", ")


def _parse_vector(text: str) -> np.ndarray:
    """Parse ``[0.7, 0.7]``, ``[[re, im], ...]`` or ``["0.5+0.5j", ...]``."""
    try:
        items = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--property: not a JSON list ({exc.msg})") from None
    if not isinstance(items, list) or not items:
        raise UsageError("--property: expected a non-empty list")
    out = []
    for k, x in enumerate(items):
        try:
            if isinstance(x, list) and len(x) == 2:
                out.append(complex(float(x[0]), float(x[1])))
            elif isinstance(x, (int, float, str)) and not isinstance(x, bool):
                out.append(complex(x.replace(" ", "")) if isinstance(x, str) else complex(x))
            else:
                raise ValueError
        except (TypeError, ValueError):
            raise UsageError(f"--property[{k}]: cannot read {x!r} as a complex number") from None
    v = np.array(out)
    if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
        raise UsageError("--property: vector must be finite and nonzero")
    return v


def _parse_param(text: str) -> tuple[str, complex | float]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise UsageError(f"--param {text!r}: expected key=value")
    try:
        z = complex(value.replace(" ", ""))
    except ValueError:
        raise UsageError(f"--param {key}: cannot read {value!r} as a number") from None
    return key, (z.real if z.imag == 0 else z)


def _config(args) -> SearchConfig:
    kw = {"seed": args.seed}
    if args.starts is not None:
        kw["n_starts"] = args.starts
    if args.tol is not None:
        kw["tol_property"] = args.tol
    try:
        return SearchConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(args):
    psi, meta = load_state(args.state)
    return psi, meta


# Commands: each returns (json payload, summary lines) ------------------------

def cmd_classify(args):
    psi, meta = _load(args)
    if psi.nparticles == 2:
        rep = classify_two_boson(psi)
        lines = [f"class: {rep.verdict.value}", f"takagi values: {_fmt_vec(rep.analysis.values)}"]
        return report_to_dict(rep, __version__, meta), lines
    rep = classify(psi, _config(args))
    return report_to_dict(rep, __version__, meta), _classify_summary(rep)


def _classify_summary(rep: ClassificationReport) -> list[str]:
    props = rep.property_set
    lines = [f"class: {rep.separability_class.value}", f"properties: {len(props)} ({props.method})"]
    for m in props:
        lines.append(f"  {_fmt_vec(m.vector)}  r={m.residual:.3e}")
    for w in rep.witnesses:
        if isinstance(w, ConstituentTriple):
            lines.append(f"witness: gram={[r.value for r in w.relations]} fidelity={w.fidelity:.12f}")
        else:
            lines.append(f"no witness: {w.reason}")
    if not props.members:
        lines.append(f"min residual: {props.min_residual:.6f}")
    if rep.flags:
        lines.append(f"flags: {', '.join(rep.flags)}")
    return lines


def cmd_properties(args):
    psi, meta = _load(args)
    props = find_properties(psi, _config(args))
    payload = {"toolVersion": __version__, "propertySet": property_set_to_dict(props), "config": _config(args).to_dict()}
    if meta:
        payload["state"] = meta
    lines = [f"properties: {len(props)} ({props.method}), min residual {props.min_residual:.3e}"]
    lines += [f"  {_fmt_vec(m.vector)}  r={m.residual:.3e}" for m in props]
    return payload, lines


def cmd_expectations(args):
    psi, meta = _load(args)
    phi = _parse_vector(args.property)
    if phi.size != psi.dim:
        raise UsageError(f"--property: expected {psi.dim} components, got {phi.size}")
    prof = expectation_profile(psi, phi)
    payload = {"toolVersion": __version__, "property": vector_to_json(phi / np.linalg.norm(phi)), **prof.to_dict()}
    if meta:
        payload["state"] = meta
    lines = [f"exactly k=1..{psi.nparticles}: {_fmt_vec(prof.exactly)}", f"at least one: {prof.at_least_one:.12f}"]
    return payload, lines


def cmd_decompose(args):
    psi, meta = _load(args)
    payload = {"toolVersion": __version__}
    if meta:
        payload["state"] = meta
    if psi.nparticles == 2:
        analysis = takagi_factorize(TwoBosonState.from_state(psi))
        payload["takagi"] = analysis.to_dict()
        lines = [f"verdict: {analysis.verdict.value}", f"takagi values: {_fmt_vec(analysis.values)}"]
        if analysis.constituents is not None:
            lines += [f"  {_fmt_vec(v)}" for v in analysis.constituents]
        return payload, lines
    if args.property is not None:
        phi = _parse_vector(args.property)
        if phi.size != psi.dim:
            raise UsageError(f"--property: expected {psi.dim} components, got {phi.size}")
        try:
            result = constituent_triple(psi, phi)
        except NotAProperty as exc:
            result = NoTriple(str(exc), phi)
    else:
        result = sym_product_fit(psi, seed=args.seed)
    payload["kind"] = "triple" if isinstance(result, ConstituentTriple) else "none"
    payload.update(result.to_dict())
    if isinstance(result, ConstituentTriple):
        lines = [f"fidelity: {result.fidelity:.12f}", f"gram: {[r.value for r in result.relations]}"]
        lines += [f"  {_fmt_vec(v)}" for v in result.vectors]
    else:
        lines = [f"no symmetrized product: {result.reason}"]
    return payload, lines


def cmd_reduce(args):
    psi, meta = _load(args)
    if psi.nparticles != 3:
        raise UsageError("reduce needs a three-boson state (n = 3)")
    rho = partial_trace_one(psi)
    ev = rho.eigenvalues()
    payload = {
        "toolVersion": __version__,
        "rho": {"re": rho.matrix.real.tolist(), "im": rho.matrix.imag.tolist()},
        "eigenvalues": [float(x) for x in ev],
    }
    if meta:
        payload["state"] = meta
    lines = ["rho (two-particle reduced density):", np.array2string(rho.matrix, precision=6, suppress_small=True)]
    lines.append(f"eigenvalues: {_fmt_vec(ev)}")
    return payload, lines


def cmd_catalog(args, out):
    if args.action == "list":
        for name, e in ENTRIES.items():
            params = ", ".join(f"{k}={v:.6g}" for k, v in e.params.items())
            out.write(f"{name:28s} {e.expected.value:34s} {e.description}" + (f" [{params}]" if params else "") + "\n")
        return EXIT_OK
    if not args.name:
        raise UsageError("catalog emit needs a state name")
    params = dict(_parse_param(p) for p in args.param or [])
    psi = catalog_state(args.name, params)
    text = dumps_state(psi, name=args.name, comment=ENTRIES[args.name].description)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "properties": cmd_properties,
    "expectations": cmd_expectations,
    "decompose": cmd_decompose,
    "reduce": cmd_reduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random start (default 0)")
    common.add_argument("--starts", type=int, help="number of random starts of the property search")
    common.add_argument("--tol", type=float, help="residual threshold for accepting a property")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--quiet", action="store_true", help="suppress the human summary")

    parser = argparse.ArgumentParser(prog="bosonsep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "degree of separability of a state",
        "properties": "all rank-one properties of a state",
        "expectations": "expectation profile of one property",
        "decompose": "symmetrized-product constituents",
        "reduce": "two-particle reduced density matrix",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("state", help="JSON state file")
        if name in ("expectations", "decompose"):
            p.add_argument("--property", required=name == "expectations", help='vector literal, e.g. "[0.7071, 0.7071]"')
    p = sub.add_parser("catalog", parents=[common], help="list or emit the built-in example states")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("name", nargs="?")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a family coefficient")
    p.add_argument("--out", "-o", metavar="PATH", help="write the state file here (default stdout)")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.seed < 0:
        err.write("error: --seed must be non-negative\n")
        return EXIT_INPUT
    try:
        if args.command == "catalog":
            return cmd_catalog(args, out)
        payload, lines = COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        err.write(f"error: {exc.filename}: no such file\n")
        return EXIT_INPUT
    except (UsageError, *INPUT_ERRORS) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (BosonSepError, np.linalg.LinAlgError, ArithmeticError) as exc:
        err.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    text = dumps_json(payload)
    if args.json == "-":
        out.write(text)
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
        if not args.quiet:
            out.write("\n".join(lines) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
