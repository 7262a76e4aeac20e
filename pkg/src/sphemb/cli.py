"""Command-line front end: one subcommand per public operation, JSON out.

Every invocation prints exactly one JSON document to standard output, also on
errors.  Exit codes: 0 success, 2 usage or parameter errors, 3 domain errors,
4 oracle instability.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import oracle
from .divisor_model import (
    ForeignLabelError,
    NonIntegralPairingError,
    PicardMembershipError,
    ProvisionalModelError,
    canonical_divisor,
    class_group_data,
    class_of,
    is_principal,
    model_to_json_dict,
    principal_divisor,
    validate_model,
    wonderful_section_divisor,
)
from .families import FamilyBundle, FamilyParameterError, build_family
from .rootdata import LatticeMismatchError


class UsageError(ValueError):
    pass


class DomainError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sphemb", add_help=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--family", required=True, help="family specifier, e.g. monoid:m=3")
        p.add_argument("--trials", type=int, default=8)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true", default=True, help="JSON output (always on)")

    p = sub.add_parser("class-group")
    common(p)
    p = sub.add_parser("canonical")
    common(p)
    p = sub.add_parser("divisor")
    common(p)
    p.add_argument("--chi", required=True, help="sparse character, label:coeff,label:coeff")
    p = sub.add_parser("gorenstein")
    common(p)
    p = sub.add_parser("class-of")
    common(p)
    p.add_argument("--divisor", required=True, help="sparse divisor, label:coeff,label:coeff")
    p = sub.add_parser("verify")
    common(p)
    p.add_argument("--oracle", action="store_true", default=True, help="run the oracle suite (always on)")
    p = sub.add_parser("wonderful-section")
    common(p)
    p.add_argument("--chi", required=True)
    p = sub.add_parser("model")
    common(p)
    p.add_argument("--dump", action="store_true", default=False)
    return parser


def _split_top_level(text: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        current.append(ch)
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def _parse_sparse(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for token in _split_top_level(text):
        label, sep, value = token.rpartition(":")
        if not sep or not label:
            raise UsageError(f"malformed entry {token!r}; expected label:coefficient")
        try:
            coeff = int(value)
        except ValueError:
            raise UsageError(f"coefficient {value!r} is not an integer") from None
        out[label.strip()] = out.get(label.strip(), 0) + coeff
    if not out:
        raise UsageError("empty label:coefficient list")
    return out


def _divisor_dict(model_or_order, divisor) -> dict[str, int]:
    order = model_or_order if isinstance(model_or_order, tuple) else model_or_order.label_order
    return {lab: divisor.coefficient(lab) for lab in order if divisor.coefficient(lab) != 0}


def _character_dict(model, chi) -> dict[str, int]:
    return {
        lab: c for lab, c in zip(model.weight_lattice.labels, chi.coords) if c != 0
    }


def _require_model(bundle: FamilyBundle):
    if bundle.model is None:
        raise DomainError(f"family {bundle.name!r} provides a matrix realization only")
    return bundle.model


def _dispatch(ns) -> dict:
    bundle = build_family(ns.family, trials=ns.trials, seed=ns.seed)

    if ns.command == "class-group":
        model = _require_model(bundle)
        data = class_group_data(model)
        return {
            "free_rank": data.presentation.free_rank,
            "invariant_factors": list(data.presentation.invariant_factors),
            "generators": list(data.generators) if data.generators is not None else None,
        }

    if ns.command == "canonical":
        model = _require_model(bundle)
        return {"divisor": _divisor_dict(model, canonical_divisor(model))}

    if ns.command == "divisor":
        model = _require_model(bundle)
        try:
            chi = model.character_from_mapping(_parse_sparse(ns.chi))
        except KeyError as e:
            raise DomainError(str(e)) from None
        return {
            "character": _character_dict(model, chi),
            "divisor": _divisor_dict(model, principal_divisor(model, chi)),
        }

    if ns.command == "gorenstein":
        model = _require_model(bundle)
        principal, witness = is_principal(model, canonical_divisor(model))
        return {
            "gorenstein": principal,
            "witness_character": _character_dict(model, witness) if principal else None,
        }

    if ns.command == "class-of":
        model = _require_model(bundle)
        divisor = model.divisor(_parse_sparse(ns.divisor))
        coords = class_of(model, divisor)
        return {
            "free": list(coords.free),
            "torsion": list(coords.torsion),
            "generators": list(coords.generators) if coords.generators is not None else None,
            "zero": coords.is_zero,
        }

    if ns.command == "verify":
        report = oracle.verification_report(bundle.model, bundle.realization, trials=ns.trials, seed=ns.seed)
        doc = report.to_json_dict()
        if bundle.model is not None:
            report_v = validate_model(bundle.model)
            doc["model_validation"] = {"ok": report_v.ok, "failures": list(report_v.failures)}
        if not report.stable:
            raise oracle.OracleInstabilityError(json.dumps(doc, separators=(",", ":")))
        return doc

    if ns.command == "wonderful-section":
        if bundle.wonderful is None:
            raise DomainError(f"family {bundle.name!r} has no wonderful-compactification data")
        wm = bundle.wonderful
        chi = wm.lattice.zero_character()
        for lab, coeff in _parse_sparse(ns.chi).items():
            try:
                chi = chi + coeff * wm.lattice.basis_character(lab)
            except KeyError as e:
                raise DomainError(str(e)) from None
        divisor = wonderful_section_divisor(wm, chi)
        return {"divisor": _divisor_dict(wm.color_ids, divisor)}

    if ns.command == "model":
        model = _require_model(bundle)
        if not ns.dump:
            raise UsageError("the model subcommand requires --dump")
        return model_to_json_dict(model)

    raise UsageError(f"unknown command {ns.command!r}")


def _emit(stream, doc: dict):
    stream.write(json.dumps(doc, separators=(",", ":")) + "\n")


def run(argv, stdout=None) -> int:
    """Dispatch one invocation; returns the process exit code."""
    stdout = stdout or sys.stdout
    command = argv[0] if argv else None
    try:
        ns = _build_parser().parse_args(argv)
    except UsageError as e:
        _emit(stdout, {"command": command, "inputs": {}, "status": "error", "message": str(e)})
        return 2

    inputs = {"family": ns.family}
    for key in ("chi", "divisor", "trials", "seed"):
        if hasattr(ns, key):
            inputs[key] = getattr(ns, key)

    try:
        result = _dispatch(ns)
    except (UsageError, FamilyParameterError) as e:
        _emit(stdout, {"command": ns.command, "inputs": inputs, "status": "error", "message": str(e)})
        return 2
    except (
        DomainError,
        ForeignLabelError,
        NonIntegralPairingError,
        ProvisionalModelError,
        PicardMembershipError,
        LatticeMismatchError,
        oracle.SemiInvarianceError,
        oracle.IdenticallyZeroError,
    ) as e:
        _emit(stdout, {"command": ns.command, "inputs": inputs, "status": "error", "message": str(e)})
        return 3
    except oracle.OracleInstabilityError as e:
        _emit(stdout, {"command": ns.command, "inputs": inputs, "status": "error", "message": str(e)})
        return 4

    _emit(stdout, {"command": ns.command, "inputs": inputs, "result": result, "status": "ok"})
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
