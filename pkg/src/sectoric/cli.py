"""Command-line front end.

Every command prints JSON on stdout (``--emit text`` gives a plain listing
instead). Exit status: 0 for success or a positive answer, 1 for a negative
answer (the witness is printed), 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import __version__, fans, ideals, polytopes, segre, verify
from .tensor import ChartError, Tensor, TensorFormatError, central_to_cumulants, format_rational, to_system


class UsageError(ValueError):
    pass


# Argument parsing helpers ------------------------------------------------------------


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _shape(text: str) -> tuple[int, ...]:
    dims = _int_list(text)
    if any(k < 1 for k in dims):
        raise argparse.ArgumentTypeError("every factor size must be at least 1")
    return dims


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_tensor(path: str) -> Tensor:
    return Tensor.from_json(_read_text(path))


def _parse_variable(text: str) -> tuple[int, ...]:
    text = text.strip()
    if "," in text:
        return tuple(int(x) for x in text.split(","))
    if not text.isdigit():
        raise UsageError(f"cannot read variable {text!r}")
    return tuple(int(ch) for ch in text)


def _parse_monomial(text: str) -> list[tuple[int, ...]]:
    """A JSON list of index lists, or digit strings separated by spaces or ``*``."""
    text = text.strip()
    if text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed monomial JSON at line {exc.lineno}, column {exc.colno}") from None
        return [tuple(int(x) for x in v) for v in data]
    parts = [p for p in text.replace("*", " ").split() if p]
    if not parts:
        raise UsageError("empty monomial")
    return [_parse_variable(p) for p in parts]


def _label(v: Sequence[int]) -> str:
    if all(0 <= x < 10 for x in v):
        return "z" + "".join(str(x) for x in v)
    return "z[" + ",".join(str(x) for x in v) + "]"


# Output --------------------------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _text(obj: Any, indent: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{indent}{k}:")
                lines.extend(_text(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {_inline(v)}")
        return lines
    if isinstance(obj, list):
        lines = []
        for item in obj:
            if isinstance(item, dict):
                lines.append(f"{indent}-")
                lines.extend(_text(item, indent + "  "))
            else:
                lines.append(f"{indent}{_inline(item)}")
        return lines
    return [f"{indent}{_inline(obj)}"]


def _flat(v: Any) -> bool:
    if isinstance(v, dict):
        return False
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in v)


def _inline(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _render(payload: Any, emit: str) -> str:
    data = _jsonable(payload)
    if emit == "text":
        return "\n".join(_text(data))
    return json.dumps(data, indent=2)


# Commands ------------------------------------------------------------------------------


def cmd_transform(args) -> tuple[int, Any]:
    t = _read_tensor(args.input)
    if args.order is not None and sorted(args.order) != list(range(t.shape.n)):
        raise UsageError("--order must be a permutation of the factor positions")
    if args.to == "z" and args.order is not None:
        out = central_to_cumulants(to_system(t, "y"), order=args.order)
    else:
        out = to_system(t, args.to)
    return 0, out.to_dict()


def cmd_sample(args) -> tuple[int, Any]:
    sampler = segre.RationalSampler(args.seed)
    out = []
    for _ in range(args.count):
        if args.model == "segre":
            t = segre.segre_point(args.shape, sampler.factor_params(args.shape))
        elif args.model == "secant":
            t = segre.secant_point(sampler.secant_params(args.shape))
        else:
            a = sampler.factor_params(args.shape)
            b = sampler.factor_params(args.shape)
            t = segre.tangent_point(args.shape, a, b, normalize=not args.no_normalize)
        out.append(t.to_dict())
    return 0, out[0] if args.count == 1 else out


def cmd_member(args) -> tuple[int, Any]:
    t = _read_tensor(args.input)
    res = segre.membership_secant(t, args.max_left)
    payload = {"member": res.member, "flatteningsChecked": res.checked}
    if res.witness is not None:
        payload["witness"] = res.witness.to_dict()
    return (0 if res.member else 1), payload


def _polytope_data(args):
    if (args.a is None) != (args.b is None):
        raise UsageError("--a and --b go together")
    if args.a is not None:
        if any(k != 1 for k in args.shape):
            raise UsageError("--a/--b need a binary shape (all factor sizes 1)")
        n = len(args.shape)
        pts = polytopes.j_ab(n, args.a, args.b)
        hrep = polytopes.j_ab_hrep(n, args.a, args.b)
        hrep = polytopes.HRep(hrep.dim, polytopes.flag_facets(pts, hrep.inequalities))
        # drop the homogenizing coordinate for triangulating
        return pts, hrep, [p[1:] for p in pts], None
    pts = polytopes.q_points(args.shape)
    hrep = polytopes.facets_Q(args.shape)
    return pts, hrep, pts, hrep


def _triangulation_payload(args) -> dict:
    pts, _, tri_pts, tri_hrep = _polytope_data(args)
    tri = polytopes.pulling_triangulation(tri_pts, hrep=tri_hrep)
    metrics = polytopes.triangulation_metrics(tri)
    return {
        "points": [list(p) for p in pts],
        "simplices": [list(s) for s in tri.simplices],
        "metrics": metrics.to_dict(),
    }


def cmd_polytope(args) -> tuple[int, Any]:
    pts, hrep, _, _ = _polytope_data(args)
    if args.emit == "points":
        return 0, {"points": [list(p) for p in pts]}
    if args.emit == "facets":
        return 0, {"dim": hrep.dim, "facets": [h.to_dict() for h in hrep.facets()]}
    payload = _triangulation_payload(args)
    if args.emit == "metrics":
        return 0, payload["metrics"]
    return 0, payload


def cmd_triangulate(args) -> tuple[int, Any]:
    return 0, _triangulation_payload(args)


def _binary_ab(args) -> tuple[int, int, int]:
    if any(k != 1 for k in args.shape):
        raise UsageError(f"family {args.family!r} needs a binary shape (all factor sizes 1)")
    n = len(args.shape)
    a = 2 if args.a is None else args.a
    b = n if args.b is None else args.b
    return n, a, b


def _basis(args) -> tuple[list[ideals.Binomial], dict]:
    """Binomials and the lattice point of each variable for ``--family``."""
    fam = args.family
    if fam in ("bumping", "swapping", "both", "reduced"):
        n, a, b = _binary_ab(args)
        return ideals.bumping_swapping_generators(n, a, b, fam), ideals.jab_point_map(n, a, b)
    if fam == "flatquad":
        n, a, b = _binary_ab(args)
        if args.left is None:
            raise UsageError("family 'flatquad' needs --left")
        return ideals.flattening_quadrics(n, a, b, args.left), ideals.jab_point_map(n, a, b)
    if fam == "gb5":
        return ideals.gb_families(args.shape), ideals.gb_point_map(args.shape)
    if fam == "sorted":
        return ideals.basis_binomials(args.shape), ideals.gb_point_map(args.shape)
    raise UsageError(f"unknown family {fam!r}")


def _binomial_payload(b: ideals.Binomial) -> dict:
    d = b.to_dict()
    d["text"] = " ".join(_label(v) for v in b.lhs) + " - " + " ".join(_label(v) for v in b.rhs)
    return d


def cmd_ideal(args) -> tuple[int, Any]:
    basis, _ = _basis(args)
    return 0, {
        "shape": list(args.shape),
        "family": args.family,
        "count": len(basis),
        "binomials": [_binomial_payload(b) for b in basis],
    }


def _load_basis(path: str) -> list[ideals.Binomial]:
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON at line {exc.lineno}, column {exc.colno}") from None
    items = data["binomials"] if isinstance(data, dict) else data
    out = []
    for item in items:
        lhs = ideals.monomial(tuple(v) for v in item["lhs"])
        rhs = ideals.monomial(tuple(v) for v in item["rhs"])
        out.append(ideals.Binomial(lhs, rhs, bool(item.get("marked", True)), item.get("family", "")))
    return out


def cmd_reduce(args) -> tuple[int, Any]:
    if args.basis is not None:
        basis = _load_basis(args.basis)
    elif args.family is not None and args.shape is not None:
        basis, _ = _basis(args)
    else:
        raise UsageError("give --basis FILE, or --family with --shape")
    m = ideals.monomial(_parse_monomial(args.monomial))
    steps = []

    def record(old, new, rule):
        steps.append({"from": [list(v) for v in old], "to": [list(v) for v in new]})

    nf = ideals.Reducer(basis).normal_form(m, on_step=record)
    payload = {
        "monomial": [list(v) for v in m],
        "normalForm": [list(v) for v in nf],
        "text": " ".join(_label(v) for v in nf),
        "steps": len(steps),
    }
    if args.trace:
        payload["trace"] = steps
    return 0, payload


def cmd_oracle(args) -> tuple[int, Any]:
    basis, points = _basis(args)
    if args.drop is not None:
        if not 0 <= args.drop < len(basis):
            raise UsageError(f"--drop must be between 0 and {len(basis) - 1}")
        basis = basis[: args.drop] + basis[args.drop + 1 :]
    res = ideals.fiber_connectivity_oracle(points, basis, args.max_degree)
    payload = {"family": args.family, "moves": len(basis), "maxDegree": args.max_degree, **res.to_dict()}
    if res.witness is not None:
        payload["witnessText"] = [" ".join(_label(v) for v in m) for m in res.witness]
    return (0 if res.connected else 1), payload


def cmd_classify(args) -> tuple[int, Any]:
    fn = fans.classify_secant if args.variety == "secant" else fans.classify_tangential
    return 0, fn(args.shape).to_dict()


_SWEEP_COLUMNS = ("smooth", "qFactorial", "qGorenstein", "gorenstein", "terminal")


def cmd_sweep(args) -> tuple[int, Any]:
    reports = fans.sweep(args.max_n, args.max_k, args.variety, workers=args.workers)
    rows = []
    for r in reports:
        d = r.to_dict()
        rows.append({"shape": d["shape"], **{c: d[c] for c in _SWEEP_COLUMNS}, "components": len(d["components"])})
    if args.emit == "text":
        header = "shape".ljust(14) + "".join(c.ljust(13) for c in _SWEEP_COLUMNS) + "components"
        lines = [header]
        for row in rows:
            cells = "".join(_inline(row[c]).ljust(13) for c in _SWEEP_COLUMNS)
            lines.append(",".join(map(str, row["shape"])).ljust(14) + cells + str(row["components"]))
        return 0, "\n".join(lines)
    return 0, {"variety": args.variety, "maxN": args.max_n, "maxK": args.max_k, "table": rows}


def cmd_verify(args) -> tuple[int, Any]:
    results = verify.verify_suite(args.only)
    ok = verify.suite_ok(results)
    if args.emit == "text":
        lines = [f"{r.status.upper():12} {r.name:40} {r.detail}" for r in results]
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} passed")
        return (0 if ok else 1), "\n".join(lines)
    return (0 if ok else 1), {"ok": ok, "checks": [r.to_dict() for r in results]}


# Parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sectoric", description="Secant and tangential varieties of Segre products.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, helptext: str, emit_choices=("json", "text"), default="json"):
        sp = sub.add_parser(name, help=helptext, description=helptext)
        sp.add_argument("--emit", choices=emit_choices, default=default)
        return sp

    sp = add("transform", "convert a tensor between x, y and z coordinates (exit 2 on bad input)")
    sp.add_argument("--input", required=True, help="tensor JSON file, or - for stdin")
    sp.add_argument("--to", choices=("x", "y", "z"), required=True)
    sp.add_argument("--order", type=_int_list, help="factor order for the cumulants, 0-based")
    sp.set_defaults(run=cmd_transform)

    sp = add("sample", "draw seeded rational points of a model")
    sp.add_argument("--model", choices=("segre", "secant", "tangent"), required=True)
    sp.add_argument("--shape", type=_shape, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--no-normalize", action="store_true", help="drop the 1/n factor of tangent points")
    sp.set_defaults(run=cmd_sample)

    sp = add("member", "border rank at most 2? exit 0 yes, 1 no (witness minor printed)")
    sp.add_argument("--input", required=True)
    sp.add_argument("--max-left", type=int)
    sp.set_defaults(run=cmd_member)

    for name, helptext, emits, default, fn in (
        ("polytope", "lattice points, facets or triangulation of the polytope",
         ("points", "facets", "triangulation", "metrics"), "points", cmd_polytope),
        ("triangulate", "pulling triangulation and its volumes", ("json", "text"), "json", cmd_triangulate),
    ):  # fmt: skip
        sp = add(name, helptext, emits, default)
        sp.add_argument("--shape", type=_shape, required=True)
        sp.add_argument("--a", type=int)
        sp.add_argument("--b", type=int)
        sp.set_defaults(run=fn)

    families = ("bumping", "swapping", "both", "reduced", "flatquad", "gb5", "sorted")
    sp = add("ideal", "list binomials of a family")
    sp.add_argument("--shape", type=_shape, required=True)
    sp.add_argument("--family", choices=families, required=True)
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--left", type=_int_list, help="left factors of the flattening, 0-based")
    sp.set_defaults(run=cmd_ideal)

    sp = add("reduce", "normal form of a monomial")
    sp.add_argument("--basis", help="JSON file written by the ideal command")
    sp.add_argument("--family", choices=families)
    sp.add_argument("--shape", type=_shape)
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--left", type=_int_list)
    sp.add_argument("--monomial", required=True, help='e.g. "1100 0011" or [[1,1,0,0],[0,0,1,1]]')
    sp.add_argument("--trace", action="store_true")
    sp.set_defaults(run=cmd_reduce)

    sp = add("oracle", "are all fibers up to a degree connected? exit 0 yes, 1 no (witness printed)")
    sp.add_argument("--shape", type=_shape, required=True)
    sp.add_argument("--family", choices=families, default="both")
    sp.add_argument("--a", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--left", type=_int_list)
    sp.add_argument("--max-degree", type=int, default=3)
    sp.add_argument("--drop", type=int, help="remove the move with this index first")
    sp.set_defaults(run=cmd_oracle)

    sp = add("classify", "singularity report for the secant or tangential variety")
    sp.add_argument("--variety", choices=("secant", "tangential"), default="secant")
    sp.add_argument("--shape", type=_shape, required=True)
    sp.set_defaults(run=cmd_classify)

    sp = add("sweep", "classification table over all sorted shapes")
    sp.add_argument("--variety", choices=("secant", "tangential"), default="secant")
    sp.add_argument("--max-n", type=int, default=5)
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(run=cmd_sweep)

    sp = add("verify", "run the worked-example regression suite; exit 1 if a check fails")
    sp.add_argument("--only", nargs="*", help="run checks whose names start with these prefixes")
    sp.set_defaults(run=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Run one command; return the exit status and the text for stdout."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    try:
        code, payload = args.run(args)
    except (TensorFormatError, ChartError, UsageError, ValueError, KeyError, OSError) as exc:
        message = str(exc) if not isinstance(exc, KeyError) else f"missing field {exc}"
        return 2, json.dumps({"error": message})
    if isinstance(payload, str):
        return code, payload
    emit = args.emit if args.emit in ("json", "text") else "json"
    return code, _render(payload, emit)


def main(argv: Sequence[str] | None = None) -> None:
    code, out = run(argv)
    if out:
        stream = sys.stdout if code != 2 else sys.stderr
        print(out, file=stream)
    sys.exit(code)


__all__ = ["build_parser", "main", "run"]

if __name__ == "__main__":
    main()
