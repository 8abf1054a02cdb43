"""Command-line front end: ``horocarnot <command> [options]``.

Exit codes: 0 ok, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import algebra as alg_mod
from . import norms as norm_mod
from .blowup import EmptyBlowup, PiecewiseLinearFn, assemble_principal, set_blowup
from .rational import format_rational, format_vector, parse_number, parse_vector

DEFAULT_SEED = 0


class InputError(ValueError):
    pass


# --------------------------------------------------------------------------
# Input parsing
# --------------------------------------------------------------------------

def _load_json(text_or_path: str) -> Any:
    p = Path(text_or_path)
    try:
        if p.suffix == ".json" or p.exists():
            return json.loads(p.read_text())
        return json.loads(text_or_path)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {text_or_path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {text_or_path}: {exc}") from exc


def load_group(spec: str | None) -> alg_mod.GradedLieAlgebra:
    if spec is None:
        raise InputError("--group is required")
    if Path(spec).exists() or spec.endswith(".json") or spec.lstrip().startswith("{"):
        return alg_mod.from_config(_load_json(spec))
    return alg_mod.preset(spec)


def load_norm(args) -> norm_mod.LayeredSupNorm:
    if args.norm:
        cfg = _load_json(args.norm)
        group = load_group(args.group) if args.group else None
        return norm_mod.norm_from_config(cfg, group)
    return norm_mod.homogeneous_sup_norm(load_group(args.group))


def parse_point(text: str | None, exact: bool = True) -> tuple:
    if text is None:
        raise InputError("--point is required")
    items = [s.strip() for s in text.strip("[]() ").split(",") if s.strip()]
    if exact:
        try:
            return parse_vector(items)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad point {text!r}: {exc}") from exc
    return tuple(float(s) if "." in s or "e" in s.lower() else parse_number(s) for s in items)


def first_layer_from_text(text: str, dim: int) -> norm_mod.LayerNorm:
    """``sup``, ``euclidean``, ``euclidean:<scale>`` or a JSON layer spec/file."""
    head, _, arg = text.partition(":")
    if head == "sup":
        return norm_mod.sup_layer(dim)
    if head == "euclidean":
        return norm_mod.euclidean(dim, parse_vector([arg or "1"])[0])
    return norm_mod.layer_from_config(_load_json(text))


# --------------------------------------------------------------------------
# Commands: each returns (payload, rows-or-None, ok)
# --------------------------------------------------------------------------

def cmd_mult(args):
    alg = load_group(args.group)
    p, q = parse_point(args.p), parse_point(args.q)
    prod = alg.multiply(p, q)
    out = {"group": alg.name, "p": format_vector(p), "q": format_vector(q), "product": format_vector(prod)}
    return out, [["product"] + format_vector(prod)], True


def cmd_norm(args):
    norm = load_norm(args)
    x = parse_point(args.point)
    exact = norm.evaluate_exact(x)
    out = {"point": format_vector(x), "norm": norm.evaluate(x),
           "norm_exact": None if exact is None else format_rational(exact),
           "layer_values": [format_rational(norm.layer_value(x, j)) for j in range(1, norm.step + 1)]}
    return out, [["norm", out["norm"], out["norm_exact"] or ""]], True


def cmd_classify(args):
    norm = load_norm(args)
    face = norm.classify(parse_point(args.point))
    return face.as_dict(), [["label", face.label]], True


def _family_payload(fam) -> dict:
    return {"face": fam.face.as_dict(),
            "partials": [pt.label for pt in fam.partials],
            "functionals": [format_vector(g) for g in fam.distinct_functionals()],
            "principal": fam.principal.to_config(),
            "constraint_pds": [{k: (format_vector(v) if isinstance(v, (list, tuple)) else v) for k, v in d.items()}
                               for d in fam.constraint_pds()]}


def cmd_pansu(args):
    norm = load_norm(args)
    fam = assemble_principal(norm, parse_point(args.point))
    out = _family_payload(fam)
    rows = [["piece"] + format_vector(pc.coeffs) + [format_rational(pc.const)] for pc in fam.principal.pieces]
    return out, rows, True


def cmd_blowup(args):
    norm = load_norm(args)
    p = parse_point(args.point)
    t = None
    if args.translate:
        t = tuple(float("inf") if s.strip() in ("inf", "+inf") else parse_number(s.strip())
                  for s in args.translate.split(","))
    if args.set:
        kind, halfspaces = set_blowup(norm, p, t)
        out = {"kind": kind, "halfspaces": [h.as_dict() for h in halfspaces]}
        return out, [["kind", kind]], True
    fam = assemble_principal(norm, p)
    f = fam.translate(t) if t is not None else fam.principal
    return {"function": f.to_config()}, None, True


def cmd_heis_boundary(args):
    from .heisenberg import boundary_report, critical_lambda

    n = args.n
    layer = first_layer_from_text(args.first_layer, 2 * n)
    lam = parse_vector([args.lam])[0]
    rep = boundary_report(n, layer, lam, seed=args.seed)
    out = rep.as_dict()
    out["critical"] = critical_lambda(layer).as_dict()
    out["seed"] = args.seed
    rows = [[f.name, f.dim, f.generator_count] for f in rep.families]
    return out, [["family", "dim", "generators"]] + rows, True


def cmd_filiform_dim(args):
    from .filiform import boundary_dimension, expected_dimension

    ns = range(args.n, (args.to or args.n) + 1)
    results = []
    for n in ns:
        r = boundary_dimension(n, seed=args.seed)
        results.append({"n": n, "dimension": r.dimension, "full_dimensional": r.full_dimensional,
                        "expected": expected_dimension(n),
                        "witness": {"fixed": r.witness.as_dict()["fixed"], "free": r.witness.as_dict()["free"]},
                        "witness_face": r.witness.describe()})
    ok = all(r["dimension"] == r["expected"] for r in results)
    out = results[0] if len(results) == 1 else {"table": results}
    rows = [["n", "dimension", "expected", "witness"]] + \
        [[r["n"], r["dimension"], r["expected"], r["witness_face"]] for r in results]
    return out, rows, ok


def cmd_verify(args):
    from . import oracle

    if args.mode == "kuratowski":
        examples = oracle.square_examples()
        if args.example not in examples:
            raise InputError(f"unknown example {args.example!r}; choose from {sorted(examples)}")
        p_rule, eps_rule, expected = examples[args.example]
        rep = oracle.sampled_kuratowski(alg_mod.abelian(2), oracle.unit_square(), p_rule, eps_rule, expected)
        out = rep.as_dict()
        out["example"] = args.example
        rows = [["n", "distance"]] + [[n, d] for n, d in zip(rep.ns, rep.distances)]
        return out, rows, rep.passed
    norm = load_norm(args)
    p = parse_point(args.point)
    if args.function:
        f = PiecewiseLinearFn.from_config(_load_json(args.function))
    else:
        f = assemble_principal(norm, p).principal
    check = oracle.check_blowup if args.mode == "blowup" else oracle.check_horofunction_embedding
    rep = check(norm, p, f, seed=args.seed)
    out = rep.as_dict()
    out.update({"mode": args.mode, "seed": args.seed})
    rows = [["t", "max_error"]] + [[t, e] for t, e in zip(rep.steps, rep.max_errors)]
    return out, rows, rep.passed


def cmd_rescale(args):
    alg = load_group(args.group)
    if args.norm:
        layers = load_norm(args).layers
    else:
        layers = norm_mod.homogeneous_sup_norm(alg).layers
    res = norm_mod.guivarch_rescale(alg, layers, budget=args.budget, seed=args.seed)
    out = res.as_dict()
    out["seed"] = args.seed
    return out, [["layer", "lambda"]] + [[j + 1, format_rational(l)] for j, l in enumerate(res.lambdas)], res.verified


def cmd_report(args):
    from . import plotting

    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.kind == "heis":
        from .heisenberg import boundary_report

        layer = first_layer_from_text(args.first_layer, 2)
        lam = parse_vector([args.lam])[0]
        norm = norm_mod.heisenberg_norm(alg_mod.heisenberg(1), layer, lam)
        X = norm.sample_sphere(np.random.default_rng(args.seed), args.samples)
        labels = plotting.sphere_labels(norm, X)
        plotting.write_sphere_csv(outdir / "sphere.csv", X, labels)
        plotting.plot_sphere(outdir / "sphere.png", X, labels, title=f"lambda = {args.lam}")
        summary = boundary_report(1, layer, lam, seed=args.seed).as_dict()
        files = ["sphere.csv", "sphere.png"]
    else:
        from .filiform import boundary_dimension

        ns = list(range(3, args.max_n + 1))
        res = [boundary_dimension(n, seed=args.seed) for n in ns]
        rows = [[r.n, r.dimension, r.n - 1, r.witness.describe()] for r in res]
        plotting.write_table_csv(outdir / "filiform_dims.csv", ["n", "dimension", "full", "witness"], rows)
        plotting.plot_dimensions(outdir / "filiform_dims.png", ns, [r.dimension for r in res])
        summary = {"table": [r.as_dict() for r in res]}
        files = ["filiform_dims.csv", "filiform_dims.png"]
    summary["seed"] = args.seed
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return {"kind": args.kind, "files": files + ["summary.json"], "out_dir": str(outdir)}, None, True


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="preset name (H3, L5, R2) or JSON group spec/file")
    common.add_argument("--norm", help="JSON norm spec or file")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="horocarnot", description="Horofunction boundaries of Carnot groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mult", parents=[common], help="group product p * q")
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(func=cmd_mult)

    for name, func, text in (("norm", cmd_norm, "layered sup norm of a point"),
                             ("classify", cmd_classify, "sphere region of a unit-norm point"),
                             ("pansu", cmd_pansu, "principal blow-up at a sphere point")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--point", required=True, help="comma-separated rationals")
        p.set_defaults(func=func)

    p = sub.add_parser("blowup", parents=[common], help="translated or set blow-up")
    p.add_argument("--point", required=True)
    p.add_argument("--translate", help="comma-separated t_j (use inf to drop a piece)")
    p.add_argument("--set", action="store_true", help="blow-up of the unit ball instead")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("heis-boundary", parents=[common], help="boundary families of H_{2n+1}")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--first-layer", default="euclidean", help="sup | euclidean[:scale] | JSON layer spec")
    p.add_argument("--lambda", dest="lam", default="1")
    p.set_defaults(func=cmd_heis_boundary)

    p = sub.add_parser("filiform-dim", parents=[common], help="boundary dimension of L_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--to", type=int, help="last n of a range")
    p.set_defaults(func=cmd_filiform_dim)

    p = sub.add_parser("verify", parents=[common], help="numerical oracle checks")
    p.add_argument("--point")
    p.add_argument("--function", help="PL function JSON (default: the principal blow-up)")
    p.add_argument("--mode", choices=("blowup", "embedding", "kuratowski"), default="blowup")
    p.add_argument("--example", default="fixed-base", help="Kuratowski fixture name")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rescale", parents=[common], help="sampled Guivarc'h rescaling")
    p.add_argument("--budget", type=int, default=20_000)
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("report", parents=[common], help="CSV point clouds, PNG figures and a JSON summary")
    p.add_argument("kind", choices=("heis", "filiform"))
    p.add_argument("--out-dir", default="report")
    p.add_argument("--first-layer", default="euclidean")
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument("--max-n", type=int, default=8)
    p.set_defaults(func=cmd_report)
    return parser


def _render(payload, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    if rows is None:
        raise InputError("this command has no CSV form")
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, rows, ok = args.func(args)
        text = _render(payload, rows, args.format)
    except (InputError, ValueError, KeyError, EmptyBlowup, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
