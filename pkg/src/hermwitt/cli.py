"""Command-line front end.

Exit codes: 0 success or verified, 1 a mathematical check failed
(counterexample in the report), 2 invalid input, 3 a bounded search gave
up (Inconclusive or CapExceeded).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import algebras, forms, morita, octagon, rings, witt
from .errors import (
    CapExceeded,
    HermwittError,
    Inconclusive,
    InternalInconsistency,
)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_BAD_INPUT = 2
EXIT_INCONCLUSIVE = 3


def build_parser():
    p = argparse.ArgumentParser(
        prog="hermwitt",
        description="Exact hermitian forms, Witt groups, and the octagon "
        "of Witt groups over small semilocal rings.",
    )
    p.add_argument("--json", action="store_true", help="emit JSON reports")
    p.add_argument("--seed", type=int, default=0, help="seed for searches")
    sub = p.add_subparsers(dest="verb", required=True)

    ring = sub.add_parser("ring", help="inspect a base ring")
    ring.add_argument("--ring", required=True)

    wt = sub.add_parser("witt", help="Witt group tables")
    wsub = wt.add_subparsers(dest="sub", required=True)
    wtab = wsub.add_parser("table")
    wtab.add_argument("--ring", required=True)
    wtab.add_argument("--algebra", default="base")
    wtab.add_argument("--eps", default="+1")
    wtab.add_argument("--rank-cap", type=int, default=None)

    fm = sub.add_parser("form", help="operations on a single form")
    fsub = fm.add_subparsers(dest="sub", required=True)
    for name in ("diag", "hyp", "witt", "disc", "isometric"):
        q = fsub.add_parser(name)
        q.add_argument("--ring", required=True)
        q.add_argument("--algebra", default="base")
        q.add_argument("--eps", default="+1")
        if name == "hyp":
            q.add_argument("--rank", type=int, required=True)
        else:
            q.add_argument("--entries", required=True)
        if name == "isometric":
            q.add_argument("--entries2", required=True)

    oc = sub.add_parser("octagon", help="octagon data and exactness")
    osub = oc.add_subparsers(dest="sub", required=True)
    for name in ("make", "check", "finer"):
        q = osub.add_parser(name)
        q.add_argument("--ring", required=True)
        q.add_argument("--alpha", type=int, required=True)
        q.add_argument("--beta", type=int, required=True)
        q.add_argument("--etale", type=int, default=None,
                       help="tensor with a quadratic etale algebra")
        q.add_argument("--eps", default="+1")
        if name == "check":
            q.add_argument("--rank-cap", type=int, default=8)
        if name == "finer":
            q.add_argument("--part", required=True,
                           choices=["i", "ii", "iii", "iv"])
            q.add_argument("--form", required=True)
            q.add_argument("--sign", default="+1",
                           help="eps sign of the node the form lives at")
            q.add_argument("--search-cap", type=int, default=8)

    sq = sub.add_parser("sequence", help="the Lewis sequences")
    sq.add_argument("kind", choices=["five", "seven"])
    sq.add_argument("--ring", required=True)
    sq.add_argument("--alpha", type=int, required=True)
    sq.add_argument("--beta", type=int, default=None)
    sq.add_argument("--rank-cap", type=int, default=8)

    jb = sub.add_parser("jacobson", help="trace isotropy checks")
    jb.add_argument("--ring", required=True)
    jb.add_argument("--alpha", type=int, required=True)
    jb.add_argument("--beta", type=int, default=None)
    jb.add_argument("--form", required=True)
    jb.add_argument("--form2", default=None)
    return p


def parse_eps(text):
    text = text.strip()
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise ValueError("eps must be +1 or -1")


def build_algebra(ring, spec):
    spec = spec.strip()
    if spec == "base":
        return algebras.base_algebra(ring)
    if spec.startswith("etale-id:"):
        t = algebras.make_quadratic_etale(ring, int(spec.split(":")[1]))
        return algebras.with_involution(
            t, tuple(tuple(b.coords) for b in t.basis()), tag="etale-id"
        )
    if spec.startswith("etale:"):
        return algebras.make_quadratic_etale(ring, int(spec.split(":")[1]))
    if spec.startswith("quaternion:"):
        a, b = spec.split(":")[1].split(",")
        return algebras.make_quaternion(ring, int(a), int(b))
    if spec.startswith("matrix:"):
        _, n, kind = spec.split(":")
        return algebras.make_matrix_involution(ring, int(n), kind)
    raise ValueError("unknown algebra spec %r" % spec)


def parse_entries(alg, text):
    """Comma-separated diagonal entries; each a sum of integer multiples
    of basis names, e.g. "1,2" or "lam,2*mu"."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        total = alg.zero()
        for term in chunk.replace("-", "+-").split("+"):
            term = term.strip()
            if not term:
                continue
            if "*" in term:
                coef, name = term.split("*")
                coef = int(coef)
            else:
                try:
                    coef = int(term)
                    name = "1" if "1" in alg.names else alg.names[0]
                    total = total + alg.scalar(coef)
                    continue
                except ValueError:
                    coef, name = 1, term
            if name.startswith("-"):
                coef, name = -coef, name[1:]
            if name not in alg.names:
                raise ValueError("unknown basis name %r" % name)
            total = total + alg.basis_element(alg.names.index(name)).scale(coef)
        out.append(total)
    return out


def emit_report(args, payload, text_lines):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        for line in text_lines:
            print(line)


def _octagon_data(args):
    ring = rings.make_ring(args.ring)
    q = algebras.make_quaternion(ring, args.alpha, args.beta)
    if args.etale is not None:
        q = algebras.tensor_product(
            q, algebras.make_quadratic_etale(ring, args.etale)
        )
    return octagon.make_octagon(q, parse_eps(args.eps))


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_BAD_INPUT if e.code else EXIT_OK
    try:
        return _dispatch(args)
    except (Inconclusive, CapExceeded) as e:
        print("inconclusive: %s" % e, file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InternalInconsistency as e:
        print("check failed: %s" % e, file=sys.stderr)
        return EXIT_FAILED_CHECK
    except (HermwittError, ValueError) as e:
        print("invalid input: %s" % e, file=sys.stderr)
        return EXIT_BAD_INPUT


def _dispatch(args):
    if args.verb == "ring":
        ring = rings.make_ring(args.ring)
        comps = [repr(c) for c in ring.components]
        emit_report(
            args,
            {"ring": repr(ring), "components": comps,
             "enumerable": ring.is_enumerable},
            ["ring %s" % repr(ring),
             "components: %s" % ", ".join(comps)],
        )
        return EXIT_OK
    if args.verb == "witt":
        ring = rings.make_ring(args.ring)
        alg = build_algebra(ring, args.algebra)
        table = witt.enumerate_witt_group(
            alg, parse_eps(args.eps), rank_cap=args.rank_cap
        )
        payload = table.to_json()
        emit_report(
            args,
            payload,
            ["classes: %d" % table.size,
             "structure: %s" % payload["structure"]],
        )
        return EXIT_OK
    if args.verb == "form":
        return _dispatch_form(args)
    if args.verb == "octagon":
        return _dispatch_octagon(args)
    if args.verb == "sequence":
        ring = rings.make_ring(args.ring)
        if args.kind == "five":
            rep = octagon.lewis_five_term(ring, args.alpha, args.rank_cap)
        else:
            if args.beta is None:
                raise ValueError("the seven-term sequence needs --beta")
            rep = octagon.lewis_seven_term(
                ring, args.alpha, args.beta, args.rank_cap
            )
        lines = [
            "%-12s %s" % (n["node"], "exact" if n["exact"] else "INEXACT")
            for n in rep["nodes"]
        ]
        lines.append("sequence exact: %s" % rep["exact"])
        emit_report(args, rep, lines)
        return EXIT_OK if rep["exact"] else EXIT_FAILED_CHECK
    if args.verb == "jacobson":
        ring = rings.make_ring(args.ring)
        if args.beta is None:
            kind, params = "etale", (args.alpha,)
            alg = algebras.make_quadratic_etale(ring, args.alpha)
        else:
            kind, params = "quaternion", (args.alpha, args.beta)
            alg = algebras.make_quaternion(ring, args.alpha, args.beta)
        entries = parse_entries(alg, args.form)
        entries2 = parse_entries(alg, args.form2) if args.form2 else None
        res = octagon.jacobson_check(kind, ring, params, entries, entries2)
        lines = [
            "form isotropic: %s" % res["f_isotropic"],
            "trace isotropic: %s" % res["trace_isotropic"],
            "isotropy transfer: %s" % res["isotropy_equiv"],
        ]
        ok = res["isotropy_equiv"]
        if "isometry_equiv" in res:
            lines.append("isometry transfer: %s" % res["isometry_equiv"])
            ok = ok and res["isometry_equiv"]
        emit_report(args, res, lines)
        return EXIT_OK if ok else EXIT_FAILED_CHECK
    raise ValueError("unknown verb %r" % args.verb)


def _dispatch_form(args):
    ring = rings.make_ring(args.ring)
    alg = build_algebra(ring, args.algebra)
    eps = parse_eps(args.eps)
    if args.sub == "hyp":
        f = forms.make_hyperbolic(alg, eps, args.rank)
        emit_report(args, f.to_json(), ["hyperbolic form of rank %d" % f.rank])
        return EXIT_OK
    entries = parse_entries(alg, args.entries)
    f = forms.make_diagonal(alg, eps, entries)
    if args.sub == "diag":
        emit_report(
            args, f.to_json(),
            ["diagonal form of rank %d, unimodular: %s"
             % (f.rank, forms.is_unimodular(f))],
        )
        return EXIT_OK
    if args.sub == "witt":
        kernel, h = forms.witt_decompose(f)
        payload = {
            "hyperbolic_planes": h,
            "kernel_rank": kernel.rank,
            "class_zero": morita.class_zero(f),
        }
        emit_report(
            args, payload,
            ["hyperbolic planes split: %d" % h,
             "anisotropic kernel rank: %d" % kernel.rank],
        )
        return EXIT_OK
    if args.sub == "disc":
        d = forms.discriminant(f)
        payload = {
            "kind": d.kind,
            "representative": d.rep.to_json(),
            "trivial": d.trivial,
        }
        emit_report(
            args, payload,
            ["discriminant (%s class): %s, trivial: %s"
             % (d.kind, d.rep, d.trivial)],
        )
        return EXIT_OK
    if args.sub == "isometric":
        g = forms.make_diagonal(alg, eps, parse_entries(alg, args.entries2))
        verdict = forms.is_isometric(f, g)
        emit_report(args, {"isometric": verdict}, ["isometric: %s" % verdict])
        return EXIT_OK
    raise ValueError("unknown form operation")


def _dispatch_octagon(args):
    data = _octagon_data(args)
    if args.sub == "make":
        payload = {
            "t_connected": data.t_connected,
            "types": {
                "%s%+d" % k: v for k, v in data.types.items()
            },
        }
        emit_report(
            args, payload,
            ["octagon data valid",
             "T connected: %s" % data.t_connected]
            + ["type %s%+d: %s" % (k[0], k[1], v)
               for k, v in sorted(data.types.items())],
        )
        return EXIT_OK
    if args.sub == "check":
        if not data.alg.base.is_enumerable:
            raise ValueError("exactness tables need an enumerable base")
        if len(data.alg.base.components) > 1:
            reports = []
            overall = True
            for c in range(len(data.alg.base.components)):
                sub = octagon.make_octagon(
                    algebras.project_algebra(data.alg, c), parse_eps(args.eps)
                )
                rep = octagon.check_octagon_exact(sub, args.rank_cap)
                reports.append(rep)
                overall = overall and rep["exact"]
            payload = {"exact": overall, "components": reports}
            lines = ["component %d: %s" % (i, r["exact"])
                     for i, r in enumerate(reports)]
            lines.append("octagon exact: %s" % overall)
            emit_report(args, payload, lines)
            return EXIT_OK if overall else EXIT_FAILED_CHECK
        rep = octagon.check_octagon_exact(data, args.rank_cap)
        lines = [
            "node %d %-12s size %-3d %s"
            % (n["node"], n["group"], n["size"],
               "exact" if n["exact"] else "INEXACT")
            for n in rep["nodes"]
        ]
        lines.append("octagon exact: %s" % rep["exact"])
        emit_report(args, rep, lines)
        return EXIT_OK if rep["exact"] else EXIT_FAILED_CHECK
    if args.sub == "finer":
        part = args.part
        node = {"i": ("A", 1), "ii": ("B1", 1), "iii": ("A", -1),
                "iv": ("B2", 1)}[part]
        node = (node[0], node[1] * parse_eps(args.sign))
        alg, eps = data.node_spec(node)
        entries = parse_entries(alg, args.form)
        f = forms.make_diagonal(alg, eps, entries)
        which = {"i": "rho2", "ii": "pi1", "iii": "rho1", "iv": "pi2"}[part]
        pred = octagon.finer_predicate(data, part, f)
        pre = octagon.preimage_oracle(data, which, f, args.search_cap)
        agree = pred == (pre is not None)
        payload = {
            "part": part,
            "predicate": pred,
            "preimage_found": pre is not None,
            "agree": agree,
        }
        emit_report(
            args, payload,
            ["predicate: %s" % pred,
             "oracle preimage: %s" % (pre is not None),
             "agreement: %s" % agree],
        )
        return EXIT_OK if agree else EXIT_FAILED_CHECK
    raise ValueError("unknown octagon operation")


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
