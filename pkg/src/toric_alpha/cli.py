"""Command-line front end: ``toric-alpha <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Callable, Optional

from .catalog import CatalogEntry, InputError, catalog, load_entry
from .exact import RatVec, rat_str
from .invariants import (
    ConsistencyError,
    NoInvariantSubspace,
    alpha_kG,
    alpha_km,
    alpha_via_orbits,
    c_general,
    k_zero,
    kahler_einstein_bound,
    stabilization_report,
    star_p_check,
    symmetry_alpha_bound,
)
from .oracle import alpha_km_bruteforce, c_star_bisection, ehrhart_fit_check
from .polytope import (
    PolytopeError,
    ehrhart_count,
    integrality_check,
    lattice_points,
    smoothness_check,
)
from .symmetry import (
    FiniteGroup,
    GroupError,
    automorphism_group,
    cyclic_subgroups,
    group_from_spec,
    orbit_decomposition,
    subgroup_closure,
    UnimodularMap,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- parsing helpers


def parse_group_spec(text: str):
    """``trivial`` | ``full-aut`` | ``gens:[[a,b],[c,d]];[[...]]`` | JSON ``{"generators": ...}``."""
    text = text.strip()
    if text in ("trivial", "full-aut"):
        return text
    try:
        if text.startswith("gens:"):
            body = text[len("gens:"):].strip()
            mats = [json.loads(part) for part in body.split(";") if part.strip()]
            return mats
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed group specification {text!r}: {exc}") from exc
    if isinstance(data, str) and data in ("trivial", "full-aut"):
        return data
    if isinstance(data, dict) and isinstance(data.get("generators"), list):
        return data["generators"]
    raise UsageError(f"malformed group specification {text!r}")


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        n = args.threads
    else:
        env = os.environ.get("TORIC_ALPHA_THREADS")
        if env is None or env == "":
            return 1
        try:
            n = int(env)
        except ValueError as exc:
            raise UsageError(f"TORIC_ALPHA_THREADS={env!r} is not an integer") from exc
    if n < 1:
        raise UsageError("thread count must be positive")
    return n


def _entry(args) -> CatalogEntry:
    source = args.input_opt if args.input_opt is not None else args.input
    if source is None:
        raise UsageError("no input given: pass a catalog name, a JSON file, or --input -")
    return load_entry(source)


def _group(entry: CatalogEntry, spec_text: str):
    p = entry.polytope()
    aut = automorphism_group(p)
    spec = parse_group_spec(spec_text)
    if isinstance(spec, list):
        for m in spec:
            if len(m) != p.dim or any(not isinstance(r, list) or len(r) != p.dim for r in m):
                raise UsageError(f"generator {m!r} is not a {p.dim}x{p.dim} matrix")
    return p, group_from_spec(spec, p, aut)


def _emit(payload: dict, fmt: str, text_lines: Optional[list] = None) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines if text_lines is not None else _text_lines(payload):
            print(line)


def _text_lines(payload: dict, indent: str = "") -> list:
    lines = []
    for key, val in payload.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text_lines(val, indent + "  "))
        elif isinstance(val, list):
            lines.append(f"{indent}{key}: {_flat(val)}")
        else:
            lines.append(f"{indent}{key}: {_flat(val)}")
    return lines


def _flat(val) -> str:
    if isinstance(val, list):
        return "[" + ", ".join(_flat(v) for v in val) + "]"
    if val is None:
        return "-"
    if isinstance(val, bool):
        return "yes" if val else "no"
    return str(val)


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    e = _entry(args)
    p = e.polytope()
    sm = smoothness_check(e.rays)
    payload = {
        "name": e.name,
        "dim": e.rays.dim,
        "rays": e.rays.to_json(),
        "vertices": p.vertices_json(),
        "smooth": sm.passed,
        "smoothness_witness": None
        if sm.passed
        else {
            "facet_rays": [[int(c) for c in r] for r in sm.facet],
            "determinant": None if sm.determinant is None else rat_str(sm.determinant),
        },
        "integral": integrality_check(p),
        "aut_order": automorphism_group(p).order,
    }
    _emit(payload, args.format)
    return EXIT_OK


def cmd_alpha(args) -> int:
    e = _entry(args)
    p, h = _group(e, args.group)
    res = alpha_kG(p, e.rays, h, args.k)
    orb = alpha_via_orbits(p, e.rays, h, args.k)
    payload = res.to_json()
    payload["glct_kG"] = rat_str(res.value)
    payload["orbit_value"] = rat_str(orb.value)
    payload["paths_agree"] = res.value == orb.value
    payload["smooth"] = smoothness_check(e.rays).passed
    payload["kahler_einstein_bound"] = kahler_einstein_bound(res.value, p.dim)
    _emit(payload, args.format)
    return EXIT_OK if res.value == orb.value else EXIT_VERIFY_FAILED


def cmd_alpha_km(args) -> int:
    e = _entry(args)
    p = e.polytope()
    try:
        res = alpha_km(p, e.rays, args.k, args.m, threads=_threads(args))
    except NoInvariantSubspace as exc:
        payload = {"invariant": "alpha_km", "value": None, "outcome": "no-invariant-subspace",
                   "detail": str(exc), "k": args.k, "m": args.m, "group_order": 1}
        _emit(payload, args.format)
        return EXIT_OK
    _emit(res.to_json(), args.format)
    return EXIT_OK


def cmd_star_p(args) -> int:
    e = _entry(args)
    rep = star_p_check(e.polytope(), e.rays)
    _emit(rep.to_json(), args.format)
    return EXIT_OK


def cmd_stabilize(args) -> int:
    e = _entry(args)
    rep = stabilization_report(e.polytope(), e.rays, args.m, kmax=args.kmax, threads=_threads(args))
    _emit(rep.to_json(), args.format)
    return EXIT_OK


def cmd_orbits(args) -> int:
    e = _entry(args)
    p, h = _group(e, args.group)
    dec = orbit_decomposition(h, p, args.k)
    payload = {"k": args.k, "group_order": h.order, "count": len(dec)}
    payload["orbits"] = dec.to_json()["orbits"]
    if args.format == "text":
        lines = [f"k: {args.k}", f"group_order: {h.order}", f"count: {len(dec)}"]
        for i, o in enumerate(dec.orbits, 1):
            pts = " ".join("(" + ",".join(v.to_json()) + ")" for v in o)
            lines.append(f"orbit {i}: {pts}")
        _emit(payload, "text", lines)
    else:
        _emit(payload, "json")
    return EXIT_OK


def cmd_ehrhart(args) -> int:
    e = _entry(args)
    p = e.polytope()
    kmax = args.kmax if args.kmax is not None else p.dim + 3
    if kmax < p.dim + 2:
        raise UsageError(f"--kmax must be at least {p.dim + 2}")
    fit = ehrhart_fit_check(p, kmax)
    _emit(fit.to_json(), args.format)
    return EXIT_OK if fit.passed else EXIT_VERIFY_FAILED


def cmd_k0(args) -> int:
    e = _entry(args)
    p, h = _group(e, args.group)
    res = k_zero(p, e.rays, h)
    payload = res.to_json()
    payload["group_order"] = h.order
    _emit(payload, args.format)
    return EXIT_OK


# ---------------------------------------------------------------- report


def _group_label(h: FiniteGroup, full: FiniteGroup) -> str:
    if h.order == 1:
        return "trivial"
    if h.order == full.order:
        return "full"
    gen = h.generators[0] if h.generators else h.elements[1]
    return "cyclic " + json.dumps(gen.to_json(), separators=(",", ":"))


def report_rows(threads: int = 1) -> list:
    rows = []
    for e in catalog():
        p = e.polytope()
        aut = automorphism_group(p)
        groups = [FiniteGroup.trivial(p.dim)]
        groups += [h for h in cyclic_subgroups(aut) if 1 < h.order < aut.order]
        groups.append(aut)
        star = star_p_check(p, e.rays)
        for h in groups:
            a = alpha_kG(p, e.rays, h)
            orbit_vals = [alpha_via_orbits(p, e.rays, h, k).value for k in (1, 2)]
            rows.append(
                {
                    "entry": e.name,
                    "dim": p.dim,
                    "group": _group_label(h, aut),
                    "group_order": h.order,
                    "alpha": rat_str(a.value),
                    "glct": rat_str(a.value),
                    "witness": a.witness_point.to_json(),
                    "orbit_paths_agree": all(v == a.value for v in orbit_vals),
                    "k0": k_zero(p, e.rays, h).k0,
                    "star_p": star.holds,
                }
            )
    return rows


def grassmannian_rows(threads: int = 1) -> list:
    out = []
    for e in catalog():
        p = e.polytope()
        if p.dim != 2:
            continue
        vals = [rat_str(alpha_km(p, e.rays, k, 2, threads=threads).value) for k in (1, 2, 3)]
        out.append({"entry": e.name, "m": 2, "k1": vals[0], "k2": vals[1], "k3": vals[2]})
    return out


def cmd_report(args) -> int:
    threads = _threads(args)
    rows = report_rows(threads)
    grass = grassmannian_rows(threads)
    if args.format == "json":
        _emit({"alpha_table": rows, "grassmannian": grass}, "json")
        return EXIT_OK
    head = ["entry", "group", "|H|", "alpha", "glct", "witness", "paths", "k0", "star_p"]
    table = [head]
    for r in rows:
        table.append(
            [
                r["entry"],
                r["group"],
                str(r["group_order"]),
                r["alpha"],
                r["glct"],
                "(" + ",".join(r["witness"]) + ")",
                "agree" if r["orbit_paths_agree"] else "DIFFER",
                str(r["k0"]),
                "holds" if r["star_p"] else "fails",
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in table]
    lines.append("")
    lines.append("alpha_{k,2} over the torus (surfaces)")
    gtab = [["entry", "k=1", "k=2", "k=3"]] + [[g["entry"], g["k1"], g["k2"], g["k3"]] for g in grass]
    gw = [max(len(row[i]) for row in gtab) for i in range(4)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, gw)).rstrip() for row in gtab]
    _emit({}, "text", lines)
    return EXIT_OK


# ---------------------------------------------------------------- verify


def _p2_subgroup(mat) -> Callable:
    def build():
        e = _named("p2")
        p = e.polytope()
        return subgroup_closure([UnimodularMap.of(mat)], automorphism_group(p))

    return build


def _named(name: str) -> CatalogEntry:
    return load_entry(name)


def verification_checks(threads: int = 1) -> list:
    """``(description, expected, thunk)`` triples; each thunk returns the observed value."""
    checks = []
    swap = [[0, 1], [1, 0]]
    cyc3 = [[-1, -1], [1, 0]]

    def alpha_both(name, group):
        def run():
            e = _named(name)
            p = e.polytope()
            aut = automorphism_group(p)
            if group == "trivial":
                h = FiniteGroup.trivial(p.dim)
            elif group == "full":
                h = aut
            else:
                h = subgroup_closure([UnimodularMap.of(group)], aut)
            vals = {alpha_kG(p, e.rays, h, k).value for k in (1, 2, 3)}
            vals |= {alpha_via_orbits(p, e.rays, h, k).value for k in (1, 2, 3)}
            return rat_str(vals.pop()) if len(vals) == 1 else "paths disagree"

        return run

    table = [
        ("p2", "trivial", "1/3"), ("p2", swap, "1/3"), ("p2", cyc3, "1"), ("p2", "full", "1"),
        ("dp1", "trivial", "1/3"), ("dp1", "full", "1/2"),
        ("dp2", "trivial", "1/3"), ("dp2", "full", "1/3"),
        ("dp3", "trivial", "1/2"), ("dp3", [[0, 1], [1, 0]], "1/2"), ("dp3", "full", "1"),
        ("p1xp1", "trivial", "1/2"), ("p1xp1", "full", "1"),
    ]
    for name, group, expected in table:
        label = group if isinstance(group, str) else json.dumps(group, separators=(",", ":"))
        checks.append((f"alpha {name} H={label} (vertex and orbit paths, k=1..3)", expected,
                       alpha_both(name, group)))

    for k in range(1, 5):
        def run(k=k):
            e = _named("p2")
            p = e.polytope()
            a = alpha_km(p, e.rays, k, 2, threads=threads).value
            b = alpha_km_bruteforce(p, e.rays, k, 2).value
            return rat_str(a) if a == b else f"search {rat_str(a)} vs brute force {rat_str(b)}"

        checks.append((f"alpha_{{{k},2}} p2 (search and brute force)", rat_str(Fraction(k, 3 * k - 1)), run))

    for name, holds in [("p2", True), ("dp1", True), ("dp2", True), ("dp3", False),
                        ("p1xp1", False), ("p2xp1", False), ("p1cubed", False)]:
        def run(name=name):
            e = _named(name)
            return star_p_check(e.polytope(), e.rays).holds

        checks.append((f"star-p {name}", holds, run))

    for name, order in [("p2", 6), ("dp1", 2), ("dp2", 2), ("dp3", 12), ("p1xp1", 8)]:
        checks.append((f"|Aut P| {name}", order,
                       lambda name=name: automorphism_group(_named(name).polytope()).order))

    for mat, count in [(swap, 6), (cyc3, 4)]:
        def run(mat=mat):
            h = _p2_subgroup(mat)()
            return len(orbit_decomposition(h, _named("p2").polytope(), 1))

        checks.append((f"orbit count p2 k=1 H=<{json.dumps(mat, separators=(',', ':'))}>", count, run))

    def k0(name, group):
        def run():
            e = _named(name)
            p = e.polytope()
            aut = automorphism_group(p)
            h = aut if group == "full" else subgroup_closure([UnimodularMap.of(group)], aut)
            return k_zero(p, e.rays, h).k0

        return run

    checks.append(("k0 dp1 H=full", 2, k0("dp1", "full")))
    checks.append(("k0 p2 H=swap", 1, k0("p2", swap)))

    for e in catalog():
        def run(e=e):
            try:
                b = symmetry_alpha_bound(e.polytope(), e.rays)
            except ConsistencyError as exc:
                return str(exc)
            return "ok"

        checks.append((f"alpha bound by central symmetry {e.name}", "ok", run))

    for f, u_name in [([(2, -1)], "p2"), ([(1, 1)], "p1xp1"), ([(-1, 2), (0, -1)], "dp1")]:
        def run(f=f, u_name=u_name):
            pts = [RatVec(x) for x in f]
            u = list(_named(u_name).polytope().vertices)
            exact = c_general(pts, u)
            br = c_star_bisection(pts, u, 40)
            return "bracketed" if br.contains(exact) else f"{rat_str(exact)} outside bracket"

        checks.append((f"bisection brackets c(F,U) F={f} U=Ver {u_name}", "bracketed", run))

    for name in ("p2", "p1xp1", "p3", "p1cubed"):
        def run(name=name):
            p = _named(name).polytope()
            return ehrhart_fit_check(p, p.dim + 3).passed

        checks.append((f"Ehrhart fit {name}", True, run))

    def stab():
        e = _named("p1xp1")
        r = stabilization_report(e.polytope(), e.rays, 2, threads=threads)
        return r.verdict if r.k1 is not None else "no k found"

    checks.append(("stabilization p1xp1 m=2", "stabilizes", stab))
    return checks


def cmd_verify(args) -> int:
    checks = verification_checks(_threads(args))
    results = []
    for i, (desc, expected, thunk) in enumerate(checks, 1):
        try:
            got = thunk()
        except Exception as exc:  # a crashing check is a failing check
            got = f"error: {exc}"
        results.append((i, desc, expected, got, got == expected))
    if args.format == "json":
        _emit(
            {
                "total": len(results),
                "failed": sum(not r[4] for r in results),
                "checks": [
                    {"n": i, "description": d, "ok": ok, "expected": _jsonable(e), "got": _jsonable(g)}
                    for i, d, e, g, ok in results
                ],
            },
            "json",
        )
    else:
        print(f"1..{len(results)}")
        for i, d, e, g, ok in results:
            if ok:
                print(f"ok {i} {d}")
            else:
                print(f"not ok {i} {d} (expected {_flat(_jsonable(e))}, got {_flat(_jsonable(g))})")
    return EXIT_OK if all(r[4] for r in results) else EXIT_VERIFY_FAILED


def _jsonable(x):
    return x if isinstance(x, (bool, int, str)) or x is None else str(x)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="output format (default: json)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for subset searches (default: $TORIC_ALPHA_THREADS or 1)")

    with_input = argparse.ArgumentParser(add_help=False, parents=[common])
    with_input.add_argument("input", nargs="?", default=None,
                            help="catalog name, path to polytope JSON, or - for standard input")
    with_input.add_argument("--input", dest="input_opt", default=None,
                            help="alternative to the positional input")

    parser = argparse.ArgumentParser(
        prog="toric-alpha",
        description="Exact alpha-invariants of smooth toric Fano manifolds from fan data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[with_input], help="smoothness, integrality, |Aut P|")
    p = sub.add_parser("alpha", parents=[with_input], help="alpha_{k,G(H)} by both formula paths")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--group", default="trivial")
    p = sub.add_parser("alpha-km", parents=[with_input], help="Grassmannian alpha_{k,m} over the torus")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    sub.add_parser("star-p", parents=[with_input], help="is the gauge maximum attained only at vertices")
    p = sub.add_parser("stabilize", parents=[with_input], help="stabilization verdict for alpha_{k,m}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--kmax", type=int, default=8)
    p = sub.add_parser("orbits", parents=[with_input], help="orbits of H on (1/k)M ∩ P")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--group", default="trivial")
    p = sub.add_parser("ehrhart", parents=[with_input], help="lattice point counts and fitted polynomial")
    p.add_argument("--kmax", type=int, default=None)
    p = sub.add_parser("k0", parents=[with_input], help="least k clearing the minimizer's denominators")
    p.add_argument("--group", default="trivial")
    sub.add_parser("report", parents=[common], help="alpha table over the builtin catalog")
    sub.add_parser("verify", parents=[common], help="run the oracle cross-checks (TAP output)")
    return parser


COMMANDS = {
    "check": cmd_check,
    "alpha": cmd_alpha,
    "alpha-km": cmd_alpha_km,
    "star-p": cmd_star_p,
    "stabilize": cmd_stabilize,
    "orbits": cmd_orbits,
    "ehrhart": cmd_ehrhart,
    "k0": cmd_k0,
    "report": cmd_report,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK
    for name in ("k", "m", "kmax"):
        val = getattr(args, name, None)
        if val is not None and val < 1:
            print(f"error: --{name} must be a positive integer", file=sys.stderr)
            return EXIT_BAD_INPUT
    try:
        return COMMANDS[args.command](args)
    except (InputError, UsageError, GroupError, PolytopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def main(argv=None) -> None:
    try:
        code = run(argv)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
