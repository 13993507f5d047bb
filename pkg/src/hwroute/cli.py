"""Command-line front end.

Exit codes: 0 success, 2 a bound or structure audit failed, 1 any error.
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
from pathlib import Path

from . import __version__
from .centers import solve_kcenter_td, solve_kmedian_td
from .cover import build_ladder, measure_sparsity
from .cvr import InfeasibleInstance, SolverResourceError, VrpInstance, solve_cvr, solve_cvr_penalties
from .decomposition import TreeDecomposition, elimination_decomposition, validate_decomposition
from .embed import embed_bounded_diameter, embed_multi_depot, embed_single_depot
from .generators import FAMILIES, GeneratorSpec, generate
from .io import PROBLEMS, Instance, InstanceError, atomic_write, dumps_instance, load, write_graph_text
from .metric import GraphError, canonical_scale, diameter
from .nice import DecompositionInvalid, make_nice
from .oracle import (OracleGuardError, audit_cover, audit_embedding, audit_towns, brute_cvr,
                     brute_kcenter, brute_kmedian)
from .pipelines import fpa_kcenter, fpa_kmedian, ptas_cvr, ptas_cvr_multi
from .towns import TownError, build_core_hubs, build_towns

EXIT_OK, EXIT_ERROR, EXIT_AUDIT = 0, 1, 2


class AuditFailure(Exception):
    def __init__(self, payload: dict):
        super().__init__("audit failed")
        self.payload = payload


def _emit(args, payload, text: str | None = None):
    body = text if text is not None else json.dumps(payload, indent=2, sort_keys=True,
                                                    default=_json_default) + "\n"
    if args.out and args.command != "embed":
        atomic_write(args.out, body)
    else:
        sys.stdout.write(body)


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--eps", type=float, default=None,
                   help="accuracy (epsilon-hat; plain epsilon for --mode diam)")
    p.add_argument("--c", type=float, default=None, help="cover expansion constant (default 8)")
    p.add_argument("--eta-hint", type=int, default=None, help="highway dimension guess")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output file (directory for embed)")


def _settings(args, inst: Instance | None = None):
    def pick(flag, field_name, default):
        val = getattr(args, flag, None)
        if val is None and inst is not None:
            val = getattr(inst, field_name)
        return default if val is None else val

    return (pick("eps", "epsilon_hat", 0.5), pick("c", "c", 8.0), pick("eta_hint", "eta_hint", 1),
            pick("seed", "seed", 0))


# -- gen -------------------------------------------------------------------

def cmd_gen(args) -> int:
    _, _, _, seed = _settings(args)
    params = {}
    for key in ("hubs", "side", "highways", "ratio", "clusters", "core"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    g = generate(GeneratorSpec(args.family, args.n, seed, params))
    if not args.problem:
        _emit(args, None, write_graph_text(g))
        return EXIT_OK
    rng = random.Random(seed)
    inst = Instance(g, args.problem, seed=seed)
    if args.problem.startswith("cvr"):
        q = args.q or 2
        ndep = max(1, args.depots if args.problem == "cvr-multi" else 1)
        inst.depots = sorted(rng.sample(range(g.n), ndep))
        pool = [v for v in range(g.n) if v not in inst.depots]
        chosen = sorted(rng.sample(pool, min(args.clients, len(pool))))
        for v in chosen:
            cl = {"id": v, "demand": rng.randint(1, q)}
            if args.problem == "cvr-pen":
                cl["penalty"] = round(rng.uniform(1.0, 20.0), 3)
            inst.clients.append(cl)
        inst.capacity = q
    else:
        inst.k = args.k or 2
    _emit(args, None, dumps_instance(inst))
    return EXIT_OK


# -- cover / towns ---------------------------------------------------------

def _scaled(args, inst: Instance):
    eps, c, _, _ = _settings(args, inst)
    return canonical_scale(inst.graph, c, eps)


def cmd_cover(args) -> int:
    inst = load(args.input)
    gs, params = _scaled(args, inst)
    ladder = build_ladder(gs, params)
    _emit(args, ladder.to_json())
    return EXIT_OK


def cmd_towns(args) -> int:
    inst = load(args.input)
    gs, params = _scaled(args, inst)
    ladder = build_ladder(gs, params)
    tree = build_core_hubs(build_towns(gs, ladder), ladder)
    _emit(args, tree.to_json())
    return EXIT_OK


# -- embed -----------------------------------------------------------------

def _depot_list(args, inst: Instance) -> list[int]:
    if getattr(args, "depots", None):
        return [int(x) for x in args.depots.split(",") if x.strip()]
    if getattr(args, "depot", None) is not None:
        return [args.depot]
    if inst.depots:
        return list(inst.depots)
    return [0]


def _build_embedding(args, inst: Instance):
    eps, c, eta, _ = _settings(args, inst)
    gs, params = canonical_scale(inst.graph, c, eps, args.distortion_constant)
    if args.mode == "diam":
        ladder = build_ladder(gs, params)
        tree = build_core_hubs(build_towns(gs, ladder), ladder)
        delta = diameter(gs)
        emb = embed_bounded_diameter(gs, tree, eps, delta)
        audit = audit_embedding(gs, emb.host, "diam", {"eps": eps, "delta": delta})
    else:
        depots = _depot_list(args, inst)
        if args.mode == "depot":
            if len(depots) != 1:
                raise GraphError("--mode depot takes exactly one depot")
            emb = embed_single_depot(gs, depots[0], eps, eta, c, args.distortion_constant)
        else:
            emb = embed_multi_depot(gs, depots, eps, eta, c, args.distortion_constant)
        audit = audit_embedding(emb.guest, emb.host, args.mode,
                                {"epsilon_hat": eps, "eps": emb.epsilon, "depots": depots,
                                 "original_n": inst.graph.n, "c_mult": args.c_mult})
    return emb, audit, params


def cmd_embed(args) -> int:
    inst = load(args.input)
    emb, audit, params = _build_embedding(args, inst)
    rep = validate_decomposition(emb.host, emb.decomposition)
    payload = {"audit": audit.to_dict(), "width": rep.width, "decomposition_valid": rep.valid,
               "distortion_constant": args.distortion_constant, "summary": emb.summary(),
               "scale_factor": params.scale_factor}
    if args.out:
        out = Path(args.out)
        atomic_write(out / "host.graph", write_graph_text(emb.host))
        atomic_write(out / "host.td", emb.decomposition.to_text())
        atomic_write(out / "audit.json", json.dumps(payload, indent=2, sort_keys=True,
                                                    default=_json_default) + "\n")
    else:
        _emit(args, payload)
    if not (audit.ok and rep.valid):
        raise AuditFailure(payload)
    return EXIT_OK


# -- solve / oracle --------------------------------------------------------

def _problem(args, inst: Instance) -> str:
    prob = args.problem or inst.problem
    if prob is None:
        raise InstanceError("/problem", "no problem given on the command line or in the instance")
    return prob


def _vrp(args, inst: Instance, prob: str) -> VrpInstance:
    q = args.q or inst.capacity
    if q is None:
        raise InstanceError("/capacity", "routing problems need a capacity (--q)")
    if not inst.depots:
        raise InstanceError("/depots", "routing problems need at least one depot")
    pens = inst.penalties if prob == "cvr-pen" else None
    if prob == "cvr-pen" and pens is None:
        raise InstanceError("/clients", "cvr-pen needs a penalty on every client")
    if prob == "cvr" and len(inst.depots) != 1:
        raise InstanceError("/depots", "cvr takes exactly one depot; use cvr-multi")
    return VrpInstance(inst.graph, inst.depots, inst.demands, q, pens)


def _k(args, inst: Instance) -> int:
    k = args.k or inst.k
    if k is None:
        raise InstanceError("/k", "center problems need k (--k)")
    return k


def cmd_solve(args) -> int:
    inst = load(args.input)
    prob = _problem(args, inst)
    g = inst.graph
    if args.td:
        dec = TreeDecomposition.from_text(Path(args.td).read_text())
    else:
        dec = elimination_decomposition(g)
    if prob.startswith("cvr"):
        vi = _vrp(args, inst, prob)
        nice = make_nice(dec, vi.depots, graph=g)
        ts = solve_cvr_penalties(vi, nice) if prob == "cvr-pen" else solve_cvr(vi, nice)
        payload = {"problem": prob, "width": dec.width, **ts.to_dict()}
    else:
        rep = validate_decomposition(g, dec)
        if not rep.valid:
            raise DecompositionInvalid("; ".join(rep.violations[:10]))
        k = _k(args, inst)
        if prob == "kcenter":
            sol = solve_kcenter_td(g, dec, k)
        else:
            sol = solve_kmedian_td(g, dec, k, weights=inst.weights)
        payload = {"problem": prob, "width": dec.width, "centers": sol.centers, "cost": sol.value}
    _emit(args, payload)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load(args.input)
    prob = _problem(args, inst)
    if prob.startswith("cvr"):
        vi = _vrp(args, inst, prob)
        res = brute_cvr(vi.graph, vi.depots, vi.demands, vi.capacity, vi.penalties)
    elif prob == "kcenter":
        res = brute_kcenter(inst.graph, _k(args, inst))
    else:
        res = brute_kmedian(inst.graph, _k(args, inst), inst.weights)
    _emit(args, {"problem": res.problem, "cost": res.cost, "solution": res.solution,
                 "search_space": res.search_space, "seconds": res.seconds})
    return EXIT_OK


# -- ptas --------------------------------------------------------------------

def cmd_ptas(args) -> int:
    inst = load(args.input)
    prob = _problem(args, inst)
    eps, c, eta, seed = _settings(args, inst)
    dc = args.distortion_constant
    if prob.startswith("cvr"):
        vi = _vrp(args, inst, prob)
        if prob == "cvr-multi":
            sol, rep = ptas_cvr_multi(vi, eps, eta, c, dc)
        else:
            sol, rep = ptas_cvr(vi, eps, eta, c, dc)
        solution = sol.to_dict()
        if args.oracle:
            rep.brute_cost = brute_cvr(vi.graph, vi.depots, vi.demands, vi.capacity,
                                       vi.penalties).cost
    else:
        k = _k(args, inst)
        if prob == "kcenter":
            centers, rep = fpa_kcenter(inst.graph, k, eps, eta, c, dc)
            if args.oracle:
                rep.brute_cost = brute_kcenter(inst.graph, k).cost
        else:
            centers, rep = fpa_kmedian(inst.graph, k, eps, eta, c, dc, weights=inst.weights)
            if args.oracle:
                rep.brute_cost = brute_kmedian(inst.graph, k, inst.weights).cost
        solution = {"centers": centers}
    rep.params.update({"seed": seed, "problem": prob})
    payload = {"report": rep.to_dict(), "solution": solution}
    failed = []
    if rep.lower_bound is not None and rep.guest_cost < rep.lower_bound * (1 - 1e-9):
        failed.append("cost below the routing lower bound")
    if rep.ratio is not None and rep.ratio > 1 + eps + 1e-9:
        failed.append(f"ratio {rep.ratio:.6g} exceeds 1 + eps")
    payload["audit_failures"] = failed
    _emit(args, payload)
    if failed:
        raise AuditFailure(payload)
    return EXIT_OK


# -- audit -----------------------------------------------------------------

def cmd_audit(args) -> int:
    inst = load(args.input)
    if args.mode in ("diam", "depot", "multi"):
        emb, audit, _ = _build_embedding(args, inst)
        rep = validate_decomposition(emb.host, emb.decomposition)
        payload = {"mode": args.mode, "ok": audit.ok and rep.valid, "audit": audit.to_dict(),
                   "decomposition": rep.to_dict(), "distortion_constant": args.distortion_constant}
    else:
        gs, params = _scaled(args, inst)
        ladder = build_ladder(gs, params)
        if args.mode == "cover":
            res = audit_cover(gs, ladder)
            extra = {"sparsity": measure_sparsity(gs, ladder)}
        else:
            tree = build_core_hubs(build_towns(gs, ladder), ladder)
            res = audit_towns(gs, tree, ladder)
            extra = {"towns": len(tree)}
        payload = {"mode": args.mode, "ok": res.ok, "checked": res.checked,
                   "violations": res.violations[:50], **extra}
    _emit(args, payload)
    if not payload["ok"]:
        raise AuditFailure(payload)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hwroute", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a road-like graph or instance")
    _common(p)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    for key, typ in (("hubs", int), ("side", int), ("highways", int), ("ratio", float),
                     ("clusters", int), ("core", int)):
        p.add_argument(f"--{key}", type=typ, default=None)
    p.add_argument("--problem", choices=PROBLEMS, default=None,
                   help="wrap the graph into an instance of this problem")
    p.add_argument("--clients", type=int, default=5)
    p.add_argument("--depots", type=int, default=2, help="depot count for cvr-multi")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_gen)

    for name, func, helptext in (("cover", cmd_cover, "print the shortest-path cover ladder"),
                                 ("towns", cmd_towns, "print the town decomposition")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("input")
        p.set_defaults(func=func)

    def embed_flags(p):
        p.add_argument("--depot", type=int, default=None)
        p.add_argument("--depots", default=None, help="comma-separated depot ids")
        p.add_argument("--distortion-constant", type=float, default=32.0)
        p.add_argument("--c-mult", type=float, default=8.0)

    p = sub.add_parser("embed", help="build a host embedding and its tree decomposition")
    _common(p)
    p.add_argument("input")
    p.add_argument("--mode", choices=("diam", "depot", "multi"), default="depot")
    embed_flags(p)
    p.set_defaults(func=cmd_embed)

    for name, func, helptext in (("solve", cmd_solve, "exact solve over a tree decomposition"),
                                 ("oracle", cmd_oracle, "brute-force reference solution")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("input")
        p.add_argument("--problem", choices=PROBLEMS, default=None)
        p.add_argument("--td", default=None, help="decomposition file (default: min-degree)")
        p.add_argument("--q", type=int, default=None)
        p.add_argument("--k", type=int, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("ptas", help="run an approximation pipeline")
    _common(p)
    p.add_argument("input")
    p.add_argument("--problem", choices=PROBLEMS, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--oracle", action="store_true", help="also brute-force and report the ratio")
    p.add_argument("--distortion-constant", type=float, default=32.0)
    p.set_defaults(func=cmd_ptas)

    p = sub.add_parser("audit", help="exhaustively check an embedding, the towns or the cover")
    _common(p)
    p.add_argument("input")
    p.add_argument("--mode", choices=("diam", "depot", "multi", "towns", "cover"),
                   default="depot")
    embed_flags(p)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AuditFailure as exc:
        worst = exc.payload.get("audit", {}).get("worst_pair")
        msg = "audit failed"
        if worst is not None:
            msg += f"; worst pair {worst}"
        print(f"hwroute: {msg}", file=sys.stderr)
        return EXIT_AUDIT
    except InstanceError as exc:
        print(f"hwroute: invalid instance at {exc.pointer}: {exc.detail}", file=sys.stderr)
        return EXIT_ERROR
    except (GraphError, TownError, InfeasibleInstance, SolverResourceError, OracleGuardError,
            DecompositionInvalid, OSError, ValueError) as exc:
        print(f"hwroute: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
