"""Command-line entry point: resolve, weights, census, minscal, verify-paper."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from . import afunc, census, surface, toric
from .exactmath import rational_str, rf_eval, strip_pi, to_text


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _md_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        lines.append("| " + " | ".join(str(x).replace("|", "\\|") for x in r) + " |")
    return "\n".join(lines) + "\n"


# resolve ------------------------------------------------------------------------------

def cmd_resolve(args) -> int:
    g = toric.parse_group(args.group)
    if isinstance(g, toric.CyclicGroup):
        out = toric.chain_to_json(g, args.theta, args.tau if args.theta is not None else None)
        out["order"] = g.order
        if args.theta is not None:
            wc = toric.weight_chain(g, args.theta, args.tau)
            out["endpoints"] = {
                "y0": [rational_str(x) for x in wc.y0_end()],
                "x0": [rational_str(x) for x in wc.x0_end()],
            }
    else:
        star = toric.noncyclic_weight_star(g) if args.theta is not None else toric.star_resolution(g)
        out = toric.star_to_json(star)
    if args.format == "md":
        if "e" in out:
            rows = [[out["group"], str(out["e"]), str(out.get("w", ""))]]
            text = _md_table(["group", "self-intersections (negated)", "weights"], rows)
        else:
            rows = [[a["group"], str(a["e"]), str(a.get("w", ""))] for a in out["arms"]]
            text = f"central curve: {out['central']}, type {out['dynkin'] or '-'}\n\n"
            text += _md_table(["arm", "self-intersections (negated)", "weights"], rows)
        _emit(args, text)
    else:
        _emit(args, _dump(out))
    return 0


# weights: blow-up sequences ------------------------------------------------------------

def _seed(args) -> surface.SurfaceConfig:
    if args.seed == "H2":
        return surface.h2_config()
    return surface.seed_p2(args.seed, args.alpha, args.beta)


def _steps(text: Optional[str]) -> List[str]:
    return [s.strip() for s in (text or "").split(",") if s.strip()]


def cmd_weights(args) -> int:
    cfg = surface.blow_up_sequence(_seed(args), _steps(args.sequence))
    problems = surface.check_invariants(cfg)
    verdict = surface.classify(cfg)
    out = {
        "config": surface.config_to_json(cfg),
        "invariant_violations": problems,
        "classification": {
            "ok": verdict.ok,
            "reason": verdict.reason,
            "orbifold_weights": [rational_str(w) for w in (verdict.orbifold_weights or ())],
        },
        "next_targets": [surface.describe_target(cfg, t) for t in surface.targets(cfg)],
    }
    if verdict.ok:
        out["classification"].update(surface.candidate_to_json(verdict.candidate))
        out["classification"].pop("config", None)
    if args.format == "md":
        rows = [[p["name"], " ".join(p["weights"]), ", ".join(p["axes"] + p["lines"])]
                for p in out["config"]["points"]]
        text = _md_table(["point", "weights", "curves"], rows)
        text += f"\nclassification: {verdict.reason if not verdict.ok else 'candidate'}\n"
        _emit(args, text)
    else:
        _emit(args, _dump(out))
    return 1 if problems else 0


# census ----------------------------------------------------------------------------------

def cmd_census(args) -> int:
    if args.verify:
        configs = census.standard_configs(args.max_blowups, args.pruning, args.max_alpha)
        results = census.sweep(configs, args.jobs)
        report = census.verify_table4(results)
        if args.format == "md":
            text = report.summary() + "\n"
            for f in report.row_failures + report.merge_failures:
                text += f"- {f}\n"
            for r in report.unexpected:
                text += f"- unexpected candidate from {r.seed_tag}: {', '.join(r.history)}\n"
            _emit(args, text)
        else:
            out = report.to_json()
            out["states"] = {_tag(r.config): r.states for r in results}
            _emit(args, _dump(out))
        if args.out:
            print(report.summary())
        return 0 if report.ok else 1
    cfg = census.CensusConfig(args.seed, args.alpha, args.beta, args.max_blowups, args.pruning)
    res = census.enumerate_candidates(cfg)
    records = census.label_records([res])
    ordered = sorted(records.values(), key=lambda r: (r.label or "~", r.canonical))
    if args.format == "md":
        rows = [[r.label or "-", ", ".join(r.aliases), r.candidate.ade_type, r.candidate.group_label,
                 str(r.candidate.picard_rank), str(r.candidate.degree), ", ".join(r.history)]
                for r in ordered]
        _emit(args, _md_table(["case", "same as", "ADE", "group", "rank", "degree", "blow-ups"], rows))
    else:
        _emit(args, _dump({
            "seed": _tag(cfg),
            "max_blowups": cfg.max_blowups,
            "pruning": cfg.pruning,
            "states": res.states,
            "pruned": res.pruned,
            "per_level": res.per_level,
            "candidates": [r.to_json() for r in ordered],
        }))
    return 0


def _tag(cfg: census.CensusConfig) -> str:
    return f"type-iii({cfg.alpha},{cfg.beta})" if cfg.seed in ("type-iii", "iii") else cfg.seed


# minscal -------------------------------------------------------------------------------

def _config_case(path: str, args) -> afunc.CaseReport:
    """Evaluate a JSON description {seed, alpha, beta, sequence, pins, ...}."""
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if d.get("seed") == "H2":
        cfg = surface.h2_config()
    else:
        cfg = surface.seed_p2(d["seed"], d.get("alpha", 2), d.get("beta", 1))
    seq = d.get("sequence", [])
    cfg = surface.blow_up_sequence(cfg, _steps(seq) if isinstance(seq, str) else seq)
    v = surface.classify(cfg)
    if not v.ok:
        raise afunc.AfuncError(f"not a candidate: {v.reason}")
    entry = dict(d)
    entry.setdefault("label", d.get("label", "config"))
    return afunc.evaluate_candidate(v.candidate, entry, args.density)


def _sample_csv(report: afunc.CaseReport, n: int) -> str:
    md = report.moment
    k, g = strip_pi(report.result.min_s)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(md.params) + ["min_s"])
    if not md.params:
        w.writerow([repr(float(g.constant_value()) * math.pi ** k)])
        return buf.getvalue()
    if len(md.params) == 1:
        lo, hi = afunc.interval_of(md.domain, md.params[0])
        pts = [{md.params[0]: lo + (hi - lo) * i / n} for i in range(1, n)]
    else:
        pts = afunc.domain_points(md.domain, md.params, n)
    for p in pts:
        value = float(rf_eval(g, p)) * math.pi ** k
        w.writerow([rational_str(p[v]) for v in md.params] + [repr(value)])
    return buf.getvalue()


def cmd_minscal(args) -> int:
    if args.config:
        report = _config_case(args.config, args)
    elif args.case:
        report = afunc.evaluate_case(args.case, args.density)
    else:
        raise SystemExit("minscal needs --case or --config")
    if args.sample:
        _emit(args, _sample_csv(report, args.sample))
        return 0 if report.ok else 1
    if args.format == "md":
        _emit(args, _md_table(["case", "min s", "domain", "verdict", "degenerate", "matches"],
                              [_row(report)]))
    else:
        _emit(args, _dump(report.to_json()))
    return 0 if report.ok else 1


def _row(r: afunc.CaseReport) -> List[str]:
    return [r.label, r.min_s_text, r.domain, r.verdict.label, str(r.result.degenerate).lower(),
            "yes" if r.ok else "NO"]


# verify-paper --------------------------------------------------------------------------

def _case_json(label: str) -> dict:
    return afunc.evaluate_case(label).to_json()


def _map(fn: Callable, items: Sequence, jobs: int) -> List:
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_verify_paper(args) -> int:
    labels = afunc.case_labels()
    results = _map(_case_json, labels, args.jobs)
    examples = []
    for e in afunc.minscal_fixtures().get("examples", []):
        rep = afunc.evaluate_example(e["label"])
        examples.append({
            "example": rep.label,
            "T": [to_text(x) for x in rep.T.as_tuple()],
            "chern": [rational_str(x) for x in rep.chern],
            "s0": to_text(rep.s0),
            "degenerate": isinstance(rep.h, afunc.Degenerate),
            "matches": rep.ok,
            "checks": dict(sorted(rep.checks.items())),
        })
    ok = all(r["matches"] for r in results) and all(e["matches"] for e in examples)
    if args.format == "json":
        _emit(args, _dump({"ok": ok, "cases": results, "examples": examples}))
    else:
        rows = []
        for r in results:
            ms = r["min_s"]
            text = ms["num"] if ms["den"] == "1" else f"({ms['num']})/({ms['den']})"
            if r["degenerate"] and r["verdict"] == "exact:degenerate":
                text = "degenerate"
            failed = [k for k, v in r["checks"].items() if not v]
            rows.append([r["case"], text, r["domain"], r["verdict"], str(r["degenerate"]).lower(),
                         "yes" if r["matches"] else "NO: " + ", ".join(failed)])
        text = _md_table(["case", "min s", "domain", "verdict", "degenerate", "matches"], rows)
        if examples:
            text += "\n" + _md_table(
                ["example", "T", "chern (-, +)", "s0", "degenerate h", "matches"],
                [[e["example"], ", ".join(e["T"]), ", ".join(e["chern"]), e["s0"],
                  str(e["degenerate"]).lower(), "yes" if e["matches"] else "NO"] for e in examples])
        _emit(args, text)
    return 0 if ok else 1


# parser --------------------------------------------------------------------------------

def _common(fmt: str = "json") -> argparse.ArgumentParser:
    # a fresh parent per subcommand: parents share action objects, hence defaults
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("json", "md"), default=fmt)
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gravinst", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("resolve", parents=[_common()], help="minimal resolution of a quotient singularity")
    r.add_argument("group", help='e.g. "L(3,4)", "D*(1,2)", "I*(1)"')
    r.add_argument("--theta", help="first weight of the C*-action")
    r.add_argument("--tau", default="0", help="second weight of the C*-action")
    r.set_defaults(func=cmd_resolve)

    seed_choices = ("type-i", "type-ii", "type-iii", "i", "ii", "iii")

    w = sub.add_parser("weights", parents=[_common()], help="fixed-point weights after a blow-up sequence")
    w.add_argument("--seed", choices=seed_choices + ("H2",), default="type-i")
    w.add_argument("--alpha", type=int, default=2)
    w.add_argument("--beta", type=int, default=1)
    w.add_argument("--sequence", default="", help='comma-separated centres, e.g. "X∩Y,E1∩X,generic:Z"')
    w.set_defaults(func=cmd_weights)

    c = sub.add_parser("census", parents=[_common()], help="enumerate admissible blow-up configurations")
    c.add_argument("--seed", choices=seed_choices, default="type-i")
    c.add_argument("--alpha", type=int, default=2)
    c.add_argument("--beta", type=int, default=1)
    c.add_argument("--max-blowups", type=int, default=8)
    c.add_argument("--pruning", choices=("lattice-only", "corollary"), default="lattice-only")
    c.add_argument("--max-alpha", type=int, default=6, help="type-iii sweep bound for --verify")
    c.add_argument("--verify", action="store_true", help="sweep all seeds and compare with the catalog")
    c.set_defaults(func=cmd_census)

    m = sub.add_parser("minscal", parents=[_common()], help="minimum scalar curvature of a candidate")
    m.add_argument("--case", help="catalogued case label, e.g. 3A")
    m.add_argument("--config", help="JSON file with seed, sequence and pins")
    m.add_argument("--density", type=int, default=50, help="grid points per axis for sampled verdicts")
    m.add_argument("--sample", type=int, metavar="N", help="emit CSV of min_s on an N-step grid")
    m.set_defaults(func=cmd_minscal)

    v = sub.add_parser("verify-paper", parents=[_common("md")], help="evaluate every catalogued case")
    v.set_defaults(func=cmd_verify_paper)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, surface.BlowUpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
