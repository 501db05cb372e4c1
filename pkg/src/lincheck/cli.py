"""Command line entry point: ``lincheck {check,verify,gen,project}``.

Exit codes: 0 linearizable / certificate valid, 1 not linearizable /
certificate invalid, 2 input error, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .checker import (
    DEFAULT_BUDGET,
    L2_EQUIV,
    MODES,
    STRENGTHENED,
    BudgetExceeded,
    NotLinearizable,
    linearize,
    verify_certificate,
)
from .compose import ObjectCertificateSet, check_objects, compose
from .generate import ConfigError, GenConfig, Injection, generate
from .history import project_object, project_process
from .specs import UnknownOperation, UnregisteredObject, dump_registry, load_registry
from .trace import (
    UnresolvedCall,
    check_messages,
    dumps_trace,
    read_certificate,
    read_trace,
    write_certificate,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _emit(report, out):
    out.write(json.dumps(report, sort_keys=True) + "\n")


def _input_error(msg, err):
    err.write(f"error: {msg}\n")
    return EXIT_INPUT


def _load(trace_path, registry_path):
    trace = read_trace(trace_path)
    reg = load_registry(registry_path)
    h = trace.history()
    check_messages(trace, h)
    missing = [o for o in h.objects if o not in reg]
    if missing:
        raise UnregisteredObject(", ".join(missing))
    return h, reg


def cmd_check(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    budget = args.budget
    if os.environ.get("LIN_BUDGET"):
        budget = int(os.environ["LIN_BUDGET"])
    try:
        h, reg = _load(args.trace, args.registry)
    except (OSError, ValueError, KeyError) as exc:
        return _input_error(exc, err)

    report = {"mode": args.mode, "l3": args.l3, "events": len(h)}
    start = time.perf_counter()
    cert = None
    try:
        if args.mode == "direct":
            try:
                cert = linearize(h, reg, args.l3, budget)
                report["states_explored"] = cert.stats["states"]
            except NotLinearizable as exc:
                report["states_explored"] = exc.states
                report["completions_explored"] = exc.completions
        else:
            results = check_objects(h, reg, args.l3, budget)
            report["objects"] = {
                o: "not linearizable" if isinstance(r, NotLinearizable) else "linearizable"
                for o, r in results.items()
            }
            report["states_explored"] = sum(
                r.states if isinstance(r, NotLinearizable) else r.stats["states"]
                for r in results.values()
            )
            if all(not isinstance(r, NotLinearizable) for r in results.values()):
                cert = compose(ObjectCertificateSet(h, results, reg), args.l3)
    except BudgetExceeded as exc:
        report["verdict"] = "budget exceeded"
        report["budget"] = exc.limit
        report["elapsed_s"] = round(time.perf_counter() - start, 6)
        _emit(report, out)
        return EXIT_BUDGET
    except UnknownOperation as exc:
        return _input_error(exc, err)
    report["elapsed_s"] = round(time.perf_counter() - start, 6)
    report["verdict"] = "linearizable" if cert is not None else "not linearizable"
    if cert is not None and args.cert:
        write_certificate(args.cert, cert)
        report["certificate"] = args.cert
    _emit(report, out)
    return EXIT_OK if cert is not None else EXIT_FAIL


def cmd_verify(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        h, reg = _load(args.trace, args.registry)
        cert = read_certificate(args.cert)
    except UnresolvedCall as exc:
        _emit({"verdict": "invalid", "first": L2_EQUIV,
               "violations": [{"condition": L2_EQUIV, "detail": str(exc)}]}, out)
        return EXIT_FAIL
    except (OSError, ValueError, KeyError) as exc:
        return _input_error(exc, err)

    try:
        report = verify_certificate(h, cert, reg)
    except ValueError as exc:
        return _input_error(exc, err)
    violations = [{"condition": v.condition, "detail": v.detail} for v in report.violations]
    for o, sub in sorted(cert.objects.items()):
        sub_report = verify_certificate(project_object(h, o), sub, reg)
        violations += [
            {"condition": v.condition, "detail": v.detail, "object": o}
            for v in sub_report.violations
        ]
    result = {"verdict": "valid" if not violations else "invalid", "violations": violations}
    if violations:
        result["first"] = report.first or violations[0]["condition"]
        err.write(f"certificate rejected: {result['first']}\n")
    _emit(result, out)
    return EXIT_OK if not violations else EXIT_FAIL


def _parse_objects(spec: str) -> dict:
    objects = {}
    for item in filter(None, spec.split(",")):
        name, sep, kind = item.partition("=")
        if not sep or not name or not kind:
            raise ConfigError(f"object entry {item!r} must look like id=spec")
        objects[name] = kind
    return objects


def _gen_config(args) -> GenConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = {}
    inject = raw.get("inject")
    if args.inject:
        kind, _, rate = args.inject.partition(":")
        inject = {"kind": kind, "rate": float(rate) if rate else 1.0}
    objects = _parse_objects(args.objects) if args.objects else raw.get("objects")
    cfg = GenConfig(
        seed=args.seed if args.seed is not None else raw.get("seed", 0),
        procs=args.procs if args.procs is not None else raw.get("procs", 2),
        objects=objects or {"q": "fifo-queue"},
        max_events=args.max_events if args.max_events is not None else raw.get("max_events", 8),
        pending_prob=(args.pending_prob if args.pending_prob is not None
                      else raw.get("pending_prob", 0.0)),
        inject=Injection(**inject) if inject else None,
    )
    cfg.check()
    return cfg


def cmd_gen(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        cfg = _gen_config(args)
        h = generate(cfg)
    except (ConfigError, OSError, ValueError, TypeError) as exc:
        return _input_error(exc, err)
    text = dumps_trace(h)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.registry_out:
        with open(args.registry_out, "w", encoding="utf-8") as fh:
            fh.write(dump_registry(cfg.registry()) + "\n")
    return EXIT_OK


def cmd_project(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        h = read_trace(args.trace).history()
    except (OSError, ValueError) as exc:
        return _input_error(exc, err)
    if args.process is not None:
        sub = project_process(h, args.process)
    else:
        sub = project_object(h, args.object)
    text = dumps_trace(sub)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lincheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide linearizability of a trace")
    p.add_argument("trace")
    p.add_argument("registry")
    p.add_argument("--mode", choices=("direct", "compositional"), default="direct")
    p.add_argument("--l3", choices=MODES, default=STRENGTHENED)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--cert", metavar="OUT_PATH")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="replay a certificate against a trace")
    p.add_argument("trace")
    p.add_argument("cert")
    p.add_argument("registry")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a seeded random trace")
    p.add_argument("--config", help="JSON file with GenConfig fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--procs", type=int)
    p.add_argument("--objects", help="comma separated id=spec, e.g. q1=fifo-queue,r1=register")
    p.add_argument("--max-events", type=int)
    p.add_argument("--pending-prob", type=float)
    p.add_argument("--inject", metavar="KIND[:RATE]")
    p.add_argument("--out")
    p.add_argument("--registry-out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("project", help="restrict a trace to one process or object")
    p.add_argument("trace")
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--process", type=int)
    sel.add_argument("--object")
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
