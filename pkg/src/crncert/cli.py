"""Command-line entry point: ``crncert {certify,family,simulate,verify,digraph}``.

Exit codes: 0 pass, 1 domain negative (refuted, uncertified, failed
experiment), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .certify import certify
from .digraph import structural_digraph
from .kinetics import KineticModel, load_params
from .network import NetworkError, family_display_text, family_network, parse_network, render
from .simulate import (
    TOL_CONV,
    TOL_EQ,
    Controls,
    class_convergence_experiment,
    cone_float_matrix,
    integrate,
    order_preservation_experiment,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    seed: int = 0
    tol_eq: float = TOL_EQ
    tol_conv: float = TOL_CONV
    k: int | None = None
    c: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if not (self.tol_eq > 0 and self.tol_conv > 0):
            raise UsageError("tolerances must be positive")


def _parse_vector(text: str, exact: bool) -> tuple:
    try:
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return tuple(Fraction(p) for p in parts) if exact else tuple(float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}: {exc}") from exc


def _read_network(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse_network(text)
    except NetworkError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def cmd_certify(cfg: RunConfig) -> int:
    net = _read_network(cfg.inputs[0])
    try:
        cert = certify(net, cfg.c)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(cert.to_json(), cfg.out)
    print(f"overall: {cert.overall}", file=sys.stderr)
    return EXIT_OK if cert.certified else EXIT_NEGATIVE


def cmd_family(cfg: RunConfig, canonical: bool = False) -> int:
    if cfg.k is None or cfg.k < 2:
        raise UsageError("family index must be an integer >= 2")
    text = render(family_network(cfg.k)) if canonical else family_display_text(cfg.k)
    _emit(text + "\n", cfg.out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, params: str | None, x0: tuple, t_end: float,
                 force: bool, samples: int | None) -> int:
    net = _read_network(cfg.inputs[0])
    cert = certify(net)
    if not cert.certified and not force:
        print(f"network not certified ({cert.overall}); pass --force to simulate anyway", file=sys.stderr)
        return EXIT_NEGATIVE
    try:
        model = KineticModel.from_params(net, load_params(params) if params else None)
    except (OSError, ValueError) as exc:
        raise UsageError(f"parameters: {exc}") from exc
    if len(x0) != net.m or any(v < 0 for v in x0):
        raise UsageError(f"--x0 needs {net.m} nonnegative values")
    if not t_end > 0:
        raise UsageError("--t-end must be positive")
    t_eval = np.linspace(0.0, t_end, samples + 1)[1:] if samples else None
    traj = integrate(model, x0, t_end, Controls(tol_eq=cfg.tol_eq), t_eval)
    _emit(traj.to_csv(), cfg.out)
    if cert.r is not None:
        r = np.array([float(v) for v in cert.r])
        h = traj.states @ r
        print(f"conservation drift: {float(np.max(np.abs(h - h[0]))):.3e} (h = {float(h[0]):.12g})",
              file=sys.stderr)
    print(f"steps accepted={traj.accepted} rejected={traj.rejected}", file=sys.stderr)
    return EXIT_OK


def _experiment_network(spec: dict, base: Path):
    src = spec.get("network")
    if not isinstance(src, dict) or len(src) != 1:
        raise UsageError("experiment 'network' must be an object with one of family, file, text")
    (kind, value), = src.items()
    if kind == "family":
        if not isinstance(value, int) or value < 2:
            raise UsageError("network.family must be an integer >= 2")
        return family_network(value)
    if kind == "file":
        return _read_network(str(base / value))
    if kind == "text":
        try:
            return parse_network(value)
        except NetworkError as exc:
            raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown network source {kind!r}")


_KINDS = {
    "convergence": {"required": {"network", "x_ref", "count"},
                    "optional": {"name", "kind", "seed", "params", "tol_conv"}},
    "order": {"required": {"network", "pairs", "horizon"},
              "optional": {"name", "kind", "seed", "params", "samples", "corrupt_column"}},
}


def validate_experiment_spec(doc) -> list[dict]:
    if not isinstance(doc, dict) or not isinstance(doc.get("experiments"), list) or not doc["experiments"]:
        raise UsageError("spec must be an object with a non-empty 'experiments' list")
    for i, exp in enumerate(doc["experiments"]):
        if not isinstance(exp, dict) or exp.get("kind") not in _KINDS:
            raise UsageError(f"experiment {i}: 'kind' must be one of {sorted(_KINDS)}")
        rule = _KINDS[exp["kind"]]
        missing = rule["required"] - exp.keys()
        extra = exp.keys() - rule["required"] - rule["optional"]
        if missing:
            raise UsageError(f"experiment {i}: missing {sorted(missing)}")
        if extra:
            raise UsageError(f"experiment {i}: unknown fields {sorted(extra)}")
        for key in ("count", "pairs", "samples", "seed", "corrupt_column"):
            if key in exp and (not isinstance(exp[key], int) or exp[key] < 0):
                raise UsageError(f"experiment {i}: {key} must be a nonnegative integer")
        if "horizon" in exp and not (isinstance(exp["horizon"], (int, float)) and exp["horizon"] > 0):
            raise UsageError(f"experiment {i}: horizon must be positive")
    return doc["experiments"]


def run_experiment(exp: dict, base: Path, cfg: RunConfig) -> dict:
    net = _experiment_network(exp, base)
    model = KineticModel.from_params(net, exp.get("params"))
    cert = certify(net)
    seed = exp.get("seed", cfg.seed)
    out = {"name": exp.get("name", exp["kind"]), "kind": exp["kind"], "seed": seed,
           "network_digest": cert.digest, "overall": cert.overall}
    if not cert.certified:
        out.update(passed=False, error="network not certified")
        return out
    controls = Controls(tol_eq=cfg.tol_eq)
    if exp["kind"] == "convergence":
        x_ref = exp["x_ref"]
        if not isinstance(x_ref, list) or len(x_ref) != net.m:
            raise UsageError(f"x_ref must list {net.m} values")
        rep = class_convergence_experiment(model, cert, x_ref, exp["count"], seed, controls,
                                           tol_conv=exp.get("tol_conv", cfg.tol_conv))
        out.update(passed=rep.converged, report=asdict(rep))
    else:
        lam = cone_float_matrix(cert.cone())
        col = exp.get("corrupt_column")
        if col:
            if not 1 <= col <= lam.shape[1]:
                raise UsageError(f"corrupt_column must be in 1..{lam.shape[1]}")
            lam = lam.copy()
            lam[:, col - 1] *= -1
        rep = order_preservation_experiment(model, lam, exp["pairs"], float(exp["horizon"]),
                                            exp.get("samples", 20), seed, check_interior=not col)
        out.update(passed=rep.passed, report=asdict(rep))
    return out


def _run_one(args):
    exp, base, cfg = args
    return run_experiment(exp, base, cfg)


def cmd_verify(cfg: RunConfig) -> int:
    path = Path(cfg.inputs[0])
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    exps = validate_experiment_spec(doc)
    for exp in exps:
        _experiment_network(exp, path.parent)
    threads = max(1, int(os.environ.get("CRNCERT_THREADS", "1") or 1))
    jobs = [(exp, path.parent, cfg) for exp in exps]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    passed = all(r["passed"] for r in results)
    _emit(json.dumps({"passed": passed, "experiments": results}, indent=2) + "\n", cfg.out)
    for r in results:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_NEGATIVE


def cmd_digraph(cfg: RunConfig) -> int:
    net = _read_network(cfg.inputs[0])
    _emit(structural_digraph(net).to_text() + "\n", cfg.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crncert", description="Certify and test global convergence of reaction networks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-eq", type=float, default=TOL_EQ)
    common.add_argument("--tol-conv", type=float, default=TOL_CONV)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("certify", parents=[common], help="check hypotheses and emit a certificate")
    s.add_argument("network")
    s.add_argument("--c", help="comma-separated rationals, e.g. 0,0,1,0")

    s = sub.add_parser("family", parents=[common], help="print the R^(k) reaction listing")
    s.add_argument("k", type=int)
    s.add_argument("--canonical", action="store_true",
                   help="reaction order/orientation matching the column rules exactly")

    s = sub.add_parser("simulate", parents=[common], help="integrate and write a trajectory CSV")
    s.add_argument("network")
    s.add_argument("--params", help="JSON rate constants {reaction index: {kf, kr}}")
    s.add_argument("--x0", required=True)
    s.add_argument("--t-end", type=float, default=50.0)
    s.add_argument("--samples", type=int, help="record this many equally spaced times")
    s.add_argument("--force", action="store_true")

    s = sub.add_parser("verify", parents=[common], help="run an experiment spec")
    s.add_argument("spec")

    s = sub.add_parser("digraph", parents=[common], help="export the structural digraph")
    s.add_argument("network")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(
            subcommand=args.subcommand,
            inputs=[v for v in (getattr(args, a, None) for a in ("network", "spec")) if v],
            out=args.out,
            seed=args.seed,
            tol_eq=args.tol_eq,
            tol_conv=args.tol_conv,
            k=getattr(args, "k", None),
            c=_parse_vector(args.c, exact=True) if getattr(args, "c", None) else None,
        )
        if args.subcommand == "certify":
            return cmd_certify(cfg)
        if args.subcommand == "family":
            return cmd_family(cfg, args.canonical)
        if args.subcommand == "simulate":
            return cmd_simulate(cfg, args.params, _parse_vector(args.x0, exact=False), args.t_end,
                                args.force, args.samples)
        if args.subcommand == "verify":
            return cmd_verify(cfg)
        return cmd_digraph(cfg)
    except UsageError as exc:
        print(f"crncert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
