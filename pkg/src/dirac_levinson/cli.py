"""Command-line front end.

::

    dirac-levinson audit --potential well.json --out results/
    dirac-levinson flow --potential well.json --lambda-steps 400 --format both
    dirac-levinson box --potential well.json --box-L 300

Exit status is 0 on success, 2 when an audit fails and 1 for usage or
configuration errors. ``DIRAC_LEVINSON_THREADS`` caps the worker threads
used for independent evaluations; output is always assembled in order.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .box_spectrum import (
    CountingViolation,
    audit_level_shift,
    free_levels,
    levels_to_csv,
    quantized_levels,
)
from .defaults import DEFAULTS
from .dirac_core import BRANCHES, PARITIES, bound_states, default_energy_grid, phase_curve
from .levinson_audit import audit_well
from .model import ModelParams, SpecError, load_spec, spec_to_dict, validate
from .serialize import dumps, rows_to_csv, stamp
from .spectral_flow import InconsistentCountsError, count_crossings, sweep_coupling, winding_counts
from .squarewell_oracle import golden_values

EXIT_OK, EXIT_CONFIG, EXIT_AUDIT = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for audit failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="potential spec JSON file")
    common.add_argument("--lambda", dest="lam", type=_nonneg_float,
                        help="coupling (overrides the spec file)")
    common.add_argument("--lambda-steps", type=_positive(int), default=DEFAULTS["lam_steps"])
    common.add_argument("--energy-min", type=_positive(float), default=None,
                        help="smallest |E| on phase curves (default: just above m)")
    common.add_argument("--energy-max", type=_positive(float), default=DEFAULTS["e_max"],
                        help="largest |E| on phase curves, in units of m")
    common.add_argument("--grid", type=_positive(int), default=DEFAULTS["n_grid"],
                        help="scan points (bound states) or bulk points (phase curves)")
    common.add_argument("--box-L", type=_positive(float), default=None,
                        help="box half-length (default 200 a)")
    common.add_argument("--mass", type=_positive(float), default=DEFAULTS["m"])
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("json", "csv", "both"), default="json")

    p = _Parser(prog="dirac-levinson", description="1D Dirac phase shifts and Levinson audits")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("phase-curve", "phase-shift tables per parity and branch"),
                       ("bound-states", "bound levels at the given coupling"),
                       ("flow", "coupling sweep with crossing counts"),
                       ("audit", "full Levinson report"),
                       ("box", "periodic-box levels and counting verdict"),
                       ("oracle", "square-well golden fixtures")):
        sub.add_parser(name, parents=[common], help=text, description=text)
    return p


def _threads():
    raw = os.environ.get("DIRAC_LEVINSON_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"DIRAC_LEVINSON_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError("DIRAC_LEVINSON_THREADS must be at least 1")
    return n


def _fan_out(fn, items, threads):
    # results come back in input order regardless of completion order
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _load(args):
    if not args.potential:
        raise ConfigError("--potential is required for this command")
    spec = load_spec(args.potential)
    if args.lam is not None:
        spec = spec.with_lambda(args.lam)
    rep = validate(spec)
    if not rep.ok:
        raise ConfigError("invalid potential: " + "; ".join(rep.violations))
    return spec, ModelParams(m=args.mass, a=spec.a)


def _config(args, spec):
    cfg = {k: v for k, v in vars(args).items() if k not in ("out", "format", "potential")}
    if spec is not None:
        cfg["potential"] = spec_to_dict(spec)
    return cfg


class _Writer:
    def __init__(self, out, fmt):
        self.dir = Path(out)
        self.fmt = fmt
        self.files = []
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out}: {exc}")
        if not os.access(self.dir, os.W_OK):
            raise ConfigError(f"output directory {out} is not writable")

    def _put(self, name, text):
        path = self.dir / name
        try:
            path.write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc}")
        self.files.append(str(path))

    def json(self, name, doc):
        if self.fmt in ("json", "both"):
            self._put(name, dumps(doc))

    def csv(self, name, text):
        if self.fmt in ("csv", "both"):
            self._put(name, text)


# -- commands ---------------------------------------------------------------

def cmd_phase_curve(args, w, threads):
    spec, params = _load(args)
    grid = default_energy_grid(params, e_max=args.energy_max, xi_min=DEFAULTS["xi_min"],
                               n_bulk=args.grid)
    if args.energy_min is not None:
        grid = grid[grid >= args.energy_min]
        if grid.size == 0:
            raise ConfigError("--energy-min leaves no energies below --energy-max")
    jobs = [(p, b) for p in PARITIES for b in BRANCHES]
    curves = _fan_out(lambda pb: phase_curve(spec, params, pb[0], pb[1], grid, refine=True),
                      jobs, threads)
    doc = {"curves": {}}
    for (parity, branch), c in zip(jobs, curves):
        doc["curves"][f"{parity} {branch}"] = {
            "anchor": c.anchor, "E": c.E, "xi": c.xi, "delta": c.delta}
        rows = [(s.E, s.k, s.xi, s.delta_mod_pi, s.delta_unwrapped) for s in c.samples]
        w.csv(f"phase_{parity}_{branch}.csv",
              rows_to_csv(["E", "k", "xi", "delta_mod_pi", "delta"], rows))
    w.json("phase_curves.json", stamp(doc, _config(args, spec)))
    return EXIT_OK


def cmd_bound_states(args, w, threads):
    spec, params = _load(args)
    states = bound_states(spec, params, n_grid=args.grid)
    w.json("bound_states.json", stamp({"states": [asdict(b) for b in states]},
                                      _config(args, spec)))
    w.csv("bound_states.csv", rows_to_csv(
        ["parity", "index", "nodes", "E_b", "kappa", "residual"],
        [(b.parity, b.index, b.nodes, b.E_b, b.kappa, b.residual) for b in states]))
    return EXIT_OK


def cmd_flow(args, w, threads):
    spec, params = _load(args)
    trace = sweep_coupling(spec, params, lam_steps=args.lambda_steps, n_grid=args.grid)
    status = EXIT_OK
    try:
        counts = asdict(count_crossings(trace))
        ok = True
    except InconsistentCountsError as exc:
        print(f"flow: {exc}", file=sys.stderr)
        counts, ok, status = None, False, EXIT_AUDIT
    doc = {"counts": counts, "pass": ok,
           "events": [asdict(e) for e in trace.events]}
    w.json("flow_counts.json", stamp(doc, _config(args, spec)))
    w.csv("flow_trace.csv", trace.to_csv())
    return status


def cmd_audit(args, w, threads):
    spec, params = _load(args)
    report = audit_well(spec, params, lam_steps=args.lambda_steps, e_max=args.energy_max,
                        n_grid=args.grid)
    doc = report.to_dict()
    doc.pop("config_hash", None)
    w.json("levinson_report.json", stamp(doc, _config(args, spec)))
    w.csv("identities.csv", rows_to_csv(
        ["parity", "edge", "delta", "regime", "predicted", "residual", "pass"],
        [tuple(v.to_dict()[k] for k in ("parity", "edge", "delta", "regime", "predicted",
                                         "residual", "pass")) for v in report.identities]))
    return EXIT_OK if report.passed else EXIT_AUDIT


def cmd_box(args, w, threads):
    spec, params = _load(args)
    L = args.box_L
    counts = winding_counts(spec, params)
    jobs = [(p, b) for p in PARITIES for b in BRANCHES]
    tables = _fan_out(lambda pb: quantized_levels(spec, params, pb[0], pb[1], L=L), jobs, threads)
    verdicts, ok = [], True
    for (parity, branch), levels in zip(jobs, tables):
        w.csv(f"box_{parity}_{branch}.csv", levels_to_csv(levels))
        if branch != "positive":
            continue
        try:
            v = audit_level_shift(free_levels(params, parity, L=L), levels, counts, parity,
                                  spec, params)
            v["pass"] = True
        except CountingViolation as exc:
            v = {"parity": parity, "pass": False, "message": str(exc)}
            ok = False
        verdicts.append(v)
    doc = {"counts": asdict(counts), "verdicts": verdicts, "pass": ok,
           "levels": {f"{p} {b}": [asdict(lv) for lv in t] for (p, b), t in zip(jobs, tables)}}
    w.json("box_report.json", stamp(doc, _config(args, spec)))
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_oracle(args, w, threads):
    cases = golden_values()
    w.json("golden.json", stamp({"cases": cases}, _config(args, None)))
    return EXIT_OK


COMMANDS = {
    "phase-curve": cmd_phase_curve,
    "bound-states": cmd_bound_states,
    "flow": cmd_flow,
    "audit": cmd_audit,
    "box": cmd_box,
    "oracle": cmd_oracle,
}


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        threads = _threads()
        writer = _Writer(args.out, args.format)
        status = COMMANDS[args.command](args, writer, threads)
    except (ConfigError, SpecError, ValueError) as exc:
        print(f"dirac-levinson {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in writer.files:
        print(path)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
