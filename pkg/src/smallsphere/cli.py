"""Command-line front end for batch verification runs.

Three commands:

* ``verify``  runs the full exact ledger (identities, potential solve,
  Codazzi, the six integrals, bulk terms, final coefficients, gradient
  path) over random jets plus the flat and round presets; exit 0 only if
  every ledger entry passes.
* ``expand``  prints the mass expansion of one jet with the Hawking
  comparison and per-radius values.
* ``oracle``  runs the floating-point geodesic-sphere fits against the
  exact fields; exit 0 only if every tolerance check passes.

JSON is the machine interface; tables and figures are derived from it.
Identical configuration (including the seed) yields byte-identical JSON.
Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

from . import curvature, mass, oracle
from .errors import InputError, SmallSphereError
from .rational import format_rational, parse_rational

ENV_SEED = "SMALLSPHERE_SEED"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    seed: int = 0
    trials: int = 50
    ricci: str | None = None
    delta_r: object = None
    radii: tuple = oracle.DEFAULT_RADII
    grid: tuple = oracle.DEFAULT_GRID
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str = "json"
    plot: bool = True

    def validate(self):
        if self.trials < 1:
            raise InputError("--trials must be at least 1")
        if not self.radii:
            raise InputError("--radii must not be empty")
        if any(r <= 0 for r in self.radii):
            raise InputError("radii must be positive")
        if any(self.radii[i] <= self.radii[i + 1]
               for i in range(len(self.radii) - 1)):
            raise InputError("radii must be strictly decreasing")
        if self.command == "oracle" and (self.grid[0] < 16 or self.grid[1] < 32):
            raise InputError("oracle grid must be at least 16x32")

    def to_dict(self):
        data = {
            "command": self.command,
            "seed": self.seed,
            "format": self.fmt,
        }
        if self.command == "verify":
            data["trials"] = self.trials
        if self.ricci is not None:
            data["ricci"] = self.ricci
        if self.delta_r is not None:
            data["deltaR"] = format_rational(self.delta_r)
        if self.command in ("expand", "oracle"):
            data["radii"] = [float(r) for r in self.radii]
        if self.command == "oracle":
            data["grid"] = list(self.grid)
            data["tolerances"] = {k: v for k, v in sorted(
                self.tolerances.items())}
        return data


def _parse_radii(text):
    try:
        radii = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise InputError(f"bad radii list {text!r}") from None
    return radii


def _parse_grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise InputError(f"bad grid {text!r}, expected e.g. 32x64") from None


def _default_seed():
    value = os.environ.get(ENV_SEED)
    if value is None:
        return 0
    try:
        return int(value)
    except ValueError:
        raise InputError(f"{ENV_SEED} must be an integer, got {value!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="smallsphere",
        description="Exact verification of the small-sphere mass expansion "
                    "of static extensions, with a numerical oracle.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, radii_default=True):
        p.add_argument("--seed", type=int, default=None,
                       help=f"base seed (default: ${ENV_SEED} or 0)")
        p.add_argument("--ricci", default=None,
                       help="flat | round:a | random:n | file:path")
        p.add_argument("--delta-r", default=None,
                       help="Laplacian of scalar curvature as p/q")
        p.add_argument("--out", default=None,
                       help="write the report to this path "
                            "(figures are rendered alongside)")
        p.add_argument("--format", dest="fmt", default="json",
                       choices=("json", "table", "csv"))
        p.add_argument("--no-plot", dest="plot", action="store_false",
                       help="suppress figure rendering")

    p_verify = sub.add_parser("verify", help="run the exact ledger")
    common(p_verify)
    p_verify.add_argument("--trials", type=int, default=50)

    p_expand = sub.add_parser("expand", help="print the mass expansion")
    common(p_expand)
    p_expand.add_argument("--radii", default=None,
                          help="comma-separated decreasing radii")

    p_oracle = sub.add_parser("oracle", help="numerical verification")
    common(p_oracle)
    p_oracle.add_argument("--radii", default=None)
    p_oracle.add_argument("--grid", default=None, help="e.g. 32x64")
    for name in ("sigma-dot", "h-dot", "h-ddot", "k-dot", "flat-abs"):
        p_oracle.add_argument(f"--tol-{name}", type=float, default=None)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.seed = args.seed if args.seed is not None else _default_seed()
    cfg.ricci = args.ricci
    if args.delta_r is not None:
        cfg.delta_r = parse_rational(args.delta_r)
    cfg.out = args.out
    cfg.fmt = args.fmt
    cfg.plot = args.plot
    if getattr(args, "trials", None) is not None:
        cfg.trials = args.trials
    if getattr(args, "radii", None):
        cfg.radii = _parse_radii(args.radii)
    if getattr(args, "grid", None):
        cfg.grid = _parse_grid(args.grid)
    for name in ("sigma_dot", "h_dot", "h_ddot", "k_dot", "flat_abs"):
        value = getattr(args, f"tol_{name}", None)
        if value is not None:
            cfg.tolerances[name] = value
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _json_text(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _emit(cfg: RunConfig, doc, table_lines, csv_rows, figures=()):
    if cfg.fmt == "json":
        text = _json_text(doc)
    elif cfg.fmt == "table":
        text = "\n".join(table_lines) + "\n"
    else:
        text = _csv_text(csv_rows)
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        if cfg.plot:
            stem = os.path.splitext(cfg.out)[0]
            for suffix, render in figures:
                render(stem + suffix)


def _zero_derivative_jet():
    zeros = [[[[0] * 3 for _ in range(3)] for _ in range(3)]
             for _ in range(3)]
    return curvature.derivative_jet_from_tensor(zeros, 0)


def _derivative_jet_for(cfg: RunConfig, seed):
    if cfg.delta_r is None:
        return _zero_derivative_jet()
    return curvature.random_derivative_jet(seed, delta_r=cfg.delta_r)


def _poly_string(m3, m5):
    """Human form like 'm(r) = 1/2 r^3 - 1/4 r^5'."""
    terms = []
    for coeff, power in ((m3, "r^3"), (m5, "r^5")):
        if coeff == 0:
            continue
        sign = "-" if coeff < 0 else "+"
        mag = format_rational(abs(coeff))
        terms.append((sign, f"{mag} {power}"))
    if not terms:
        return "m(r) = 0"
    first_sign, first = terms[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, term in terms[1:]:
        text += f" {sign} {term}"
    return "m(r) = " + text


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    if cfg.ricci is not None:
        jets = [(cfg.ricci, curvature.jet_from_source(cfg.ricci),
                 _derivative_jet_for(cfg, cfg.seed))]
    else:
        jets = [("flat", curvature.flat_jet(), _zero_derivative_jet()),
                ("round:1", curvature.round_jet(1), _zero_derivative_jet())]
        for i in range(cfg.trials):
            seed = cfg.seed + i
            jets.append((f"random:{seed}", curvature.random_jet(seed),
                         curvature.random_derivative_jet(
                             seed, delta_r=cfg.delta_r)))

    runs = []
    for label, jet, djet in jets:
        report = mass.full_expansion(jet, djet)
        runs.append((label, report))

    all_pass = all(report.all_pass() for _, report in runs)
    doc = {
        "config": cfg.to_dict(),
        "runs": [dict(label=label, **report.to_dict())
                 for label, report in runs],
        "allPass": all_pass,
    }
    table = []
    csv_rows = [("run", "entry", "computed", "paper", "pass")]
    for label, report in runs:
        ok = report.all_pass()
        table.append(f"{'PASS' if ok else 'FAIL'}  {label:<14} "
                     f"m_dot={format_rational(report.m_dot)} "
                     f"m_ddot={format_rational(report.m_ddot)}")
        for entry in report.ledger:
            if not entry.passed:
                table.append(f"      FAILED ENTRY {entry.name}: "
                             f"{entry.computed} != {entry.paper}")
            csv_rows.append((label, entry.name,
                             format_rational(entry.computed),
                             format_rational(entry.paper), entry.passed))
    table.append(f"{len(runs)} runs, all pass: {all_pass}")

    def render_ledger(path):
        from . import plots
        return plots.ledger_figure(runs, path)

    _emit(cfg, doc, table, csv_rows, [("_ledger.png", render_ledger)])
    return 0 if all_pass else 1


def cmd_expand(cfg: RunConfig) -> int:
    source = cfg.ricci if cfg.ricci is not None else "round:1"
    jet = curvature.jet_from_source(source)
    djet = _derivative_jet_for(cfg, cfg.seed)
    report = mass.full_expansion(jet, djet, radii=cfg.radii)

    doc = {"config": cfg.to_dict(), "expansion": report.to_dict()}
    m5 = report.m_ddot + report.delta_r_coeff
    table = [
        _poly_string(report.m_dot, m5),
        f"  r^3 coefficient: {format_rational(report.m_dot)}",
        f"  r^5 coefficient: {format_rational(report.m_ddot)} (curvature)"
        f" + {format_rational(report.delta_r_coeff)} (gradient term)",
        "Hawking comparison: " + _poly_string(
            report.hawking_dot, report.hawking_ddot),
        f"r^5 gap (static - Hawking): "
        f"{format_rational(report.static_minus_hawking_gap())}",
    ]
    for flag in report.flags:
        table.append(f"flag {flag['name']}: {flag['detail']}")
    table.append(f"{'radius':>10} {'static':>24} {'hawking':>24}")
    csv_rows = [("radius", "static", "hawking")]
    for r, m_static, m_hawking in report.radii:
        table.append(f"{r:>10.6g} {m_static:>24.17g} {m_hawking:>24.17g}")
        csv_rows.append((f"{r:.17g}", f"{m_static:.17g}",
                         f"{m_hawking:.17g}"))

    def render_mass(path):
        from . import plots
        return plots.mass_expansion_figure(report, path)

    _emit(cfg, doc, table, csv_rows, [("_mass.png", render_mass)])
    return 0 if report.all_pass() else 1


def cmd_oracle(cfg: RunConfig) -> int:
    source = cfg.ricci if cfg.ricci is not None else "round:1"
    jet = curvature.jet_from_source(source)
    scale = oracle.scale_factor_for_radius(jet, max(cfg.radii))
    jet = jet.scaled(scale)
    grid = oracle.make_grid(*cfg.grid)
    result = oracle.fit_expansion(jet, radii=cfg.radii, grid=grid)
    checks = oracle.evaluate_tolerances(result, jet, cfg.tolerances)
    all_pass = all(ok for *_, ok in checks)

    doc = {
        "config": cfg.to_dict(),
        "jetScale": format_rational(scale),
        "fit": result.to_dict(),
        "checks": [{"name": name, "delta": delta, "tolerance": tol,
                    "pass": ok} for name, delta, tol, ok in checks],
        "allPass": all_pass,
    }
    table = [f"jet scale {format_rational(scale)}, grid "
             f"{cfg.grid[0]}x{cfg.grid[1]}, radii "
             + ",".join(str(r) for r in cfg.radii)]
    csv_rows = [("check", "delta", "tolerance", "pass")]
    for name, delta, tol, ok in checks:
        table.append(f"{'PASS' if ok else 'FAIL'}  {name:<14} "
                     f"delta={delta:.3e} tol={tol:.1e}")
        csv_rows.append((name, f"{delta:.17g}", f"{tol:.17g}", ok))
    for q in result.quantities:
        orders = ["%.2f" % o if o is not None else "-"
                  for o in q.convergence]
        table.append(f"{q.name:<10} remainder convergence orders: "
                     + " ".join(orders))
    table.append(f"all pass: {all_pass}")

    def render_convergence(path):
        from . import plots
        return plots.oracle_convergence_figure(result, path)

    if cfg.out:
        oracle.write_quantity_csv(result, os.path.splitext(cfg.out)[0])
    _emit(cfg, doc, table, csv_rows, [("_convergence.png",
                                       render_convergence)])
    return 0 if all_pass else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        if cfg.command == "expand":
            return cmd_expand(cfg)
        return cmd_oracle(cfg)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SmallSphereError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
