"""Command-line entry points for the verification suites.

    rrgroupoid hopf-verify --max-degree 4
    rrgroupoid gf-cohomology --format json
    rrgroupoid charmap-verify
    rrgroupoid surface-verify --grid 48
    rrgroupoid riemann-roch --degree 2
    rrgroupoid report --all

The exit status is 0 exactly when every check passes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, fields

EXPECTED_GF_DIMS = (1, 0, 1, 1, 0, 1)


@dataclass
class RunConfig:
    germ_order: int = 6
    jet_order: int = 3
    samples: int = 50
    seed: int = 0
    grid: int = 48
    bundle_grid: int = 56
    tol: float | None = None
    max_degree: int = 4
    degree: int | None = None
    format: str = "md"

    def validate(self):
        if self.germ_order < 4:
            raise ValueError("germ_order must be >= 4")
        if self.jet_order < 3:
            raise ValueError("jet_order must be >= 3")
        if self.format not in ("json", "md"):
            raise ValueError("format must be json or md")
        if self.grid < 8 or self.bundle_grid < 8:
            raise ValueError("grid sizes must be >= 8")
        if self.max_degree < 1 or self.samples < 1:
            raise ValueError("max_degree and samples must be positive")


def load_config(path: str) -> dict:
    """Flat `key = value` lines; `#` starts a comment."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError("%s:%d: expected key = value" % (path, lineno))
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in types:
                raise ValueError("%s:%d: unknown key %r" % (path, lineno, key))
            kind = types[key]
            if "float" in kind:
                out[key] = float(value)
            elif "int" in kind:
                out[key] = int(value)
            else:
                out[key] = value
    return out


@dataclass
class CheckReport:
    check: str
    status: str
    suite: str
    residual: float | None = None
    tolerance: float | None = None
    exact: bool = False
    expected: object = None
    got: object = None
    provenance: str = "DERIVED"
    counterexample: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _status(ok) -> str:
    return "pass" if ok else "fail"


def _plain(x):
    """JSON-safe values with complex numbers split."""
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "item"):
        return _plain(x.item())
    return x


# suites ------------------------------------------------------------------------------

def _exact_reports(suite: str, report: dict, provenance: str) -> list:
    out = []
    for name, r in report.items():
        extra = {k: v for k, v in r.items() if k not in ("passed", "counterexample")}
        bad = r.get("counterexample") or r.get("failures") or None
        out.append(CheckReport(name, _status(r["passed"]), suite, exact=True, provenance=provenance,
                               counterexample=None if r["passed"] else str(bad), extra=extra))
    return out


def hopf_suite(cfg: RunConfig) -> list:
    from . import formal_germs, hopf_cm, hopf_cyclic
    out = _exact_reports("hopf", hopf_cm.verify_hopf_axioms(cfg.max_degree), "REFERENCE")
    out += _exact_reports("hopf", hopf_cyclic.verify_cyclicity(3, cfg.samples, cfg.seed), "REFERENCE")
    out += _exact_reports("hopf", hopf_cyclic.verify_bicomplex(3, cfg.samples, cfg.seed), "REFERENCE")
    out += _exact_reports("hopf", hopf_cyclic.verify_simplicial(2, min(cfg.samples, 20), cfg.seed),
                          "DERIVED")
    compat = formal_germs.verify_model_compatibility(cfg.seed, 30, cfg.germ_order)
    out += _exact_reports("hopf", {"action compatibility, " + k: v for k, v in compat.items()}, "REFERENCE")
    return out


def gf_suite(cfg: RunConfig) -> list:
    from . import gelfand_fuchs as gf
    N = cfg.jet_order
    table = gf.cohomology_table(N)
    dims = {k: g.dimension for k, g in table.items()}
    got = tuple(dims.get(k, 0) for k in range(6))
    extra_ok = all(d == 0 for k, d in dims.items() if k > 5)
    out = [CheckReport("H^k dims k=0..5", _status(got == EXPECTED_GF_DIMS and extra_ok), "gf",
                       exact=True, expected=list(EXPECTED_GF_DIMS), got=list(got), provenance="REFERENCE",
                       counterexample=None if got == EXPECTED_GF_DIMS and extra_ok else str(dims),
                       extra={"table": {k: table[k].as_dict() for k in sorted(table)}, "N": N})]
    for k, rep in gf.reference_representatives().items():
        ok = gf.matches_class(rep, k, N)
        out.append(CheckReport("representative H^%d" % k, _status(ok), "gf", exact=True,
                               got=gf.to_text(rep), provenance="REFERENCE",
                               counterexample=None if ok else gf.to_text(rep)))
    for r in (1, 2, -1, -2):
        res = gf.acyclicity_check(r, range(0, 5))
        out.append(CheckReport("acyclic weight %d" % r, _status(res["passed"]), "gf", exact=True,
                               provenance="REFERENCE", counterexample=res["counterexample"],
                               extra={"checked": res["checked"]}))
    return out


def charmap_suite(cfg: RunConfig) -> list:
    from . import char_map
    out = _exact_reports("charmap", char_map.charmap_report(cfg.seed), "REFERENCE")
    out += _exact_reports("charmap", char_map.symbolic_cocycle_identity_check(seed=cfg.seed), "DERIVED")
    return out


def _numeric_reports(suite: str, report: dict) -> list:
    out = []
    for name, r in report.items():
        extra = {k: v for k, v in r.items() if k not in ("value", "tol", "passed")}
        out.append(CheckReport(name, _status(r["passed"]), suite, residual=r["value"],
                               tolerance=r["tol"], provenance="DERIVED",
                               counterexample=None if r["passed"] else "residual %.3e" % r["value"],
                               extra=extra))
    return out


def surface_suite(cfg: RunConfig) -> list:
    from . import surface_numeric as sn
    return _numeric_reports("surface", sn.surface_report(cfg.seed, cfg.tol, cfg.grid, cfg.bundle_grid))


def riemann_roch_suite(cfg: RunConfig) -> list:
    from . import surface_numeric as sn
    degrees = [cfg.degree] if cfg.degree is not None else [0, 1, 2]
    out = []
    for d in degrees:
        res = sn.riemann_roch_check(d, cfg.grid, cfg.tol or 1e-3)
        out.append(CheckReport("Riemann-Roch d=%d" % d, _status(res["passed"]), "riemann-roch",
                               residual=res["error"], tolerance=cfg.tol or 1e-3,
                               expected=res["expected"], got=res["value"].real, provenance="DERIVED",
                               extra={"k_times_2pi_i": res["k_times_2pi_i"], "grid": cfg.grid}))
    return out


SUITES = {
    "hopf-verify": [hopf_suite],
    "gf-cohomology": [gf_suite],
    "charmap-verify": [charmap_suite],
    "surface-verify": [surface_suite],
    "riemann-roch": [riemann_roch_suite],
    "report": [hopf_suite, gf_suite, charmap_suite, surface_suite],
}


# output -------------------------------------------------------------------------------

def summary(reports: list) -> dict:
    passed = sum(r.passed for r in reports)
    return {"total": len(reports), "passed": passed, "failed": len(reports) - passed}


def to_json(reports: list) -> str:
    rows = [_plain(asdict(r)) for r in reports]
    rows.append(summary(reports))
    return json.dumps(rows, indent=2, sort_keys=True)


def to_markdown(reports: list) -> str:
    lines = ["| suite | check | status | residual | tolerance |", "|---|---|---|---|---|"]
    for r in reports:
        res = "exact" if r.exact else ("" if r.residual is None else "%.2e" % r.residual)
        tol = "" if r.tolerance is None else "%.0e" % r.tolerance
        lines.append("| %s | %s | %s | %s | %s |" % (r.suite, r.check, r.status, res, tol))
    s = summary(reports)
    lines.append("")
    lines.append("%d checks, %d passed, %d failed" % (s["total"], s["passed"], s["failed"]))
    for r in reports:
        if not r.passed:
            lines.append("- FAIL %s: %s" % (r.check, r.counterexample))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrgroupoid", description="Run the verification suites.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    common.add_argument("--format", choices=["json", "md"])
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-degree", type=int, dest="max_degree")
    common.add_argument("--grid", type=int)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITES:
        p = sub.add_parser(name, parents=[common])
        if name == "riemann-roch":
            p.add_argument("--degree", type=int)
        if name == "report":
            p.add_argument("--all", action="store_true", help="run every suite (the default)")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for key in ("format", "seed", "tol", "max_degree", "grid", "degree"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def run(command: str, cfg: RunConfig) -> tuple[int, str, list]:
    reports = []
    for suite in SUITES[command]:
        reports.extend(suite(cfg))
    text = to_json(reports) if cfg.format == "json" else to_markdown(reports)
    return (0 if all(r.passed for r in reports) else 1), text, reports


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    code, text, _ = run(args.command, cfg)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
