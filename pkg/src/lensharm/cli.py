"""Command-line front end.

Exit codes: 0 ok, 1 I/O error, 2 invalid input (parameters, cone, dimension),
3 convergence check failed, 4 work budget exceeded, 5 spectra differ.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import cones as cone_mod
from . import isospectral as iso
from . import measures
from .lattice import DimensionError, LensParams, LensParamsError, build_lattice, contains
from .spectral import spectrum_table

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_BUDGET, EXIT_DIFFER = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


@dataclasses.dataclass
class RunConfig:
    subcommand: str
    action: str | None = None
    q: int | None = None
    p: tuple[int, ...] | None = None
    points: tuple[tuple[int, ...], ...] = ()
    cone: str = "orthant"
    kind: str = "nu"
    t_max: int | None = None
    s_max: int | None = None
    samples: int = 4
    tolerance: float = measures.DEFAULT_TOLERANCE
    budget: int = measures.DEFAULT_BUDGET
    csv: str | None = None
    a: tuple[int, ...] | None = None
    b: tuple[int, ...] | None = None
    depth: str = "auto"
    verify_depth: int = 60
    n: int | None = None
    q_min: int = 1
    q_max: int | None = None
    region: str = "full"
    format: str = "human"
    output: str | None = None
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise CliError(f"unknown config fields: {', '.join(unknown)}")
        if "subcommand" not in data:
            raise CliError("config needs a 'subcommand' field")
        data = dict(data)
        for key in ("p", "a", "b"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        if "points" in data:
            data["points"] = tuple(tuple(x) for x in data["points"])
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        if self.format not in ("human", "json", "csv"):
            raise CliError(f"unknown format {self.format!r}")
        for name in ("t_max", "s_max", "samples", "budget", "verify_depth", "workers"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise CliError(f"{name} must be nonnegative")
        if self.workers < 1:
            raise CliError("workers must be positive")

    def lens_params(self) -> LensParams:
        if self.q is None or self.p is None:
            raise CliError("--q and --p are required")
        return LensParams(self.q, self.p)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _fjson(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- subcommands ------------------------------------------------------------

def cmd_lattice(cfg: RunConfig) -> tuple[int, str]:
    lat = build_lattice(cfg.lens_params())
    basis = [list(r) for r in lat.basis]
    members = [(pt, contains(lat, pt)) for pt in cfg.points]
    if cfg.format == "json":
        doc = {"q": lat.q, "p": list(lat.params.p), "basis": basis, "det": lat.det()}
        if members:
            doc["membership"] = [{"point": list(pt), "member": m} for pt, m in members]
        return EXIT_OK, dump_json(doc)
    if cfg.format == "csv":
        lines = ["row," + ",".join(f"c{j + 1}" for j in range(lat.n))]
        lines += [f"{i + 1}," + ",".join(map(str, r)) for i, r in enumerate(basis)]
        return EXIT_OK, "\n".join(lines) + "\n"
    width = max(len(str(x)) for r in basis for x in r)
    out = [f"lattice of {lat.params}", "basis (columns generate T):"]
    out += ["  [" + " ".join(str(x).rjust(width) for x in r) + "]" for r in basis]
    out.append(f"det {lat.det()}")
    out += [f"{pt}: {'member' if m else 'not a member'}" for pt, m in members]
    return EXIT_OK, "\n".join(out) + "\n"


def cmd_spectrum(cfg: RunConfig) -> tuple[int, str]:
    if cfg.s_max is None:
        raise CliError("--smax is required")
    params = cfg.lens_params()
    table = spectrum_table(build_lattice(params), cfg.s_max)
    if cfg.format == "json":
        rows = [r._asdict() for r in table.rows]
        return EXIT_OK, dump_json({"q": params.q, "p": list(params.p), "rows": rows})
    if cfg.format == "csv":
        lines = ["s,eigenvalue,multiplicity,cumulative"]
        lines += [f"{r.s},{r.eigenvalue},{r.multiplicity},{r.cumulative}" for r in table.rows]
        return EXIT_OK, "\n".join(lines) + "\n"
    out = [f"spectrum of {params}", f"{'s':>4} {'eigenvalue':>12} {'multiplicity':>14} {'cumulative':>14}"]
    out += [f"{r.s:>4} {r.eigenvalue:>12} {r.multiplicity:>14} {r.cumulative:>14}" for r in table.rows]
    return EXIT_OK, "\n".join(out) + "\n"


def _load_cone(spec: str, n: int):
    if spec == "orthant":
        return cone_mod.SimplicialCone.standard(n)
    try:
        text = Path(spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read cone file {spec}: {exc}", EXIT_IO)
    try:
        cone = cone_mod.parse_cone(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"invalid cone in {spec}: {exc}")
    if cone.n != n:
        raise CliError(f"cone has dimension {cone.n}, lattice has n={n}")
    return cone


def _write_side(path: str, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO)


def cmd_measure(cfg: RunConfig) -> tuple[int, str]:
    params = cfg.lens_params()
    lat = build_lattice(params)
    cone = _load_cone(cfg.cone, lat.n)
    if cfg.kind not in ("nu", "mu"):
        raise CliError("--kind must be nu or mu")
    top = cfg.t_max if cfg.kind == "nu" else cfg.s_max
    top = top if top is not None else (cfg.s_max if cfg.kind == "nu" else cfg.t_max)
    if not top:
        raise CliError("--tmax (nu) or --smax (mu) is required")
    schedule = measures.doubling_schedule(top, max(1, cfg.samples))
    func = measures.nu_empirical if cfg.kind == "nu" else measures.mu_empirical
    code = EXIT_OK
    try:
        report = func(lat, cone, schedule, tolerance=cfg.tolerance, budget=cfg.budget)
        if not report.passed:
            code = EXIT_CONVERGENCE
    except measures.BudgetExceeded as exc:
        report = exc.report
        code = EXIT_BUDGET
    if cfg.csv:
        _write_side(cfg.csv, report.to_csv())
    if cfg.format == "csv":
        return code, report.to_csv()
    if cfg.format == "json":
        return code, dump_json(report.to_dict())
    out = [
        f"{cfg.kind} of {params} on cone {cfg.cone}",
        f"closed form {_frac(report.closed_form)}",
    ]
    out += [f"  t={t:<6} ratio={float(r):.10f}" for t, r in report.samples]
    if report.samples:
        out.append(f"relative error {report.final_relative_error:.4%}")
    if code == EXIT_BUDGET:
        out.append("incomplete: work budget exceeded")
    else:
        out.append("converged" if report.passed else "not converged")
    return code, "\n".join(out) + "\n"


def cmd_weyl(cfg: RunConfig) -> tuple[int, str]:
    lat = build_lattice(cfg.lens_params())
    wc = measures.weyl_constants(lat.n, lat.q)
    chk = measures.total_measure_check(lat)
    if cfg.format == "json":
        doc = {
            "q": lat.q, "p": list(lat.params.p), "n": lat.n,
            "weyl_limit": _fjson(wc.weyl_limit),
            "paper_total": _fjson(wc.paper_total),
            "orthant_limit": _fjson(wc.orthant_limit),
            "orthant_total": _fjson(chk.total),
            "matches_weyl": chk.matches_weyl,
            "matches_paper_total": chk.matches_paper,
            "verdict": chk.verdict,
        }
        return EXIT_OK, dump_json(doc)
    rows = [
        ("weyl_limit", wc.weyl_limit, wc.weyl_limit_decimal),
        ("paper_total", wc.paper_total, wc.paper_total_decimal),
        ("orthant_limit", wc.orthant_limit, wc.orthant_limit_decimal),
        ("orthant_total", chk.total, None),
    ]
    if cfg.format == "csv":
        lines = ["name,value"] + [f"{k},{_frac(v)}" for k, v, _ in rows]
        lines.append(f"verdict,{chk.verdict}")
        return EXIT_OK, "\n".join(lines) + "\n"
    out = [f"Weyl constants for {lat.params} (n={lat.n})"]
    out += [(f"{k:<14} {_frac(v):<14}" + (f" ~ {d}" if d else "")).rstrip() for k, v, d in rows]
    out.append(f"verdict: {chk.verdict}")
    return EXIT_OK, "\n".join(out) + "\n"


def _tuple_params(t):
    if t is None:
        raise CliError("--a and --b are required")
    if len(t) < 3:
        raise CliError(f"expected q,p1,...,pn with n >= 2, got {','.join(map(str, t))}")
    return LensParams(t[0], tuple(t[1:]))


def cmd_isospec(cfg: RunConfig) -> tuple[int, str]:
    if cfg.action == "check":
        a, b = _tuple_params(cfg.a), _tuple_params(cfg.b)
        if a.n != b.n:
            raise CliError(f"dimension mismatch: n={a.n} vs n={b.n}")
        depth = 2 * max(a.q, b.q) if cfg.depth == "auto" else int(cfg.depth)
        v = iso.isospectral(a, b, depth)
        code = EXIT_OK if v.isospectral_up_to_K else EXIT_DIFFER
        if cfg.format == "json":
            doc = {
                "a": {"q": a.q, "p": list(a.p)}, "b": {"q": b.q, "p": list(b.p)},
                "depth": depth, "isospectral_up_to_K": v.isospectral_up_to_K,
                "first_differing_shell": v.first_differing_shell,
            }
            return code, dump_json(doc)
        if v.isospectral_up_to_K:
            return code, f"{a} and {b}: shell profiles agree through depth {depth}\n"
        return code, f"{a} and {b}: shell profiles differ, first differing shell {v.first_differing_shell}\n"
    if cfg.action == "search":
        if cfg.n is None or cfg.q_max is None:
            raise CliError("--n and --qmax are required")
        K = None if cfg.depth == "auto" else int(cfg.depth)
        pairs = iso.search_pairs(cfg.n, range(cfg.q_min, cfg.q_max + 1), K=K,
                                 verify_depth=cfg.verify_depth, workers=cfg.workers)
        if cfg.format == "csv":
            lines = ["q,p1,p2,verified_depth"]
            lines += [f"{x.q},{' '.join(map(str, x.p1))},{' '.join(map(str, x.p2))},{x.verified_depth}"
                      for x in pairs]
            return EXIT_OK, "\n".join(lines) + "\n"
        return EXIT_OK, "".join(json.dumps(x.to_dict(), sort_keys=True) + "\n" for x in pairs)
    raise CliError("isospec needs 'check' or 'search'")


def cmd_oracle(cfg: RunConfig) -> tuple[int, str]:
    from . import oracle

    params = cfg.lens_params()
    s_max = cfg.s_max if cfg.s_max is not None else 10
    if cfg.action == "molien":
        values = oracle.molien_multiplicity(params, s_max)
    else:
        values = [oracle.brute_shell_count(params, cfg.region, s) for s in range(s_max + 1)]
    doc = {"q": params.q, "p": list(params.p), "kind": cfg.action or "shell",
           "region": cfg.region, "values": values}
    return EXIT_OK, dump_json(doc)


COMMANDS = {
    "lattice": cmd_lattice,
    "spectrum": cmd_spectrum,
    "measure": cmd_measure,
    "weyl": cmd_weyl,
    "isospec": cmd_isospec,
    "oracle": cmd_oracle,
}


# -- argument parsing -------------------------------------------------------

def _common(sp, params=True):
    if params:
        sp.add_argument("--q", type=int)
        sp.add_argument("--p", type=_int_list, help="comma-separated p_1,...,p_n")
    sp.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sp.add_argument("--output", "-o")
    sp.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lensharm",
        description="Lens-space spectra, harmonic-counting measures and isospectrality.",
    )
    parser.add_argument("--config", help="JSON RunConfig file (replaces other flags)")
    sub = parser.add_subparsers(dest="subcommand", metavar="{lattice,spectrum,measure,weyl,isospec}")

    sp = sub.add_parser("lattice", help="canonical basis and membership")
    _common(sp)
    sp.add_argument("--point", dest="points", type=_int_list, action="append", default=[])

    sp = sub.add_parser("spectrum", help="eigenvalue multiplicity table")
    _common(sp)
    sp.add_argument("--smax", dest="s_max", type=int)

    sp = sub.add_parser("measure", help="empirical vs closed-form nu or mu")
    _common(sp)
    sp.add_argument("--kind", choices=("nu", "mu"), default="nu")
    sp.add_argument("--cone", default="orthant", help="'orthant' or a cone file")
    sp.add_argument("--tmax", dest="t_max", type=int)
    sp.add_argument("--smax", dest="s_max", type=int)
    sp.add_argument("--samples", type=int, default=4, help="number of doubling samples")
    sp.add_argument("--tolerance", type=float, default=measures.DEFAULT_TOLERANCE)
    sp.add_argument("--budget", type=int, default=measures.DEFAULT_BUDGET)
    sp.add_argument("--csv", help="also write the (t, ratio) series here")

    sp = sub.add_parser("weyl", help="Weyl-law constants and total-mass verdict")
    _common(sp)

    sp = sub.add_parser("isospec", help="isospectrality check or search")
    isub = sp.add_subparsers(dest="action")
    ck = isub.add_parser("check")
    _common(ck, params=False)
    ck.add_argument("--a", type=_int_list, required=True, help="q,p1,...,pn")
    ck.add_argument("--b", type=_int_list, required=True, help="q,p1,...,pn")
    ck.add_argument("--depth", default="auto")
    se = isub.add_parser("search")
    _common(se, params=False)
    se.add_argument("--n", type=int, required=True)
    se.add_argument("--qmin", dest="q_min", type=int, default=1)
    se.add_argument("--qmax", dest="q_max", type=int, required=True)
    se.add_argument("--depth", default="auto")
    se.add_argument("--verify-depth", dest="verify_depth", type=int, default=60)

    sp = sub.add_parser("oracle")  # undocumented: reference counts
    _common(sp)
    sp.add_argument("action", choices=("shell", "molien"))
    sp.add_argument("--region", default="full", choices=("full", "closed", "open"))
    sp.add_argument("--smax", dest="s_max", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    names = {f.name for f in dataclasses.fields(RunConfig)}
    data = {k: v for k, v in vars(args).items() if k in names and v is not None}
    if "points" in data:
        data["points"] = tuple(data["points"])
    cfg = RunConfig(**data)
    cfg.validate()
    return cfg


def _apply_env(cfg: RunConfig) -> RunConfig:
    env = os.environ.get("LENSHARM_WORKERS")
    if env:
        try:
            cfg.workers = max(1, int(env))
        except ValueError:
            raise CliError(f"LENSHARM_WORKERS must be an integer, got {env!r}")
    return cfg


def run(argv=None) -> tuple[int, str, str]:
    """Run the CLI; returns (exit code, stdout text, stderr text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    try:
        if args.config:
            try:
                data = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except OSError as exc:
                raise CliError(f"cannot read config: {exc}", EXIT_IO)
            except json.JSONDecodeError as exc:
                raise CliError(f"config is not valid JSON: {exc}")
            cfg = RunConfig.from_dict(data)
        else:
            if not args.subcommand:
                parser.print_usage(sys.stderr)
                return EXIT_INVALID, "", ""
            cfg = config_from_args(args)
        cfg = _apply_env(cfg)
        if cfg.subcommand not in COMMANDS:
            raise CliError(f"unknown subcommand {cfg.subcommand!r}")
        code, text = COMMANDS[cfg.subcommand](cfg)
        if cfg.output:
            _write_side(cfg.output, text)
            text = ""
        return code, text, ""
    except LensParamsError as exc:
        return EXIT_INVALID, "", f"error: {exc}\n"
    except (DimensionError, cone_mod.DegenerateConeError) as exc:
        return EXIT_INVALID, "", f"error: {exc}\n"
    except CliError as exc:
        return exc.code, "", f"error: {exc}\n"
    except (TypeError, ValueError) as exc:
        return EXIT_INVALID, "", f"error: {exc}\n"


def main(argv=None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
