"""Command-line interface.

Commands: simulate, pmf, moments, laplace, lrd, verify.  Exit status is 0 on
success, 1 when ``verify`` reports a failing check, 2 for configuration
errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analytic as an
from .errors import DomainError, GfnbpError, NumericalError
from .simulate import process_spec, run_ensemble
from .stats import (
    Budget,
    empirical_laplace,
    empirical_moment,
    empirical_pmf,
    lrd_fit,
    tv_distance,
    verify_suite,
)

SCHEMA_VERSION = "1"
PROCESSES = ("stable", "inverse_stable", "gamma", "ml_levy", "fpp", "gfnbp",
             "sfpp", "sfgnbp", "nh_stfnbp")
SPACE_TIME = ("sfpp", "sfgnbp", "nh_stfnbp")


class ConfigError(Exception):
    pass


def build_id() -> str:
    """``git describe`` of the source checkout, else the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--tags", "--dirty"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5, check=True)
        return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        return __version__


# -- argument parsing --------------------------------------------------------

def _params_args(sp):
    g = sp.add_argument_group("process parameters")
    g.add_argument("--alpha", type=float, default=0.9)
    g.add_argument("--beta", type=float, default=0.5)
    g.add_argument("--rho", type=float, default=1.0)
    g.add_argument("--mu", type=float, default=1.0)
    g.add_argument("--lambda", dest="lam", type=float, default=1.0)
    g.add_argument("--alpha-prime", type=float, default=None)
    g.add_argument("--beta-prime", type=float, default=1.0)
    g.add_argument("--rate", type=float, default=1.0, help="c in R(t) = c t")


def _output_args(sp):
    sp.add_argument("--output", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default="-", help="output file, '-' for stdout")


def _mc_args(sp, seed_required):
    sp.add_argument("--paths", type=int, default=0 if not seed_required else 1000)
    sp.add_argument("--seed", type=int, required=seed_required)
    sp.add_argument("--workers", type=int, default=1)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gfnbp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate sample paths (long CSV: path_id,t,value)")
    s.add_argument("--process", choices=PROCESSES, default="gfnbp")
    s.add_argument("--t-max", type=float, default=10.0)
    s.add_argument("--steps", type=int, default=200)
    _params_args(s)
    _mc_args(s, True)
    _output_args(s)

    s = sub.add_parser("pmf", help="tabulate a pmf, optionally against Monte Carlo")
    s.add_argument("--process", choices=("gfnbp", "fpp", "sfpp", "sfgnbp", "nh_stfnbp"),
                   default="gfnbp")
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--n-max", type=int, default=30)
    s.add_argument("--method", default="quadrature",
                   choices=("quadrature", "series", "exact-reduction"))
    _params_args(s)
    _mc_args(s, False)
    _output_args(s)

    s = sub.add_parser("moments", help="ML Levy moments and GFNBP mean/variance")
    s.add_argument("--t", type=float, nargs="+", default=[1.0])
    s.add_argument("--order", type=float, nargs="+", default=[0.3])
    _params_args(s)
    _mc_args(s, False)
    _output_args(s)

    s = sub.add_parser("laplace", help="Laplace transforms, analytic versus empirical")
    s.add_argument("--t", type=float, nargs="+", default=[1.0])
    s.add_argument("--u", type=float, nargs="+", default=[0.5, 1.0])
    _params_args(s)
    _mc_args(s, False)
    _output_args(s)

    s = sub.add_parser("lrd", help="log-log correlation slope of the GFNBP")
    s.add_argument("--s", type=float, default=1.0)
    s.add_argument("--t-points", type=float, nargs="+", default=[5, 10, 20, 40, 80])
    _params_args(s)
    _mc_args(s, True)
    s.set_defaults(paths=10_000)
    _output_args(s)

    s = sub.add_parser("verify", help="run the verification battery")
    _params_args(s)
    _mc_args(s, True)
    s.set_defaults(paths=100_000, output="json")
    s.add_argument("--lrd-paths", type=int, default=10_000)
    _output_args(s)
    return ap


def _params(a, need_sp=False):
    base = an.GfnbpParams(a.alpha, a.beta, a.rho, a.mu, a.lam)
    if a.alpha_prime is None and not need_sp:
        return base
    return an.SpaceTimeParams(base, 1.0 if a.alpha_prime is None else a.alpha_prime,
                              a.beta_prime, a.rate)


def _check_mc(a):
    if a.paths < 0:
        raise ConfigError("--paths must be >= 0")
    if a.paths > 0 and a.seed is None:
        raise ConfigError("--seed is required whenever --paths > 0")
    if a.seed is not None and not 0 <= a.seed < 2**64:
        raise ConfigError("--seed must lie in [0, 2^64)")


# -- output ------------------------------------------------------------------

def _num(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise NumericalError("non-finite value in output", operation="cli")
        return x
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return _num(obj)


def _envelope(a, command, body, params=None):
    env = {"schema_version": SCHEMA_VERSION, "build": build_id(), "command": command,
           "seed": a.seed if hasattr(a, "seed") else None}
    if params is not None:
        env["params"] = _param_dict(params)
    env.update(body)
    return env


def _param_dict(p):
    if isinstance(p, an.SpaceTimeParams):
        return {**p.base.as_dict(), "alpha_prime": p.alpha_prime,
                "beta_prime": p.beta_prime, "rate": p.rate}
    return p.as_dict()


def _write(a, text):
    if a.out == "-":
        sys.stdout.write(text)
    else:
        with open(a.out, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(_num(v)) if isinstance(v, float) else _num(v) for v in r])
    return buf.getvalue()


def _json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(a, header, rows, envelope):
    if a.output == "csv":
        _write(a, _csv(header, rows))
    else:
        envelope["rows"] = [dict(zip(header, r)) for r in rows]
        _write(a, _json(envelope))


# -- commands ----------------------------------------------------------------

def _spec_for(process, a):
    p = _params(a, need_sp=process in SPACE_TIME)
    return process_spec(process, p), p


def cmd_simulate(a):
    if a.steps < 1:
        raise ConfigError("--steps must be >= 1")
    if a.t_max <= 0:
        raise ConfigError("--t-max must be > 0")
    if a.paths < 1:
        raise ConfigError("--paths must be >= 1")
    _check_mc(a)
    spec, p = _spec_for(a.process, a)
    grid = np.linspace(0.0, a.t_max, a.steps + 1)
    e = run_ensemble(spec, a.paths, grid, a.seed, workers=a.workers)
    rows = [(i, float(t), v.item()) for i in range(e.n_paths) for t, v in zip(grid, e.values[i])]
    env = _envelope(a, "simulate", {"process": a.process, "kind": e.kind,
                                    "generator_id": e.generator_id}, p)
    _emit(a, ["path_id", "t", "value"], rows, env)
    return 0


def _analytic_table(a, p, n_max):
    t = a.t
    if a.process == "gfnbp":
        return an.gfnbp_pmf_table(t, p, n_max=n_max, method=a.method)
    if a.process == "fpp":
        probs = an.fpp_pmf_vector(n_max, t, p.beta, p.lam)
        return an.PmfTable(t, probs, max(1.0 - math.fsum(probs), 0.0), "quadrature")
    if a.process == "sfpp":
        return an.sfpp_pmf_table(t, p, n_max)
    if a.process == "sfgnbp":
        return an.sfgnbp_pmf_table(t, p, n_max)
    return an.nh_stfnbp_pmf_table(t, p, n_max)


def cmd_pmf(a):
    if a.n_max < 0 or a.t < 0:
        raise ConfigError("--n-max and --t must be >= 0")
    _check_mc(a)
    spec, p = _spec_for(a.process, a)
    if a.process == "fpp":
        spec = process_spec("fpp", p)
    tab = _analytic_table(a, p, a.n_max)
    probs = tab.padded(a.n_max)
    emp, tv = None, None
    if a.paths > 0:
        grid = [0.0, a.t] if a.t > 0 else [0.0]
        e = run_ensemble(spec, a.paths, grid, a.seed, workers=a.workers)
        et = empirical_pmf(e, a.t, a.n_max)
        emp, tv = et.padded(a.n_max), tv_distance(tab, et)
    rows = [(n, float(probs[n])) + ((float(emp[n]),) if emp is not None else ())
            for n in range(a.n_max + 1)]
    header = ["n", "analytic"] + (["empirical"] if emp is not None else [])
    env = _envelope(a, "pmf", {"process": a.process, "t": a.t, "method": tab.method,
                               "tail_bound": tab.tail_bound, "tv": tv, "n_paths": a.paths}, p)
    if a.output == "csv" and tv is not None:
        rows.append(("tv", tv) + ("",))
    _emit(a, header, rows, env)
    return 0


def _maybe(fn):
    try:
        return fn()
    except NumericalError:
        return None


def cmd_moments(a):
    _check_mc(a)
    p = _params(a)
    base = p.base if isinstance(p, an.SpaceTimeParams) else p
    ts = sorted(set(a.t))
    if any(t <= 0 for t in ts):
        raise ConfigError("--t values must be > 0")
    grid = [0.0, *ts]
    ml = gf = None
    if a.paths > 0:
        ml = run_ensemble(process_spec("ml_levy", base), a.paths, grid, a.seed, a.workers)
        gf = run_ensemble(process_spec("gfnbp", base), a.paths, grid, a.seed, a.workers)
    rows = []
    for t in ts:
        for l in a.order:
            ana = _maybe(lambda: an.ml_levy_moment(l, t, base))
            est = empirical_moment(ml, t, l) if ml is not None else (None, None)
            rows.append((t, f"E[M^{l:g}]", ana, *est))
        ana = _maybe(lambda: an.gfnbp_mean(t, base))
        est = empirical_moment(gf, t, 1.0) if gf is not None else (None, None)
        rows.append((t, "E[X]", ana, *est))
        ana = _maybe(lambda: an.gfnbp_variance(t, base))
        if gf is not None:
            x = gf.at(t).astype(float)
            d = (x - x.mean()) ** 2
            est = (float(x.var(ddof=1)), float(np.std(d, ddof=1) / math.sqrt(x.size)))
        else:
            est = (None, None)
        rows.append((t, "Var[X]", ana, *est))
    rows = [tuple("" if v is None and a.output == "csv" else v for v in r) for r in rows]
    _emit(a, ["t", "quantity", "analytic", "empirical", "stderr"], rows,
          _envelope(a, "moments", {"n_paths": a.paths}, p))
    return 0


def cmd_laplace(a):
    _check_mc(a)
    p = _params(a)
    base = p.base if isinstance(p, an.SpaceTimeParams) else p
    ts = sorted(set(a.t))
    if any(t <= 0 for t in ts) or any(u < 0 for u in a.u):
        raise ConfigError("--t values must be > 0 and --u values >= 0")
    grid = [0.0, *ts]
    procs = [("ml_levy", base, an.ml_levy_laplace), ("gfnbp", base, an.gfnbp_laplace)]
    if isinstance(p, an.SpaceTimeParams):
        procs.append(("sfgnbp", p, an.sfgnbp_laplace))
    rows = []
    for name, q, fn in procs:
        e = run_ensemble(process_spec(name, q), a.paths, grid, a.seed, a.workers) if a.paths else None
        for t in ts:
            for u in a.u:
                est = empirical_laplace(e, t, u) if e is not None else ("", "")
                rows.append((name, t, u, fn(u, t, q), *est))
    _emit(a, ["process", "t", "u", "analytic", "empirical", "stderr"], rows,
          _envelope(a, "laplace", {"n_paths": a.paths}, p))
    return 0


def cmd_lrd(a):
    _check_mc(a)
    if a.paths < 2:
        raise ConfigError("--paths must be >= 2")
    p = _params(a)
    base = p.base if isinstance(p, an.SpaceTimeParams) else p
    tp = sorted(set(a.t_points))
    grid = sorted({0.0, a.s, *tp})
    e = run_ensemble(process_spec("gfnbp", base), a.paths, grid, a.seed, a.workers)
    fit = lrd_fit(e, a.s, tp)
    rec = {**fit.as_dict(), "theory": an.lrd_exponent(base), "n_paths": a.paths}
    if a.output == "csv":
        _write(a, _csv(["slope", "slope_stderr", "r_squared", "theory", "s_fixed", "n_paths"],
                       [(fit.slope, fit.slope_stderr, fit.r_squared, rec["theory"],
                         fit.s_fixed, a.paths)]))
    else:
        _write(a, _json(_envelope(a, "lrd", {"fit": rec}, p)))
    return 0


def cmd_verify(a):
    _check_mc(a)
    p = _params(a)
    reports = verify_suite(p, Budget(n_paths=a.paths, lrd_paths=a.lrd_paths,
                                     master_seed=a.seed, workers=a.workers))
    ok = all(r.passed for r in reports)
    if a.output == "csv":
        _write(a, _csv(["check_id", "analytic", "empirical", "mc_stderr", "tolerance", "pass"],
                       [(r.check_id, r.analytic, r.empirical, r.mc_stderr, r.tolerance,
                         int(r.passed)) for r in reports]))
    else:
        body = {"n_paths": a.paths, "lrd_paths": a.lrd_paths, "all_pass": ok,
                "reports": [_finite_report(r) for r in reports]}
        _write(a, _json(_envelope(a, "verify", body, p)))
    return 0 if ok else 1


def _finite_report(r):
    d = r.as_dict()
    for k in ("analytic", "empirical", "mc_stderr", "tolerance"):
        if not math.isfinite(d[k]):
            d[k] = None
    d["detail"] = {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                   for k, v in d["detail"].items()}
    return d


COMMANDS = {"simulate": cmd_simulate, "pmf": cmd_pmf, "moments": cmd_moments,
            "laplace": cmd_laplace, "lrd": cmd_lrd, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"gfnbp: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"gfnbp: numerical failure in {exc.operation or args.command}: {exc}",
              file=sys.stderr)
        return 3
    except GfnbpError as exc:
        print(f"gfnbp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
