"""Command-line front end.

::

    conebessel eval rank1 --mu 1.5 --grid 0:10:101
    conebessel eval bessel --field c --q 2 --mu 3 --grid 0:2:5
    conebessel eval psi --q 2 --mu 2.5 --xi 1,0.5 --grid 0:2:5
    conebessel eval dunkl --q 2 --k1 0.5 --k2 0.5 --z 1,0.5 --grid 0:2:5
    conebessel verify --suite product-formula --q 2 --d 1 --mu 3 --samples 1e6
    conebessel sample --conv cone --q 2 --mu 2.5 --r 1,0.3 --s 0.8,0.2
    conebessel sample --conv chamber --q 1 --mu 1.0 --xi 1 --eta 0.5

Exit codes: 0 success, 1 invalid arguments, 2 failed verification,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import dataclass

import numpy as np
from scipy import special

from .algebra import Field, PoleError, embedded_diag, embedded_spectrum
from .bessel import PochhammerZeroError, SeriesConvergenceError, SeriesParams, bessel_cone_spectrum
from .chamber import (
    MultiplicityB,
    character_psi,
    chamber_samples,
    dunkl_bessel_B,
    multiplicity_from_mu,
    mu_from_multiplicity,
)
from .cone import ConeIndex, convolution_points, convolution_route
from .montecarlo import DEFAULT_SEED
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated command-line configuration."""

    command: str
    field: Field
    q: int
    mu: float
    k: MultiplicityB
    samples: int | None
    seed: int
    tol: float
    out: str | None
    format: str

    @classmethod
    def from_args(cls, ns) -> "RunConfig":
        field = Field.parse(ns.d if ns.d is not None else ns.field or "r")
        if ns.field is not None and ns.d is not None and Field.parse(ns.field) is not field:
            raise ConfigError("--field and --d disagree")
        q = ns.q
        if q < 1:
            raise ConfigError("--q must be positive")
        has_k = ns.k1 is not None or ns.k2 is not None
        if ns.mu is not None and has_k:
            raise ConfigError("give either --mu or --k1/--k2, not both")
        if has_k:
            if ns.k1 is None or ns.k2 is None:
                raise ConfigError("--k1 and --k2 go together")
            k = MultiplicityB(ns.k1, ns.k2)
            mu, alpha = mu_from_multiplicity(k, q)
            if ns.field is None and ns.d is None:
                d = 2 * k.k2
                if d in (1, 2, 4):
                    field = Field.parse(int(d))
        else:
            mu = 1.0 + field.d * (q - 1) / 2 if ns.mu is None else ns.mu
            k = multiplicity_from_mu(mu, field.d, q)
        samples = None
        if ns.samples is not None:
            samples = int(float(ns.samples))
            if samples < 1:
                raise ConfigError("--samples must be positive")
        if not ns.tol > 0:
            raise ConfigError("--tol must be positive")
        return cls(ns.command, field, q, float(mu), k, samples,
                   DEFAULT_SEED if ns.seed is None else ns.seed, ns.tol, ns.out, ns.format)


def _floats(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ConfigError(f"--{name} expects comma-separated numbers, got {text!r}") from None


def _grid(text: str) -> np.ndarray:
    try:
        start, stop, num = text.split(":")
        return np.linspace(float(start), float(stop), int(num))
    except ValueError:
        raise ConfigError(f"--grid expects start:stop:num, got {text!r}") from None


def _points(ns, q: int) -> np.ndarray:
    if ns.points:
        pts = np.array([_floats(p, "points") for p in ns.points.split(";")])
        if pts.shape[1] != q:
            raise ConfigError(f"--points need {q} coordinates each")
        return pts
    axis = _grid(ns.grid)
    return np.array(list(itertools.product(axis, repeat=q)))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".16e")
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def _write(cfg: RunConfig, columns: list, rows: list, meta: dict) -> None:
    if cfg.format == "json":
        payload = {"meta": _jsonable(meta), "columns": columns,
                   "rows": [[_jsonable(v) for v in r] for r in rows]}
        text = json.dumps(payload, indent=1, sort_keys=False) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(cfg: RunConfig, **extra) -> dict:
    return {"command": cfg.command, "field": cfg.field.name.lower(), "q": cfg.q, "mu": cfg.mu,
            "k1": cfg.k.k1, "k2": cfg.k.k2, "seed": cfg.seed, "tol": cfg.tol, **extra}


def cmd_eval(cfg: RunConfig, ns) -> int:
    params = SeriesParams(tol=cfg.tol)
    q, d = cfg.q, cfg.field.d
    fn = ns.function
    extra = {"function": fn}
    if fn == "rank1":
        if q != 1:
            raise ConfigError("rank1 evaluates J_mu(z^2/4) = j_(mu-1)(z) and needs --q 1")
        z = _points(ns, 1)[:, 0]
        res = bessel_cone_spectrum(cfg.mu, (z**2 / 4)[:, None], 1, params)
        ref = np.ones_like(z)
        nz = z != 0
        ref[nz] = special.gamma(cfg.mu) * (np.abs(z[nz]) / 2) ** (1 - cfg.mu) * special.jv(cfg.mu - 1, np.abs(z[nz]))
        err = np.abs(res.value - ref)
        extra["max_abs_error"] = float(np.max(err))
        columns = ["z", "value", "reference", "abs_error", "tail_bound", "method", "n_samples", "tol", "seed"]
        rows = [[z[i], float(res.value[i]), ref[i], err[i], float(np.broadcast_to(res.tail_bound, z.shape)[i]),
                 "series", 0, cfg.tol, cfg.seed] for i in range(z.size)]
        print(f"max abs error vs closed form: {extra['max_abs_error']:.3e}", file=sys.stderr)
    elif fn == "bessel":
        pts = _points(ns, q)
        res = bessel_cone_spectrum(cfg.mu, pts, d, params)
        tails = np.broadcast_to(res.tail_bound, (len(pts),))
        columns = [f"x{i + 1}" for i in range(q)] + ["value", "tail_bound", "method", "n_samples", "tol", "seed"]
        rows = [list(p) + [float(np.real(v)), t, "series", 0, cfg.tol, cfg.seed]
                for p, v, t in zip(pts, res.value, tails)]
    elif fn == "psi":
        if ns.xi is None:
            raise ConfigError("psi needs --xi")
        xi = _floats(ns.xi, "xi")
        if xi.size != q:
            raise ConfigError(f"--xi needs {q} coordinates")
        pts = _points(ns, q)
        fwd = character_psi(cfg.mu, xi, pts, d, params)
        rev = character_psi(cfg.mu, pts, xi, d, params)
        tails = np.maximum(np.broadcast_to(fwd.tail_bound, (len(pts),)),
                           np.broadcast_to(rev.tail_bound, (len(pts),)))
        columns = [f"eta{i + 1}" for i in range(q)] + ["value", "value_swapped", "tail_bound",
                                                        "method", "n_samples", "tol", "seed"]
        rows = [list(p) + [float(a), float(b), t, "series", 0, cfg.tol, cfg.seed]
                for p, a, b, t in zip(pts, fwd.value, rev.value, tails)]
        extra["xi"] = xi
    elif fn == "dunkl":
        if ns.z is None:
            raise ConfigError("dunkl needs --z")
        z = _floats(ns.z, "z")
        if z.size != q:
            raise ConfigError(f"--z needs {q} coordinates")
        pts = _points(ns, q)
        vals, tails = [], []
        for w in pts:
            res = dunkl_bessel_B(cfg.k, z, w, params)
            vals.append(float(np.real(res.value)))
            tails.append(float(res.tail_bound))
        columns = [f"w{i + 1}" for i in range(q)] + ["value", "tail_bound", "method", "n_samples", "tol", "seed"]
        rows = [list(p) + [v, t, "series", 0, cfg.tol, cfg.seed] for p, v, t in zip(pts, vals, tails)]
        extra["z"] = z
    else:
        raise ConfigError(f"unknown function {fn!r}")
    _write(cfg, columns, rows, _meta(cfg, **extra))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, ns) -> int:
    names = list(SUITES) if ns.suite == "all" else [ns.suite]
    opts = {"q": ns.q if ns.q_given else None, "d": cfg.field.d if ns.d is not None or ns.field is not None else None,
            "mu": cfg.mu if ns.mu is not None or ns.k1 is not None else None, "p": ns.p, "samples": cfg.samples, "seed": ns.seed}
    results = [run_suite(n, **opts) for n in names]
    columns = ["suite", "check", "passed", "residual", "bound", "std_error", "method", "n_samples", "seed"]
    rows = []
    for res in results:
        for c in res.checks:
            rows.append([res.suite, c.name, c.passed, c.residual, c.bound,
                         "" if c.std_error is None else c.std_error, c.method, c.n_samples, cfg.seed])
        print(f"{res.suite}: {'PASS' if res.passed else 'FAIL'} ({len(res.checks)} checks, {res.seconds:.1f} s)",
              file=sys.stderr)
    meta = _meta(cfg, suites=[r.to_dict() for r in results])
    _write(cfg, columns, rows, meta)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_sample(cfg: RunConfig, ns) -> int:
    q, field = cfg.q, cfg.field
    n = 1000 if cfg.samples is None else cfg.samples
    if ns.conv == "cone":
        r = _floats(ns.r or ",".join(["1"] * q), "r")
        s = _floats(ns.s or ",".join(["0.5"] * q), "s")
        if r.size != q or s.size != q or np.any(r < 0) or np.any(s < 0):
            raise ConfigError(f"--r and --s need {q} nonnegative eigenvalues")
        if not ConeIndex(q, field.d, cfg.mu).in_Mq():
            raise ConfigError(f"mu={cfg.mu} is not admissible for q={q}, d={field.d}")
        route = convolution_route(cfg.mu, q, field.d)
        pts = convolution_points(cfg.mu, embedded_diag(field, r), embedded_diag(field, s), n,
                                 cfg.seed, field)
        spec = embedded_spectrum(pts, field)
        bound = r.max() + s.max()
        columns = [f"t{i + 1}" for i in range(q)] + ["norm", "bound", "method", "n_samples", "seed"]
        rows = [list(x) + [x[0], bound, route, n, cfg.seed] for x in spec]
        extra = {"conv": "cone", "r": r, "s": s, "route": route}
    else:
        xi = _floats(ns.xi or ",".join(["1"] * q), "xi")
        eta = _floats(ns.eta or ",".join(["0.5"] * q), "eta")
        if xi.size != q or eta.size != q:
            raise ConfigError(f"--xi and --eta need {q} coordinates")
        if not ConeIndex(q, field.d, cfg.mu).in_Mq():
            raise ConfigError(f"mu={cfg.mu} is not admissible for q={q}, d={field.d}")
        route = convolution_route(cfg.mu, q, field.d)
        spec = chamber_samples(cfg.mu, np.sort(xi)[::-1], np.sort(eta)[::-1], field.d, n, cfg.seed)
        columns = [f"xi{i + 1}" for i in range(q)] + ["method", "n_samples", "seed"]
        rows = [list(x) + [route, n, cfg.seed] for x in spec]
        extra = {"conv": "chamber", "xi": xi, "eta": eta, "route": route}
    _write(cfg, columns, rows, _meta(cfg, n_samples=n, **extra))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", choices=["r", "c", "h"], type=str.lower, default=None,
                        help="division algebra (default r)")
    common.add_argument("--d", type=int, choices=[1, 2, 4], default=None, help="alternative to --field")
    common.add_argument("--q", type=int, default=None, help="rank (default 1 for eval, 2 otherwise)")
    common.add_argument("--mu", type=float, default=None)
    common.add_argument("--k1", type=float, default=None)
    common.add_argument("--k2", type=float, default=None)
    common.add_argument("--p", type=int, default=None, help="orbit dimension for orbit checks")
    common.add_argument("--samples", default=None, help="Monte Carlo budget, e.g. 1e6")
    common.add_argument("--seed", type=int, default=None, help=f"base seed (default {DEFAULT_SEED})")
    common.add_argument("--tol", type=float, default=1e-12, help="series tolerance")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = _Parser(prog="conebessel", description="Bessel functions and hypergroups on matrix cones.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", parents=[common], help="evaluate special functions on a grid")
    ev.add_argument("function", choices=["rank1", "bessel", "psi", "dunkl"])
    ev.add_argument("--grid", default="0:5:11", help="start:stop:num per coordinate")
    ev.add_argument("--points", default=None, help="explicit points 'a,b;c,d'")
    ev.add_argument("--xi", default=None, help="fixed first argument of psi")
    ev.add_argument("--z", default=None, help="fixed first argument of the Dunkl Bessel function")

    ve = sub.add_parser("verify", parents=[common], help="run verification suites")
    ve.add_argument("--suite", choices=["all"] + list(SUITES), required=True)

    sa = sub.add_parser("sample", parents=[common], help="sample convolution points")
    sa.add_argument("--conv", choices=["cone", "chamber"], required=True)
    sa.add_argument("--r", default=None, help="eigenvalues of the first cone point")
    sa.add_argument("--s", default=None, help="eigenvalues of the second cone point")
    sa.add_argument("--xi", default=None)
    sa.add_argument("--eta", default=None)
    return parser


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "sample": cmd_sample}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    ns.q_given = ns.q is not None
    if ns.q is None:
        ns.q = 1 if ns.command == "eval" else 2
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[ns.command](cfg, ns)
    except (ConfigError, PoleError, PochhammerZeroError, ValueError) as exc:
        print(f"conebessel: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SeriesConvergenceError, ArithmeticError) as exc:
        print(f"conebessel: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
