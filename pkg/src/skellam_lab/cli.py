"""Command-line front end: simulate, pmf, cf, integral, converge, verify.

Every command writes CSV (with a leading `# meta:` comment carrying the full
parameter set) or JSON.  Output bytes are a pure function of (argv, seed):
floats are rendered with 17 significant digits, metadata key order is fixed,
and all samplers run off explicit seeds.  The environment variable
SKELLAM_LAB_THREADS (a positive integer) caps worker parallelism; generation
currently runs on a single thread, which respects any cap.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .altskellam import (
    AltSpec,
    alt_array_sample,
    alt_increment_cf,
    alt_lattice_pmf,
    alt_sample,
    twoparam_skellam_pmf,
)
from .fractional import (
    FracSkellamSpec,
    frac_skellam_pmf,
    frac_skellam_sample,
    inv_stable_marginal_sample,
    stable_subordinator_sample,
)
from .gmsp import (
    JumpSpec,
    TriangularArraySpec,
    gmsp_array_sample,
    gmsp_cf,
    gmsp_compound_equalrate_sample,
    gmsp_compound_peraxis_sample,
    gmsp_lattice_pmf,
    gmsp_sample,
    msp_pmf,
)
from .identities import IDENTITIES, run_identity
from .integrals import CompoundSpec, RectDomain, integral_cf_levy, integral_cf_mpp, integral_sample
from .mpp import as_rates, as_times
from .records import SampleBatch, make_rng
from .special import SeriesControl, frac_poisson_pmf
from .stats import empirical_cf, tv_distance

__all__ = ["main"]


# ---------------------------------------------------------------- serialization

def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    raise TypeError(f"cannot format {type(x)!r}")


def _json(obj) -> str:
    """JSON with floats at 17 significant digits (round-trip exact)."""
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.integer, np.floating)):
        return _fmt(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _csv(meta: dict, header: list[str], rows) -> str:
    lines = [f"# meta: {_json(meta)}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _batch_artifact(batch: SampleBatch, fmt: str, out: str | None):
    meta = dict(batch.meta)
    meta["seed"] = batch.seed
    if fmt == "json":
        _emit(_json({"meta": meta, "values": batch.values}) + "\n", out)
    else:
        _emit(_csv(meta, ["value"], ((v,) for v in batch.values)), out)


def _pmf_artifact(meta, ns, probs, tail, fmt, out):
    if fmt == "json":
        doc = {"meta": meta, "n": list(ns), "probability": list(probs), "truncation_mass": tail}
        _emit(_json(doc) + "\n", out)
    else:
        _emit(_csv(meta, ["n", "probability", "truncation_mass"],
                   ((n, p, tail) for n, p in zip(ns, probs))), out)


def _cf_artifact(meta, u, values, radius, fmt, out):
    re_, im = [v.real for v in values], [v.imag for v in values]
    if fmt == "json":
        doc = {"meta": meta, "u": list(u), "re": re_, "im": im}
        if radius is not None:
            doc["radius"] = list(radius)
        _emit(_json(doc) + "\n", out)
    else:
        if radius is None:
            rows = zip(u, re_, im)
            _emit(_csv(meta, ["u", "re", "im"], rows), out)
        else:
            rows = zip(u, re_, im, radius)
            _emit(_csv(meta, ["u", "re", "im", "radius"], rows), out)


# ---------------------------------------------------------------- parsing

def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise ValueError(f"cannot parse {what} {text!r} as a comma list of numbers") from None


def _parse_rate(tok: str) -> float:
    if "." not in tok:
        raise ValueError(f"rate {tok!r} needs an explicit decimal point")
    return float(tok)


def _parse_jumps(text: str) -> dict[float, list[float]]:
    """`j:rate_1,...,rate_M` groups joined by `;`; decimal points mandatory."""
    jumps: dict[float, list[float]] = {}
    for group in text.split(";"):
        if ":" not in group:
            raise ValueError(f"jump group {group!r} must look like j:rate,...")
        head, tail = group.split(":", 1)
        j = float(head)
        rates = [_parse_rate(tok) for tok in tail.split(",") if tok != ""]
        if not rates:
            raise ValueError(f"jump {head!r} has no rates")
        if j in jumps:
            raise ValueError(f"duplicate jump {head!r}")
        jumps[j] = rates
    return jumps


def _parse_single_rate_jumps(text: str) -> dict[float, float]:
    out = {}
    for j, rates in _parse_jumps(text).items():
        if len(rates) != 1:
            raise ValueError(f"jump {j} must carry exactly one rate here")
        out[j] = rates[0]
    return out


def _parse_ugrid(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("u range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("u range step must be positive")
        grid = []
        k = 0
        while start + k * step <= stop + 1e-12:
            grid.append(start + k * step)
            k += 1
        return grid
    return _parse_floats(text, "u grid")


def _require(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise ValueError(f"--{name} is required for this process")


# ---------------------------------------------------------------- subcommands

def _cmd_simulate(args) -> None:
    n, seed = args.n, args.seed
    if args.process == "mpp":
        _require(args, "rates", "t")
        lam = as_rates(_parse_floats(args.rates, "rates"))
        t = as_times(_parse_floats(args.t, "t"), lam.size)
        values = make_rng(seed).poisson(float(lam @ t), n)
        batch = SampleBatch(values, seed=seed, meta={
            "process": "mpp", "rates": list(map(float, lam)), "t": list(map(float, t)), "n": n})
    elif args.process == "gmsp":
        _require(args, "jumps", "t")
        spec = JumpSpec(_parse_jumps(args.jumps))
        batch = gmsp_sample(spec, _parse_floats(args.t, "t"), n, seed)
    elif args.process == "alt":
        _require(args, "jumps", "t")
        rates = _parse_single_rate_jumps(args.jumps)
        times = _parse_floats(args.t, "t")
        if len(times) != len(rates):
            raise ValueError("--t must list one time per jump group, in order")
        t_map = dict(zip(rates, times))
        batch = alt_sample(AltSpec(rates), t_map, n, seed)
    elif args.process == "frac-skellam":
        _require(args, "l1", "l2", "alpha", "beta", "t1", "t2")
        spec = FracSkellamSpec(float(args.l1), float(args.l2), args.alpha, args.beta)
        batch = frac_skellam_sample(spec, args.t1, args.t2, n, seed)
    elif args.process == "compound-peraxis":
        _require(args, "jumps", "t")
        spec = JumpSpec(_parse_jumps(args.jumps))
        batch = gmsp_compound_peraxis_sample(spec, _parse_floats(args.t, "t"), n, seed)
    elif args.process == "compound-equalrate":
        _require(args, "jumps", "t")
        rates = _parse_single_rate_jumps(args.jumps)
        t = _parse_floats(args.t, "t")
        batch = gmsp_compound_equalrate_sample(rates, len(t), t, n, seed)
    elif args.process == "stable":
        _require(args, "alpha", "t1")
        batch = stable_subordinator_sample(args.alpha, args.t1, n, seed)
    elif args.process == "inv-stable":
        _require(args, "alpha", "t1")
        batch = inv_stable_marginal_sample(args.alpha, args.t1, n, seed)
    else:
        raise ValueError(f"unknown process {args.process!r}")
    _batch_artifact(batch, args.format, args.out)


def _series_control(args) -> SeriesControl:
    return SeriesControl(abs_tol=args.abs_tol, max_terms=args.max_terms)


def _cmd_pmf(args) -> None:
    nmax = args.nmax
    if args.process == "msp":
        _require(args, "l1", "l2", "t")
        t = _parse_floats(args.t, "t")
        l1 = _parse_floats(args.l1, "l1")
        l2 = _parse_floats(args.l2, "l2")
        if len(l1) == 1:
            l1 = l1 * len(t)
        if len(l2) == 1:
            l2 = l2 * len(t)
        ns = list(range(-nmax, nmax + 1))
        probs = [msp_pmf(k, l1, l2, t) for k in ns]
        meta = {"process": "msp", "l1": l1, "l2": l2, "t": t, "nmax": nmax}
    elif args.process == "skellam2":
        _require(args, "l1", "l2", "t1", "t2")
        ns = list(range(-nmax, nmax + 1))
        probs = [twoparam_skellam_pmf(k, float(args.l1), float(args.l2), args.t1, args.t2)
                 for k in ns]
        meta = {"process": "skellam2", "l1": float(args.l1), "l2": float(args.l2),
                "t1": args.t1, "t2": args.t2, "nmax": nmax}
    elif args.process == "gmsp":
        _require(args, "jumps", "t")
        spec = JumpSpec(_parse_jumps(args.jumps))
        t = _parse_floats(args.t, "t")
        table = gmsp_lattice_pmf(spec, t)
        ns = list(range(-nmax, nmax + 1))
        probs = [table.prob(k) for k in ns]
        meta = {"process": "gmsp", "jumps": args.jumps, "t": t, "nmax": nmax}
    elif args.process == "frac-skellam":
        _require(args, "l1", "l2", "alpha", "beta", "t1", "t2")
        spec = FracSkellamSpec(float(args.l1), float(args.l2), args.alpha, args.beta)
        ctl = _series_control(args)
        ns = list(range(-nmax, nmax + 1))
        probs = [frac_skellam_pmf(spec, args.t1, args.t2, k, ctl) for k in ns]
        meta = {"process": "frac-skellam", "l1": float(args.l1), "l2": float(args.l2),
                "alpha": args.alpha, "beta": args.beta, "t1": args.t1, "t2": args.t2,
                "nmax": nmax, "abs_tol": ctl.abs_tol, "max_terms": ctl.max_terms}
    elif args.process == "frac-poisson":
        _require(args, "l1", "alpha", "t1")
        ctl = _series_control(args)
        ns = list(range(0, nmax + 1))
        probs = [frac_poisson_pmf(k, float(args.l1), args.t1, args.alpha, ctl) for k in ns]
        meta = {"process": "frac-poisson", "lam": float(args.l1), "t": args.t1,
                "alpha": args.alpha, "nmax": nmax, "abs_tol": ctl.abs_tol,
                "max_terms": ctl.max_terms}
    else:
        raise ValueError(f"unknown pmf process {args.process!r}")
    tail = max(0.0, 1.0 - math.fsum(probs))
    meta["seed"] = args.seed
    _pmf_artifact(meta, ns, probs, tail, args.format, args.out)


def _cmd_cf(args) -> None:
    grid = _parse_ugrid(args.u)
    radius = None
    if args.process == "gmsp":
        _require(args, "jumps", "t")
        spec = JumpSpec(_parse_jumps(args.jumps))
        t = _parse_floats(args.t, "t")
        meta = {"process": "gmsp", "jumps": args.jumps, "t": t}
        if args.empirical:
            batch = gmsp_sample(spec, t, args.n, args.seed)
            table = empirical_cf(batch, grid)
            values, radius = table.values, table.radius
            meta["n"] = args.n
        else:
            values = [gmsp_cf(spec, t, u) for u in grid]
    elif args.process == "alt-increment":
        _require(args, "jumps", "t")
        rates = _parse_single_rate_jumps(args.jumps)
        times = _parse_floats(args.t, "t")
        if len(times) != len(rates):
            raise ValueError("--t must list one time per jump group, in order")
        spec = AltSpec(rates)
        t_map = dict(zip(rates, times))
        if args.s is not None:
            s_times = _parse_floats(args.s, "s")
            if len(s_times) != len(rates):
                raise ValueError("--s must list one time per jump group, in order")
            s_map = dict(zip(rates, s_times))
        else:
            s_map = {j: 0.0 for j in rates}
        values = [alt_increment_cf(spec, s_map, t_map, u) for u in grid]
        meta = {"process": "alt-increment", "jumps": args.jumps,
                "s": [s_map[j] for j in rates], "t": times}
    elif args.process == "integral-mpp":
        _require(args, "rates", "t")
        lam = _parse_floats(args.rates, "rates")
        t = _parse_floats(args.t, "t")
        meta = {"process": "integral-mpp", "rates": lam, "t": t}
        if args.empirical:
            dom = RectDomain(t=t, resolution=args.r)
            batch = integral_sample(lam, dom, args.n, args.seed)
            table = empirical_cf(batch, grid)
            values, radius = table.values, table.radius
            meta["n"] = args.n
            meta["resolution"] = args.r
        else:
            values = [integral_cf_mpp(lam, t, u) for u in grid]
    elif args.process == "integral-gmsp":
        _require(args, "jumps", "t")
        spec = JumpSpec(_parse_jumps(args.jumps))
        t = _parse_floats(args.t, "t")
        psis = [_gsp_log_cf(spec, k) for k in range(spec.dim)]
        values = [integral_cf_levy(psis, t, u) for u in grid]
        meta = {"process": "integral-gmsp", "jumps": args.jumps, "t": t}
    else:
        raise ValueError(f"unknown cf process {args.process!r}")
    meta["seed"] = args.seed
    _cf_artifact(meta, grid, values, radius, args.format, args.out)


def _gsp_log_cf(spec: JumpSpec, axis: int):
    jumps = spec.jump_values
    lams = spec.rate_matrix[:, axis]

    def psi(v):
        return complex(np.sum(lams * (np.exp(1j * v * jumps) - 1.0)))

    return psi


def _cmd_integral(args) -> None:
    t = _parse_floats(args.t, "t")
    dom = RectDomain(t=t, resolution=args.r)
    grid = _parse_ugrid(args.u)
    if args.process == "mpp":
        _require(args, "rates")
        lam = _parse_floats(args.rates, "rates")
        batch = integral_sample(lam, dom, args.n, args.seed)
        cf_values = [integral_cf_mpp(lam, t, u) for u in grid]
        meta = {"process": "integral-mpp", "rates": lam}
    elif args.process == "gmsp":
        _require(args, "jumps")
        spec = JumpSpec(_parse_jumps(args.jumps))
        batch = integral_sample(spec, dom, args.n, args.seed)
        psis = [_gsp_log_cf(spec, k) for k in range(spec.dim)]
        cf_values = [integral_cf_levy(psis, t, u) for u in grid]
        meta = {"process": "integral-gmsp", "jumps": args.jumps}
    elif args.process == "compound":
        _require(args, "rates", "xvalues", "xprobs")
        lam = _parse_floats(args.rates, "rates")
        xv = _parse_floats(args.xvalues, "xvalues")
        xp = _parse_floats(args.xprobs, "xprobs")
        spec = CompoundSpec(lam, xv, xp)
        batch = integral_sample(spec, dom, args.n, args.seed)

        def make_psi(l, values, probs):
            return lambda v: complex(l * (np.sum(probs * np.exp(1j * v * values)) - 1.0))

        psis = [make_psi(l, np.asarray(xv), np.asarray(xp)) for l in lam]
        cf_values = [integral_cf_levy(psis, t, u) for u in grid]
        meta = {"process": "integral-compound", "rates": lam, "xvalues": xv, "xprobs": xp}
    else:
        raise ValueError(f"unknown integral process {args.process!r}")
    meta.update({"t": t, "resolution": args.r, "n": args.n, "seed": args.seed})
    if args.format == "json":
        doc = {"meta": meta, "values": batch.values,
               "cf": {"u": grid, "re": [v.real for v in cf_values],
                      "im": [v.imag for v in cf_values]}}
        _emit(_json(doc) + "\n", args.out)
    else:
        _emit(_csv(meta, ["value"], ((v,) for v in batch.values)), args.out)
        cf_out = None if args.out is None else args.out + ".cf.csv"
        _emit(_csv(meta, ["u", "re", "im"],
                   zip(grid, (v.real for v in cf_values), (v.imag for v in cf_values))), cf_out)


def _cmd_converge(args) -> None:
    scales = [int(s) for s in _parse_floats(args.scales, "scales")]
    rates = _parse_single_rate_jumps(args.jumps)
    jumps = sorted(rates)
    rows = []
    if args.scheme == "gmsp-array":
        _require(args, "t")
        t = _parse_floats(args.t, "t")
        target = JumpSpec({j: [rates[j]] * len(t) for j in jumps})
        pmf = gmsp_lattice_pmf(target, t)
        for i, scale in enumerate(scales):
            arr = TriangularArraySpec(n=scale, probs=lambda l, j, sc: rates[j] / sc)
            batch = gmsp_array_sample(arr, jumps, t, args.n, seed=args.seed + 7 * i)
            rows.append((scale, tv_distance(batch, pmf)))
    elif args.scheme == "alt-array":
        _require(args, "t")
        times = _parse_floats(args.t, "t")
        if len(times) != len(jumps):
            raise ValueError("--t must list one time per jump group, in order")
        t_map = dict(zip(rates, times))
        spec = AltSpec(rates)
        pmf = alt_lattice_pmf(spec, t_map)
        for i, scale in enumerate(scales):
            rule = lambda l, ja, j, sc=scale: (rates[ja] / sc) if ja == j else 0.0
            batch = alt_array_sample(scale, rule, jumps, t_map, args.n, seed=args.seed + 7 * i)
            rows.append((scale, tv_distance(batch, pmf)))
    else:
        raise ValueError(f"unknown scheme {args.scheme!r}")
    meta = {"scheme": args.scheme, "jumps": args.jumps, "t": args.t,
            "scales": scales, "n": args.n, "seed": args.seed}
    if args.format == "json":
        doc = {"meta": meta, "scale": [r[0] for r in rows], "tv_distance": [r[1] for r in rows]}
        _emit(_json(doc) + "\n", args.out)
    else:
        _emit(_csv(meta, ["scale", "tv_distance"], rows), args.out)


def _cmd_verify(args) -> None:
    report = run_identity(args.identity, seed=args.seed, n=args.n)
    _emit(_json(report.to_json_dict()) + "\n", args.out)


# ---------------------------------------------------------------- wiring

def _add_common(p, n_default=1000):
    p.add_argument("--seed", type=int, default=0, help="root RNG seed (default 0)")
    p.add_argument("--n", type=int, default=n_default, help="number of draws")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_process_params(p):
    p.add_argument("--rates", help="comma list of per-axis rates, e.g. 1.0,2.0")
    p.add_argument("--jumps", help="jump spec 'j:rate_1,...,rate_M;j2:...' (decimal points required)")
    p.add_argument("--t", help="comma list of times")
    p.add_argument("--s", help="comma list of lower times (alt increments)")
    p.add_argument("--l1", help="first rate (scalar or comma list for msp)")
    p.add_argument("--l2", help="second rate (scalar or comma list for msp)")
    p.add_argument("--t1", type=float, help="first time coordinate")
    p.add_argument("--t2", type=float, help="second time coordinate")
    p.add_argument("--alpha", type=float, help="stable index in (0,1]")
    p.add_argument("--beta", type=float, help="second stable index in (0,1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skellam-lab",
        description="Samplers, exact laws, and identity checks for multiparameter Skellam processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw i.i.d. samples of a process value")
    p.add_argument("--process", required=True,
                   choices=("mpp", "gmsp", "alt", "frac-skellam",
                            "compound-peraxis", "compound-equalrate", "stable", "inv-stable"))
    _add_process_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("pmf", help="tabulate an exact probability mass function")
    p.add_argument("--process", required=True,
                   choices=("msp", "skellam2", "gmsp", "frac-skellam", "frac-poisson"))
    p.add_argument("--nmax", type=int, default=20, help="tabulate n in [-nmax, nmax]")
    p.add_argument("--abs-tol", type=float, default=1e-14, help="series truncation tolerance")
    p.add_argument("--max-terms", type=int, default=10_000, help="series term cap")
    _add_process_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_pmf)

    p = sub.add_parser("cf", help="tabulate a characteristic function on a u grid")
    p.add_argument("--process", required=True,
                   choices=("gmsp", "alt-increment", "integral-mpp", "integral-gmsp"))
    p.add_argument("--u", required=True, help="grid: comma list or start:stop:step")
    p.add_argument("--empirical", action="store_true",
                   help="tabulate the empirical CF of --n draws (adds a radius column)")
    p.add_argument("--r", type=int, default=256, help="lattice resolution (integral processes)")
    _add_process_params(p)
    _add_common(p, n_default=10_000)
    p.set_defaults(func=_cmd_cf)

    p = sub.add_parser("integral", help="sample rectangle integrals plus their exact CF")
    p.add_argument("--process", required=True, choices=("mpp", "gmsp", "compound"))
    p.add_argument("--r", type=int, default=256, help="lattice resolution per axis")
    p.add_argument("--u", default="0.25,0.5,1.0", help="CF grid: comma list or start:stop:step")
    p.add_argument("--xvalues", help="compound jump values, comma list")
    p.add_argument("--xprobs", help="compound jump probabilities, comma list")
    _add_process_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_integral)

    p = sub.add_parser("converge", help="triangular-array TV distances against the limit law")
    p.add_argument("--scheme", required=True, choices=("gmsp-array", "alt-array"))
    p.add_argument("--scales", default="10,100,1000", help="comma list of array scales")
    _add_process_params(p)
    _add_common(p, n_default=100_000)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("verify", help="run a named distributional identity check")
    p.add_argument("--identity", required=True, choices=sorted(IDENTITIES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None, help="draws (identity-specific default)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


def _thread_cap() -> int | None:
    raw = os.environ.get("SKELLAM_LAB_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"SKELLAM_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"SKELLAM_LAB_THREADS must be a positive integer, got {raw!r}")
    return cap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()  # validate the documented env interface up front
        args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
