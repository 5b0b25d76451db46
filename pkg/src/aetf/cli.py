"""Command line interface.

Exit codes: 0 success, 1 usage or input error, 2 GA finished without
reaching its success threshold.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .capacity import IID_MODES, CapacityConfig, db_to_linear, monte_carlo
from .frames import build_frame, random_bipolar_frame, verify_profile, welch_metrics
from .gf2 import FrameShape
from .io import (
    CacheError,
    GdsRecord,
    append_record,
    atomic_write,
    best_record,
    csv_text,
    default_cache_path,
    load_records,
    parse_config,
    svg_line_plot,
)
from .search import GaConfig, run_ga
from .spectra import IndexSet
from .sweep import CURVES, SWEEP_COLUMNS, SweepConfig, run_sweep
from .theory import law_capacity_per_user, law_practical_capacity_per_user, manova_law, mp_law

log = logging.getLogger("aetf")

SIMULATE_COLUMNS = (
    "frame_type", "N", "M", "K", "beta_inv", "gamma", "p", "snr_db", "trials",
    "cap_per_user", "cap_per_user_stderr", "pcap_per_user", "pcap_per_user_stderr",
    "singular_trials",
)
THEORY_COLUMNS = (
    "law", "beta_inv", "gamma", "snr_db", "cap_per_user", "pcap_per_user",
    "atom_mass", "lambda_minus", "lambda_plus",
)
VERIFY_COLUMNS = (
    "N", "M", "indices", "classification", "welch_bound", "upper_level", "i_ms", "i_max",
    "tightness_residual", "max_dev_lower", "max_dev_upper", "max_dev_welch",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text):
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _float_list(text):
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _emit(text, out):
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _resolve_set(args):
    """IndexSet from ``--indices`` or the best cached record for ``--n/--m``."""
    if args.indices:
        idx = tuple(int(x) for x in args.indices.split(",") if x.strip())
        if args.n is None:
            raise UsageError("--indices requires --n")
        return IndexSet(idx, FrameShape(args.n, len(idx)))
    if args.n is None or args.m is None:
        raise UsageError("--n and --m are required to select a cached GDS")
    path = Path(args.gds) if args.gds else default_cache_path()
    rec = best_record(load_records(path), args.n, args.m)
    if rec is None:
        raise UsageError(f"no GDS record for N={args.n} M={args.m} in {path}")
    return rec.index_set()


def cmd_search_gds(args):
    shape = FrameShape(args.n, args.m)
    cfg = GaConfig(population_size=args.pop, max_generations=args.generations, rng_seed=args.seed)
    result = run_ga(shape, cfg)
    rec = GdsRecord.from_result(result, cfg)
    out = Path(args.out) if args.out else default_cache_path()
    append_record(out, rec)
    status = "converged" if result.converged else "best-effort"
    print(f"shape {shape}: fitness={result.best_fitness!r} generations={result.generations_run} {status}")
    print(f"indices: {','.join(map(str, rec.indices))}")
    print(f"record appended to {out}")
    return 0 if result.converged else 2


def cmd_verify(args):
    s = _resolve_set(args)
    rep = verify_profile(s, args.tol)
    wm = welch_metrics(build_frame(s))
    row = {
        "N": s.shape.n_users, "M": s.shape.m_rows,
        "indices": " ".join(map(str, s.indices)),
        "classification": rep.classification,
        "welch_bound": wm.welch_bound, "upper_level": rep.upper_level,
        "i_ms": wm.i_ms, "i_max": wm.i_max, "tightness_residual": wm.tightness_residual,
        "max_dev_lower": rep.max_dev_lower, "max_dev_upper": rep.max_dev_upper,
        "max_dev_welch": rep.max_dev_welch,
    }
    if args.csv:
        atomic_write(args.csv, csv_text(VERIFY_COLUMNS, [row]))
    for key in VERIFY_COLUMNS:
        print(f"{key}: {row[key]}")
    return 0


def cmd_simulate(args):
    if args.iid:
        if args.n is None or args.m is None:
            raise UsageError("--iid requires --n and --m")
        frame = random_bipolar_frame(FrameShape(args.n, args.m), args.seed)
        frame_type = "iid"
    else:
        frame = build_frame(_resolve_set(args))
        frame_type = "aetf"
    shape = frame.shape
    if args.k > shape.n_users:
        raise UsageError(f"--k {args.k} exceeds N={shape.n_users}")
    cfg = CapacityConfig(args.k, db_to_linear(args.snr_db), args.trials, args.seed,
                         iid_mode=args.iid_mode, epsilon_floor=args.epsilon_floor)
    est = monte_carlo(frame, cfg)
    k = args.k
    row = {
        "frame_type": frame_type, "N": shape.n_users, "M": shape.m_rows, "K": k,
        "beta_inv": shape.m_rows / k, "gamma": shape.m_rows / shape.n_users,
        "p": k / shape.n_users, "snr_db": args.snr_db, "trials": args.trials,
        "cap_per_user": est.capacity_per_user,
        "cap_per_user_stderr": est.stderr_capacity / k,
        "pcap_per_user": est.practical_per_user,
        "pcap_per_user_stderr": est.stderr_practical / k,
        "singular_trials": est.singular_trial_count,
    }
    _emit(csv_text(SIMULATE_COLUMNS, [row]), args.out)
    return 0


def cmd_theory(args):
    if args.beta_inv <= 0:
        raise UsageError("--beta-inv must be positive")
    beta = 1.0 / args.beta_inv
    gamma = args.gamma
    if gamma is None and args.p is not None:
        gamma = args.p * args.beta_inv
    snr = db_to_linear(args.snr_db)
    if args.law == "mp":
        law = mp_law(beta)
        atom = law.zero_mass
    else:
        if gamma is None:
            raise UsageError("manova needs --gamma or --p")
        law = manova_law(beta, gamma)
        atom = law.atom_mass
    row = {
        "law": args.law, "beta_inv": args.beta_inv, "gamma": gamma, "snr_db": args.snr_db,
        "cap_per_user": law_capacity_per_user(law, snr),
        "pcap_per_user": law_practical_capacity_per_user(law, snr),
        "atom_mass": atom, "lambda_minus": law.lambda_minus, "lambda_plus": law.lambda_plus,
    }
    _emit(csv_text(THEORY_COLUMNS, [row]), args.out)
    return 0


_SWEEP_KEYS = {
    "n_list": _int_list, "beta_inv_list": _float_list, "p_list": _float_list,
    "snr_db": float, "trials": int, "seed": int, "generations": int, "population": int,
    "epsilon_floor": float, "jobs": int, "cache": str, "out": str, "svg": str,
    "no_search": lambda v: str(v).lower() in ("1", "true", "yes"),
}


def _sweep_settings(args):
    settings = {}
    if args.config:
        for key, value in parse_config(args.config).items():
            if key not in _SWEEP_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            settings[key] = _SWEEP_KEYS[key](value)
    for key in _SWEEP_KEYS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            settings[key] = value
    return settings


def write_sweep_svgs(rows, directory):
    directory = Path(directory)
    written = []
    groups = sorted({(r["p_req"], r["beta_inv_req"]) for r in rows})
    for p, b in groups:
        sub = [r for r in rows if r["p_req"] == p and r["beta_inv_req"] == b]
        series = []
        for curve in CURVES:
            pts = sorted((r["N"], r.get("cap_per_user")) for r in sub if r["curve"] == curve)
            series.append((curve, [x for x, _ in pts], [y for _, y in pts]))
        svg = svg_line_plot(series, f"Capacity per user vs N (beta^-1={b:g}, p={p:g})",
                            "N", "bits / user")
        if svg:
            path = directory / f"cap_vs_n_p{p:g}_binv{b:g}.svg"
            atomic_write(path, svg)
            written.append(path)
    for p, n in sorted({(r["p_req"], r["N"]) for r in rows}):
        sub = [r for r in rows if r["p_req"] == p and r["N"] == n]
        series = []
        for curve in CURVES:
            pts = sorted((r["beta_inv_req"], r.get("cap_per_user")) for r in sub if r["curve"] == curve)
            series.append((curve, [x for x, _ in pts], [y for _, y in pts]))
        if len(series[0][1]) < 2:
            continue
        svg = svg_line_plot(series, f"Capacity per user vs beta^-1 (N={n}, p={p:g})",
                            "beta^-1", "bits / user")
        if svg:
            path = directory / f"cap_vs_binv_p{p:g}_n{n}.svg"
            atomic_write(path, svg)
            written.append(path)
    return written


def cmd_sweep(args):
    s = _sweep_settings(args)
    fields = {k: s[k] for k in ("n_list", "beta_inv_list", "p_list", "snr_db", "trials", "seed",
                                "generations", "population", "epsilon_floor", "jobs") if k in s}
    cfg = SweepConfig(search=not s.get("no_search", False), **fields)
    cache = Path(s["cache"]) if "cache" in s else default_cache_path()
    rows = run_sweep(cfg, cache)
    for r in rows:
        if r["curve"] == "aetf" and r.get("cap_per_user") is None:
            log.warning("N=%s M=%s: no GDS available, AETF columns left empty", r["N"], r["M"])
    _emit(csv_text(SWEEP_COLUMNS, rows), s.get("out"))
    if s.get("svg"):
        for path in write_sweep_svgs(rows, s["svg"]):
            log.info("wrote %s", path)
    return 0


def cmd_export_frame(args):
    if args.iid:
        if args.n is None or args.m is None:
            raise UsageError("--iid requires --n and --m")
        frame = random_bipolar_frame(FrameShape(args.n, args.m), args.seed)
    else:
        frame = build_frame(_resolve_set(args))
    _emit(frame.to_csv(), args.out)
    return 0


def _add_set_args(p):
    p.add_argument("--gds", help="GDS cache file (JSON lines); defaults to $AETF_GDS_CACHE")
    p.add_argument("--indices", help="comma-separated Hadamard row indices")
    p.add_argument("--n", type=int, help="number of users N")
    p.add_argument("--m", type=int, help="sequence length M")


def build_parser():
    parser = _Parser(prog="aetf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search-gds", help="run the GA for one (N, M) and cache the result")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--generations", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="cache file to append to")
    p.set_defaults(func=cmd_search_gds)

    p = sub.add_parser("verify", help="Welch metrics and ETF/AETF classification of a set")
    _add_set_args(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--csv", help="also write the report as a one-row CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte-Carlo capacity of one frame")
    _add_set_args(p)
    p.add_argument("--iid", action="store_true", help="use a random bipolar frame")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iid-mode", choices=IID_MODES, default="fresh_frame_per_trial")
    p.add_argument("--epsilon-floor", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theory", help="capacity under the Marchenko-Pastur or Manova law")
    p.add_argument("--law", choices=("mp", "manova"), required=True)
    p.add_argument("--beta-inv", type=float, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=float)
    g.add_argument("--p", type=float)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sweep", help="capacity sweep over N, beta^-1 and p")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--n-list", type=_int_list)
    p.add_argument("--beta-inv-list", type=_float_list)
    p.add_argument("--p-list", type=_float_list)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--epsilon-floor", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--cache")
    p.add_argument("--out")
    p.add_argument("--svg", help="directory for SVG figures")
    p.add_argument("--no-search", action="store_true", help="never run the GA on cache misses")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-frame", help="write a frame's +-1 signs as CSV")
    _add_set_args(p)
    p.add_argument("--iid", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_frame)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, CacheError, ValueError, FileNotFoundError) as exc:
        print(f"aetf {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
