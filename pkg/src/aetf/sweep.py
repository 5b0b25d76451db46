"""Capacity sweeps over (N, beta^-1, p) comparing AETF, iid and limiting laws."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .capacity import CapacityConfig, db_to_linear, monte_carlo
from .frames import build_frame, random_bipolar_frame
from .gf2 import FrameShape
from .io import GdsRecord, append_record, best_record, load_records
from .search import GaConfig, run_ga
from .theory import (
    law_capacity_per_user,
    law_practical_capacity_per_user,
    manova_law,
    mp_law,
)

log = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "curve", "N", "M", "K", "beta_inv_req", "p_req", "beta_inv", "gamma", "p",
    "snr_db", "trials", "cap_per_user", "cap_per_user_stderr", "pcap_per_user",
    "pcap_per_user_stderr", "singular_trials", "gds_fitness",
)
CURVES = ("aetf", "iid", "manova", "mp")


def _round_half_up(x):
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SweepPoint:
    n_users: int
    beta_inv: float
    p_active: float
    snr_db: float = 10.0

    @property
    def gamma_requested(self):
        return self.p_active * self.beta_inv

    @property
    def m_rows(self):
        return min(max(_round_half_up(self.gamma_requested * self.n_users), 1), self.n_users)

    @property
    def k_active(self):
        return min(max(_round_half_up(self.m_rows / self.beta_inv), 1), self.m_rows)

    @property
    def shape(self):
        return FrameShape(self.n_users, self.m_rows)

    def realized(self):
        n, m, k = self.n_users, self.m_rows, self.k_active
        return {"beta_inv": m / k, "gamma": m / n, "p": k / n}

    def rounding_warnings(self):
        out = []
        m_exact = self.gamma_requested * self.n_users
        if abs(self.m_rows - m_exact) > 1:
            out.append(f"N={self.n_users}: M={self.m_rows} differs from requested {m_exact:.3f} by more than 1")
        k_exact = self.m_rows / self.beta_inv
        if abs(self.k_active - k_exact) > 1:
            out.append(f"N={self.n_users}: K={self.k_active} differs from requested {k_exact:.3f} by more than 1")
        return out


def derive_seed(*parts):
    """Stable 63-bit seed from integers, independent of call order."""
    return int(np.random.SeedSequence([int(p) & (2**64 - 1) for p in parts]).generate_state(1, np.uint64)[0] >> 1)


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple = (16, 24, 32, 48, 64, 96)
    beta_inv_list: tuple = (1.25, 1.5, 1.75)
    p_list: tuple = (0.25, 0.5, 0.75)
    snr_db: float = 10.0
    trials: int = 1000
    seed: int = 0
    generations: int = 2000
    population: int = 100
    epsilon_floor: float = 0.0
    search: bool = True
    jobs: int = 1

    def points(self):
        """Requested points in sweep order, skipping those with M/N >= 1 (no NOMA)."""
        out = []
        for p in self.p_list:
            for b in self.beta_inv_list:
                if p * b >= 1:
                    continue
                for n in self.n_list:
                    out.append(SweepPoint(int(n), float(b), float(p), self.snr_db))
        return out


def _ga_job(args):
    n, m, cfg = args
    return run_ga(FrameShape(n, m), cfg), cfg


def ensure_gds(shapes, cache_path, cfg):
    """Map ``(N, M) -> GdsRecord``, running the GA for shapes missing from the cache."""
    records = load_records(cache_path) if cache_path else []
    found, missing = {}, []
    for n, m in shapes:
        rec = best_record(records, n, m)
        if rec is not None:
            found[(n, m)] = rec
        elif cfg.search:
            missing.append((n, m))
        else:
            log.warning("no GDS cached for N=%d M=%d and searching is disabled", n, m)
    jobs = [
        (n, m, GaConfig(population_size=cfg.population, max_generations=cfg.generations,
                        rng_seed=derive_seed(cfg.seed, n, m)))
        for n, m in missing
    ]
    for (n, m), (result, ga_cfg) in zip(missing, _pmap(_ga_job, jobs, cfg.jobs)):
        rec = GdsRecord.from_result(result, ga_cfg)
        if cache_path:
            append_record(cache_path, rec)
        found[(n, m)] = rec
    return found


def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _estimate_row(curve, point, est, trials, fitness_value=None):
    k = est.k_active
    return {
        "curve": curve,
        "cap_per_user": est.capacity_per_user,
        "cap_per_user_stderr": est.stderr_capacity / k,
        "pcap_per_user": est.practical_per_user,
        "pcap_per_user_stderr": est.stderr_practical / k,
        "singular_trials": est.singular_trial_count,
        "trials": trials,
        "gds_fitness": fitness_value,
    }


def _point_job(args):
    point, record, cfg = args
    n, m, k = point.n_users, point.m_rows, point.k_active
    shape = point.shape
    snr = db_to_linear(point.snr_db)
    tag = int(round(point.beta_inv * 1000)), int(round(point.p_active * 1000))
    base = {
        "N": n, "M": m, "K": k, "beta_inv_req": point.beta_inv, "p_req": point.p_active,
        "snr_db": point.snr_db, **point.realized(),
    }
    mc_seed = derive_seed(cfg.seed, n, m, k, *tag)
    cap_cfg = CapacityConfig(k, snr, cfg.trials, mc_seed, epsilon_floor=cfg.epsilon_floor)
    rows = []
    if record is not None:
        est = monte_carlo(build_frame(record.index_set()), cap_cfg)
        rows.append(_estimate_row("aetf", point, est, cfg.trials, record.fitness))
    else:
        rows.append({"curve": "aetf"})
    iid = random_bipolar_frame(shape, derive_seed(cfg.seed, n, m, 1))
    rows.append(_estimate_row("iid", point, monte_carlo(iid, cap_cfg), cfg.trials))
    beta, gamma = k / m, m / n
    laws = [("mp", mp_law(beta))]
    if gamma < 1:
        laws.insert(0, ("manova", manova_law(beta, gamma)))
    for name, law in laws:
        rows.append({
            "curve": name,
            "cap_per_user": law_capacity_per_user(law, snr),
            "pcap_per_user": law_practical_capacity_per_user(law, snr),
        })
    return [{**base, **r} for r in rows]


def run_sweep(cfg, cache_path=None):
    points = cfg.points()
    for pt in points:
        for msg in pt.rounding_warnings():
            log.warning(msg)
    shapes = sorted({(pt.n_users, pt.m_rows) for pt in points})
    records = ensure_gds(shapes, cache_path, cfg)
    jobs = [(pt, records.get((pt.n_users, pt.m_rows)), cfg) for pt in points]
    rows = []
    for chunk in _pmap(_point_job, jobs, cfg.jobs):
        rows.extend(chunk)
    return rows


def curve_table(rows, curve, key="cap_per_user"):
    """``{(p_req, beta_inv_req, N): value}`` for one curve."""
    return {
        (r["p_req"], r["beta_inv_req"], r["N"]): r.get(key)
        for r in rows
        if r["curve"] == curve
    }


def crossover_n(n_values, aetf, iid):
    """Smallest N from which AETF stays at or above iid for every larger N; None if never."""
    ns = sorted(n_values)
    result = None
    for n in reversed(ns):
        a, b = aetf.get(n), iid.get(n)
        if a is None or b is None or a < b:
            break
        result = n
    return result
