"""Experiment harness: named experiments, seeded sweep runner,
persistence, and replay.

Each experiment name maps to exactly one statistic definition (see
``EXPERIMENT_DOC``).  A run walks the ``(n, trial)`` grid in row-major
order and keys every cell with its own SplitMix64-derived sub-seed, so
all cells are mutually independent and the whole record reproduces bit
for bit from its embedded config.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import __version__ as _ARTIFACT_VERSION
from .circuits import MAX_N as _ORACLE_MAX_N, circuit_summary
from .ensemble import (EnsembleConfig, EntryLaw, SymmetricMatrix,
                       build_laplacian, sample_adjacency, validate_condition5)
from .errors import ConfigError, PreconditionError
from .limit_laws import (DensityGrid, semicircle_cdf, semicircle_normal_density,
                         semicircle_normal_moments)
from .rng import derive_seed
from .spectra import (ESD, eigenvalues_sym, lambda_max_fast,
                      normalize_adjacency_spectrum, normalize_laplacian_spectrum,
                      scaled_spectrum)
from .stats import empirical_moments, ks_distance, row_sum_statistics

SCHEMA_VERSION = 1

EXPERIMENT_DOC = {
    "thm1_lambda_max_laplacian":
        "lmax_laplacian_ratio = lambda_max(L) / sqrt(n log n) for centered "
        "unit-variance entries; approaches sqrt(2) slowly from below.",
    "cor1_regimes":
        "lambda_max(L) normalized per mean/sd regime: "
        "lmax_over_sigma_sqrt_nlogn (mean negligible) and lmax_over_n_mu "
        "(mean dominant); the regime per n is recorded as a flag.",
    "thm2_gamma_m":
        "ks_gamma_m = KS distance between the ESD of (lambda_i - n mu) / "
        "(sqrt(n) sigma) for the Laplacian and the semicircle-normal free "
        "convolution; also records m2, m4, m4_over_m2sq.",
    "thm3_semicircle":
        "ks_semicircle = KS distance between the ESD of (lambda_i + mu) / "
        "(sqrt(n) sigma) for the adjacency matrix and the semicircle law.",
    "cor2_dilute":
        "ks_semicircle_dilute = KS distance between the ESD of "
        "A / sqrt(n p (1-p)) and the semicircle law, for Bernoulli(p_n) "
        "edges; degenerate p flags the alpha_n precondition.",
    "thm5_adjacency_norm":
        "regime |mu| sqrt(n) << sigma: lmax_over_sqrtn_sigma and "
        "lkn_over_sqrtn_sigma with k_n = ceil(k_fraction sqrt(n)) (-> 2); "
        "mean-dominant regimes: lmax_over_n_mu (-> 1) or "
        "specnorm_over_n_abs_mu (-> 1).",
    "oracle_moments":
        "exact circuit expansion at small n: circuit_count, "
        "vertex_matched_count, expected_trace_moment for tr(L^r).",
    "lemma_rowsums":
        "s1_dev_over_n2 = |S1 - E S1| / n^2 and s2_dev_over_n2 = "
        "|S2 - E S2| / n^2; both shrink as n grows.",
}

# smallest certified standardized moment order required per experiment
REQUIRED_P = {
    "thm1_lambda_max_laplacian": 6.0,
    "cor1_regimes": 6.0,
    "thm2_gamma_m": 4.0,
    "thm3_semicircle": 2.0,
    "cor2_dilute": 2.0,
    "thm5_adjacency_norm": 6.0,
    "oracle_moments": 0.0,
    "lemma_rowsums": 4.0,
}

EXPERIMENT_NAMES = tuple(EXPERIMENT_DOC)

_SCHEDULE_FORMS = ("constant", "power", "sqrt_log_over_n")


@dataclass(frozen=True)
class LawSpec:
    """A fixed entry law, or a Bernoulli-parameter schedule p_n.

    Schedules are restricted to a small grammar so the mean/sd regimes
    stay expressible without a general parser:

    * ``constant``: p_n = value
    * ``power``: p_n = coeff * n**exponent
    * ``sqrt_log_over_n``: p_n = coeff * sqrt(log n / n)
    """

    law: Optional[dict] = None
    schedule: Optional[dict] = None

    def __post_init__(self):
        if (self.law is None) == (self.schedule is None):
            raise ConfigError("law spec needs exactly one of law / schedule")
        if self.schedule is not None:
            form = self.schedule.get("form")
            if form not in _SCHEDULE_FORMS:
                raise ConfigError(f"unknown schedule form {form!r}")
            kind = self.schedule.get("kind", "bernoulli")
            if kind not in ("bernoulli", "centered_bernoulli", "sign_sparse"):
                raise ConfigError("schedules parameterize probability-p laws only")

    def resolve(self, n: int) -> EntryLaw:
        if self.law is not None:
            return EntryLaw.from_dict(self.law)
        s = self.schedule
        if s["form"] == "constant":
            p = s["value"]
        elif s["form"] == "power":
            p = s["coeff"] * float(n) ** s["exponent"]
        else:
            p = s["coeff"] * math.sqrt(math.log(n) / n)
        if not (0.0 <= p <= 1.0):
            raise ConfigError(f"schedule gives p={p:.4g} outside [0, 1] at n={n}")
        kind = s.get("kind", "bernoulli")
        return EntryLaw.from_dict({"kind": kind, "p": p})

    def to_dict(self) -> dict:
        return {"law": self.law} if self.law is not None else {"schedule": self.schedule}

    @classmethod
    def from_dict(cls, d: dict) -> "LawSpec":
        if "schedule" in d and d["schedule"] is not None:
            return cls(schedule=dict(d["schedule"]))
        return cls(law=dict(d["law"]))


@dataclass(frozen=True)
class ExperimentConfig:
    """Seeded, serializable description of one experiment sweep."""

    name: str
    n_grid: tuple
    trials: int
    law_spec: LawSpec
    master_seed: int = 42
    k_fraction: float = 0.5
    trace_power: int = 4  # only the circuit oracle reads this
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.name not in EXPERIMENT_NAMES:
            raise ConfigError(f"unknown experiment name {self.name!r}; "
                              f"known: {', '.join(EXPERIMENT_NAMES)}")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or list(grid) != sorted(grid):
            raise ConfigError("n_grid must be nonempty and sorted ascending")
        if any(n < 2 for n in grid):
            raise ConfigError("all n in n_grid must be at least 2")
        object.__setattr__(self, "n_grid", grid)
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if not (0.0 < self.k_fraction <= 1.0):
            raise ConfigError("k_fraction must lie in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "law_spec": self.law_spec.to_dict(),
            "master_seed": self.master_seed,
            "k_fraction": self.k_fraction,
            "trace_power": self.trace_power,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            return cls(
                name=d["name"],
                n_grid=tuple(d["n_grid"]),
                trials=int(d["trials"]),
                law_spec=LawSpec.from_dict(d["law_spec"]),
                master_seed=int(d.get("master_seed", 42)),
                k_fraction=float(d.get("k_fraction", 0.5)),
                trace_power=int(d.get("trace_power", 4)),
                output_dir=d.get("output_dir"),
            )
        except KeyError as missing:
            raise ConfigError(f"experiment config missing field {missing}") from None


@dataclass
class ExperimentRecord:
    """Everything one run produced; replays bit for bit from ``config``."""

    config: ExperimentConfig
    rows: list              # dicts: n, trial, seed, statistic, value
    summary: dict           # statistic -> str(n) -> {median, mean, sd}
    flags: list
    artifact_version: str = _ARTIFACT_VERSION
    schema_version: int = SCHEMA_VERSION
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "artifact_version": self.artifact_version,
            "config": self.config.to_dict(),
            "rows": self.rows,
            "summary": self.summary,
            "flags": self.flags,
            "wall_time_s": self.wall_time_s,
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ExperimentRecord":
        with open(path) as fh:
            d = json.load(fh)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(
                f"record schema version {d.get('schema_version')!r} does not "
                f"match supported version {SCHEMA_VERSION}")
        return cls(
            config=ExperimentConfig.from_dict(d["config"]),
            rows=d["rows"],
            summary=d["summary"],
            flags=d["flags"],
            artifact_version=d.get("artifact_version", "unknown"),
            schema_version=d["schema_version"],
            wall_time_s=d.get("wall_time_s", 0.0),
        )

    def values(self, statistic: str, n: Optional[int] = None) -> list:
        return [r["value"] for r in self.rows
                if r["statistic"] == statistic and (n is None or r["n"] == n)]


@lru_cache(maxsize=1)
def default_limit_grid() -> DensityGrid:
    """The semicircle-normal free convolution on the default grid,
    solved once per process."""
    return semicircle_normal_density()


def _require_condition(law: EntryLaw, name: str) -> None:
    p = REQUIRED_P[name]
    if p > 0 and not validate_condition5(law, p):
        raise PreconditionError(
            f"experiment {name} needs a certified standardized moment of "
            f"order at least {p}; law {law.kind} "
            f"(certified {law.certified_moment_order}, variance {law.variance:g}) "
            f"does not provide it")


def _atom_mass(spectrum, value: float) -> float:
    scale = max(1.0, float(np.max(np.abs(spectrum.eigenvalues))))
    return ESD(spectrum.eigenvalues).mass_at(value, tol=1e-8 * scale)


# --- per-trial statistic functions -----------------------------------------

def _trial_thm1(n, law, cfg, seed_cfg):
    lap = build_laplacian(sample_adjacency(seed_cfg))
    lam = float(lambda_max_fast(lap, 1)[0])
    return [("lmax_laplacian_ratio", lam / math.sqrt(n * math.log(n)))]


def _trial_cor1(n, law, cfg, seed_cfg):
    lap = build_laplacian(sample_adjacency(seed_cfg))
    lam = float(lambda_max_fast(lap, 1)[0])
    out = [("lmax_over_sigma_sqrt_nlogn",
            lam / (law.sd * math.sqrt(n * math.log(n))))]
    if law.mean != 0.0:
        out.append(("lmax_over_n_mu", lam / (n * law.mean)))
    return out


def _trial_thm2(n, law, cfg, seed_cfg):
    lap = build_laplacian(sample_adjacency(seed_cfg))
    esd = normalize_laplacian_spectrum(eigenvalues_sym(lap), n,
                                       law.mean, law.sd)
    ms = empirical_moments(esd, 4)
    m2, m4 = float(ms[2]), float(ms[4])
    return [("ks_gamma_m", ks_distance(esd, default_limit_grid().cdf_at)),
            ("m2", m2), ("m4", m4), ("m4_over_m2sq", m4 / m2 ** 2)]


def _trial_thm3(n, law, cfg, seed_cfg):
    adj = sample_adjacency(seed_cfg)
    spectrum = eigenvalues_sym(adj)
    if law.is_degenerate:
        atom = -law.mean  # Bernoulli(1): all bulk eigenvalues sit at -1
        return [("esd_mass_at_degenerate_atom", _atom_mass(spectrum, atom))]
    esd = normalize_adjacency_spectrum(spectrum, n, law.mean, law.sd)
    return [("ks_semicircle", ks_distance(esd, semicircle_cdf))]


def _trial_cor2(n, law, cfg, seed_cfg):
    if law.kind != "bernoulli":
        raise PreconditionError("cor2_dilute is an Erdos-Renyi experiment; "
                                "use a bernoulli law or schedule")
    adj = sample_adjacency(seed_cfg)
    spectrum = eigenvalues_sym(adj)
    p = law.params["p"]
    alpha = math.sqrt(n * p * (1.0 - p))
    if alpha == 0.0:
        atom = -1.0 if p == 1.0 else 0.0
        return [("alpha_n", 0.0),
                ("esd_mass_at_degenerate_atom", _atom_mass(spectrum, atom))]
    esd = scaled_spectrum(spectrum, alpha)
    return [("alpha_n", alpha),
            ("ks_semicircle_dilute", ks_distance(esd, semicircle_cdf))]


def _trial_thm5(n, law, cfg, seed_cfg):
    adj = sample_adjacency(seed_cfg)
    rho = law.mean * math.sqrt(n) / law.sd
    sqrt_n_sigma = math.sqrt(n) * law.sd
    if abs(rho) < 1.0:
        k_n = max(1, math.ceil(cfg.k_fraction * math.sqrt(n)))
        top = lambda_max_fast(adj, k_n)
        return [("k_n", float(k_n)),
                ("lmax_over_sqrtn_sigma", float(top[0]) / sqrt_n_sigma),
                ("lkn_over_sqrtn_sigma", float(top[k_n - 1]) / sqrt_n_sigma)]
    if rho >= 1.0:
        lam = float(lambda_max_fast(adj, 1)[0])
        return [("lmax_over_n_mu", lam / (n * law.mean))]
    neg = SymmetricMatrix(-adj.array, zero_diagonal=True, kind="adjacency")
    specnorm = max(float(lambda_max_fast(adj, 1)[0]),
                   float(lambda_max_fast(neg, 1)[0]))
    return [("specnorm_over_n_abs_mu", specnorm / (n * abs(law.mean)))]


def _trial_lemma(n, law, cfg, seed_cfg):
    adj = sample_adjacency(seed_cfg)
    s = row_sum_statistics(adj)
    mu, var = law.mean, law.variance
    e_s1 = n * (n - 1) * (var + mu * mu)
    e_s2 = n * ((n - 1) * var + (n - 1) ** 2 * mu * mu)
    return [("s1_dev_over_n2", abs(s["s1"] - e_s1) / n ** 2),
            ("s2_dev_over_n2", abs(s["s2"] - e_s2) / n ** 2)]


_TRIAL_FN = {
    "thm1_lambda_max_laplacian": _trial_thm1,
    "cor1_regimes": _trial_cor1,
    "thm2_gamma_m": _trial_thm2,
    "thm3_semicircle": _trial_thm3,
    "cor2_dilute": _trial_cor2,
    "thm5_adjacency_norm": _trial_thm5,
    "lemma_rowsums": _trial_lemma,
}


def _classify_regime(law: EntryLaw, n: int) -> str:
    if law.is_degenerate:
        return "degenerate"
    boundary = law.sd * math.sqrt(math.log(n) / n)
    if law.mean == 0.0 or abs(law.mean) < boundary:
        return "a1"
    return "a2" if law.mean > 0 else "a3"


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentRecord:
    """Run the experiment and return its full record.

    Trials may run on a thread pool (``workers > 1``); rows are always
    assembled in ``(n, trial)`` order, so the record is identical to a
    sequential run.
    """
    t_start = time.perf_counter()
    name = config.name
    flags: list = []
    rows: list = []

    if name == "oracle_moments":
        _run_oracle(config, rows, flags)
    else:
        trial_fn = _TRIAL_FN[name]
        for n_index, n in enumerate(config.n_grid):
            law = config.law_spec.resolve(n)
            _validate_law_for(name, law, n, flags)
            base = n_index * config.trials
            seeds = [derive_seed(config.master_seed, base + t)
                     for t in range(config.trials)]

            def one(trial):
                seed_cfg = EnsembleConfig(n=n, law=law,
                                          master_seed=config.master_seed,
                                          trial_index=base + trial)
                return trial_fn(n, law, config, seed_cfg)

            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(one, range(config.trials)))
            else:
                results = [one(t) for t in range(config.trials)]
            for trial, stats in enumerate(results):
                for stat, value in stats:
                    rows.append({"n": n, "trial": trial, "seed": seeds[trial],
                                 "statistic": stat, "value": value})

    summary = _summarize(rows)
    if name == "thm1_lambda_max_laplacian":
        _attach_running_extremes(config, rows, summary)
    if name == "thm2_gamma_m":
        ms = semicircle_normal_moments(4)
        summary["limit_moment_ratio"] = {
            "cumulant_route": ms[4] / ms[2] ** 2,
            "reference_8_3": 8.0 / 3.0,
        }

    record = ExperimentRecord(config=config, rows=rows, summary=summary,
                              flags=flags,
                              wall_time_s=time.perf_counter() - t_start)
    if config.output_dir:
        os.makedirs(config.output_dir, exist_ok=True)
        record.save(os.path.join(config.output_dir, f"{name}.json"))
    return record


def _validate_law_for(name: str, law: EntryLaw, n: int, flags: list) -> None:
    degenerate_ok = name in ("thm3_semicircle", "cor2_dilute")
    if law.is_degenerate:
        if not degenerate_ok:
            raise PreconditionError(
                f"experiment {name} cannot run on a degenerate law")
        flags.append(f"alpha_n_precondition_violated:n={n}")
        return
    _require_condition(law, name)
    if name == "thm1_lambda_max_laplacian":
        if abs(law.mean) > 1e-12 or abs(law.variance - 1.0) > 1e-12:
            raise PreconditionError(
                "thm1_lambda_max_laplacian needs centered unit-variance "
                "entries; use cor1_regimes for general mean/sd")
    if name in ("cor1_regimes", "thm5_adjacency_norm"):
        flags.append(f"regime:n={n}:{_classify_regime(law, n)}")
    if name == "cor2_dilute":
        p = law.params["p"]
        alpha = math.sqrt(n * p * (1.0 - p))
        if alpha < 3.0:
            flags.append(f"alpha_n_small:n={n}:alpha={alpha:.3g}")


def _run_oracle(config: ExperimentConfig, rows: list, flags: list) -> None:
    r = config.trace_power
    for n in config.n_grid:
        if n > _ORACLE_MAX_N:
            raise ConfigError(f"oracle_moments needs n <= {_ORACLE_MAX_N}")
        law = config.law_spec.resolve(n)
        profile = law.moment_profile(r)
        summary = circuit_summary(n, r, profile)
        seed = derive_seed(config.master_seed, 0)
        for stat in ("circuit_count", "vertex_matched_count",
                     "expected_trace_moment"):
            rows.append({"n": n, "trial": 0, "seed": seed,
                         "statistic": stat, "value": float(summary[stat])})


def _summarize(rows: list) -> dict:
    grouped: dict = {}
    for row in rows:
        grouped.setdefault(row["statistic"], {}).setdefault(row["n"], []).append(
            row["value"])
    summary: dict = {}
    for stat, by_n in grouped.items():
        summary[stat] = {}
        for n, values in by_n.items():
            arr = np.asarray(values, dtype=float)
            summary[stat][str(n)] = {
                "median": float(np.median(arr)),
                "mean": float(np.mean(arr)),
                "sd": float(np.std(arr)),
            }
    return summary


def _attach_running_extremes(config, rows, summary) -> None:
    """Qualitative running record of the ratio across the (independent)
    n grid: no pass/fail contract, just the observed envelope."""
    firsts = [r["value"] for r in rows
              if r["statistic"] == "lmax_laplacian_ratio" and r["trial"] == 0]
    if firsts:
        summary["running_extremes"] = {
            "min": float(np.minimum.accumulate(firsts)[-1]),
            "max": float(np.maximum.accumulate(firsts)[-1]),
        }


@dataclass
class ReplayReport:
    matches: bool
    rows_compared: int
    divergence: Optional[dict] = None
    version_warning: Optional[str] = None


def replay(path, workers: int = 1) -> ReplayReport:
    """Re-run a persisted record from its embedded config and verify
    every per-trial value bit for bit.

    A schema mismatch is an error; an artifact-version mismatch only
    warns, and the comparison is still attempted.
    """
    record = ExperimentRecord.load(path)
    version_warning = None
    if record.artifact_version != _ARTIFACT_VERSION:
        version_warning = (f"record produced by artifact "
                           f"{record.artifact_version}, replaying under "
                           f"{_ARTIFACT_VERSION}")
        warnings.warn(version_warning)
    fresh = run_experiment(record.config, workers=workers)
    compared = 0
    for old, new in zip(record.rows, fresh.rows):
        compared += 1
        same_cell = (old["n"] == new["n"] and old["trial"] == new["trial"]
                     and old["statistic"] == new["statistic"]
                     and old["seed"] == new["seed"])
        if not same_cell or old["value"] != new["value"]:
            return ReplayReport(
                matches=False, rows_compared=compared,
                divergence={"n": old["n"], "trial": old["trial"],
                            "statistic": old["statistic"],
                            "recorded": old["value"],
                            "recomputed": new["value"]},
                version_warning=version_warning)
    if len(record.rows) != len(fresh.rows):
        return ReplayReport(matches=False, rows_compared=compared,
                            divergence={"n": None, "trial": None,
                                        "statistic": "row_count",
                                        "recorded": len(record.rows),
                                        "recomputed": len(fresh.rows)},
                            version_warning=version_warning)
    return ReplayReport(matches=True, rows_compared=compared,
                        version_warning=version_warning)


def emit_histogram(esd: ESD, bins: int, path) -> None:
    """Write the ESD histogram as CSV: bin_left, bin_right, count, density.

    The density column is count / (n * bin_width), so the densities
    integrate back to exactly 1 over the bins.
    """
    if bins < 10:
        raise ConfigError("need at least 10 bins")
    counts, edges = np.histogram(esd.points, bins=bins)
    n = esd.n
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "count", "density"])
        for i in range(bins):
            width = edges[i + 1] - edges[i]
            writer.writerow([repr(float(edges[i])), repr(float(edges[i + 1])),
                             int(counts[i]),
                             repr(float(counts[i] / (n * width)))])
