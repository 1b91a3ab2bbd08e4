"""Entry distributions and random adjacency / Laplacian matrices.

An entry law describes the common distribution of the off-diagonal
matrix entries.  Laws are sampled through a uniform stream only, so a
matrix is a pure function of ``(n, law, master_seed, trial_index)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericError, PreconditionError
from .rng import polar_gaussians, stream, trial_stream

_PROB_TOL = 1e-12

KINDS = (
    "bernoulli",
    "centered_bernoulli",
    "sign_sparse",
    "gaussian",
    "rademacher",
    "table",
)


def _double_factorial_odd(j: int) -> int:
    """(j-1)!! for even j >= 0, i.e. 1*3*5*...*(j-1)."""
    out = 1
    for i in range(1, j, 2):
        out *= i
    return out


@dataclass(frozen=True)
class EntryLaw:
    """Distribution of a single off-diagonal entry.

    Use the classmethod constructors; they fill in the closed-form mean
    and variance.  ``certified_moment_order`` is the largest p for which
    the standardized absolute p-th moment is certified finite and
    uniformly bounded; bounded-support and Gaussian kinds certify every
    order, a table law carries whatever the caller declares.

    Degenerate laws (variance 0, e.g. ``bernoulli(1)``) are
    constructible so degenerate ensembles can be sampled, but they never
    satisfy the moment condition checks.
    """

    kind: str
    params: dict = field(default_factory=dict)
    certified_moment_order: float = math.inf

    # -- constructors -------------------------------------------------

    @classmethod
    def bernoulli(cls, p: float) -> "EntryLaw":
        _check_prob(p)
        return cls("bernoulli", {"p": float(p)})

    @classmethod
    def centered_bernoulli(cls, p: float) -> "EntryLaw":
        """Bernoulli(p) minus its mean: values 1-p and -p."""
        _check_prob(p)
        return cls("centered_bernoulli", {"p": float(p)})

    @classmethod
    def sign_sparse(cls, p: float) -> "EntryLaw":
        """Three-valued sign model: P(+1) = P(-1) = p/2, P(0) = 1 - p."""
        _check_prob(p)
        return cls("sign_sparse", {"p": float(p)})

    @classmethod
    def gaussian(cls, mean: float, sd: float) -> "EntryLaw":
        if not sd > 0:
            raise ConfigError("gaussian sd must be positive")
        return cls("gaussian", {"mean": float(mean), "sd": float(sd)})

    @classmethod
    def rademacher(cls) -> "EntryLaw":
        return cls("rademacher", {})

    @classmethod
    def table(cls, values: Sequence[float], probs: Sequence[float],
              certified_moment_order: float = math.inf) -> "EntryLaw":
        values = [float(v) for v in values]
        probs = [float(q) for q in probs]
        if len(values) != len(probs) or not values:
            raise ConfigError("table law needs matching nonempty values/probs")
        if any(q < 0.0 or q > 1.0 for q in probs):
            raise ConfigError("table law probabilities must lie in [0, 1]")
        if abs(sum(probs) - 1.0) > _PROB_TOL:
            raise ConfigError("table law probabilities must sum to 1")
        if certified_moment_order < 2:
            raise ConfigError("certified_moment_order must be >= 2")
        return cls("table", {"values": tuple(values), "probs": tuple(probs)},
                   certified_moment_order=float(certified_moment_order))

    # -- closed-form moments ------------------------------------------

    @property
    def mean(self) -> float:
        k, p = self.kind, self.params
        if k == "bernoulli":
            return p["p"]
        if k in ("centered_bernoulli", "sign_sparse", "rademacher"):
            return 0.0
        if k == "gaussian":
            return p["mean"]
        return float(sum(q * v for v, q in zip(p["values"], p["probs"])))

    @property
    def variance(self) -> float:
        k, p = self.kind, self.params
        if k in ("bernoulli", "centered_bernoulli"):
            return p["p"] * (1.0 - p["p"])
        if k == "sign_sparse":
            return p["p"]
        if k == "gaussian":
            return p["sd"] ** 2
        if k == "rademacher":
            return 1.0
        mu = self.mean
        return float(sum(q * (v - mu) ** 2 for v, q in zip(p["values"], p["probs"])))

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def is_degenerate(self) -> bool:
        return self.variance == 0.0

    def moment(self, m: int):
        """Raw moment E[xi^m].  Exact (int / Fraction) where the
        parameters allow, float otherwise."""
        if m < 0:
            raise ConfigError("moment order must be nonnegative")
        if m == 0:
            return 1
        k, p = self.kind, self.params
        if k == "rademacher":
            return 1 if m % 2 == 0 else 0
        if k == "bernoulli":
            return p["p"]
        if k == "sign_sparse":
            return p["p"] if m % 2 == 0 else 0.0
        if k == "centered_bernoulli":
            q = p["p"]
            return q * (1.0 - q) ** m + (1.0 - q) * (-q) ** m
        if k == "gaussian":
            mu, sd = p["mean"], p["sd"]
            total = 0.0
            for j in range(0, m + 1, 2):
                total += (math.comb(m, j) * mu ** (m - j)
                          * sd ** j * _double_factorial_odd(j))
            return total
        return float(sum(q * v ** m for v, q in zip(p["values"], p["probs"])))

    def central_moment(self, m: int) -> float:
        mu = self.mean
        return float(sum(math.comb(m, j) * float(self.moment(j)) * (-mu) ** (m - j)
                         for j in range(m + 1)))

    def moment_profile(self, max_power: int) -> dict:
        """Map power -> E[xi^power] for powers 1..max_power.

        Rademacher profiles come out as exact integers, which keeps the
        circuit-expansion arithmetic exact.
        """
        return {m: self.moment(m) for m in range(1, max_power + 1)}

    # -- sampling ------------------------------------------------------

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """i.i.d. draws, a deterministic function of the uniform stream."""
        k, p = self.kind, self.params
        if k == "bernoulli":
            return (rng.random(count) < p["p"]).astype(float)
        if k == "centered_bernoulli":
            return (rng.random(count) < p["p"]).astype(float) - p["p"]
        if k == "sign_sparse":
            u = rng.random(count)
            out = np.zeros(count)
            out[u < p["p"] / 2.0] = 1.0
            out[(u >= p["p"] / 2.0) & (u < p["p"])] = -1.0
            return out
        if k == "rademacher":
            return np.where(rng.random(count) < 0.5, 1.0, -1.0)
        if k == "gaussian":
            return p["mean"] + p["sd"] * polar_gaussians(rng, count)
        # table: inverse-CDF lookup on the cumulative probability ladder
        cum = np.cumsum(p["probs"])
        idx = np.searchsorted(cum, rng.random(count), side="right")
        idx = np.minimum(idx, len(p["values"]) - 1)
        return np.asarray(p["values"], dtype=float)[idx]

    # -- (de)serialization --------------------------------------------

    def to_dict(self) -> dict:
        d = {"kind": self.kind, **self.params}
        if math.isfinite(self.certified_moment_order):
            d["certified_moment_order"] = self.certified_moment_order
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EntryLaw":
        d = dict(d)
        kind = d.pop("kind", None)
        if kind == "bernoulli":
            return cls.bernoulli(d["p"])
        if kind == "centered_bernoulli":
            return cls.centered_bernoulli(d["p"])
        if kind == "sign_sparse":
            return cls.sign_sparse(d["p"])
        if kind == "gaussian":
            return cls.gaussian(d.get("mean", 0.0), d.get("sd", 1.0))
        if kind == "rademacher":
            return cls.rademacher()
        if kind == "table":
            return cls.table(d["values"], d["probs"],
                             d.get("certified_moment_order", math.inf))
        raise ConfigError(f"unknown entry law kind: {kind!r}")


def _check_prob(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ConfigError(f"probability {p} outside [0, 1]")


def validate_condition5(law: EntryLaw, required_p: float) -> bool:
    """Does the law certify a finite standardized p-th absolute moment
    of order at least ``required_p``?

    True requires positive variance (the standardization divides by the
    standard deviation) and a certified order at or above ``required_p``.
    Bounded-support and Gaussian kinds certify every order; a table law
    is trusted at its declared order.
    """
    if law.is_degenerate:
        return False
    return law.certified_moment_order >= required_p


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything that determines one sampled matrix, bit for bit."""

    n: int
    law: EntryLaw
    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("matrix dimension must be at least 2")
        if self.trial_index < 0:
            raise ConfigError("trial_index must be nonnegative")


class SymmetricMatrix:
    """Dense real symmetric matrix; symmetry is enforced at construction
    by mirroring the lower triangle, so ``M[i, j] == M[j, i]`` exactly.

    Instances are immutable: the backing array is marked read-only and
    can be shared across threads.
    """

    __slots__ = ("_a", "zero_diagonal", "kind")

    def __init__(self, array, zero_diagonal: bool = False, kind: str = "other"):
        a = np.array(array, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ConfigError("symmetric matrix needs a square array")
        lower = np.tril(a, -1)
        a = lower + lower.T + np.diag(np.diag(a))
        if zero_diagonal and np.any(np.diag(a) != 0.0):
            raise PreconditionError("declared zero diagonal but diagonal is nonzero")
        self.zero_diagonal = bool(zero_diagonal)
        self.kind = kind
        a.setflags(write=False)
        self._a = a

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    def row_sums(self) -> np.ndarray:
        return self._a.sum(axis=1)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._a))) if self.n else 0.0

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self._a))

    def __repr__(self):  # pragma: no cover
        return f"SymmetricMatrix(n={self.n}, kind={self.kind!r})"


def sample_entry_stream(law: EntryLaw, seed: int, count: int) -> np.ndarray:
    """``count`` i.i.d. draws from ``law``.

    ``seed`` is an already-derived 64-bit sub-seed (see
    :func:`graphspectra.rng.derive_seed`); the draws are a pure function
    of ``(law, seed, count)``.
    """
    if count < 0:
        raise ConfigError("count must be nonnegative")
    return law.sample(stream(seed), count)


def sample_adjacency(config: EnsembleConfig) -> SymmetricMatrix:
    """Random adjacency matrix: zero diagonal, upper-triangle entries
    i.i.d. from the law, mirrored below the diagonal.

    Entries are drawn in row-major upper-triangle order, so the matrix
    reproduces bit for bit from the config.
    """
    n = config.n
    rng = trial_stream(config.master_seed, config.trial_index)
    vals = config.law.sample(rng, n * (n - 1) // 2)
    a = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    a[iu] = vals
    a += a.T
    return SymmetricMatrix(a, zero_diagonal=True, kind="adjacency")


def build_laplacian(adjacency: SymmetricMatrix) -> SymmetricMatrix:
    """Laplacian of an adjacency matrix: row-sum diagonal minus the
    matrix itself, so every row sums to zero up to rounding."""
    if not adjacency.zero_diagonal or np.any(np.diag(adjacency.array) != 0.0):
        raise PreconditionError("laplacian input must have an exactly zero diagonal")
    if not np.all(np.isfinite(adjacency.array)):
        raise NumericError("adjacency matrix has non-finite entries")
    lap = -adjacency.array.copy()
    np.fill_diagonal(lap, adjacency.row_sums())
    return SymmetricMatrix(lap, zero_diagonal=False, kind="laplacian")


def sample_laplacian(config: EnsembleConfig) -> SymmetricMatrix:
    """Convenience: sample the adjacency matrix and build its Laplacian."""
    return build_laplacian(sample_adjacency(config))
