"""Monte Carlo sampling of complete engine cycles.

A cycle is measured three times: the product Gibbs state gives ``(n, m)``,
the permutation stroke sends it to ``(l, s)``, and each qudit is then reset
to its own Gibbs state, giving ``(n', m')`` independently of ``(l, s)``.

Random numbers
--------------
``count`` samples are split into shards of ``shard_size``.  Shard ``k`` draws
its uniforms from ``numpy.random.Generator(PCG64(c_k))`` where
``c_0, c_1, ...`` are ``numpy.random.SeedSequence(seed).spawn(n_shards)``.
Each shard draws a ``(len, 3)`` array: column 0 picks the initial basis
state, columns 1 and 2 the reset outcomes of A and B, all by inverse CDF
(first index whose cumulative weight exceeds the uniform).  Results depend
on ``(seed, count, shard_size)`` only, not on the kernel backend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from . import kernels
from .model import BasisPermutation, EngineParams, ParameterError, gibbs_state
from .statistics import JointWorkHeat

__all__ = [
    "DEFAULT_SHARD_SIZE",
    "Trajectory",
    "Estimate",
    "EmpiricalSummary",
    "IdentityCheck",
    "MeanIdentityReport",
    "sample_cycles",
    "sample_trajectories",
    "summarize_trajectories",
    "merge_summaries",
    "mean_identities_check",
]

DEFAULT_SHARD_SIZE = 1 << 18
OBSERVABLES = ("work", "q_h", "q_c", "entropy", "delta_e_a", "delta_e_b", "energy_balance",
               "exp_neg_entropy")


@dataclass(frozen=True)
class Trajectory:
    """Level indices of one cycle: initial, after the stroke, after the reset."""

    n: int
    m: int
    l: int  # noqa: E741
    s: int
    n_prime: int
    m_prime: int

    def work(self, params: EngineParams) -> float:
        return params.omega_a * (self.n - self.l) + params.omega_b * (self.m - self.s)

    def delta_e_a(self, params: EngineParams) -> float:
        return params.omega_a * (self.l - self.n)

    def delta_e_b(self, params: EngineParams) -> float:
        return params.omega_b * (self.s - self.m)

    def q_h(self, params: EngineParams) -> float:
        return params.omega_a * (self.n_prime - self.l)

    def q_c(self, params: EngineParams) -> float:
        return params.omega_b * (self.m_prime - self.s)

    def entropy(self, params: EngineParams) -> float:
        return (params.beta_omega_a * (self.l - self.n)
                + params.beta_omega_b * (self.s - self.m))


@dataclass(frozen=True)
class Estimate:
    """Sample mean, plug-in variance and standard error of the mean."""

    mean: float
    variance: float
    stderr: float


def _marginal_cdf(beta_omega: float, dim: int) -> np.ndarray:
    logw = -beta_omega * np.arange(dim)
    w = np.exp(logw - logw.max())
    cdf = np.cumsum(w / math.fsum(w))
    cdf[-1] = 1.0
    return cdf


def _cdfs(params: EngineParams):
    joint = np.cumsum(gibbs_state(params).probs)
    joint[-1] = 1.0
    return (joint, _marginal_cdf(params.beta_omega_a, params.dim_a),
            _marginal_cdf(params.beta_omega_b, params.dim_b))


def _uniform_shards(seed: int, count: int, shard_size: int) -> Iterator[np.ndarray]:
    n_shards = -(-count // shard_size)
    children = np.random.SeedSequence(seed).spawn(n_shards)
    for k, child in enumerate(children):
        size = min(shard_size, count - k * shard_size)
        yield np.random.Generator(np.random.PCG64(child)).random((size, 3))


def _check_request(params, u, count, shard_size):
    if len(u) != params.size:
        raise ParameterError("permutation does not act on this product basis")
    if int(count) != count or count < 1:
        raise ParameterError(f"sample count must be a positive integer, got {count!r}")
    if shard_size < 1:
        raise ParameterError("shard size must be positive")


@dataclass(frozen=True, eq=False)
class EmpiricalSummary:
    """Sample statistics of sampled cycles, stored as a count table.

    ``counts[i, a, b]`` is the number of cycles starting in basis state ``i``
    and reset to levels ``a`` of A and ``b`` of B; every statistic is
    derived from it, so summaries merge by adding tables.
    """

    params: EngineParams
    unitary: BasisPermutation
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        shape = (self.params.size, self.params.dim_a, self.params.dim_b)
        if counts.shape != shape:
            raise ParameterError(f"count table has shape {counts.shape}, expected {shape}")
        if np.any(counts < 0) or counts.sum() == 0:
            raise ParameterError("count table must be non-negative with at least one sample")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def __eq__(self, other):
        return (isinstance(other, EmpiricalSummary) and self.params == other.params
                and self.unitary == other.unitary and np.array_equal(self.counts, other.counts))

    __hash__ = None

    @property
    def sample_count(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "EmpiricalSummary") -> "EmpiricalSummary":
        if self.params != other.params or self.unitary != other.unitary:
            raise ParameterError("cannot merge summaries of different engines")
        return EmpiricalSummary(self.params, self.unitary, self.counts + other.counts)

    @cached_property
    def _values(self) -> dict:
        p = self.params
        n, m = p.levels()
        t = self.unitary.as_array()
        l, s = n[t], m[t]
        a = np.arange(p.dim_a)[None, :, None]
        b = np.arange(p.dim_b)[None, None, :]
        shape = self.counts.shape

        def per_state(v):
            return np.broadcast_to(v[:, None, None], shape)

        work = per_state(p.omega_a * (n - l) + p.omega_b * (m - s))
        q_h = np.broadcast_to(p.omega_a * (a - l[:, None, None]), shape)
        q_c = np.broadcast_to(p.omega_b * (b - s[:, None, None]), shape)
        entropy = per_state(p.beta_omega_a * (l - n) + p.beta_omega_b * (s - m))
        return {
            "work": work,
            "q_h": q_h,
            "q_c": q_c,
            "entropy": entropy,
            "delta_e_a": per_state(p.omega_a * (l - n)),
            "delta_e_b": per_state(p.omega_b * (s - m)),
            "energy_balance": q_h + q_c - work,
            "exp_neg_entropy": np.exp(-entropy),
        }

    def estimate(self, name: str) -> Estimate:
        """Mean, variance and standard error of one of :data:`OBSERVABLES`."""
        if name not in OBSERVABLES:
            raise ParameterError(f"unknown observable {name!r}; expected one of {OBSERVABLES}")
        cached = self.__dict__.setdefault("_estimates", {})
        if name not in cached:
            values = self._values[name]
            total = self.sample_count
            mask = self.counts > 0
            w = self.counts[mask] / total
            x = values[mask]
            mean = math.fsum(w * x)
            var = math.fsum(w * (x - mean) ** 2)
            cached[name] = Estimate(mean, var, math.sqrt(var / total))
        return cached[name]

    @property
    def work(self) -> Estimate:
        return self.estimate("work")

    @property
    def q_h(self) -> Estimate:
        return self.estimate("q_h")

    @property
    def q_c(self) -> Estimate:
        return self.estimate("q_c")

    @property
    def entropy(self) -> Estimate:
        return self.estimate("entropy")

    @property
    def exp_neg_entropy(self) -> Estimate:
        """``<exp(-Sigma)>``, equal to 1 in expectation."""
        return self.estimate("exp_neg_entropy")

    def histogram(self) -> dict[tuple[int, int], float]:
        """Observed frequency of each level-change atom ``(n - l, m - s)``."""
        n, m = self.params.levels()
        t = self.unitary.as_array()
        per_state = self.counts.sum(axis=(1, 2))
        out: dict[tuple[int, int], int] = {}
        for i, c in enumerate(per_state):
            if c:
                key = (int(n[i] - n[t[i]]), int(m[i] - m[t[i]]))
                out[key] = out.get(key, 0) + int(c)
        total = self.sample_count
        return {k: c / total for k, c in sorted(out.items())}

    def total_variation(self, exact: JointWorkHeat) -> float:
        """Total-variation distance between the histogram and the exact atoms."""
        hist = self.histogram()
        keys = set(hist) | {(a.dn_a, a.dn_b) for a in exact}
        diffs = []
        for key in keys:
            atom = exact.lookup(*key)
            diffs.append(abs(hist.get(key, 0.0) - (atom.probability if atom else 0.0)))
        return 0.5 * math.fsum(diffs)


def sample_cycles(params: EngineParams, u: BasisPermutation, count: int, seed: int,
                  shard_size: int = DEFAULT_SHARD_SIZE, backend: Optional[str] = None
                  ) -> EmpiricalSummary:
    """Sample ``count`` cycles and return their summary.

    Deterministic in ``(seed, count, shard_size)``; see the module docstring
    for how the random stream is split.
    """
    _check_request(params, u, count, shard_size)
    impl = kernels if backend is None else kernels.backends()[backend]
    cdf_joint, cdf_a, cdf_b = _cdfs(params)
    counts = np.zeros((params.size, params.dim_a, params.dim_b), dtype=np.int64)
    for uniforms in _uniform_shards(seed, int(count), shard_size):
        counts += impl.sample_counts(cdf_joint, cdf_a, cdf_b, uniforms)
    return EmpiricalSummary(params, u, counts)


def sample_trajectories(params: EngineParams, u: BasisPermutation, count: int, seed: int,
                        shard_size: int = DEFAULT_SHARD_SIZE) -> list[Trajectory]:
    """Explicit trajectories from the same random stream as :func:`sample_cycles`."""
    _check_request(params, u, count, shard_size)
    cdf_joint, cdf_a, cdf_b = _cdfs(params)
    n, m = params.levels()
    t = u.as_array()
    out = []
    for uniforms in _uniform_shards(seed, int(count), shard_size):
        i = np.minimum(np.searchsorted(cdf_joint, uniforms[:, 0], side="right"), params.size - 1)
        a = np.minimum(np.searchsorted(cdf_a, uniforms[:, 1], side="right"), params.dim_a - 1)
        b = np.minimum(np.searchsorted(cdf_b, uniforms[:, 2], side="right"), params.dim_b - 1)
        for ii, aa, bb in zip(i.tolist(), a.tolist(), b.tolist()):
            out.append(Trajectory(int(n[ii]), int(m[ii]), int(n[t[ii]]), int(m[t[ii]]), aa, bb))
    return out


def summarize_trajectories(params: EngineParams, u: BasisPermutation,
                           trajectories: list[Trajectory]) -> EmpiricalSummary:
    counts = np.zeros((params.size, params.dim_a, params.dim_b), dtype=np.int64)
    for tr in trajectories:
        counts[tr.n * params.dim_b + tr.m, tr.n_prime, tr.m_prime] += 1
    return EmpiricalSummary(params, u, counts)


def merge_summaries(*summaries: EmpiricalSummary) -> EmpiricalSummary:
    if not summaries:
        raise ParameterError("nothing to merge")
    out = summaries[0]
    for s in summaries[1:]:
        out = out.merge(s)
    return out


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    deviation: float
    stderr: float
    passed: bool


@dataclass(frozen=True)
class MeanIdentityReport:
    checks: tuple[IdentityCheck, ...]
    sigmas: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _within(deviation, stderr, sigmas, scale):
    if stderr == 0:
        return abs(deviation) <= 1e-12 * scale
    return abs(deviation) <= sigmas * stderr


def mean_identities_check(summary: EmpiricalSummary, exact: JointWorkHeat,
                          sigmas: float = 4.0) -> MeanIdentityReport:
    """Compare sampled heats with the exact energy changes of the stroke.

    Checks ``<Q_H> = -<dE_A>``, ``<Q_C> = -<dE_B>`` (exact right-hand sides)
    and ``<Q_H + Q_C - W> = 0``, each within ``sigmas`` standard errors.
    """
    if exact.params != summary.params:
        raise ParameterError("exact distribution was built for different parameters")
    p = summary.params
    scale = p.omega_a * p.dim_a + p.omega_b * p.dim_b
    exact_dea = math.fsum(a.probability * a.delta_e_a for a in exact)
    exact_deb = math.fsum(a.probability * a.delta_e_b for a in exact)
    rows = []
    for name, est, target in (("q_h + delta_e_a", summary.q_h, -exact_dea),
                              ("q_c + delta_e_b", summary.q_c, -exact_deb),
                              ("q_h + q_c - w", summary.estimate("energy_balance"), 0.0)):
        dev = est.mean - target
        rows.append(IdentityCheck(name, dev, est.stderr, _within(dev, est.stderr, sigmas, scale)))
    return MeanIdentityReport(tuple(rows), sigmas)
