"""Exact work and heat statistics of a permutation stroke.

For a permutation unitary the two-point measurement is deterministic given
the initial levels: ``|n m> -> |l s>``.  Every outcome is therefore labelled
by the integer level changes ``(n - l, m - s)``, which fix
``W = omega_a (n - l) + omega_b (m - s)`` and ``dE_A = omega_a (l - n)``
uniquely.  Atoms are merged on these integer keys, never on float values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import (BasisPermutation, EngineParams, ParameterError, log_gibbs_weights)

__all__ = [
    "WorkAtom",
    "JointWorkHeat",
    "CycleStatistics",
    "joint_distribution",
    "backward_joint",
    "work_marginal",
    "moments",
    "entropy_production",
    "cycle_statistics",
    "characteristic_function",
    "characteristic_function_trace",
    "integral_ft_residual",
    "detailed_ft_check",
    "closed_form_entropy",
    "closed_form_relative_fluctuations",
    "IMAG_CAP",
]

# |Im| cap on counting parameters for the characteristic function
IMAG_CAP = 1e3


@dataclass(frozen=True)
class WorkAtom:
    """One point ``(W, dE_A)`` of the exact joint distribution."""

    dn_a: int
    dn_b: int
    work: float
    delta_e_a: float
    probability: float
    log_probability: float

    @property
    def delta_e_b(self) -> float:
        return -self.work - self.delta_e_a


@dataclass(frozen=True)
class JointWorkHeat:
    """Exact finite-support joint distribution of work and energy change of A."""

    params: EngineParams
    atoms: tuple[WorkAtom, ...]

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def arrays(self):
        """``(work, delta_e_a, probability, log_probability)`` as numpy arrays."""
        return (np.array([a.work for a in self.atoms]),
                np.array([a.delta_e_a for a in self.atoms]),
                np.array([a.probability for a in self.atoms]),
                np.array([a.log_probability for a in self.atoms]))

    def entropy(self, atom: WorkAtom) -> float:
        """Stochastic entropy production ``(b_A - b_B) dE_A - b_B W`` of an atom."""
        # same quantity, written on the integer level changes
        return -(self.params.beta_omega_a * atom.dn_a + self.params.beta_omega_b * atom.dn_b)

    def entropies(self) -> np.ndarray:
        return np.array([self.entropy(a) for a in self.atoms])

    def lookup(self, dn_a: int, dn_b: int) -> Optional[WorkAtom]:
        return self._index.get((dn_a, dn_b))

    @property
    def _index(self):
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {(a.dn_a, a.dn_b): a for a in self.atoms}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def same_as(self, other: "JointWorkHeat", tol: float = 0.0) -> bool:
        """Same support and probabilities (within ``tol``)."""
        if set(self._index) != set(other._index):
            return False
        return all(abs(a.probability - other._index[k].probability) <= tol
                   for k, a in self._index.items())


def _logsumexp(values):
    top = max(values)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


def joint_distribution(params: EngineParams, u: BasisPermutation) -> JointWorkHeat:
    """Exact ``p(W, dE_A)`` for the stroke ``u`` acting on the Gibbs state."""
    if len(u) != params.size:
        raise ParameterError(
            f"permutation acts on {len(u)} states, engine has {params.size}")
    n, m = params.levels()
    target = u.as_array()
    logp = log_gibbs_weights(params)
    groups: dict[tuple[int, int], list[float]] = {}
    for i in range(params.size):
        key = (int(n[i] - n[target[i]]), int(m[i] - m[target[i]]))
        groups.setdefault(key, []).append(float(logp[i]))
    log_groups = {key: _logsumexp(logs) for key, logs in groups.items()}
    # renormalize so that a single atom carries probability exactly 1
    log_total = _logsumexp(list(log_groups.values()))
    atoms = []
    for (dn_a, dn_b), log_group in log_groups.items():
        log_prob = log_group - log_total
        atoms.append(WorkAtom(
            dn_a, dn_b,
            work=params.omega_a * dn_a + params.omega_b * dn_b,
            delta_e_a=-params.omega_a * dn_a,
            probability=math.exp(log_prob),
            log_probability=log_prob,
        ))
    atoms.sort(key=lambda a: (a.work, a.delta_e_a))
    return JointWorkHeat(params, tuple(atoms))


def backward_joint(params: EngineParams, u: BasisPermutation) -> JointWorkHeat:
    """Statistics of the time-reversed stroke ``U^dagger`` from the same Gibbs state."""
    return joint_distribution(params, u.inverse())


def work_marginal(joint: JointWorkHeat) -> list[tuple[float, float]]:
    """``p(W)`` as sorted ``(W, probability)`` pairs.

    Distinct level changes giving the same work (e.g. ``omega_a = 2 omega_b``)
    are merged; values closer than ``1e-12`` of the energy scale count as
    equal.
    """
    p = joint.params
    tol = 1e-12 * (p.omega_a * p.dim_a + p.omega_b * p.dim_b)
    out: list[list] = []
    for atom in sorted(joint.atoms, key=lambda a: a.work):
        if out and abs(atom.work - out[-1][0]) <= tol:
            out[-1][1].append(atom.probability)
        else:
            out.append([atom.work, [atom.probability]])
    return [(w, math.fsum(ps)) for w, ps in out]


def moments(joint: JointWorkHeat, j: int, k: int) -> float:
    """``<W^j dE_A^k>`` by exact summation over atoms."""
    if j < 0 or k < 0:
        raise ParameterError("moment orders must be non-negative")
    if j + k > 8:
        raise ParameterError("moment order above 8 is not supported")
    return math.fsum(a.probability * a.work ** j * a.delta_e_a ** k for a in joint.atoms)


@dataclass(frozen=True)
class CycleStatistics:
    """Mean, variance and entropy production of one engine cycle."""

    mean_work: float
    var_work: float
    mean_delta_e_a: float
    mean_entropy: float
    joint: JointWorkHeat = field(repr=False, compare=False)

    @property
    def snr(self) -> float:
        """``<W>^2 / var(W)``; nan when the variance vanishes."""
        return (self.mean_work / self.var_work) * self.mean_work if self.var_work > 0 else math.nan

    @property
    def relative_fluctuations(self) -> float:
        """``var(W) / <W>^2``; nan when no work is extracted on average."""
        if self.mean_work == 0:
            return math.nan
        return (self.var_work / self.mean_work) / self.mean_work

    @property
    def mean_delta_e_b(self) -> float:
        return -self.mean_work - self.mean_delta_e_a

    def moment(self, j: int, k: int = 0) -> float:
        return moments(self.joint, j, k)


def entropy_production(params: EngineParams, joint: JointWorkHeat) -> CycleStatistics:
    """Work mean/variance and ``<Sigma> = (b_A - b_B) <dE_A> - b_B <W>``."""
    if joint.params != params:
        raise ParameterError("joint distribution was built for different parameters")
    w, dea, p, _ = joint.arrays()
    mean_w = math.fsum(p * w)
    var_w = math.fsum(p * (w - mean_w) ** 2)
    mean_dea = math.fsum(p * dea)
    mean_s = math.fsum(p * joint.entropies())
    return CycleStatistics(mean_w, var_w, mean_dea, mean_s, joint)


_SERIES_CUT = 0.1
# coefficients (k - 1)/k! of r e^r - expm1(r), k = 2..13
_H_COEFFS = [(k - 1) / math.factorial(k) for k in range(2, 14)]


def _relative_entropy_terms(log_p, r):
    """``q log(q/p) - (q - p)`` per state with ``log q = log p + r``; each is >= 0."""
    out = np.empty_like(r)
    small = np.abs(r) < _SERIES_CUT
    rs = r[small]
    series = np.zeros_like(rs)
    for c in reversed(_H_COEFFS):
        series = (series + c) * rs
    out[small] = np.exp(log_p[small]) * series * rs
    big = ~small
    q, p = np.exp(log_p[big] + r[big]), np.exp(log_p[big])
    out[big] = q * r[big] - (q - p)
    return out


def _population_change(log_p, r):
    """``q - p`` with ``log q = log p + r``, without cancellation for small ``r``."""
    small = np.abs(r) < 0.5
    return np.where(small, np.exp(log_p) * np.expm1(np.where(small, r, 0.0)),
                    np.exp(log_p + r) - np.exp(log_p))


def cycle_statistics(params: EngineParams, u: BasisPermutation) -> CycleStatistics:
    """Same quantities as :func:`entropy_production`, free of cancellation.

    Near equilibrium the atom sums add O(1) terms to reach O(beta omega)
    means.  Here ``<W>`` and ``<dE_A>`` come from the population changes
    ``p' - p`` and ``<Sigma>`` from the relative entropy ``D(p'||p)``, which is
    a sum of non-negative terms.  Log-population changes are formed from
    integer level differences so they carry no normalization rounding.
    """
    joint = joint_distribution(params, u)
    log_p = log_gibbs_weights(params)
    n, m = params.levels()
    src = u.inverse().as_array()
    r = -params.beta_omega_a * (n[src] - n) - params.beta_omega_b * (m[src] - m)
    change = _population_change(log_p, r)
    ea = params.omega_a * n
    mean_w = -math.fsum(change * (ea + params.omega_b * m))
    mean_dea = math.fsum(change * ea)
    mean_s = math.fsum(_relative_entropy_terms(log_p, r))
    w, dea, prob, _ = joint.arrays()
    # deterministic outcomes (e.g. the swap at equal frequencies) are exact
    if np.all(w == w[0]):
        mean_w = float(w[0])
    if np.all(dea == dea[0]):
        mean_dea = float(dea[0])
    var_w = math.fsum(prob * (w - mean_w) ** 2)
    return CycleStatistics(mean_w, var_w, mean_dea, mean_s, joint)


def _check_counting(*zs):
    for z in zs:
        if abs(complex(z).imag) > IMAG_CAP:
            raise ParameterError(f"|Im| of counting parameter exceeds {IMAG_CAP:g}")


def characteristic_function(params: EngineParams, u: BasisPermutation,
                            lam: complex, mu: complex) -> complex:
    """``chi(lam, mu) = <exp(i lam W + i mu dE_A)>`` over the exact atoms.

    Terms are exponentiated together with their log-probability so that
    imaginary counting parameters (e.g. ``-i beta_B``) do not overflow.
    """
    _check_counting(lam, mu)
    joint = joint_distribution(params, u)
    w, dea, _, logp = joint.arrays()
    terms = np.exp(logp + 1j * (complex(lam) * w + complex(mu) * dea))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def characteristic_function_trace(params: EngineParams, u: BasisPermutation,
                                  lam: complex, mu: complex) -> complex:
    """Same quantity from the operator trace with dense matrices.

    ``Tr[U^dag (e^{-i(lam-mu) H_A} x e^{-i lam H_B}) U (e^{i(lam-mu) H_A} x e^{i lam H_B}) rho0]``
    """
    _check_counting(lam, mu)
    n, m = params.levels()
    ha, hb = params.omega_a * n, params.omega_b * m
    lam, mu = complex(lam), complex(mu)
    before = np.diag(np.exp(1j * (lam - mu) * ha + 1j * lam * hb))
    after = np.diag(np.exp(-1j * (lam - mu) * ha - 1j * lam * hb))
    rho = np.diag(np.exp(log_gibbs_weights(params)))
    mat = u.matrix()
    return complex(np.trace(mat.T @ after @ mat @ before @ rho))


def integral_ft_residual(joint: JointWorkHeat) -> float:
    """``|<exp(-Sigma)> - 1|``, accumulated in the log domain."""
    terms = [a.log_probability - joint.entropy(a) for a in joint.atoms]
    return abs(math.expm1(_logsumexp(terms)))


def detailed_ft_check(params: EngineParams, u: BasisPermutation) -> float:
    """Largest ``|p(W, dE_A) - e^Sigma p_B(-W, -dE_A)| / p(W, dE_A)``.

    An atom without a reversed partner in the backward process gives an
    infinite error.
    """
    forward = joint_distribution(params, u)
    backward = backward_joint(params, u)
    worst = 0.0
    for atom in forward.atoms:
        if atom.log_probability == -math.inf:
            continue
        partner = backward.lookup(-atom.dn_a, -atom.dn_b)
        if partner is None:
            return math.inf
        log_ratio = forward.entropy(atom) + partner.log_probability - atom.log_probability
        worst = max(worst, abs(math.expm1(log_ratio)))
    return worst


def _qutrit_label(which):
    from .ergotropy import RegimeLabel, _as_label

    label = _as_label(which)
    if label is RegimeLabel.PASSIVE:
        raise ParameterError("the identity has no closed form to evaluate")
    return label, RegimeLabel


def closed_form_entropy(params: EngineParams, which) -> float:
    """Analytic ``<Sigma>`` of a named qutrit transformation."""
    if (params.dim_a, params.dim_b) != (3, 3):
        raise ParameterError("closed forms exist for two qutrits only")
    label, L = _qutrit_label(which)
    if label in (L.IDLE_SWAP_A, L.DOUBLE_SWAP_INVERSE):
        mirror = L.IDLE_SWAP_B if label is L.IDLE_SWAP_A else L.DOUBLE_SWAP
        return closed_form_entropy(params.swapped(), mirror)
    a, b = params.beta_omega_a, params.beta_omega_b
    sh, ch = math.sinh, math.cosh
    denom = (1 + 2 * ch(a)) * (1 + 2 * ch(b))
    if label is L.SWAP:
        # <W_1> (b - a) / (w_A - w_B) with the frequency factor cancelled
        return 2 * (b - a) * (sh(b) / (1 + 2 * ch(b)) - sh(a) / (1 + 2 * ch(a)))
    if label is L.IDLE_SWAP_B:
        return 2 * (2 * b - a) * (sh(b) + sh(b - a)) / denom
    return 2 * (b * (sh(a) + sh(b)) - a * (sh(b) + sh(b - a))) / denom


def closed_form_relative_fluctuations(params: EngineParams, which) -> float:
    """Analytic ``var(W) / <W>^2`` of a named qutrit transformation."""
    if (params.dim_a, params.dim_b) != (3, 3):
        raise ParameterError("closed forms exist for two qutrits only")
    label, L = _qutrit_label(which)
    if label in (L.IDLE_SWAP_A, L.DOUBLE_SWAP_INVERSE):
        mirror = L.IDLE_SWAP_B if label is L.IDLE_SWAP_A else L.DOUBLE_SWAP
        return closed_form_relative_fluctuations(params.swapped(), mirror)
    a, b, x = params.beta_omega_a, params.beta_omega_b, params.x
    sh, ch = math.sinh, math.cosh
    denom = (1 + 2 * ch(a)) * (1 + 2 * ch(b))
    if label is L.SWAP:
        num = ch(a) + ch(b) + 4 * ch(b - a)
        den = 2 * (sh(b) - sh(a) + 2 * sh(b - a)) ** 2
    elif label is L.IDLE_SWAP_B:
        num = ch(b) + ch(b - a)
        den = 2 * (sh(b) + sh(b - a)) ** 2
    else:
        num = x ** 2 * ch(a) + (1 - x) ** 2 * ch(b) + ch(b - a)
        den = 2 * ((1 - x) * sh(b) - x * sh(a) + sh(b - a)) ** 2
    return denom * num / den - 1
