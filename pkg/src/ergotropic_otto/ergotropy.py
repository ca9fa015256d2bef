"""Ergotropic permutation unitaries and the mean work they extract."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from . import kernels
from .model import (BasisPermutation, EngineParams, ParameterError, energy_table,
                    gibbs_state, log_gibbs_weights, named_unitary)

__all__ = [
    "RegimeLabel",
    "ErgotropyResult",
    "RegimePoint",
    "sort_permutations",
    "ergotropic_unitary",
    "classify_unitary",
    "unitary_for",
    "mean_work",
    "closed_form_work",
    "regime_map",
    "exhaustive_max_work",
]


class RegimeLabel(str, enum.Enum):
    """Named ergotropic transformations of two qutrits."""

    PASSIVE = "Passive"
    SWAP = "Swap"
    IDLE_SWAP_B = "IdleSwapB"
    IDLE_SWAP_A = "IdleSwapA"
    DOUBLE_SWAP = "DoubleSwap"
    DOUBLE_SWAP_INVERSE = "DoubleSwapInverse"

    def __str__(self):
        return self.value


_LABEL_TO_NAME = {
    RegimeLabel.PASSIVE: "identity",
    RegimeLabel.SWAP: "u1",
    RegimeLabel.IDLE_SWAP_B: "u2",
    RegimeLabel.IDLE_SWAP_A: "u2t",
    RegimeLabel.DOUBLE_SWAP: "u3",
    RegimeLabel.DOUBLE_SWAP_INVERSE: "u3t",
}
_NAME_TO_LABEL = {v: k for k, v in _LABEL_TO_NAME.items()}


def _as_label(which) -> RegimeLabel:
    if isinstance(which, RegimeLabel):
        return which
    key = str(which)
    if key.lower() in _NAME_TO_LABEL:
        return _NAME_TO_LABEL[key.lower()]
    try:
        return RegimeLabel(key)
    except ValueError:
        raise ParameterError(f"unknown transformation {which!r}") from None


def unitary_for(which) -> BasisPermutation:
    """Qutrit permutation for a label (``RegimeLabel`` or ``u1``-style name)."""
    return named_unitary(_LABEL_TO_NAME[_as_label(which)])


def classify_unitary(u: BasisPermutation) -> Optional[RegimeLabel]:
    """Label of a 3x3 permutation, or ``None`` if it is not one of the six."""
    if len(u) != 9:
        return None
    for label, name in _LABEL_TO_NAME.items():
        if named_unitary(name).mapping == u.mapping:
            return label
    return None


@dataclass(frozen=True)
class ErgotropyResult:
    unitary: BasisPermutation
    mean_work: float
    regime: Optional[RegimeLabel]
    sort_energy: BasisPermutation
    sort_population: BasisPermutation


def _tie_key(values: np.ndarray) -> np.ndarray:
    # values equal up to rounding (e.g. 3 * 0.1 vs 0.3) must tie
    scale = float(np.max(np.abs(values))) or 1.0
    return np.round(values / scale, 12)


def _ranks(order: np.ndarray) -> np.ndarray:
    ranks = np.empty_like(order)
    ranks[order] = np.arange(len(order))
    return ranks


def sort_permutations(params: EngineParams) -> tuple[BasisPermutation, BasisPermutation]:
    """Permutations sorting energies ascending and populations descending.

    ``P_E`` sends the basis state of energy rank ``k`` to ``|k>``, ``P_rho``
    sends the state of population rank ``k`` to ``|k>``.  Degenerate energies
    are ordered by decreasing population and equal populations by increasing
    energy, with lexicographic order as the last resort.  With this rule a
    passive state yields ``P_E == P_rho`` exactly, so boundary points where
    no work can be gained are reported as the identity.
    """
    energies = _tie_key(energy_table(params).energies)
    neg_log_p = _tie_key(-log_gibbs_weights(params))
    idx = np.arange(params.size)
    order_e = np.lexsort((idx, neg_log_p, energies))
    order_rho = np.lexsort((idx, energies, neg_log_p))
    return (BasisPermutation(tuple(_ranks(order_e))),
            BasisPermutation(tuple(_ranks(order_rho))))


def mean_work(params: EngineParams, u: BasisPermutation) -> float:
    """Average work ``Tr[rho0 H] - Tr[U rho0 U^dag H]`` of a permutation."""
    if len(u) != params.size:
        raise ParameterError("permutation does not act on this product basis")
    e = energy_table(params).energies
    p = gibbs_state(params).probs
    return math.fsum(p * (e - e[u.as_array()]))


def ergotropic_unitary(params: EngineParams) -> ErgotropyResult:
    """Work-optimal permutation ``U = P_E^dagger P_rho`` and its ergotropy."""
    p_e, p_rho = sort_permutations(params)
    u = p_e.inverse() @ p_rho
    regime = classify_unitary(u) if (params.dim_a, params.dim_b) == (3, 3) else None
    return ErgotropyResult(u, mean_work(params, u), regime, p_e, p_rho)


def exhaustive_max_work(params: EngineParams, backend=None) -> tuple[float, BasisPermutation]:
    """Maximum work over every basis permutation, by brute force.

    Independent of the sorting construction; used as its oracle.  Feasible
    up to ``dim_a * dim_b = 10``.
    """
    if params.size > 10:
        raise ParameterError("exhaustive search is limited to 10 basis states")
    impl = kernels if backend is None else kernels.backends()[backend]
    e = energy_table(params).energies
    p = np.ascontiguousarray(gibbs_state(params).probs)
    cost, best = impl.min_permutation_cost(p, np.ascontiguousarray(e))
    return math.fsum(p * e) - cost, BasisPermutation(tuple(best))


def closed_form_work(params: EngineParams, which: Union[RegimeLabel, str]) -> float:
    """Mean work of a named qutrit transformation from its analytic form.

    The value is returned whether or not the transformation is the
    ergotropic one at ``params``; outside its regime it may be negative.
    """
    if (params.dim_a, params.dim_b) != (3, 3):
        raise ParameterError("closed forms exist for two qutrits only")
    label = _as_label(which)
    if label is RegimeLabel.PASSIVE:
        raise ParameterError("the identity has no closed form to evaluate")
    if label is RegimeLabel.DOUBLE_SWAP_INVERSE:
        return closed_form_work(params.swapped(), RegimeLabel.DOUBLE_SWAP)
    if label is RegimeLabel.IDLE_SWAP_A:
        return closed_form_work(params.swapped(), RegimeLabel.IDLE_SWAP_B)

    wa, wb = params.omega_a, params.omega_b
    a, b = params.beta_omega_a, params.beta_omega_b
    denom = (1 + 2 * math.cosh(a)) * (1 + 2 * math.cosh(b))
    if label is RegimeLabel.SWAP:
        return 2 * (wa - wb) * (math.sinh(b) / (1 + 2 * math.cosh(b))
                                - math.sinh(a) / (1 + 2 * math.cosh(a)))
    if label is RegimeLabel.IDLE_SWAP_B:
        return 2 * (wa - 2 * wb) * (math.sinh(b) + math.sinh(b - a)) / denom
    return 2 * (wa * (math.sinh(b) + math.sinh(b - a))
                - wb * (math.sinh(a) + math.sinh(b))) / denom


@dataclass(frozen=True)
class RegimePoint:
    omega_b: float
    beta_ratio: float
    regime: Optional[RegimeLabel]
    mean_work: float


def regime_map(omega_b_values: Iterable[float], beta_ratios: Iterable[float],
               omega_a: float = 1.0, beta_b: float = 10.0) -> list[RegimePoint]:
    """Classify the ergotropic transformation over an ``(omega_b, beta_a/beta_b)`` grid.

    ``beta_a = ratio * beta_b``.  Labels come from comparing whole
    permutations, so the regime boundaries emerge from the sorting rule
    rather than from a table of inequalities.  Rows are ordered by ratio,
    then omega_b.
    """
    omega_b_values = list(omega_b_values)
    out = []
    for ratio in beta_ratios:
        for wb in omega_b_values:
            params = EngineParams(omega_a, wb, ratio * beta_b, beta_b)
            res = ergotropic_unitary(params)
            out.append(RegimePoint(float(wb), float(ratio), res.regime, res.mean_work))
    return out
