"""Thermodynamic uncertainty relations for the extracted work.

All bounds are lower bounds on the relative fluctuations ``var(W)/<W>^2``
(equivalently upper bounds on the SNR ``<W>^2/var(W)``) in terms of the mean
entropy production.  The standard bound ``2/<Sigma>`` is sometimes quoted
on the product ``<Sigma> var(W)/<W>^2 >= 2``; :func:`standard_bound_product`
gives that form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .model import BasisPermutation, EngineParams, ParameterError, conserved_number_combination
from .statistics import CycleStatistics, cycle_statistics

__all__ = [
    "VIOLATION_TOL",
    "BOUND_NAMES",
    "inverse_x_tanh_x",
    "standard_bound",
    "standard_bound_product",
    "swap_bound",
    "tight_bound",
    "loose_bound",
    "generalized_tight_bound",
    "generalized_loose_bound",
    "BoundCheck",
    "TurReport",
    "evaluate_bounds",
    "tur_report",
    "SweepRow",
    "SWEEP_PARAMETERS",
    "sweep_params",
    "snr_sweep",
]

VIOLATION_TOL = 1e-12
BOUND_NAMES = ("standard", "swap", "tight", "loose", "generalized_tight", "generalized_loose")


def inverse_x_tanh_x(y: float) -> float:
    """Solve ``x tanh(x) = y`` for ``x >= 0`` by bisection.

    ``x tanh x`` increases on ``[0, inf)`` and exceeds ``x - 1`` for ``x >= 1``,
    so the root lies in ``[0, max(1, y + 1)]``.  Iterates until the bracket
    cannot be split further in double precision.
    """
    y = float(y)
    if not y >= 0:
        raise ParameterError(f"x tanh x is non-negative; got y={y!r}")
    if y == 0:
        return 0.0
    if math.isinf(y):
        return math.inf
    lo, hi = 0.0, max(1.0, y + 1.0)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid * math.tanh(mid) < y:
            lo = mid
        else:
            hi = mid
    return lo if abs(lo * math.tanh(lo) - y) <= abs(hi * math.tanh(hi) - y) else hi


def _entropy(s):
    s = float(s)
    if s < 0:
        if s > -1e-12:
            return 0.0
        raise ParameterError(f"mean entropy production must be non-negative, got {s!r}")
    return s


def standard_bound(s: float) -> float:
    """``2 / <Sigma>``."""
    s = _entropy(s)
    return 2 / s if s > 0 else math.inf


def standard_bound_product(relative_fluctuations: float, s: float) -> float:
    """``<Sigma> var(W)/<W>^2``, bounded below by 2 in the standard relation."""
    return _entropy(s) * relative_fluctuations


def swap_bound(s: float) -> float:
    """``2 / <Sigma> - 1``, proven for number-conserving strokes."""
    return standard_bound(s) - 1


def _csch2_of_g(y: float) -> float:
    # csch^2(g(y)), with the small-argument series below 1e-8 in 2y
    if y == 0:
        return math.inf
    g = inverse_x_tanh_x(y)
    if 2 * y < 1e-8:
        return 1 / g ** 2 - 1 / 3
    return 1 / math.sinh(g) ** 2


def tight_bound(s: float) -> float:
    """``csch^2[g(<Sigma>/2)]``, with ``g`` the inverse of ``x tanh x``."""
    return _csch2_of_g(_entropy(s) / 2)


def loose_bound(s: float) -> float:
    """``2 / (exp(<Sigma>) - 1)``."""
    s = _entropy(s)
    return 2 / math.expm1(s) if s > 0 else math.inf


def generalized_tight_bound(s_forward: float, s_backward: float) -> float:
    """``csch^2[g(a/2)] / 2`` with ``a`` the mean of forward and backward entropy."""
    a = (_entropy(s_forward) + _entropy(s_backward)) / 2
    return 0.5 * _csch2_of_g(a / 2)


def generalized_loose_bound(s_forward: float, s_backward: float) -> float:
    """``1 / (exp(a) - 1)`` with ``a`` the mean of forward and backward entropy.

    For a process equal to its reverse this is half of :func:`loose_bound`,
    matching the halved left-hand side, and it never exceeds
    :func:`generalized_tight_bound`.
    """
    a = (_entropy(s_forward) + _entropy(s_backward)) / 2
    return 1 / math.expm1(a) if a > 0 else math.inf


@dataclass(frozen=True)
class BoundCheck:
    value: float
    satisfied: Optional[bool]
    applicable: bool = True


def _check(lhs, bound, applicable=True):
    if math.isnan(lhs):
        return BoundCheck(bound, None, applicable)
    ok = lhs >= bound - VIOLATION_TOL * abs(bound) if math.isfinite(bound) else False
    return BoundCheck(bound, ok, applicable)


@dataclass(frozen=True)
class TurReport:
    """Relative fluctuations of the work against every TUR bound.

    ``operational`` is false when ``<W> = 0``; the ratio is then undefined and
    ``satisfied`` is ``None`` for the forward bounds.
    """

    relative_fluctuations: float
    snr: float
    mean_entropy: float
    bounds: dict
    operational: bool
    generalized_lhs: float = math.nan
    forward: Optional[CycleStatistics] = field(default=None, repr=False)
    backward: Optional[CycleStatistics] = field(default=None, repr=False)

    def violated(self) -> list[str]:
        return [name for name, b in self.bounds.items() if b.satisfied is False]


def evaluate_bounds(forward: CycleStatistics, backward: Optional[CycleStatistics] = None,
                    swap_applicable: bool = True) -> TurReport:
    """Compare work fluctuations with all six TURs.

    The generalized bounds need the backward process and compare
    ``(var + var_B) / (<W> + <W>_B)^2``; they are omitted when ``backward`` is
    ``None``.

    Near equilibrium both sides grow like ``1/<Sigma>`` while their gap stays
    O(1), so the comparison needs a relative accuracy of about ``<Sigma>``.
    With the ``1e-12`` guard the flags are meaningful for ``<Sigma>`` well
    above that level.
    """
    s = _entropy(forward.mean_entropy)
    operational = forward.mean_work != 0
    rel = forward.relative_fluctuations
    bounds = {
        "standard": _check(rel, standard_bound(s)),
        "swap": _check(rel, swap_bound(s), swap_applicable),
        "tight": _check(rel, tight_bound(s)),
        "loose": _check(rel, loose_bound(s)),
    }
    gen_lhs = math.nan
    if backward is not None:
        s_b = _entropy(backward.mean_entropy)
        total = forward.mean_work + backward.mean_work
        if total != 0:
            gen_lhs = ((forward.var_work + backward.var_work) / total) / total
        bounds["generalized_tight"] = _check(gen_lhs, generalized_tight_bound(s, s_b))
        bounds["generalized_loose"] = _check(gen_lhs, generalized_loose_bound(s, s_b))
    return TurReport(rel, forward.snr, s, bounds, operational, gen_lhs, forward, backward)


def tur_report(params: EngineParams, u: BasisPermutation) -> TurReport:
    """Forward and backward statistics of ``u`` checked against every bound."""
    forward = cycle_statistics(params, u)
    backward = cycle_statistics(params, u.inverse())
    conserving = conserved_number_combination(u, params) is not None
    return evaluate_bounds(forward, backward, swap_applicable=conserving)


SWEEP_PARAMETERS = ("omega-b", "beta-b-omega-b", "beta-a-omega-a")


def sweep_params(base: EngineParams, parameter: str, value: float) -> EngineParams:
    """``base`` with one swept quantity replaced.

    ``omega-b`` sets the raw frequency at fixed inverse temperatures;
    ``beta-b-omega-b`` / ``beta-a-omega-a`` set the product by changing the
    inverse temperature at fixed frequency.
    """
    if parameter == "omega-b":
        return EngineParams(base.omega_a, value, base.beta_a, base.beta_b, base.dim_a, base.dim_b)
    if parameter == "beta-b-omega-b":
        return EngineParams(base.omega_a, base.omega_b, base.beta_a, value / base.omega_b,
                            base.dim_a, base.dim_b)
    if parameter == "beta-a-omega-a":
        return EngineParams(base.omega_a, base.omega_b, value / base.omega_a, base.beta_b,
                            base.dim_a, base.dim_b)
    raise ParameterError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    params: EngineParams
    regime: str
    unitary: BasisPermutation
    report: TurReport

    @property
    def stats(self) -> CycleStatistics:
        return self.report.forward


def _regime_name(u: BasisPermutation) -> str:
    from .ergotropy import classify_unitary

    label = classify_unitary(u)
    return str(label) if label is not None else "Unclassified"


def snr_sweep(base: EngineParams, parameter: str, values: Iterable[float],
              selection: Union[str, BasisPermutation] = "auto") -> list[SweepRow]:
    """SNR and TUR bounds along a one-parameter sweep.

    ``selection="auto"`` re-derives the ergotropic unitary at every point;
    otherwise the given permutation (or name such as ``"u3"``) is used
    throughout.
    """
    from .ergotropy import ergotropic_unitary, unitary_for

    fixed = None
    if isinstance(selection, BasisPermutation):
        fixed = selection
    elif selection != "auto":
        fixed = unitary_for(selection)
    rows = []
    for value in values:
        params = sweep_params(base, parameter, float(value))
        u = fixed if fixed is not None else ergotropic_unitary(params).unitary
        rows.append(SweepRow(float(value), params, _regime_name(u), u, tur_report(params, u)))
    return rows
