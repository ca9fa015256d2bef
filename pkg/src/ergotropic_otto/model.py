"""Engine parameters, diagonal Gibbs states, energies and basis permutations.

Basis states of the two-qudit product space are indexed lexicographically,
``i = n * dim_b + m`` for ``|n m>``.  Every unitary handled by the package is
a permutation of this basis, so a density matrix diagonal in the energy basis
stays diagonal and is represented by its vector of occupation probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ParameterError",
    "EngineParams",
    "DiagonalState",
    "EnergyTable",
    "BasisPermutation",
    "gibbs_state",
    "log_gibbs_weights",
    "energy_table",
    "apply_permutation",
    "cycle_notation",
    "parse_cycles",
    "conserved_number_combination",
    "named_unitary",
    "UNITARY_NAMES",
]


class ParameterError(ValueError):
    """Raised for invalid engine parameters or mismatched dimensions."""


@dataclass(frozen=True)
class EngineParams:
    """Frequencies, inverse temperatures and level counts of qudits A and B.

    Units have hbar = k_B = 1.  ``beta`` may be zero (infinite temperature).
    """

    omega_a: float
    omega_b: float
    beta_a: float
    beta_b: float
    dim_a: int = 3
    dim_b: int = 3

    def __post_init__(self):
        for name in ("omega_a", "omega_b", "beta_a", "beta_b"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)):
                raise ParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.omega_a <= 0 or self.omega_b <= 0:
            raise ParameterError("frequencies must be positive")
        if self.beta_a < 0 or self.beta_b < 0:
            raise ParameterError("inverse temperatures must be non-negative")
        for name in ("dim_a", "dim_b"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 2:
                raise ParameterError(f"{name} must be an integer >= 2, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def size(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def x(self) -> float:
        """Frequency ratio omega_b / omega_a."""
        return self.omega_b / self.omega_a

    @property
    def beta_omega_a(self) -> float:
        return self.beta_a * self.omega_a

    @property
    def beta_omega_b(self) -> float:
        return self.beta_b * self.omega_b

    def swapped(self) -> "EngineParams":
        """Exchange the roles of A and B."""
        return EngineParams(self.omega_b, self.omega_a, self.beta_b, self.beta_a,
                            self.dim_b, self.dim_a)

    def levels(self) -> tuple[np.ndarray, np.ndarray]:
        """Level indices ``(n, m)`` of every basis state, lexicographic order."""
        return np.divmod(np.arange(self.size), self.dim_b)


@dataclass(frozen=True)
class DiagonalState:
    """Occupation probabilities over the lexicographic product basis."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1:
            raise ParameterError("probabilities must form a vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ParameterError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ParameterError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return len(self.probs)

    def __eq__(self, other):
        return isinstance(other, DiagonalState) and np.array_equal(self.probs, other.probs)

    __hash__ = None


@dataclass(frozen=True)
class EnergyTable:
    """Energies ``n * omega_a + m * omega_b`` in lexicographic order."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=float)
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    def __len__(self):
        return len(self.energies)

    __hash__ = None


@dataclass(frozen=True)
class BasisPermutation:
    """Permutation unitary with ``U|i> = |mapping[i]>``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ParameterError(f"not a bijection on 0..{len(mapping) - 1}: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, size: int) -> "BasisPermutation":
        return cls(tuple(range(size)))

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, i):
        return self.mapping[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=np.intp)

    def compose(self, other: "BasisPermutation") -> "BasisPermutation":
        """Operator product ``self @ other``: apply ``other`` first."""
        if len(other) != len(self):
            raise ParameterError("cannot compose permutations of different sizes")
        return BasisPermutation(tuple(self.mapping[j] for j in other.mapping))

    __matmul__ = compose

    def inverse(self) -> "BasisPermutation":
        inv = [0] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return BasisPermutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.mapping))

    def order(self) -> int:
        """Multiplicative order (lcm of cycle lengths)."""
        return math.lcm(*(len(c) for c in self.cycles())) if len(self) else 1

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles (0-based), including fixed points."""
        seen = [False] * len(self.mapping)
        out = []
        for start in range(len(self.mapping)):
            if seen[start]:
                continue
            cycle = []
            i = start
            while not seen[i]:
                seen[i] = True
                cycle.append(i)
                i = self.mapping[i]
            out.append(tuple(cycle))
        return out

    def matrix(self) -> np.ndarray:
        """Dense unitary matrix with ``U[mapping[i], i] = 1``."""
        u = np.zeros((len(self), len(self)))
        u[list(self.mapping), list(range(len(self)))] = 1.0
        return u


def _check_params(params):
    if not isinstance(params, EngineParams):
        raise ParameterError(f"expected EngineParams, got {type(params).__name__}")


def log_gibbs_weights(params: EngineParams) -> np.ndarray:
    """Normalized log-probabilities of the product Gibbs state.

    Stays finite where the probabilities themselves underflow.
    """
    _check_params(params)
    n, m = params.levels()
    logw = -params.beta_omega_a * n - params.beta_omega_b * m
    top = logw.max()
    return logw - (top + math.log(math.fsum(np.exp(logw - top))))


def gibbs_state(params: EngineParams) -> DiagonalState:
    """Product of the Gibbs states of A and B.

    Examples
    --------
    >>> gibbs_state(EngineParams(1, 1, 0, 0)).probs[0]
    0.1111111111111111
    """
    _check_params(params)
    n, m = params.levels()
    weights = np.exp(-params.beta_omega_a * n) * np.exp(-params.beta_omega_b * m)
    return DiagonalState(weights / math.fsum(weights))


def energy_table(params: EngineParams) -> EnergyTable:
    _check_params(params)
    n, m = params.levels()
    return EnergyTable(n * params.omega_a + m * params.omega_b)


def apply_permutation(state: DiagonalState, p: BasisPermutation) -> DiagonalState:
    """Diagonal of ``U rho U^dagger`` for a permutation unitary ``U``."""
    if len(state) != len(p):
        raise ParameterError(f"state has {len(state)} entries, permutation acts on {len(p)}")
    out = np.empty_like(state.probs)
    out[p.as_array()] = state.probs
    return DiagonalState(out)


def cycle_notation(p: BasisPermutation) -> str:
    """1-based disjoint-cycle string with fixed points omitted.

    Each cycle starts at its smallest element and cycles are sorted by that
    element, so ``|nm>`` on two qutrits is labelled ``3n + m + 1``.
    """
    parts = []
    for cycle in sorted(p.cycles()):
        if len(cycle) > 1:
            parts.append("(" + "".join(str(i + 1) if len(p) < 10 else f"{i + 1} "
                                       for i in cycle).strip() + ")")
    return "".join(parts)


def parse_cycles(text: str, size: int) -> BasisPermutation:
    """Inverse of :func:`cycle_notation`.

    For ``size < 10`` digits may be run together, ``"(236874)"``; otherwise
    elements inside a cycle are separated by spaces or commas.
    """
    mapping = list(range(size))
    seen = set()
    body = text.strip()
    if body in ("", "()"):
        return BasisPermutation(tuple(mapping))
    if not (body.startswith("(") and body.endswith(")")):
        raise ParameterError(f"malformed cycle notation: {text!r}")
    for chunk in body[1:-1].split(")("):
        tokens = chunk.replace(",", " ").split()
        if size < 10 and len(tokens) == 1:
            tokens = list(tokens[0])
        try:
            cycle = [int(t) - 1 for t in tokens]
        except ValueError:
            raise ParameterError(f"malformed cycle notation: {text!r}") from None
        if any(not 0 <= c < size for c in cycle) or seen.intersection(cycle) \
                or len(set(cycle)) != len(cycle):
            raise ParameterError(f"cycles {text!r} are not disjoint elements of 1..{size}")
        seen.update(cycle)
        for k, c in enumerate(cycle):
            mapping[c] = cycle[(k + 1) % len(cycle)]
    return BasisPermutation(tuple(mapping))


def conserved_number_combination(p: BasisPermutation, params: EngineParams):
    """Smallest coprime ``(a, b)`` with ``a n_A + b n_B`` invariant under ``p``.

    Candidates are ordered by ``a + b`` and then by ``a``, with
    ``0 <= a, b <= 2 max(dim_a, dim_b)``.  Returns ``None`` when no
    combination in that range commutes with the permutation.
    """
    _check_params(params)
    if len(p) != params.size:
        raise ParameterError("permutation does not act on this product basis")
    n, m = params.levels()
    target = p.as_array()
    dn = n[target] - n
    dm = m[target] - m
    limit = 2 * max(params.dim_a, params.dim_b)
    for total in range(1, 2 * limit + 1):
        for a in range(max(0, total - limit), min(total, limit) + 1):
            b = total - a
            if math.gcd(a, b) != 1:
                continue
            if np.all(a * dn + b * dm == 0):
                return a, b
    return None


def _from_cycles(cycles: Iterable[Sequence[int]], size: int = 9) -> BasisPermutation:
    mapping = list(range(size))
    for cycle in cycles:
        for k, c in enumerate(cycle):
            mapping[c - 1] = cycle[(k + 1) % len(cycle)] - 1
    return BasisPermutation(tuple(mapping))


_QUTRIT_UNITARIES = {
    "identity": _from_cycles([]),
    "u1": _from_cycles([(2, 4), (3, 7), (6, 8)]),
    "u2": _from_cycles([(3, 4), (6, 7)]),
    "u2t": _from_cycles([(2, 7), (3, 8)]),
    "u3": _from_cycles([(2, 3, 6, 8, 7, 4)]),
    "u3t": _from_cycles([(2, 4, 7, 8, 6, 3)]),
}

UNITARY_NAMES = tuple(_QUTRIT_UNITARIES)


def named_unitary(name: str, dim_a: int = 3, dim_b: int = 3) -> BasisPermutation:
    """One of ``identity, u1, u2, u2t, u3, u3t``.

    ``u1`` (the full swap ``|nm> -> |mn>``) exists for any equal dimensions;
    the idle and double swaps are defined for two qutrits only.
    """
    key = name.lower()
    if key == "identity":
        return BasisPermutation.identity(dim_a * dim_b)
    if key == "u1" and dim_a == dim_b:
        return BasisPermutation(tuple(m * dim_b + n for n in range(dim_a) for m in range(dim_b)))
    if key not in _QUTRIT_UNITARIES:
        raise ParameterError(f"unknown unitary {name!r}; expected one of {UNITARY_NAMES}")
    if (dim_a, dim_b) != (3, 3):
        raise ParameterError(f"{name} is defined for two qutrits only")
    return _QUTRIT_UNITARIES[key]
