"""Static model of a spin-1/2 Ising chain with individually addressed spins.

Spins sit in a magnetic-field gradient, so spin k carries its own Larmor
frequency ``omega_k = base_frequency + k * frequency_step``.  Neighbouring
spins couple through an Ising term with constant J, which splits every
single-spin transition by the state of the adjacent spins.  That splitting
is what makes conditional logic addressable by frequency alone.

Conventions used throughout the package:

* basis states are labelled by the integer ``p`` whose bit k is the state
  of spin k (bit 0 = rightmost spin = least significant),
* bit value 0 means the spin is aligned with the field (ground,
  I_z eigenvalue +1/2), bit value 1 means excited (-1/2).
"""

from dataclasses import dataclass
from typing import Iterator, NamedTuple
import warnings

import numpy as np

from .errors import ValidationError

__all__ = [
    "ChainParams",
    "TransitionEntry",
    "TransitionTable",
    "spin_frequency",
    "basis_energy",
    "transition_frequency",
    "resonant_frequency_catalog",
    "build_transition_table",
]


@dataclass(frozen=True)
class ChainParams:
    """Chain geometry and energy scales (angular frequency units, hbar = 1).

    Parameters
    ----------
    num_spins:
        Number of spins S in the chain, at least 2.
    base_frequency:
        Larmor frequency of spin 0.  Only differences between transition
        gaps and pulse frequencies enter the dynamics, so its value is
        physically irrelevant; it must merely keep every transition
        frequency positive (base_frequency > 2 * ising_constant).
    frequency_step:
        Larmor increment between adjacent spins (the field gradient).
    ising_constant:
        Nearest-neighbour Ising constant J, non-negative.
    """

    num_spins: int = 4
    base_frequency: float = 100.0
    frequency_step: float = 10.0
    ising_constant: float = 1.0

    def __post_init__(self) -> None:
        if self.num_spins < 2:
            raise ValidationError(f"need at least 2 spins, got {self.num_spins}")
        if self.frequency_step <= 0:
            raise ValidationError("frequency_step must be positive")
        if self.ising_constant < 0:
            raise ValidationError("ising_constant must be non-negative")
        if self.frequency_step <= 2 * self.ising_constant:
            # Frequency addressing degenerates once the Ising splitting
            # reaches the gradient spacing; still simulable, so only warn.
            warnings.warn(
                "frequency_step <= 2*ising_constant: transition frequencies "
                "of different spins overlap",
                stacklevel=2,
            )

    @property
    def dim(self) -> int:
        return 1 << self.num_spins


def spin_frequency(params: ChainParams, k: int) -> float:
    """Larmor frequency of spin k."""
    if not 0 <= k < params.num_spins:
        raise ValidationError(f"spin index {k} outside 0..{params.num_spins - 1}")
    return params.base_frequency + k * params.frequency_step


def _spin_sign(p: int, k: int) -> float:
    """I_z eigenvalue of spin k in basis state p: +1/2 ground, -1/2 excited."""
    return -0.5 if (p >> k) & 1 else 0.5


def basis_energy(params: ChainParams, p: int) -> float:
    """Diagonal energy of basis state p.

    E_p = -sum_k omega_k s_k - 2 J sum_k s_k s_{k+1} with s_k = +-1/2,
    the sign convention chosen so exciting a spin raises the Zeeman term.
    """
    if not 0 <= p < params.dim:
        raise ValidationError(f"state index {p} outside 0..{params.dim - 1}")
    energy = 0.0
    for k in range(params.num_spins):
        energy -= spin_frequency(params, k) * _spin_sign(p, k)
    for k in range(params.num_spins - 1):
        energy -= 2.0 * params.ising_constant * _spin_sign(p, k) * _spin_sign(p, k + 1)
    return energy


def transition_frequency(params: ChainParams, p: int, k: int) -> float:
    """Energy cost of exciting spin k out of the neighbour configuration of p.

    Equals ``omega_k + J * (ground neighbours - excited neighbours)``; only
    the chain neighbours of k matter, the rest of p is ignored.

    Raises
    ------
    ValidationError
        If the result is not positive, which happens only in pathological
        regimes with J >= omega_k / 2.
    """
    if not 0 <= k < params.num_spins:
        raise ValidationError(f"spin index {k} outside 0..{params.num_spins - 1}")
    if not 0 <= p < params.dim:
        raise ValidationError(f"state index {p} outside 0..{params.dim - 1}")
    freq = spin_frequency(params, k)
    for j in (k - 1, k + 1):
        if 0 <= j < params.num_spins:
            freq += 2.0 * params.ising_constant * _spin_sign(p, j)
    if freq <= 0:
        raise ValidationError(
            f"non-positive transition frequency {freq} for spin {k}: "
            "base_frequency too small for this ising_constant"
        )
    return freq


def resonant_frequency_catalog(params: ChainParams, k: int) -> tuple[float, ...]:
    """All resonant frequencies of spin k, sorted ascending.

    Edge spins have one neighbour and two frequencies {omega_k -+ J};
    inner spins have two neighbours and three {omega_k - 2J, omega_k,
    omega_k + 2J}.  With J = 0 the catalog collapses to {omega_k}.
    """
    omega = spin_frequency(params, k)
    j = params.ising_constant
    neighbours = sum(1 for m in (k - 1, k + 1) if 0 <= m < params.num_spins)
    if neighbours == 1:
        values = {omega - j, omega + j}
    else:
        values = {omega - 2 * j, omega, omega + 2 * j}
    return tuple(sorted(values))


class TransitionEntry(NamedTuple):
    upper: int
    lower: int
    spin: int
    gap: float


@dataclass(frozen=True)
class TransitionTable:
    """Every single-spin-flip pair of the chain, ordered by energy.

    Attributes
    ----------
    params:
        The chain the table was built from.
    energies:
        Diagonal energies indexed by basis state.
    upper, lower, spin, gap:
        Parallel arrays, one row per unordered pair {p, p ^ (1 << k)}:
        the higher-energy member, the lower-energy member, the flipped
        spin, and the positive energy gap between them.
    pair_gap:
        (2**S, S) array with ``pair_gap[p, k]`` the gap of the pair
        containing p and differing in spin k; both members share a row
        value, which is what the integrator indexes at run time.
    upper_mask:
        (2**S, S) boolean array, True where p is the higher-energy member
        of the pair it forms with ``p ^ (1 << k)``.
    """

    params: ChainParams
    energies: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    spin: np.ndarray
    gap: np.ndarray
    pair_gap: np.ndarray
    upper_mask: np.ndarray

    def __len__(self) -> int:
        return len(self.gap)

    def entries(self) -> Iterator[TransitionEntry]:
        for i in range(len(self.gap)):
            yield TransitionEntry(
                int(self.upper[i]), int(self.lower[i]), int(self.spin[i]), float(self.gap[i])
            )


def build_transition_table(params: ChainParams) -> TransitionTable:
    """Enumerate all S * 2**(S-1) single-flip pairs with their gaps.

    Pairs are oriented by energy, so every gap is positive regardless of
    parameter regime; in the normal regime (all transition frequencies
    positive) the upper member is the one with spin k excited and the gap
    equals ``transition_frequency(lower, k)``.
    """
    dim = params.dim
    nspin = params.num_spins
    energies = np.array([basis_energy(params, p) for p in range(dim)])
    uppers, lowers, spins, gaps = [], [], [], []
    pair_gap = np.zeros((dim, nspin))
    upper_mask = np.zeros((dim, nspin), dtype=bool)
    for k in range(nspin):
        for m in range(dim):
            if (m >> k) & 1:
                continue
            p = m | (1 << k)
            gap = energies[p] - energies[m]
            if gap == 0.0:
                raise ValidationError(
                    f"degenerate pair ({p}, {m}): flipping spin {k} costs nothing"
                )
            if gap > 0:
                uppers.append(p)
                lowers.append(m)
                upper_mask[p, k] = True
            else:
                uppers.append(m)
                lowers.append(p)
                upper_mask[m, k] = True
                gap = -gap
            spins.append(k)
            gaps.append(gap)
            pair_gap[p, k] = gap
            pair_gap[m, k] = gap
    return TransitionTable(
        params=params,
        energies=energies,
        upper=np.array(uppers, dtype=np.int64),
        lower=np.array(lowers, dtype=np.int64),
        spin=np.array(spins, dtype=np.int64),
        gap=np.array(gaps),
        pair_gap=pair_gap,
        upper_mask=upper_mask,
    )
