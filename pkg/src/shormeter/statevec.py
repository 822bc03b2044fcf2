"""Dense pure-state simulation of the order-finding circuit.

Joint basis convention: index = j * 2**L + y, register A (t qubits, value j)
major, register B (L qubits, value y) minor.  The Hamming weight of a joint
index is the popcount of the full (t+L)-bit string, which is what the
entanglement closed forms consume.

States are immutable after construction; every operation returns a fresh
state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from shormeter.numtheory import ShorInstance

__all__ = [
    "NORM_TOL",
    "ZERO_TOL",
    "OutcomeDistribution",
    "PureState",
    "RegisterLayout",
    "apply_hadamard_layer",
    "apply_inverse_qft_A",
    "apply_modexp_unitary",
    "apply_qft_A",
    "dump_nonzero_json",
    "outcome_distribution",
    "outcome_probability",
    "ideal_psi3",
    "init_state",
    "measurement_distribution_A",
    "run_order_finding_circuit",
    "sample_outcome",
]

ZERO_TOL = 1e-12  # amplitudes below this modulus count as exact zeros
NORM_TOL = 1e-10
_DUAL_PATH_TOL = 1e-9


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit split: t control qubits (register A), L work qubits (register B)."""

    t: int
    L: int

    def __post_init__(self) -> None:
        if self.t < 1 or self.L < 1:
            raise ValueError(f"need t >= 1 and L >= 1, got t={self.t}, L={self.L}")

    @property
    def n(self) -> int:
        return self.t + self.L

    @property
    def Q(self) -> int:
        return 2**self.t

    @property
    def dim_b(self) -> int:
        return 2**self.L

    @property
    def dim(self) -> int:
        return 2**self.n

    @staticmethod
    def for_instance(instance: ShorInstance) -> "RegisterLayout":
        return RegisterLayout(t=instance.t, L=instance.L)


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over the joint basis."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.amplitudes, dtype=np.complex128)
        if arr.shape != (self.layout.dim,):
            raise ValueError(f"expected {self.layout.dim} amplitudes, got shape {arr.shape}")
        norm = float(np.vdot(arr, arr).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm**2 = {norm!r} is not 1 within {NORM_TOL}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    def as_grid(self) -> np.ndarray:
        """(Q, 2**L) view: rows are register-A values, columns register-B."""
        return self.amplitudes.reshape(self.layout.Q, self.layout.dim_b)

    def support(self) -> np.ndarray:
        """Joint indices carrying amplitude above the zero threshold."""
        return np.nonzero(np.abs(self.amplitudes) > ZERO_TOL)[0]

    def register_b_support(self) -> list[int]:
        marginal = np.sum(np.abs(self.as_grid()) ** 2, axis=0)
        return [int(y) for y in np.nonzero(marginal > ZERO_TOL**2)[0]]


def init_state(layout: RegisterLayout) -> PureState:
    """|0...0> on register A, |1> on register B."""
    vec = np.zeros(layout.dim, dtype=np.complex128)
    vec[1] = 1.0
    return PureState(layout, vec)


def apply_hadamard_layer(state: PureState) -> PureState:
    """Hadamard on every register-A qubit (register B untouched)."""
    lay = state.layout
    arr = state.amplitudes.reshape((2,) * lay.t + (lay.dim_b,)).copy()
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for axis in range(lay.t):
        view = np.moveaxis(arr, axis, 0)
        top = view[0].copy()
        view[0] = (top + view[1]) * inv_sqrt2
        view[1] = (top - view[1]) * inv_sqrt2
    return PureState(lay, arr.reshape(-1))


def apply_modexp_unitary(state: PureState, instance: ShorInstance) -> PureState:
    """|j>|y> -> |j>|x**j * y mod N> on register-B values below N.

    Multiplication by an invertible x permutes the residues mod N, so the map
    is unitary; basis values y >= N must carry no amplitude.
    """
    lay = state.layout
    if (lay.t, lay.L) != (instance.t, instance.L):
        raise ValueError("state layout does not match the instance registers")
    n_mod, x = instance.N, instance.x
    grid = state.as_grid()
    if n_mod < lay.dim_b and np.any(np.abs(grid[:, n_mod:]) > ZERO_TOL):
        raise ValueError(f"amplitude on register-B value >= N={n_mod}")
    powers = np.empty(lay.Q, dtype=np.int64)
    acc = 1
    for j in range(lay.Q):
        powers[j] = acc
        acc = (acc * x) % n_mod
    ys = np.arange(n_mod, dtype=np.int64)
    targets = (powers[:, None] * ys[None, :]) % n_mod
    out = np.zeros_like(grid)
    out[np.arange(lay.Q)[:, None], targets] = grid[:, :n_mod]
    return PureState(lay, out.reshape(-1))


def apply_qft_A(state: PureState) -> PureState:
    """Fourier transform on register A: kernel exp(+2 pi i j k / Q) / sqrt(Q)."""
    lay = state.layout
    out = np.fft.ifft(state.as_grid(), axis=0) * math.sqrt(lay.Q)
    return PureState(lay, out.reshape(-1))


def apply_inverse_qft_A(state: PureState) -> PureState:
    """Inverse Fourier transform on register A: kernel exp(-2 pi i j k / Q) / sqrt(Q)."""
    lay = state.layout
    out = np.fft.fft(state.as_grid(), axis=0) / math.sqrt(lay.Q)
    return PureState(lay, out.reshape(-1))


def ideal_psi3(instance: ShorInstance) -> PureState:
    """Post-transform state built directly, valid when r divides Q.

    Amplitude exp(-2 pi i a s / r) / r at joint index (s*m, x**a mod N); the
    support has at most r*r basis states, each of modulus 1/r.
    """
    if instance.r is None:
        raise ValueError("instance needs its order r (call with_order() first)")
    r, m = instance.r, instance.m
    if m is None:
        raise ValueError(
            f"ideal post-transform state needs r | Q, but r={r} does not divide Q={instance.Q}"
        )
    lay = RegisterLayout.for_instance(instance)
    vec = np.zeros(lay.dim, dtype=np.complex128)
    for a in range(r):
        y = pow(instance.x, a, instance.N)
        for s in range(r):
            phase = -2.0j * math.pi * ((a * s) % r) / r
            vec[(s * m) * lay.dim_b + y] += np.exp(phase) / r
    return PureState(lay, vec)


def run_order_finding_circuit(instance: ShorInstance) -> tuple[PureState, PureState, PureState]:
    """Evolve init -> Hadamard layer -> modular exponentiation -> inverse QFT."""
    psi1 = apply_hadamard_layer(init_state(RegisterLayout.for_instance(instance)))
    psi2 = apply_modexp_unitary(psi1, instance)
    psi3 = apply_inverse_qft_A(psi2)
    return psi1, psi2, psi3


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the register-A measurement outcomes."""

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.probabilities, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("probabilities must be a one-dimensional vector")
        if np.any(arr < -1e-12):
            raise ValueError(f"negative probability {arr.min()!r}")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "probabilities", arr)

    @property
    def Q(self) -> int:
        return len(self.probabilities)


def measurement_distribution_A(state: PureState) -> OutcomeDistribution:
    """p_k = sum_y |amplitude(k, y)|**2."""
    probs = np.sum(np.abs(state.as_grid()) ** 2, axis=1)
    return OutcomeDistribution(probs)


def _peak_term(num: int, r: int, q: int) -> float:
    """|(1/Q) sum_j exp(2 pi i j num/(rQ))|**2 via the geometric series.

    With delta = num/(rQ): 1 when delta is an integer, 0 when Q*delta is an
    integer but delta is not, else (sin(pi Q delta) / (Q sin(pi delta)))**2,
    evaluated through reduced arguments so large multiples of pi never enter.
    """
    den = r * q
    num_mod_den = num % den
    if num_mod_den == 0:
        return 1.0
    if num % r == 0:  # sin(pi * Q * delta) vanishes exactly
        return 0.0
    ratio = math.sin(math.pi * (num % r) / r) / (q * math.sin(math.pi * num_mod_den / den))
    return ratio * ratio


def outcome_probability(k: int, r: int, q: int) -> float:
    """Probability of register-A outcome k for order r and dimension Q.

    Evaluates the outcome probability two ways, a direct O(Q) phase sum and
    the geometric-series closed form, checks they agree to 1e-9, and returns
    the closed form.
    """
    if r < 1:
        raise ValueError(f"order must be >= 1, got {r}")
    if q < 1 or not 0 <= k < q:
        raise ValueError(f"need 0 <= k < Q, got k={k}, Q={q}")
    closed = sum(_peak_term(s * q - k * r, r, q) for s in range(r)) / r
    j = np.arange(q)
    direct = 0.0
    for s in range(r):
        delta = s / r - k / q
        amp = np.exp(2.0j * math.pi * delta * j).sum() / q
        direct += float(abs(amp) ** 2)
    direct /= r
    if abs(direct - closed) > _DUAL_PATH_TOL:
        raise AssertionError(
            f"closed form {closed!r} disagrees with direct sum {direct!r} at k={k}, r={r}, Q={q}"
        )
    return closed


def outcome_distribution(r: int, q: int) -> OutcomeDistribution:
    """Full outcome distribution from the closed form (no O(Q**2) sums)."""
    if r < 1:
        raise ValueError(f"order must be >= 1, got {r}")
    if q < 1:
        raise ValueError(f"dimension must be >= 1, got {q}")
    k = np.arange(q, dtype=np.int64)
    total = np.zeros(q, dtype=np.float64)
    den = r * q
    for s in range(r):
        num = s * q - k * r
        num_mod_den = num % den
        num_mod_r = num % r
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.sin(np.pi * num_mod_r / r) / (q * np.sin(np.pi * num_mod_den / den))
        term = np.where(num_mod_den == 0, 1.0, np.where(num_mod_r == 0, 0.0, ratio * ratio))
        total += term
    return OutcomeDistribution(total / r)


def sample_outcome(
    distribution: OutcomeDistribution,
    rng: Union[int, np.random.Generator],
) -> int:
    """Inverse-CDF draw of one outcome; an int seeds a fresh generator."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    cdf = np.cumsum(distribution.probabilities)
    u = rng.random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    return min(k, len(cdf) - 1)


def dump_nonzero_json(state: PureState) -> str:
    """JSON array of [index, re, im] triples for nonzero amplitudes."""
    triples = [
        [int(i), float(state.amplitudes[i].real), float(state.amplitudes[i].imag)]
        for i in state.support()
    ]
    return json.dumps(triples)
