"""Dense statevector simulation of pure states on up to ~24 qubits.

Index convention: qubit 0 is the leftmost ket symbol and the most significant
bit of the amplitude index, so ``basis_state(2, BitString.from_str("10"))``
puts amplitude 1 at index 2.  All operations are value-semantic: callers get
a new state back and the argument is never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bits import BitString

NORM_ATOL = 1e-9

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class StateVector:
    """2**num_qubits complex amplitudes, kept normalized to 1e-9."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: np.ndarray, *, copy: bool = True):
        if num_qubits < 1:
            raise ValueError(f"need at least one qubit, got {num_qubits}")
        amps = np.array(amps, dtype=np.complex128, copy=copy).reshape(-1)
        if amps.shape != (1 << num_qubits,):
            raise ValueError(
                f"expected {1 << num_qubits} amplitudes, got {amps.shape[0]}"
            )
        self.num_qubits = num_qubits
        self.amps = amps

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps, copy=True)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def allclose(self, other: "StateVector", atol: float = NORM_ATOL) -> bool:
        return self.num_qubits == other.num_qubits and bool(
            np.allclose(self.amps, other.amps, atol=atol, rtol=0.0)
        )

    def _check_norm(self) -> None:
        if abs(self.norm_sq() - 1.0) > NORM_ATOL:
            raise ValueError(
                f"state norm drifted: |psi|^2 = {self.norm_sq():.12f}"
            )

    # In-place primitives. Callers that need value semantics copy first.

    def _axis(self, t: int) -> np.ndarray:
        q = self.num_qubits
        return self.amps.reshape(1 << t, 2, 1 << (q - t - 1))

    def _h(self, t: int) -> None:
        v = self._axis(t)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = (a + b) * _INV_SQRT2
        v[:, 1, :] = (a - b) * _INV_SQRT2

    def _x(self, t: int) -> None:
        v = self._axis(t)
        tmp = v[:, 0, :].copy()
        v[:, 0, :] = v[:, 1, :]
        v[:, 1, :] = tmp

    def _z(self, t: int) -> None:
        v = self._axis(t)
        v[:, 1, :] *= -1.0

    def _cz(self, i: int, j: int) -> None:
        i, j = min(i, j), max(i, j)
        q = self.num_qubits
        v = self.amps.reshape(
            1 << i, 2, 1 << (j - i - 1), 2, 1 << (q - j - 1)
        )
        v[:, 1, :, 1, :] *= -1.0

    def _reflect_zero(self) -> None:
        self.amps[0] *= -1.0

    def _phase_flip_prefix(self, prefix: BitString) -> None:
        q = self.num_qubits
        lo = prefix.value << (q - prefix.n)
        hi = (prefix.value + 1) << (q - prefix.n)
        self.amps[lo:hi] *= -1.0

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


@dataclass(frozen=True)
class Gate:
    """A named unitary with its target qubits.

    Kinds: H, X, Z (single target), CZ (two targets), REFLECT_ZERO
    (I - 2|0...0><0...0|, no targets), PHASE_FLIP_PREFIX (sign flip on every
    basis state whose leading bits equal ``prefix``).
    """

    kind: str
    targets: tuple[int, ...] = ()
    prefix: Optional[BitString] = None


def hadamard(t: int) -> Gate:
    return Gate("H", (t,))


def pauli_x(t: int) -> Gate:
    return Gate("X", (t,))


def pauli_z(t: int) -> Gate:
    return Gate("Z", (t,))


def cz(i: int, j: int) -> Gate:
    return Gate("CZ", (i, j))


def reflect_about_zero() -> Gate:
    return Gate("REFLECT_ZERO")


def phase_flip_prefix(prefix: BitString) -> Gate:
    return Gate("PHASE_FLIP_PREFIX", (), prefix)


def basis_state(num_qubits: int, label: BitString) -> StateVector:
    """The computational basis state |label>."""
    if label.n != num_qubits:
        raise ValueError(
            f"label has {label.n} bits but state has {num_qubits} qubits"
        )
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[label.value] = 1.0
    return StateVector(num_qubits, amps, copy=False)


def _check_targets(state: StateVector, targets: tuple[int, ...]) -> None:
    for t in targets:
        if not 0 <= t < state.num_qubits:
            raise ValueError(
                f"target qubit {t} out of range for {state.num_qubits} qubits"
            )
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits: {targets}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new state; norm is preserved to 1e-9."""
    out = state.copy()
    if gate.kind == "H":
        _check_targets(state, gate.targets)
        (t,) = gate.targets
        out._h(t)
    elif gate.kind == "X":
        _check_targets(state, gate.targets)
        (t,) = gate.targets
        out._x(t)
    elif gate.kind == "Z":
        _check_targets(state, gate.targets)
        (t,) = gate.targets
        out._z(t)
    elif gate.kind == "CZ":
        _check_targets(state, gate.targets)
        i, j = gate.targets
        out._cz(i, j)
    elif gate.kind == "REFLECT_ZERO":
        out._reflect_zero()
    elif gate.kind == "PHASE_FLIP_PREFIX":
        if gate.prefix is None:
            raise ValueError("PHASE_FLIP_PREFIX gate needs a prefix")
        if gate.prefix.n > state.num_qubits:
            raise ValueError(
                f"prefix of {gate.prefix.n} bits exceeds "
                f"{state.num_qubits} qubits"
            )
        out._phase_flip_prefix(gate.prefix)
    else:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    out._check_norm()
    return out


def _apply_ip_inplace(state: StateVector, oracle, inverse: bool) -> None:
    """Hot-path oracle application; tallies are the caller's responsibility."""
    n, m = oracle.n, oracle.m
    if m != 1:
        raise ValueError(f"only m=1 oracle unitaries are shipped, got m={m}")
    q = state.num_qubits
    if q < n + m:
        raise ValueError(
            f"state has {q} qubits but the oracle acts on {n + m}"
        )
    det_bits, thetas = oracle.unitary_tables()
    rest = 1 << (q - n - 1)
    v = state.amps.reshape(1 << n, 2, rest)
    flip = det_bits.astype(bool)

    def xor_step() -> None:
        tmp = v[flip, 0, :].copy()
        v[flip, 0, :] = v[flip, 1, :]
        v[flip, 1, :] = tmp

    def rot_step(sign: float) -> None:
        c = np.cos(thetas)[:, None]
        s = (sign * np.sin(thetas))[:, None]
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = c * a0 - s * a1
        v[:, 1, :] = s * a0 + c * a1

    if not inverse:
        xor_step()
        if thetas is not None:
            rot_step(1.0)
    else:
        if thetas is not None:
            rot_step(-1.0)
        xor_step()


def apply_ip_oracle(
    state: StateVector, oracle, direction: str = "forward"
) -> StateVector:
    """Apply the oracle unitary (or its inverse) to the first n+1 qubits.

    Counts one forward or inverse query on the oracle's tally.  Any qubits
    past the oracle's n+m act as untouched workspace.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be forward or inverse: {direction!r}")
    if not getattr(oracle, "supports_unitary", False):
        raise UnsupportedOracleMode(
            f"{type(oracle).__name__} has no unitary mode"
        )
    out = state.copy()
    _apply_ip_inplace(out, oracle, inverse=(direction == "inverse"))
    if direction == "forward":
        oracle.tally.ip_forward += 1
    else:
        oracle.tally.ip_inverse += 1
    out._check_norm()
    return out


class UnsupportedOracleMode(ValueError):
    """Raised when an oracle family cannot serve the requested query mode."""


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2> (conjugate-linear in the first argument)."""
    if s1.num_qubits != s2.num_qubits:
        raise ValueError(
            f"qubit count mismatch: {s1.num_qubits} vs {s2.num_qubits}"
        )
    return complex(np.vdot(s1.amps, s2.amps))


def prefix_probability(state: StateVector, prefix: BitString) -> float:
    """Probability that the leading |prefix| qubits measure to ``prefix``."""
    q = state.num_qubits
    if prefix.n > q:
        raise ValueError(f"prefix of {prefix.n} bits exceeds {q} qubits")
    lo = prefix.value << (q - prefix.n)
    hi = (prefix.value + 1) << (q - prefix.n)
    block = state.amps[lo:hi]
    return float(np.vdot(block, block).real)


def sample_measurement(
    state: StateVector, rng: np.random.Generator
) -> BitString:
    """Measure all qubits in the computational basis."""
    p = state.probabilities()
    p = p / p.sum()
    idx = int(rng.choice(len(p), p=p))
    return BitString(state.num_qubits, idx)
