"""Quantum solvers for the planted-secret problem over unitary IP/EQ queries.

The workhorse circuit (a noisy Bernstein-Vazirani sandwich) acts on
n + m + 1 qubits laid out as [n inputs][m ancilla][1 target]:

1. Hadamard on each input qubit, NOT on the target.
2. The IP oracle unitary on the first n + m qubits.
3. Controlled-Z between the ancilla output qubit and the target.
4. The inverse IP oracle unitary.
5. Hadamard on each input qubit.

Starting from all zeros, the amplitude left on |a, 0, 1> is the mean of
(alpha_x^2 - beta_x^2) over inputs, at least twice the oracle bias, so one
run measures the secret with probability >= 4*eps^2.  ``solve_naive``
repeats that; ``solve_qsearch`` amplifies it with Grover iterations on an
exponentially growing schedule, which needs only O(1/eps) queries even
though the success amplitude is unknown in advance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bits import BitString
from .oracles import EqOracle, IpOracle, QueryTally
from .statevector import StateVector, _apply_ip_inplace, basis_state, sample_measurement


@dataclass(frozen=True)
class BvCircuitOutput:
    """State produced by one run of the sandwich circuit, plus its layout."""

    state: StateVector
    oracle_n: int
    oracle_m: int


@dataclass(frozen=True)
class QSearchParams:
    """Amplitude-amplification schedule knobs (growth 6/5 per BHMT)."""

    growth: float = 1.2
    max_rounds: int = 40

    def __post_init__(self) -> None:
        if not 1.0 < self.growth < 2.0:
            raise ValueError(f"growth must lie in (1, 2), got {self.growth}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solver run with its exact query bill."""

    found: Optional[BitString]
    tally: QueryTally
    rounds: int
    total_queries: int


def _merged_delta(
    ip: IpOracle, eq, ip_before: QueryTally, eq_before: QueryTally
) -> QueryTally:
    d_ip = ip.tally.delta(ip_before)
    d_eq = eq.tally.delta(eq_before)
    return QueryTally(
        ip_forward=d_ip.ip_forward,
        ip_inverse=d_ip.ip_inverse,
        eq=d_eq.eq,
        f_calls=d_ip.f_calls + d_eq.f_calls,
    )


def _apply_bv_inplace(state: StateVector, oracle: IpOracle, dagger: bool) -> None:
    """Apply the sandwich circuit (or its inverse): +1 forward, +1 inverse."""
    n, m = oracle.n, oracle.m
    last = n + m
    if not dagger:
        for t in range(n):
            state._h(t)
        state._x(last)
        _apply_ip_inplace(state, oracle, inverse=False)
        oracle.tally.ip_forward += 1
        state._cz(last - 1, last)
        _apply_ip_inplace(state, oracle, inverse=True)
        oracle.tally.ip_inverse += 1
        for t in range(n):
            state._h(t)
    else:
        for t in range(n):
            state._h(t)
        _apply_ip_inplace(state, oracle, inverse=False)
        oracle.tally.ip_forward += 1
        state._cz(last - 1, last)
        _apply_ip_inplace(state, oracle, inverse=True)
        oracle.tally.ip_inverse += 1
        for t in range(n):
            state._h(t)
        state._x(last)


def run_bv_circuit(oracle: IpOracle) -> BvCircuitOutput:
    """Run the sandwich circuit on |0...0>; costs one forward + one inverse."""
    n, m = oracle.n, oracle.m
    state = basis_state(n + m + 1, BitString.zeros(n + m + 1))
    _apply_bv_inplace(state, oracle, dagger=False)
    state._check_norm()
    return BvCircuitOutput(state, n, m)


def overlap_with_target(out: BvCircuitOutput, a: BitString) -> float:
    """<a, 0, 1 | circuit | 0...0> as a real number.

    For every shipped family the value is real; a residual imaginary part
    above 1e-9 raises.
    """
    if a.n != out.oracle_n:
        raise ValueError(f"target has {a.n} bits, circuit used {out.oracle_n}")
    idx = (a.value << (out.oracle_m + 1)) | 1
    amp = complex(out.state.amps[idx])
    if abs(amp.imag) > 1e-9:
        raise ValueError(f"overlap unexpectedly complex: {amp}")
    return amp.real


def _good_prefix(meas: BitString, n: int, m: int) -> BitString:
    return BitString(n, meas.value >> (m + 1))


def solve_naive(
    ip: IpOracle, eq, budget: int, rng: np.random.Generator
) -> SolveReport:
    """Run-measure-check up to ``budget`` times; stops at the first EQ hit."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    ip0, eq0 = ip.tally.snapshot(), eq.tally.snapshot()
    found = None
    rounds = 0
    for _ in range(budget):
        rounds += 1
        out = run_bv_circuit(ip)
        guess = _good_prefix(sample_measurement(out.state, rng), ip.n, ip.m)
        if eq.query(guess):
            found = guess
            break
    tally = _merged_delta(ip, eq, ip0, eq0)
    return SolveReport(found, tally, rounds, tally.total())


def _iterate_inplace(state: StateVector, ip: IpOracle, eq, inverse: bool) -> None:
    """One Grover iterate -C U0 C^dag U_EQ (or its inverse), in place.

    U_EQ is realized as a phase flip on the good prefix and billed as one EQ
    query; C and C^dag together cost two forward and two inverse IP queries.
    """
    prefix = eq.target_prefix()
    if not inverse:
        state._phase_flip_prefix(prefix)
        eq.tally.eq += 1
        _apply_bv_inplace(state, ip, dagger=True)
        state._reflect_zero()
        _apply_bv_inplace(state, ip, dagger=False)
        state.amps *= -1.0
    else:
        _apply_bv_inplace(state, ip, dagger=True)
        state._reflect_zero()
        _apply_bv_inplace(state, ip, dagger=False)
        state._phase_flip_prefix(prefix)
        eq.tally.eq += 1
        state.amps *= -1.0


def grover_iterate(
    state: StateVector, ip: IpOracle, eq, inverse: bool = False
) -> StateVector:
    """Apply one amplification iterate, returning a new state."""
    if state.num_qubits != ip.n + ip.m + 1:
        raise ValueError(
            f"state has {state.num_qubits} qubits, iterate needs "
            f"{ip.n + ip.m + 1}"
        )
    out = state.copy()
    _iterate_inplace(out, ip, eq, inverse)
    out._check_norm()
    return out


def solve_qsearch(
    ip: IpOracle, eq, params: QSearchParams, rng: np.random.Generator
) -> SolveReport:
    """Amplitude amplification with an exponentially growing iterate cap.

    Round t draws k uniformly from {0, ..., floor(growth**t) - 1}, runs the
    sandwich circuit fresh, applies k iterates, measures, and spends one EQ
    query on the outcome.  Stops at the first hit or after max_rounds.
    """
    ip0, eq0 = ip.tally.snapshot(), eq.tally.snapshot()
    found = None
    rounds = 0
    for t in range(1, params.max_rounds + 1):
        rounds = t
        cap = max(1, int(math.floor(params.growth**t)))
        k = int(rng.integers(0, cap))
        out = run_bv_circuit(ip)
        state = out.state
        for _ in range(k):
            _iterate_inplace(state, ip, eq, inverse=False)
        state._check_norm()
        guess = _good_prefix(sample_measurement(state, rng), ip.n, ip.m)
        if eq.query(guess):
            found = guess
            break
    tally = _merged_delta(ip, eq, ip0, eq0)
    return SolveReport(found, tally, rounds, tally.total())
