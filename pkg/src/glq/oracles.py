"""Planted-secret inner-product and equality black boxes with query tallies.

Three IP families ship, all with a single ancilla qubit in unitary mode:

* biased_set  -- answers ``a.x`` on a uniformly random agreement set S of
  exact size (1/2+eps)*2**n and the complement bit elsewhere; its unitary is
  the XOR oracle ``|x,b> -> |x, b ^ IP(x)>``.
* rotation    -- XORs in ``a.x`` and then rotates the target qubit by a
  per-input angle theta_x, so a measurement agrees with ``a.x`` with
  probability cos(theta_x)**2.
* lazy        -- classical-query-only variant of biased_set that decides set
  membership on first touch with the exact without-replacement probability,
  for word sizes where a 2**n table is not affordable.

Every query, classical or unitary, increments the owning oracle's tally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ._util import parity_u64, rng_from
from .bits import BitString
from .statevector import UnsupportedOracleMode

AngleRule = Union[float, Sequence[float], Callable[[int], float]]


@dataclass
class QueryTally:
    """Monotone counters for every query type a solver can spend."""

    ip_forward: int = 0
    ip_inverse: int = 0
    eq: int = 0
    f_calls: int = 0

    def snapshot(self) -> "QueryTally":
        return QueryTally(self.ip_forward, self.ip_inverse, self.eq, self.f_calls)

    def delta(self, since: "QueryTally") -> "QueryTally":
        return QueryTally(
            self.ip_forward - since.ip_forward,
            self.ip_inverse - since.ip_inverse,
            self.eq - since.eq,
            self.f_calls - since.f_calls,
        )

    def total(self) -> int:
        return self.ip_forward + self.ip_inverse + self.eq

    def reset(self) -> None:
        self.ip_forward = self.ip_inverse = self.eq = self.f_calls = 0


def dot(a: BitString, x: BitString) -> int:
    """Inner product of two equal-length bit strings modulo two."""
    return a.dot(x)


def _exact_set_size(n: int, epsilon: float) -> int:
    """(1/2+eps)*2**n as an exact integer; rejects non-dyadic eps."""
    frac = (Fraction(1, 2) + Fraction(epsilon)) * (1 << n)
    if frac.denominator != 1:
        raise ValueError(
            f"epsilon*2**n must be an integer; got epsilon={epsilon} at n={n}"
        )
    return int(frac)


def _dot_table(n: int, a: BitString) -> np.ndarray:
    """a.x for every x in {0,1}**n, as uint8."""
    xs = np.arange(1 << n, dtype=np.uint64)
    return parity_u64(xs & np.uint64(a.value))


class IpOracle:
    """Common surface of the IP families: tally, classical and batch queries."""

    family: str = "abstract"
    supports_unitary: bool = False

    def __init__(self, n: int, secret: Optional[BitString], epsilon: Optional[float]):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = n
        self.m = 1
        self.secret = secret
        self.epsilon = epsilon
        self.tally = QueryTally()

    def _check_input(self, x: BitString) -> None:
        if x.n != self.n:
            raise ValueError(f"query has {x.n} bits, oracle expects {self.n}")

    def query(self, x: BitString) -> int:
        raise NotImplementedError

    def query_batch(self, xs: np.ndarray) -> np.ndarray:
        """Answer many classical queries at once (same tally as one-by-one)."""
        raise NotImplementedError

    def unitary_tables(self):
        """(det_bits, thetas) describing |x,b> -> R(theta_x)|x, b ^ det(x)>."""
        raise UnsupportedOracleMode(f"{self.family} oracle has no unitary mode")

    def basis_action(self, label: BitString):
        raise UnsupportedOracleMode(f"{self.family} oracle has no unitary mode")


class _TableUnitaryMixin:
    """Unitary mode for families backed by a full deterministic-bit table."""

    supports_unitary = True

    def unitary_tables(self):
        return self._det_bits, self._thetas

    def basis_action(self, label: BitString):
        if label.n != self.n + self.m:
            raise ValueError(
                f"basis label needs {self.n + self.m} bits, got {label.n}"
            )
        x = label.value >> 1
        b = label.value & 1
        c = b ^ int(self._det_bits[x])
        base = x << 1
        if self._thetas is None:
            return [(BitString(label.n, base | c), 1.0 + 0.0j)]
        th = float(self._thetas[x])
        sign = -1.0 if c else 1.0
        return [
            (BitString(label.n, base | c), complex(np.cos(th))),
            (BitString(label.n, base | (c ^ 1)), complex(sign * np.sin(th))),
        ]


class BiasedSetOracle(_TableUnitaryMixin, IpOracle):
    """Deterministic table oracle: right on S, wrong off S, |S|=(1/2+eps)2^n."""

    family = "biased_set"

    def __init__(self, n: int, secret: BitString, epsilon: float, in_set: np.ndarray):
        super().__init__(n, secret, epsilon)
        self.in_set = in_set.astype(bool)
        wrong = (~self.in_set).astype(np.uint8)
        self._det_bits = (_dot_table(n, secret) ^ wrong).astype(np.uint8)
        self._thetas = None

    def query(self, x: BitString) -> int:
        self._check_input(x)
        self.tally.ip_forward += 1
        return int(self._det_bits[x.value])

    def query_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        self.tally.ip_forward += xs.size
        return self._det_bits[xs]


class RotationOracle(_TableUnitaryMixin, IpOracle):
    """Coherently noisy oracle: agreement with a.x is cos(theta_x)**2."""

    family = "rotation"

    def __init__(
        self,
        n: int,
        secret: BitString,
        epsilon: float,
        thetas: np.ndarray,
        rng: np.random.Generator,
    ):
        super().__init__(n, secret, epsilon)
        self._det_bits = _dot_table(n, secret)
        self._thetas = thetas.astype(np.float64)
        self._rng = np.random.default_rng(int(rng.integers(0, 1 << 63)))

    def agreement_probs(self) -> np.ndarray:
        return np.cos(self._thetas) ** 2

    def query(self, x: BitString) -> int:
        self._check_input(x)
        self.tally.ip_forward += 1
        p_right = float(np.cos(self._thetas[x.value]) ** 2)
        right = int(self._det_bits[x.value])
        return right if self._rng.random() < p_right else right ^ 1

    def query_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        self.tally.ip_forward += xs.size
        p_right = np.cos(self._thetas[xs]) ** 2
        wrong = (self._rng.random(xs.size) >= p_right).astype(np.uint8)
        return self._det_bits[xs] ^ wrong


class LazyBiasedOracle(IpOracle):
    """biased_set without the table: membership sampled on first query.

    The i-th distinct input lands in S with probability
    (s - j) / (2**n - (i-1)) where s = (1/2+eps)2**n and j counts inputs
    already placed in S, i.e. exact sampling of a uniform size-s subset.
    Answers are memoized, so repeats are free of randomness.
    """

    family = "lazy"

    def __init__(self, n: int, secret: BitString, epsilon: float, rng: np.random.Generator):
        super().__init__(n, secret, epsilon)
        self.set_size = _exact_set_size(n, epsilon)
        self._committed: dict[int, bool] = {}
        self.placed_in_set = 0
        self.distinct_queried = 0
        self._rng = np.random.default_rng(int(rng.integers(0, 1 << 63)))

    def _commit(self, xv: int) -> bool:
        member = self._committed.get(xv)
        if member is None:
            remaining = (1 << self.n) - self.distinct_queried
            if remaining <= 0:
                raise OracleExhausted(
                    f"all {1 << self.n} inputs already committed"
                )
            p = (self.set_size - self.placed_in_set) / remaining
            member = bool(self._rng.random() < p)
            self._committed[xv] = member
            self.distinct_queried += 1
            self.placed_in_set += int(member)
        return member

    def query(self, x: BitString) -> int:
        self._check_input(x)
        self.tally.ip_forward += 1
        right = self.secret.dot(x)
        return right if self._commit(x.value) else right ^ 1

    def query_batch(self, xs: np.ndarray) -> np.ndarray:
        """Batch form; the joint membership law matches sequential queries.

        New inputs are committed through one multivariate-hypergeometric draw
        (how many of the batch land in S, then which), which is the same
        distribution the one-at-a-time placement rule induces.
        """
        xs = np.asarray(xs, dtype=np.uint64)
        self.tally.ip_forward += xs.size
        uniq = np.unique(xs)
        committed = self._committed
        new_keys = [int(u) for u in uniq if int(u) not in committed]
        b = len(new_keys)
        if b:
            remaining = (1 << self.n) - self.distinct_queried
            if b > remaining:
                raise OracleExhausted(
                    f"batch needs {b} fresh inputs but only {remaining} remain"
                )
            good = self.set_size - self.placed_in_set
            k = int(self._rng.hypergeometric(good, remaining - good, b))
            members = self._rng.permutation(b) < k
            committed.update(zip(new_keys, members.tolist()))
            self.distinct_queried += b
            self.placed_in_set += k
        member = np.fromiter(
            (committed[int(x)] for x in xs), dtype=np.uint8, count=xs.size
        )
        right = parity_u64(xs & np.uint64(self.secret.value))
        return (right ^ (np.uint8(1) - member)).astype(np.uint8)


class OracleExhausted(RuntimeError):
    """A lazy oracle was asked for more distinct inputs than exist."""


def _draw_secret(n: int, a: Optional[BitString], rng: np.random.Generator) -> BitString:
    if a is None:
        return BitString.random(n, rng)
    if a.n != n:
        raise ValueError(f"secret has {a.n} bits, expected {n}")
    return a


def make_biased_set_oracle(
    n: int,
    epsilon: float,
    a: Optional[BitString],
    rng: np.random.Generator,
) -> BiasedSetOracle:
    """Sample S uniformly among subsets of exact size (1/2+eps)*2**n."""
    if not 0 < epsilon <= 0.5:
        raise ValueError(f"need 0 < epsilon <= 1/2, got {epsilon}")
    if n > 24:
        raise ValueError(f"table family capped at n=24, got {n} (use lazy)")
    size = _exact_set_size(n, epsilon)
    a = _draw_secret(n, a, rng)
    in_set = np.zeros(1 << n, dtype=bool)
    in_set[rng.permutation(1 << n)[:size]] = True
    return BiasedSetOracle(n, a, epsilon, in_set)


def make_rotation_oracle(
    n: int,
    a: Optional[BitString],
    angle_rule: AngleRule,
    rng: np.random.Generator,
    epsilon: Optional[float] = None,
) -> RotationOracle:
    """Build the rotation family from a per-input angle rule.

    ``angle_rule`` may be a constant, a length-2**n sequence, or a callable
    on input indices.  The mean of cos(theta)**2 must certify the declared
    bias: mean >= 1/2 + epsilon (to 1e-9).  With ``epsilon=None`` the bias is
    derived from the angles and must be positive.
    """
    if n > 24:
        raise ValueError(f"table family capped at n=24, got {n}")
    a = _draw_secret(n, a, rng)
    if callable(angle_rule):
        thetas = np.array([float(angle_rule(x)) for x in range(1 << n)])
    elif np.isscalar(angle_rule):
        thetas = np.full(1 << n, float(angle_rule))
    else:
        thetas = np.asarray(angle_rule, dtype=np.float64)
        if thetas.shape != (1 << n,):
            raise ValueError(
                f"angle table needs {1 << n} entries, got {thetas.shape}"
            )
    if np.any(thetas < 0) or np.any(thetas > np.pi / 2 + 1e-12):
        raise ValueError("angles must lie in [0, pi/2]")
    mean_agree = float(np.mean(np.cos(thetas) ** 2))
    if epsilon is None:
        epsilon = mean_agree - 0.5
        if epsilon <= 0:
            raise ValueError(
                f"angle rule gives no positive bias (mean agreement {mean_agree})"
            )
    elif mean_agree < 0.5 + epsilon - 1e-9:
        raise ValueError(
            f"mean agreement {mean_agree} cannot certify bias {epsilon}"
        )
    return RotationOracle(n, a, float(epsilon), thetas, rng)


def make_lazy_biased_oracle(
    n: int,
    epsilon: float,
    a: Optional[BitString],
    rng: np.random.Generator,
) -> LazyBiasedOracle:
    if not 0 < epsilon <= 0.5:
        raise ValueError(f"need 0 < epsilon <= 1/2, got {epsilon}")
    a = _draw_secret(n, a, rng)
    return LazyBiasedOracle(n, a, epsilon, rng)


def ip_query(oracle: IpOracle, x: BitString) -> int:
    """One classical IP query; increments the forward tally by one."""
    return oracle.query(x)


def ip_unitary_action(oracle: IpOracle, basis_label: BitString):
    """Forward action on one basis state, as [(label, amplitude), ...].

    At most two terms; the first n bits of every output label equal the
    input's.  Lazy oracles reject: sampled-on-demand tables cannot answer a
    superposed query consistently.
    """
    return oracle.basis_action(basis_label)


class EqOracle:
    """Equality test against the planted secret; 1 iff the guess is exact."""

    def __init__(self, n: int, a: BitString):
        if a.n != n:
            raise ValueError(f"secret has {a.n} bits, expected {n}")
        self.n = n
        self.secret = a
        self.tally = QueryTally()

    def query(self, x: BitString) -> int:
        if x.n != self.n:
            raise ValueError(f"query has {x.n} bits, oracle expects {self.n}")
        self.tally.eq += 1
        return int(x == self.secret)

    def target_prefix(self) -> BitString:
        """The good-subspace label used to realize the phase-flip query."""
        return self.secret


def eq_query(oracle, x: BitString) -> int:
    """One EQ query; increments the eq tally by one."""
    return oracle.query(x)


def exact_mean_agreement(oracle: IpOracle, target: Optional[BitString] = None) -> float:
    """Mean over all inputs of Pr[measured answer = target.x], from tables.

    Exact for table families (no sampling): biased_set contributes 0/1 per
    input, rotation contributes cos(theta_x)**2.
    """
    a = target if target is not None else oracle.secret
    if a is None:
        raise ValueError("oracle has no known secret; pass target explicitly")
    det_bits, thetas = oracle.unitary_tables()
    right = _dot_table(oracle.n, a)
    agree = (det_bits == right).astype(np.float64)
    if thetas is not None:
        p = np.cos(thetas) ** 2
        agree = agree * p + (1.0 - agree) * (1.0 - p)
    return float(agree.mean())


def oracle_spec(oracle: IpOracle, seed: int) -> dict:
    """JSON-serializable descriptor {family, n, epsilon, seed, secret}."""
    spec = {
        "family": oracle.family,
        "n": oracle.n,
        "epsilon": oracle.epsilon,
        "seed": int(seed),
        "secret": oracle.secret.hex() if oracle.secret is not None else None,
    }
    if isinstance(oracle, RotationOracle):
        th = oracle._thetas
        if np.all(th == th[0]):
            spec["theta"] = float(th[0])
    return spec


def oracle_from_spec(spec: dict) -> IpOracle:
    """Rebuild an oracle from its descriptor, deterministically in the seed."""
    family = spec["family"]
    n = int(spec["n"])
    rng = rng_from(int(spec["seed"]))
    secret = (
        BitString.from_hex(n, spec["secret"])
        if spec.get("secret") is not None
        else None
    )
    if family == "biased_set":
        return make_biased_set_oracle(n, spec["epsilon"], secret, rng)
    if family == "lazy":
        return make_lazy_biased_oracle(n, spec["epsilon"], secret, rng)
    if family == "rotation":
        if "theta" not in spec:
            raise ValueError("rotation spec needs a constant 'theta'")
        return make_rotation_oracle(
            n, secret, float(spec["theta"]), rng, epsilon=spec.get("epsilon")
        )
    raise ValueError(f"unknown oracle family {family!r}")
