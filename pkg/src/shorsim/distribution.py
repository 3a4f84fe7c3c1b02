"""Exact output statistics of the simulated order-finding computer.

For a modulus n, a base x of multiplicative order r, and an exponent
register of q_A qubits (N = 2^q_A states), the probability of reading
state c splits over the r residue classes of the exponent mod r.  The
class containing k holds L_k = floor((N-k-1)/r) + 1 exponents, and its
contribution to P(c) is the squared magnitude of a geometric phasor sum
of length L_k.  Three independent routes compute the same distribution:

* ``oracle_distribution``   - sums unit phasors literally, one per
  exponent, with no closed form anywhere.  This is the reference the
  other two routes are validated against.
* ``per_k_distribution``    - the summed-geometric-series closed form
  sin^2(pi*L_k*r*c/N) / (N^2 sin^2(pi*r*c/N)), evaluated once per class.
* ``two_term_distribution`` - collapses the per-class form onto the two
  distinct class sizes that occur (k0 classes of the larger size, r-k0
  of the smaller), leaving two weighted terms.

Angles are reduced modulo 2N in exact integer arithmetic before any
float conversion, and the removable singularities of the closed forms
(r*c = 0 mod N) are detected by exact integer tests, never by
floating-point thresholds.

Construction is pure and single-threaded with a fixed per-entry
summation order, so results are bit-identical from run to run.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ResourceError
from .number_theory import multiplicative_order
from .rng import SplitMix64

#: Hard cap on the exponent-register width for full-distribution work.
#: One float per state; 2^24 states is the agreed desk-scale limit.
MAX_REGISTER_QUBITS = 24

METHOD_ORACLE = "oracle_sum"
METHOD_PER_K = "per_k_closed_form"
METHOD_TWO_TERM = "two_term_form"


@dataclass(frozen=True)
class ProblemInstance:
    """One simulated machine: modulus n, base x, and register sizes.

    N is always exactly 2^q_A.  Build via :meth:`create`, which applies
    the default register sizes q_A = ceil(2*log2 n) (so N >= n^2) and
    q_B = ceil(log2 n) when they are not given explicitly.
    """

    n: int
    x: int
    q_A: int
    q_B: int
    N: int = field(init=False)

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"modulus n must be >= 3, got {self.n}")
        if not 1 < self.x < self.n:
            raise DomainError(f"base must satisfy 1 < x < n, got x={self.x}, n={self.n}")
        if math.gcd(self.x, self.n) != 1:
            raise DomainError(f"gcd({self.x}, {self.n}) != 1; precheck the base first")
        if self.q_A < 1 or self.q_B < 1:
            raise DomainError("register sizes must be positive")
        object.__setattr__(self, "N", 1 << self.q_A)

    @classmethod
    def create(cls, n: int, x: int, q_A: int | None = None, q_B: int | None = None) -> "ProblemInstance":
        if n < 3:
            raise DomainError(f"modulus n must be >= 3, got {n}")
        if q_A is None:
            q_A = (n * n - 1).bit_length()  # smallest q with 2^q >= n^2
        if q_B is None:
            q_B = (n - 1).bit_length()  # smallest q with 2^q >= n
        return cls(n=n, x=x, q_A=q_A, q_B=q_B)


@dataclass(frozen=True)
class OrderInfo:
    """The order r of x mod n and the derived class-size split.

    M0 = floor((N-r)/r) is the smaller of the two per-class exponent
    bounds; k0 is the first residue class whose bound drops to M0, so
    classes k < k0 hold M0+2 exponents and classes k >= k0 hold M0+1.
    delta_min = 1/((n-1)*n) is the worst-case gap between the true
    ratio and the nearest wrong candidate fraction during recovery.
    """

    r: int
    M0: int
    k0: int
    delta_min: float

    @classmethod
    def from_instance(cls, inst: ProblemInstance) -> "OrderInfo":
        r = multiplicative_order(inst.x, inst.n)
        N = inst.N
        M0 = (N - r) // r
        k0 = r
        for k in range(r):
            if (N - k - 1) // r == M0:
                k0 = k
                break
        delta_min = 1.0 / ((inst.n - 1) * inst.n)
        return cls(r=r, M0=M0, k0=k0, delta_min=delta_min)


@dataclass(eq=False)
class OutputDistribution:
    """Length-N vector of state probabilities plus the method that built it."""

    probabilities: np.ndarray
    method: str

    def __len__(self) -> int:
        return len(self.probabilities)

    @property
    def total(self) -> float:
        return float(self.probabilities.sum())


@dataclass(frozen=True)
class PeakModel:
    """One peak of the distribution: real center nu*N/r split into integer
    cell c_nu and fractional displacement delta_nu in [0, 1)."""

    nu: int
    sigma_nu: float
    c_nu: int
    delta_nu: float


def _guard_register(inst: ProblemInstance):
    if inst.q_A > MAX_REGISTER_QUBITS:
        raise ResourceError(
            f"q_A={inst.q_A} exceeds the desk-scale cap of {MAX_REGISTER_QUBITS} "
            "for full-distribution construction"
        )


def _class_size(N: int, r: int, k: int) -> int:
    """Number of exponents a in [0, N) with a = k (mod r)."""
    return (N - k - 1) // r + 1


def oracle_distribution(inst: ProblemInstance) -> OutputDistribution:
    """P(c) by literal phasor summation over every exponent.

    For each residue class k the amplitude at c is the plain sum of
    exp(2*pi*i*a*c/N) over all a = e*r + k, divided by N; the class
    contributes its squared magnitude.  O(N^2) work, no closed form,
    no shared trigonometric shortcuts: this is the reference oracle.
    """
    _guard_register(inst)
    r = multiplicative_order(inst.x, inst.n)
    N = inst.N
    c = np.arange(N, dtype=np.int64)
    total = np.zeros(N, dtype=np.float64)
    for k in range(r):
        amp = np.zeros(N, dtype=np.complex128)
        for e in range(_class_size(N, r, k)):
            a = e * r + k
            # a*c < N^2 <= 2^48 fits int64; reduce before the angle for accuracy
            angle = (2.0 * np.pi / N) * ((a * c) % N)
            amp += np.exp(1j * angle)
        total += np.abs(amp / N) ** 2
    return OutputDistribution(total, METHOD_ORACLE)


def _sin_sq_ratio(N: int, r: int, size: int, c: np.ndarray,
                  singular: np.ndarray, den_safe: np.ndarray) -> np.ndarray:
    """sin^2(pi*size*r*c/N) / sin^2(pi*r*c/N) with the exact limit size^2
    substituted wherever r*c = 0 (mod N)."""
    twoN = 2 * N
    t = (size * r % twoN) * c % twoN
    num = np.sin((np.pi / N) * t) ** 2
    return np.where(singular, float(size * size), num / den_safe)


def _denominator_parts(N: int, r: int, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    twoN = 2 * N
    s = (r % twoN) * c % twoN
    singular = (s % N) == 0
    den = np.sin((np.pi / N) * s) ** 2
    return singular, np.where(singular, 1.0, den)


def per_k_distribution(inst: ProblemInstance, info: OrderInfo) -> OutputDistribution:
    """P(c) from the geometric-series closed form, one term per residue class."""
    _guard_register(inst)
    N, r = inst.N, info.r
    c = np.arange(N, dtype=np.int64)
    singular, den_safe = _denominator_parts(N, r, c)
    total = np.zeros(N, dtype=np.float64)
    for k in range(r):
        total += _sin_sq_ratio(N, r, _class_size(N, r, k), c, singular, den_safe)
    return OutputDistribution(total / float(N) ** 2, METHOD_PER_K)


def two_term_distribution(inst: ProblemInstance, info: OrderInfo) -> OutputDistribution:
    """P(c) collapsed onto the two class sizes that occur.

    k0 classes hold M0+2 exponents and r-k0 hold M0+1, so the per-class
    sum reduces to two weighted closed-form terms.  Must agree with
    per_k_distribution to within accumulation noise (< 1e-12 per entry).
    """
    _guard_register(inst)
    N, r = inst.N, info.r
    c = np.arange(N, dtype=np.int64)
    singular, den_safe = _denominator_parts(N, r, c)
    large = _sin_sq_ratio(N, r, info.M0 + 2, c, singular, den_safe)
    small = _sin_sq_ratio(N, r, info.M0 + 1, c, singular, den_safe)
    total = info.k0 * large + (r - info.k0) * small
    return OutputDistribution(total / float(N) ** 2, METHOD_TWO_TERM)


def envelope(inst: ProblemInstance, info: OrderInfo, sigma) -> float:
    """The two-term form evaluated at a real (or exact rational) position.

    Periodic with period N/r; at integer sigma it equals the two-term
    probability of that state, and at the peak centers nu*N/r it takes
    the singular-limit maximum (k0*(M0+2)^2 + (r-k0)*(M0+1)^2) / N^2.
    Pass a Fraction to hit singular points exactly; floats are converted
    to exact rationals, so angle reduction never loses precision.
    """
    N, r, k0 = inst.N, info.r, info.k0
    sig = Fraction(sigma)
    if not 0 <= sig < N:
        raise DomainError(f"sigma must lie in [0, N), got {sigma}")
    large, small = info.M0 + 2, info.M0 + 1
    base = sig * r / N
    if base.denominator == 1:  # exact singular point: substitute the limit
        return (k0 * large * large + (r - k0) * small * small) / float(N) ** 2
    den = math.sin(math.pi * float(base % 2)) ** 2
    num_large = math.sin(math.pi * float((base * large) % 2)) ** 2
    num_small = math.sin(math.pi * float((base * small) % 2)) ** 2
    return (k0 * num_large + (r - k0) * num_small) / (den * float(N) ** 2)


def peaks(inst: ProblemInstance, info: OrderInfo) -> list[PeakModel]:
    """The r peak models, with centers computed in exact rational arithmetic."""
    N, r = inst.N, info.r
    out = []
    for nu in range(r):
        scaled = nu * N
        c_nu = scaled // r
        delta_nu = (scaled % r) / r
        out.append(PeakModel(nu=nu, sigma_nu=c_nu + delta_nu, c_nu=c_nu, delta_nu=delta_nu))
    return out


def peak_deviation_prob(d: int, delta_nu: float) -> float:
    """Within-peak weight of integer deviation d for displacement delta_nu.

    sin^2(pi*delta) / (pi * (d - delta))^2, with the delta -> 0 limit
    (all weight on d = 0) substituted exactly at delta_nu == 0.
    """
    if not 0.0 <= delta_nu < 1.0:
        raise DomainError(f"delta_nu must lie in [0, 1), got {delta_nu}")
    if delta_nu == 0.0:
        return 1.0 if d == 0 else 0.0
    s = math.sin(math.pi * delta_nu)
    return (s * s) / (math.pi * math.pi * (d - delta_nu) ** 2)


def capture_probability_d01() -> float:
    """Probability that a peak sample lands on its floor or ceiling cell,
    averaged over a uniformly distributed displacement.

    Quadrature of peak_deviation_prob(0, delta) + peak_deviation_prob(1, delta)
    over delta in [0, 1); the integrand is smooth (both endpoint limits equal 1).
    """
    def integrand(delta: float) -> float:
        if delta >= 1.0:  # quadrature nodes are interior; belt and braces
            delta = math.nextafter(1.0, 0.0)
        return peak_deviation_prob(0, delta) + peak_deviation_prob(1, delta)

    value, _err = quad(integrand, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=200)
    return value


def sample(dist: OutputDistribution, seed: int, count: int) -> list[int]:
    """Draw `count` i.i.d. states from P(c) by inverse CDF, deterministically.

    Uses a fresh SplitMix64 stream for the given seed; see sample_from
    for drawing out of an existing stream.
    """
    return sample_from(dist, SplitMix64(seed), count)


def sample_from(dist: OutputDistribution, rng: SplitMix64, count: int) -> list[int]:
    """Inverse-CDF sampling out of a caller-owned SplitMix64 stream."""
    p = dist.probabilities
    if np.any(p < 0.0):
        raise DomainError("distribution has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise DomainError(f"distribution is not normalized: total={total!r}")
    cdf = np.cumsum(p)
    u = rng.random_block(count) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    np.clip(idx, 0, len(p) - 1, out=idx)
    return [int(i) for i in idx]
