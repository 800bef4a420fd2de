"""Shor factoring with one recycled control qubit (semiclassical inverse QFT)."""
from __future__ import annotations

import math

import numpy as np

from ..arith import MultiplyByConstantModN
from ..errors import QForgeError
from ..gates import All, H, Measure, R, X
from ..meta import Control
from ..runner import ConfigError, Session

MAX_ATTEMPTS = 32
DEFAULT_NUMBER = 15
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ShorError(QForgeError):
    """No factor found within the attempt budget."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact below 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _iroot(n: int, k: int) -> int:
    r = int(round(n ** (1.0 / k)))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def perfect_power(n: int) -> tuple[int, int] | None:
    """(r, k) with r**k == n and k >= 2 maximal, or None."""
    for k in range(n.bit_length(), 1, -1):
        r = _iroot(n, k)
        if r > 1 and r ** k == n:
            return r, k
    return None


def classical_factor(N: int) -> tuple[list[int], str] | None:
    """Cases that need no quantum part: (factors, reason), or None."""
    if N % 2 == 0:
        return [2, N // 2], f"{N} is even"
    if is_prime(N):
        raise ConfigError(f"{N} is prime; nothing to factor")
    pp = perfect_power(N)
    if pp is not None:
        r, _ = pp
        return [r, N // r], f"{N} is a perfect power of {r}"
    return None


def convergents(num: int, den: int):
    """Continued-fraction convergents p/q of num/den, in order."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    while den:
        a, (num, den) = num // den, (den, num % den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def order_from_phase(y: int, bits: int, a: int, N: int) -> int | None:
    """Order r of a mod N from a measured phase y / 2**bits, or None.

    Each convergent denominator q < N is tried along with a few small multiples,
    which recovers r when s/r was not in lowest terms.
    """
    for _, q in convergents(y, 1 << bits):
        if q >= N:
            break
        for m in range(1, N.bit_length() + 1):
            if q * m >= N:
                break
            if pow(a, q * m, N) == 1:
                return q * m
    return None


def factors_from_order(a: int, r: int, N: int) -> list[int] | None:
    if r % 2:
        return None
    h = pow(a, r // 2, N)
    if h == N - 1:
        return None
    for g in (math.gcd(h - 1, N), math.gcd(h + 1, N)):
        if 1 < g < N:
            return sorted([g, N // g])
    return None


def estimate_phase(eng, a: int, N: int) -> int:
    """Run the quantum part once; returns y with the phase estimate y / 2**(2n)."""
    n = N.bit_length()
    x = eng.allocate_qureg(n)
    X | x[0]
    ctrl = eng.allocate_qubit()
    measurements = [0] * (2 * n)
    for k in range(2 * n):
        current_a = pow(a, 1 << (2 * n - 1 - k), N)
        H | ctrl
        with Control(eng, ctrl):
            MultiplyByConstantModN(current_a, N) | x
        for i in range(k):
            if measurements[i]:
                R(-math.pi / (1 << (k - i))) | ctrl
        H | ctrl
        Measure | ctrl
        eng.flush()
        measurements[k] = int(ctrl[0])
        if measurements[k]:
            X | ctrl
    All(Measure) | x
    eng.flush()
    x.release()
    ctrl.release()
    eng.flush()
    return sum(m << k for k, m in enumerate(measurements))


def shor_factor(eng, N: int, rng: np.random.Generator, attempts: int = MAX_ATTEMPTS,
                log=None) -> list[int]:
    shortcut = classical_factor(N)
    if shortcut is not None:
        if log is not None:
            log(f"{shortcut[1]}; factored classically")
        return sorted(shortcut[0])
    n = N.bit_length()
    for _ in range(attempts):
        a = int(rng.integers(2, N - 1))
        g = math.gcd(a, N)
        if g > 1:
            return sorted([g, N // g])
        y = estimate_phase(eng, a, N)
        r = order_from_phase(y, 2 * n, a, N)
        if r is None:
            continue
        found = factors_from_order(a, r, N)
        if found is not None:
            return found
    raise ShorError(f"no factor of {N} found in {attempts} attempts")


def run_shor(session: Session) -> dict:
    cfg = session.cfg
    N = DEFAULT_NUMBER if cfg.number is None else cfg.number
    if not session.simulating:
        # one pass of the quantum part, for the printer, counter or drawer
        if classical_factor(N) is None:
            a = next(a for a in range(2, N) if math.gcd(a, N) == 1)
            estimate_phase(session.eng, a, N)
        return {}
    return {"factors": shor_factor(session.eng, N, session.rng, log=session.log)}
