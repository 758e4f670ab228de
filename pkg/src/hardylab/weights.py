"""Infinite positive weight sequences.

Provides exact partial sums and tail bounds where closed forms exist,
divergence bookkeeping (a finite prefix can never decide divergence, so
verdicts come from closed-form knowledge only), term/partial-sum ratio
diagnostics, block coarsening, and the exact prefix check for the
partition (coarsening) order.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .scalars import Number, format_number, is_exact, json_ready, parse_number

# exact ratio diagnostics above this many terms would drag big-integer
# arithmetic for fast-growing sequences; fall back to floats there
EXACT_RATIO_LIMIT = 10_000


class WeightSeq:
    """Lazy strictly positive weight sequence, 1-indexed.

    partial_sum(n) uses the supplied closed form when there is one and
    otherwise accumulates terms into a cache (filled once, lock-guarded).
    total_sum certifies convergence and yields exact tail bounds;
    sum_diverges records closed-form divergence knowledge (None=unknown).
    """

    def __init__(self, descriptor: str, term: Callable[[int], Number], *,
                 partial_sum: Optional[Callable[[int], Number]] = None,
                 total_sum: Optional[Number] = None,
                 tail_bound: Optional[Callable[[int], Number]] = None,
                 sum_diverges: Optional[bool] = None,
                 divergence_reason: str = "",
                 term_float: Optional[Callable[[int], float]] = None):
        if total_sum is not None and sum_diverges:
            raise ValueError("a sequence with a finite total cannot diverge")
        self.descriptor = descriptor
        self._term = term
        self._partial_sum = partial_sum
        self._total_sum = total_sum
        self._tail_bound = tail_bound
        self.sum_diverges = sum_diverges
        self.divergence_reason = divergence_reason
        self._term_float = term_float
        self._exact = is_exact(self.term(1))
        self._cache: List[Number] = [Fraction(0) if self._exact else 0.0]
        self._lock = threading.Lock()

    def __repr__(self):
        return f"WeightSeq({self.descriptor!r})"

    # -- basic access -------------------------------------------------------

    def term(self, n: int) -> Number:
        if n < 1:
            raise ValueError("terms are 1-indexed")
        v = self._term(n)
        if not v > 0:
            raise ValueError(f"{self.descriptor}: term({n}) = {v!r} is not positive")
        return v

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def number_mode(self) -> str:
        return "exact_rational" if self._exact else "float"

    def partial_sum(self, n: int) -> Number:
        if n < 0:
            raise ValueError("partial sums start at n=0")
        if n == 0:
            return self._cache[0]
        if self._partial_sum is not None:
            return self._partial_sum(n)
        with self._lock:
            while len(self._cache) <= n:
                k = len(self._cache)
                self._cache.append(self._cache[-1] + self.term(k))
            return self._cache[n]

    def tail_bound(self, n: int) -> Optional[Number]:
        """Upper bound on the weight mass strictly beyond position n, when
        one can be certified; None otherwise."""
        if self._tail_bound is not None:
            return self._tail_bound(n)
        if self._total_sum is not None:
            return self._total_sum - self.partial_sum(n)
        return None

    # -- float views for array computations ----------------------------------

    def terms_floats(self, n: int) -> np.ndarray:
        tf = self._term_float or (lambda k: float(self.term(k)))
        try:
            arr = np.array([tf(k) for k in range(1, n + 1)], dtype=float)
        except OverflowError:
            raise ValueError(f"{self.descriptor}: terms overflow float range before n={n}") from None
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{self.descriptor}: terms overflow float range before n={n}")
        if not np.all(arr > 0):
            raise ValueError(f"{self.descriptor}: terms underflow to zero in float mode before n={n}")
        return arr

    def partial_sums_floats(self, n: int) -> np.ndarray:
        return np.cumsum(self.terms_floats(n))


def as_float(w: WeightSeq) -> WeightSeq:
    """Float-mode view of a sequence (exactness deliberately dropped)."""
    tf = w._term_float or (lambda k: float(w.term(k)))
    tail = None
    if w.tail_bound(1) is not None:
        tail = lambda n: float(w.tail_bound(n))
    return WeightSeq(
        f"{w.descriptor}[float]",
        lambda n: tf(n),
        tail_bound=tail,
        sum_diverges=w.sum_diverges,
        divergence_reason=w.divergence_reason,
        term_float=tf,
    )


# ---------------------------------------------------------------------------
# built-in descriptors
# ---------------------------------------------------------------------------


def make_sequence(spec: str) -> WeightSeq:
    """Build a weight sequence from a descriptor.

    Descriptors: "ones", "dyadic" (2^-n), "geometric:Q" with a positive
    ratio like "1/2" or "2" (rational literals stay exact), and
    "perturbed-dyadic:K" (dyadic with the K-th term raised to 1), and
    "power:ALPHA" (n^alpha; exact for integer alpha).
    """
    token = spec.strip()
    head, sep, arg = token.partition(":")

    if head == "ones" and not sep:
        return WeightSeq(
            "ones", lambda n: 1,
            partial_sum=lambda n: n,
            sum_diverges=True, divergence_reason="constant terms",
            term_float=lambda n: 1.0)

    if head == "dyadic" and not sep:
        return WeightSeq(
            "dyadic", lambda n: Fraction(1, 2 ** n),
            partial_sum=lambda n: 1 - Fraction(1, 2 ** n),
            total_sum=Fraction(1),
            sum_diverges=False, divergence_reason="geometric with ratio 1/2",
            term_float=lambda n: math.ldexp(1.0, -n))

    if head == "geometric" and sep:
        q = parse_number(arg)
        if isinstance(q, float) and not math.isfinite(q):
            raise ValueError("geometric ratio must be finite")
        if not q > 0:
            raise ValueError("geometric ratio must be positive")
        qf = float(q)
        desc = f"geometric:{format_number(q)}"
        if q == 1:
            return WeightSeq(
                desc, lambda n: q ** n,
                partial_sum=lambda n: n * q,
                sum_diverges=True, divergence_reason="ratio 1 (constant terms)",
                term_float=lambda n: 1.0)
        if q < 1:
            return WeightSeq(
                desc, lambda n: q ** n,
                partial_sum=lambda n: q * (1 - q ** n) / (1 - q),
                total_sum=q / (1 - q),
                sum_diverges=False,
                divergence_reason=f"geometric with ratio {format_number(q)} < 1",
                term_float=lambda n: qf ** n)
        return WeightSeq(
            desc, lambda n: q ** n,
            partial_sum=lambda n: q * (q ** n - 1) / (q - 1),
            sum_diverges=True,
            divergence_reason=f"geometric with ratio {format_number(q)} >= 1",
            term_float=lambda n: qf ** n)

    if head == "perturbed-dyadic" and sep:
        try:
            k = int(arg)
        except ValueError:
            raise ValueError(f"bad bump index {arg!r} in {spec!r}") from None
        if k < 1:
            raise ValueError("bump index must be >= 1")

        def term(n, _k=k):
            return Fraction(1) if n == _k else Fraction(1, 2 ** n)

        def psum(n, _k=k):
            base = 1 - Fraction(1, 2 ** n)
            return base + (1 - Fraction(1, 2 ** _k)) if n >= _k else base

        return WeightSeq(
            f"perturbed-dyadic:{k}", term,
            partial_sum=psum,
            total_sum=2 - Fraction(1, 2 ** k),
            sum_diverges=False,
            divergence_reason="dyadic with a single bumped term",
            term_float=lambda n, _k=k: 1.0 if n == _k else math.ldexp(1.0, -n))

    if head == "power" and sep:
        alpha = parse_number(arg)
        if isinstance(alpha, float) and not math.isfinite(alpha):
            raise ValueError("power exponent must be finite")
        af = float(alpha)
        desc = f"power:{format_number(alpha)}"
        if is_exact(alpha) and Fraction(alpha).denominator == 1:
            a_int = int(alpha)
            term = (lambda n, _a=a_int: n ** _a) if a_int >= 0 else \
                   (lambda n, _a=a_int: Fraction(1, n ** (-_a)))
        else:
            term = lambda n: float(n) ** af
        tail = None
        if af >= -1:
            div, reason = True, f"p-series with exponent {format_number(alpha)} >= -1"
        else:
            div = False
            reason = f"p-series with exponent {format_number(alpha)} < -1"
            tail = lambda n: float(n) ** (af + 1) / (-af - 1)  # integral bound
        return WeightSeq(
            desc, term, tail_bound=tail,
            sum_diverges=div, divergence_reason=reason,
            term_float=lambda n: float(n) ** af)

    raise ValueError(
        f"unknown weight descriptor {spec!r}; expected ones, dyadic, "
        "geometric:Q, perturbed-dyadic:K, or power:ALPHA")


def random_rational_sequence(seed: int, *, max_numerator: int = 9,
                             max_denominator: int = 9) -> WeightSeq:
    """Deterministic pseudo-random sequence of small positive rationals;
    term(n) depends only on (seed, n), so any prefix is reproducible."""

    def term(n: int) -> Fraction:
        rng = random.Random(f"hardylab-weights:{seed}:{n}")
        return Fraction(rng.randint(1, max_numerator), rng.randint(1, max_denominator))

    return WeightSeq(
        f"random-rational:{seed}", term,
        sum_diverges=True,
        divergence_reason=f"terms bounded below by 1/{max_denominator}")


# ---------------------------------------------------------------------------
# ratio diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    """Term/partial-sum ratios of a weight sequence and what they imply."""

    descriptor: str
    N: int
    ratios: Tuple[float, ...]
    is_nonincreasing: bool
    ratio_limit_estimate: float
    max_term_ratio: float
    partial_sum_at_N: Number
    divergence_verdict: str  # diverges | converges | inconclusive
    justification: str

    def to_json(self) -> dict:
        out = {
            "descriptor": self.descriptor,
            "N": self.N,
            "is_nonincreasing": self.is_nonincreasing,
            "ratio_limit_estimate": self.ratio_limit_estimate,
            "max_term_ratio": self.max_term_ratio,
            "partial_sum_at_N": json_ready(self.partial_sum_at_N),
            "divergence_verdict": self.divergence_verdict,
            "justification": self.justification,
        }
        if self.N <= 64:
            out["ratios"] = list(self.ratios)
        return out


def ratio_diagnostics(w: WeightSeq, N: int) -> RatioReport:
    """Ratios term(n)/partial_sum(n) for n <= N, their monotonicity, the
    max-term ratio max(term_1..term_N)/partial_sum(N), and a divergence
    verdict.

    The verdict comes from closed-form knowledge carried by the sequence;
    a finite prefix cannot decide divergence, so sequences without that
    knowledge report "inconclusive". Ratios always sit in (0, 1] and the
    first one equals 1.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    if w.exact and N <= EXACT_RATIO_LIMIT:
        terms = [w.term(n) for n in range(1, N + 1)]
        psums = [w.partial_sum(n) for n in range(1, N + 1)]
        exact_ratios = [Fraction(t) / Fraction(s) for t, s in zip(terms, psums)]
        noninc = all(a >= b for a, b in zip(exact_ratios, exact_ratios[1:]))
        ratios = tuple(float(r) for r in exact_ratios)
        max_ratio = float(Fraction(max(terms)) / Fraction(psums[-1]))
        psum_n = psums[-1]
    else:
        arr = w.terms_floats(N)
        sums = np.cumsum(arr)
        rarr = arr / sums
        noninc = bool(np.all(rarr[:-1] >= rarr[1:]))
        ratios = tuple(float(v) for v in rarr)
        max_ratio = float(arr.max() / sums[-1])
        psum_n = float(sums[-1])
    verdict = {True: "diverges", False: "converges", None: "inconclusive"}[w.sum_diverges]
    justification = w.divergence_reason or "no closed-form divergence information"
    return RatioReport(
        descriptor=w.descriptor, N=N, ratios=ratios,
        is_nonincreasing=noninc,
        ratio_limit_estimate=ratios[-1],
        max_term_ratio=max_ratio,
        partial_sum_at_N=psum_n,
        divergence_verdict=verdict,
        justification=justification)


# ---------------------------------------------------------------------------
# coarsening and the partition order
# ---------------------------------------------------------------------------


def coarsen(w: WeightSeq, blocks: Sequence[int]) -> WeightSeq:
    """Sum consecutive blocks of w into a new sequence.

    `blocks` gives the leading block sizes; beyond the given list blocks
    default to size 1. Block sums use partial-sum differences, so the
    result is exact whenever w is. The result is a partition-coarsening of
    w, certifiable prefix-by-prefix with is_coarsening_of.
    """
    sizes = [int(b) for b in blocks]
    if not sizes:
        raise ValueError("blocks must be nonempty")
    if any(b < 1 for b in sizes):
        raise ValueError("block sizes must be >= 1 (empty blocks would need zero weights)")
    bounds = [0]
    for b in sizes:
        bounds.append(bounds[-1] + b)

    def boundary(k: int) -> int:
        if k <= len(sizes):
            return bounds[k]
        return bounds[-1] + (k - len(sizes))

    has_tail = w.tail_bound(1) is not None
    shown = ",".join(map(str, sizes[:8])) + (",..." if len(sizes) > 8 else "")
    return WeightSeq(
        f"coarsen[{shown}]({w.descriptor})",
        lambda k: w.partial_sum(boundary(k)) - w.partial_sum(boundary(k - 1)),
        partial_sum=lambda k: w.partial_sum(boundary(k)),
        tail_bound=(lambda k: w.tail_bound(boundary(k))) if has_tail else None,
        sum_diverges=w.sum_diverges,
        divergence_reason=w.divergence_reason)


def is_coarsening_of(psi: WeightSeq, lam: WeightSeq, terms: int, *,
                     max_steps: int = 200_000) -> bool:
    """Exact prefix certificate for the partition order: the first `terms`
    partial sums of psi all occur among the partial sums of lam.

    True certifies the examined prefix only, never the full infinite
    relation. Requires exact-rational sequences; float inputs raise.
    """
    if not (psi.exact and lam.exact):
        raise TypeError("partition-order check requires exact-rational sequences")
    if terms < 1:
        raise ValueError("need terms >= 1")
    n = 0
    lam_sum: Number = 0
    steps = 0
    for k in range(1, terms + 1):
        target = psi.partial_sum(k)
        while lam_sum < target:
            n += 1
            steps += 1
            if steps > max_steps:
                raise RuntimeError(
                    f"partition-order search walked {max_steps} terms of "
                    f"{lam.descriptor} without reaching the target partial sum")
            lam_sum = lam.partial_sum(n)
        if lam_sum != target:
            return False
    return True
