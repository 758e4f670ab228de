"""Hardy-constant estimation routes.

Several independent routes to the best constant C in
sum_n w_n M(x_1..x_n, w_1..w_n) <= C sum_n w_n x_n:

- exact partial sums (arithmetic mean only), optionally certified with a
  tail bound into a two-sided interval,
- finite-section search (any mean), a lower bound by construction,
- a closed-form geometric probe vector (arithmetic mean only),
- the substitution x_n = y/W_n whose trailing terms approach the
  constant from below when weight sums diverge and term ratios are
  nonincreasing,
- the unweighted limit n * M(1, 1/2, ..., 1/n).

Routes either return an estimate with honest diagnostics or raise:
HypothesisViolation when a route's preconditions fail on the given
weights, InconclusiveError when a certified answer was requested but
cannot be produced.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .scalars import Number, format_number, is_exact, json_ready
from .kernel import MeanSpec
from .search import OptimizerConfig, SearchResult, _PrefixEngine, hardy_ratio, maximize_hardy_ratio
from .weights import WeightSeq, ratio_diagnostics

# trailing-window fraction for steady-state estimates and the a(N)-a(N/2)
# drift past which a route is flagged as trending upward instead of
# settling
STEADY_WINDOW = 0.5
DIVERGENCE_DRIFT = 0.05

DEFAULT_Y_GRID = tuple(2.0 ** k for k in range(-10, 11))


class HypothesisViolation(ValueError):
    """The requested route's preconditions fail for these weights."""


class InconclusiveError(RuntimeError):
    """A certified answer was requested but cannot be produced."""


@dataclass(frozen=True)
class HardyEstimate:
    """One route's output: a headline value plus certification data.

    `lower`/`upper` are set only when the route actually certifies that
    side (exact rationals where available); `value` is always the float
    headline. Everything else lands in diagnostics.
    """

    kind: str
    mean: str
    weights: str
    N: int
    value: float
    lower: Optional[Number] = None
    upper: Optional[Number] = None
    witness: Optional[Tuple[float, ...]] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def direction(self) -> str:
        if self.lower is not None and self.upper is not None:
            return "interval"
        if self.lower is not None:
            return "lower_bound"
        return "estimate"

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "mean": self.mean,
            "weights": self.weights,
            "N": self.N,
            "value": self.value,
            "direction": self.direction,
            "diagnostics": json_ready(self.diagnostics),
        }
        if self.lower is not None:
            out["lower"] = json_ready(self.lower)
        if self.upper is not None:
            out["upper"] = json_ready(self.upper)
        if self.witness is not None:
            out["witness"] = [float(v) for v in self.witness]
        return out


# ---------------------------------------------------------------------------
# closed-form reference constants
# ---------------------------------------------------------------------------


def copson_constant(p: float) -> float:
    """Best constant (1-p)^(-1/p) for the power mean of order p over all
    admissible weights: e at p=0, 1 at p=-inf, infinite for p >= 1."""
    p = float(p)
    if math.isnan(p):
        raise ValueError("order must not be NaN")
    if p >= 1:
        return math.inf
    if p == 0.0:
        return math.e
    if math.isinf(p):
        return 1.0
    return math.exp(-math.log1p(-p) / p)


# ---------------------------------------------------------------------------
# arithmetic-mean exact routes
# ---------------------------------------------------------------------------


def arithmetic_hardy(lam: WeightSeq, N: int, *, certified: bool = False) -> HardyEstimate:
    """Partial sum of w_n / W_n, the arithmetic-mean constant truncated at N.

    Exact rationals when the sequence is exact. The partial sum is always
    a certified lower bound. With certified=True the tail is bounded by
    (remaining weight mass) / W_N, which needs a convergent weight sum;
    otherwise InconclusiveError.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    if lam.exact:
        partial: Number = sum(
            Fraction(lam.term(n)) / Fraction(lam.partial_sum(n)) for n in range(1, N + 1))
    else:
        terms = lam.terms_floats(N)
        partial = float(np.sum(terms / np.cumsum(terms)))
    diag = {"number_mode": lam.number_mode}
    upper = None
    if certified:
        tail = lam.tail_bound(N)
        if tail is None:
            raise InconclusiveError(
                f"{lam.descriptor}: no certified tail bound is available, so the "
                "partial sum cannot be closed into a two-sided interval")
        upper = partial + tail / lam.partial_sum(N)
        diag["tail_bound"] = json_ready(tail)
    return HardyEstimate(
        kind="certified-interval" if certified else "partial-sum",
        mean="power:1", weights=lam.descriptor, N=N,
        value=float(partial), lower=partial, upper=upper, diagnostics=diag)


def geometric_probe(lam: WeightSeq, q: Number, N: int) -> HardyEstimate:
    """Hardy ratio of the probe vector x_n = q^n / w_n (arithmetic mean).

    For 0 < q < 1 the ratio is a valid lower bound and exceeds
    (1-q) * sum_{n<=N} w_n/W_n; both sides are computed exactly for exact
    sequences and reported together.
    """
    if not (0 < q < 1):
        raise HypothesisViolation("probe ratio q must lie in (0, 1)")
    if N < 1:
        raise ValueError("need N >= 1")
    exact = lam.exact and is_exact(q)
    if exact:
        qv: Number = Fraction(q)
        powers = [qv ** n for n in range(1, N + 1)]
        run: Number = 0
        num: Number = 0
        for n in range(1, N + 1):
            run += powers[n - 1]
            num += Fraction(lam.term(n)) * run / Fraction(lam.partial_sum(n))
        ratio: Number = num / run
        reference = (1 - qv) * sum(
            Fraction(lam.term(n)) / Fraction(lam.partial_sum(n)) for n in range(1, N + 1))
    else:
        qf = float(q)
        w = lam.terms_floats(N)
        W = np.cumsum(w)
        pw = np.cumsum(qf ** np.arange(1, N + 1))
        ratio = float(np.sum(w * pw / W) / pw[-1])
        reference = (1 - qf) * float(np.sum(w / W))
    return HardyEstimate(
        kind="geometric-probe", mean="power:1", weights=lam.descriptor, N=N,
        value=float(ratio), lower=ratio,
        diagnostics={
            "q": format_number(q),
            "reference_lower": float(reference),
            "number_mode": "exact_rational" if exact else "float",
        })


# ---------------------------------------------------------------------------
# finite-section search
# ---------------------------------------------------------------------------


def finite_lower_bound(mean: MeanSpec, lam: WeightSeq, N: int,
                       config: OptimizerConfig = OptimizerConfig()) -> HardyEstimate:
    """Best Hardy ratio found over vectors supported on the first N terms."""
    if N < 1:
        raise ValueError("need N >= 1")
    w = lam.terms_floats(N)
    res = maximize_hardy_ratio(mean, w, config)
    return _estimate_from_search(mean, lam, N, res)


def _estimate_from_search(mean: MeanSpec, lam: WeightSeq, N: int,
                          res: SearchResult) -> HardyEstimate:
    return HardyEstimate(
        kind="finite-section", mean=mean.name, weights=lam.descriptor, N=N,
        value=res.value, lower=res.value if math.isfinite(res.value) else None,
        witness=res.witness,
        diagnostics={
            "converged": res.converged,
            "n_updates": res.n_updates,
            "start_values": list(res.start_values),
        })


def finite_lower_bound_sweep(mean: MeanSpec, lam: WeightSeq, sizes: Sequence[int],
                             config: OptimizerConfig = OptimizerConfig()) -> List[HardyEstimate]:
    """Finite-section bounds along increasing N, warm-starting each run
    from the previous witness extended with a 1/W_n tail."""
    sizes = [int(n) for n in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    out: List[HardyEstimate] = []
    cfg = config
    prev_witness: Optional[np.ndarray] = None
    prev_n = 0
    for N in sizes:
        W = lam.partial_sums_floats(N)
        if prev_witness is not None:
            pad = prev_witness[-1] * W[prev_n - 1] / W[prev_n:N]
            warm = tuple(np.concatenate([prev_witness, pad]))
            cfg = dataclasses.replace(config, warm_starts=(warm,))
        est = finite_lower_bound(mean, lam, N, cfg)
        out.append(est)
        prev_witness = np.asarray(est.witness, dtype=float)
        prev_n = N
    return out


# ---------------------------------------------------------------------------
# substitution and limit routes
# ---------------------------------------------------------------------------


def _steady_stats(values: np.ndarray, window: float) -> Tuple[float, bool, float]:
    n = len(values)
    start = max(1, int(math.ceil(window * n))) - 1
    steady = float(np.min(values[start:]))
    drift = float(values[-1] - values[n // 2 - 1]) if n >= 2 else 0.0
    return steady, drift > DIVERGENCE_DRIFT, drift


def kedlaya_sequence(mean: MeanSpec, lam: WeightSeq, y: float, N: int) -> np.ndarray:
    """a_n = (W_n / y) * M(y/W_1, ..., y/W_n; w_1..w_n) for n = 1..N."""
    if not y > 0:
        raise ValueError("need y > 0")
    w = lam.terms_floats(N)
    W = np.cumsum(w)
    eng = _PrefixEngine(mean, w)
    eng.rebuild(y / W)
    return (W / y) * eng.mn


def kedlaya_estimate(mean: MeanSpec, lam: WeightSeq, N: int, *,
                     window: float = STEADY_WINDOW,
                     y_grid: Sequence[float] = DEFAULT_Y_GRID) -> HardyEstimate:
    """Steady-state estimate from the substitution x_n = y/W_n.

    Requires divergent weight sums and nonincreasing term/partial-sum
    ratios (HypothesisViolation otherwise; unknown divergence also
    refuses, since the route's conclusion rests on it). For each y the
    steady value is the minimum of a_n over the trailing window; the
    headline is the best y. For homogeneous means y cancels, so the whole
    grid collapses to one value; the observed spread is reported either way.
    """
    if N < 4:
        raise ValueError("need N >= 4")
    if lam.sum_diverges is not True:
        state = "converges" if lam.sum_diverges is False else "is not certified to diverge"
        raise HypothesisViolation(
            f"{lam.descriptor}: weight sum {state}; the substitution route "
            "needs divergent weight sums")
    rep = ratio_diagnostics(lam, N)
    if not rep.is_nonincreasing:
        raise HypothesisViolation(
            f"{lam.descriptor}: term/partial-sum ratios are not nonincreasing "
            f"over the first {N} terms")
    if not y_grid:
        raise ValueError("y_grid must be nonempty")
    per_y = []
    best = None
    for y in (float(v) for v in y_grid):
        a = kedlaya_sequence(mean, lam, y, N)
        steady, trend, drift = _steady_stats(a, window)
        row = {"y": y, "steady": steady, "divergent_trend": trend, "drift": drift}
        per_y.append(row)
        if best is None or steady > best[0]:
            best = (steady, row)
    steady, row = best
    spread = max(r["steady"] for r in per_y) - min(r["steady"] for r in per_y)
    return HardyEstimate(
        kind="substitution", mean=mean.name, weights=lam.descriptor, N=N,
        value=steady, lower=None,
        diagnostics={
            "window": window,
            "y_best": row["y"],
            "grid_spread": spread,
            "grid_collapsed": spread <= 1e-9 * max(1.0, abs(steady)),
            "divergent_trend": row["divergent_trend"],
            "drift": row["drift"],
            "per_y": per_y,
        })


def unweighted_limit(mean: MeanSpec, N: int) -> HardyEstimate:
    """n * M(1, 1/2, ..., 1/n) with unit weights, evaluated at n = N.

    The drift between N/2 and N distinguishes settling routes from
    divergent ones (the arithmetic mean gives harmonic numbers and is
    flagged; orders p < 1 settle toward the closed-form constant).
    """
    if N < 4:
        raise ValueError("need N >= 4")
    w = np.ones(N)
    eng = _PrefixEngine(mean, w)
    eng.rebuild(1.0 / np.arange(1.0, N + 1.0))
    a = np.arange(1.0, N + 1.0) * eng.mn
    steady, trend, drift = _steady_stats(a, STEADY_WINDOW)
    return HardyEstimate(
        kind="unweighted-limit", mean=mean.name, weights="ones", N=N,
        value=float(a[-1]),
        diagnostics={
            "half_value": float(a[N // 2 - 1]),
            "drift": drift,
            "divergent_trend": trend,
            "steady_min": steady,
        })
