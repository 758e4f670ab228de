"""Weighted-mean kernel.

Defines the evaluation contract for means of strictly positive vectors
with strictly positive weights, step-function views of weighted vectors,
and randomized empirical checks of the structural axioms (invariance
under weight scaling, the reduction/interleaving identity, the mean value
property, elimination of vanishing weights) and of declared shape flags
(symmetry, monotonicity, midpoint concavity, homogeneity).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

from .scalars import Number, all_exact, json_ready

DEFAULT_AXIOM_TOL = 1e-9


class MeanDomainError(ValueError):
    """Inputs left the domain the mean is defined on."""


@dataclass(frozen=True)
class MeanFlags:
    """Declared shape properties of a mean.

    Flags are claims, not certificates: check_axioms verifies each claimed
    flag empirically and reports witnesses for violations.
    """

    symmetric: bool = False
    monotone: bool = False
    concave: bool = False
    homogeneous: bool = False
    continuous_in_weights: bool = True


@dataclass(frozen=True)
class MeanSpec:
    """A weighted mean M(x, w) of positive entries with positive weights.

    `fn` receives the raw point and weight sequences and owns weight
    normalization itself; the kernel deliberately does not normalize, so
    scaling defects in a mean stay observable to the axiom checks.
    """

    family: str
    params: object
    flags: MeanFlags
    fn: Callable[[Sequence[float], Sequence[Number]], float]
    name: str = ""

    def __str__(self) -> str:
        return self.name or self.family


@dataclass(frozen=True)
class WeightVector:
    """Finite vector of strictly positive weights.

    number_mode is "exact_rational" when every entry supports exact
    arithmetic (int or Fraction), otherwise "float".
    """

    entries: Tuple[Number, ...]

    def __post_init__(self):
        if len(self.entries) == 0:
            raise ValueError("weight vector needs at least one entry")
        for w in self.entries:
            if not (w > 0 and (not isinstance(w, float) or math.isfinite(w))):
                raise ValueError(f"weights must be strictly positive and finite, got {w!r}")

    @staticmethod
    def of(w) -> "WeightVector":
        if isinstance(w, WeightVector):
            return w
        return WeightVector(tuple(w))

    @property
    def number_mode(self) -> str:
        return "exact_rational" if all_exact(self.entries) else "float"

    def scale(self, t: Number) -> "WeightVector":
        if not t > 0:
            raise ValueError("scale factor must be positive")
        return WeightVector(tuple(t * w for w in self.entries))

    def total(self) -> Number:
        return sum(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _validate_points(x) -> Tuple[float, ...]:
    xs = tuple(float(v) for v in x)
    if not xs:
        raise ValueError("point vector needs at least one entry")
    for v in xs:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"point entries must be strictly positive and finite, got {v!r}")
    return xs


def evaluate(mean: MeanSpec, x, w) -> float:
    """Evaluate a mean at points x with weights w.

    Raises on length mismatch or nonpositive entries. For a well-formed
    mean the result lies in [min x, max x] and is invariant under positive
    scaling of w (exactly so in exact-rational weight mode).
    """
    wv = WeightVector.of(w)
    xs = _validate_points(x)
    if len(xs) != len(wv):
        raise ValueError(f"length mismatch: {len(xs)} points vs {len(wv)} weights")
    return float(mean.fn(xs, wv.entries))


def shuffle(p: Sequence, q: Sequence) -> tuple:
    """Interleave two equal-length vectors as (p1, q1, p2, q2, ...)."""
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    out = []
    for a, b in zip(p, q):
        out.append(a)
        out.append(b)
    return tuple(out)


# ---------------------------------------------------------------------------
# step functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function: values[k] on [breakpoints[k], breakpoints[k+1]).

    Breakpoints start at 0 and increase strictly; values are positive.
    """

    breakpoints: Tuple[Number, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        b = self.breakpoints
        if len(b) < 2 or len(self.values) != len(b) - 1:
            raise ValueError("need n+1 breakpoints for n values")
        if b[0] != 0:
            raise ValueError("support must start at 0")
        for lo, hi in zip(b, b[1:]):
            if not hi > lo:
                raise ValueError("breakpoints must be strictly increasing")
        for v in self.values:
            if not v > 0:
                raise ValueError("step values must be strictly positive")

    @property
    def support(self) -> Tuple[Number, Number]:
        return (self.breakpoints[0], self.breakpoints[-1])

    def __call__(self, t: Number) -> float:
        b = self.breakpoints
        if not (b[0] <= t < b[-1]):
            raise ValueError(f"{t!r} outside support [{b[0]}, {b[-1]})")
        lo, hi = 0, len(b) - 1
        while lo + 1 < hi:  # rightmost piece with b[lo] <= t
            mid = (lo + hi) // 2
            if b[mid] <= t:
                lo = mid
            else:
                hi = mid
        return self.values[lo]

    def is_nonincreasing(self) -> bool:
        return all(a >= b for a, b in zip(self.values, self.values[1:]))


def step_profile(x, w) -> StepFunction:
    """Step function carrying (x, w): value x_k on [L_{k-1}, L_k), where
    L are the weight partial sums (exact breakpoints for rational w)."""
    wv = WeightVector.of(w)
    xs = _validate_points(x)
    if len(xs) != len(wv):
        raise ValueError(f"length mismatch: {len(xs)} points vs {len(wv)} weights")
    acc = 0 if wv.number_mode == "exact_rational" else 0.0
    sums = [acc]
    for e in wv.entries:
        acc = acc + e
        sums.append(acc)
    return StepFunction(tuple(sums), xs)


def interval_mean(mean: MeanSpec, f: StepFunction, a: Number, b: Number) -> float:
    """Mean of a step function over [a, b): pieces overlapping the window
    enter with their overlap lengths as weights.

    Over the full support of step_profile(x, w) this reproduces
    evaluate(mean, x, w), exactly so in rational weight mode, where the
    breakpoint differences recover the weights exactly.
    """
    lo_s, hi_s = f.support
    if not (lo_s <= a < b <= hi_s):
        raise ValueError(f"window [{a}, {b}) outside support [{lo_s}, {hi_s})")
    vals, lens = [], []
    bps = f.breakpoints
    for k, v in enumerate(f.values):
        lo = bps[k] if bps[k] >= a else a
        hi = bps[k + 1] if bps[k + 1] <= b else b
        if hi > lo:
            vals.append(v)
            lens.append(hi - lo)
    return evaluate(mean, vals, lens)


# ---------------------------------------------------------------------------
# axiom checks
# ---------------------------------------------------------------------------


@dataclass
class CheckOutcome:
    axiom: str
    trials: int
    failures: int
    worst_violation: float
    witness: Optional[dict] = None
    skipped: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        out = {
            "axiom": self.axiom,
            "trials": self.trials,
            "failures": self.failures,
            "worst_violation": self.worst_violation,
            "passed": self.passed,
        }
        if self.witness is not None:
            out["witness"] = json_ready(self.witness)
        if self.skipped:
            out["skipped"] = self.skipped
        return out


@dataclass
class AxiomReport:
    mean_name: str
    tol: float
    seed: int
    outcomes: Dict[str, CheckOutcome] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes.values())

    def worst(self) -> float:
        return max((o.worst_violation for o in self.outcomes.values()), default=0.0)

    def to_json(self) -> dict:
        return {
            "mean": self.mean_name,
            "tol": self.tol,
            "seed": self.seed,
            "passed": self.passed,
            "outcomes": {k: v.to_json() for k, v in self.outcomes.items()},
        }


def _rel_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# Each measure maps (mean, witness, tol) -> violation magnitude (0 = pass),
# so a stored witness replays to the same number.


def _measure_nullhomogeneity(mean, wit, tol):
    base = evaluate(mean, wit["x"], wit["w"])
    scaled = evaluate(mean, wit["x"], [wit["t"] * v for v in wit["w"]])
    gap = _rel_gap(base, scaled)
    return max(0.0, gap - tol)


def _measure_reduction(mean, wit, tol):
    x, lam, mu = wit["x"], wit["lam"], wit["mu"]
    joint = evaluate(mean, x, [a + b for a, b in zip(lam, mu)])
    split = evaluate(mean, shuffle(x, x), shuffle(lam, mu))
    return max(0.0, _rel_gap(joint, split) - tol)


def _measure_mean_value(mean, wit, tol):
    x = wit["x"]
    m = evaluate(mean, x, wit["w"])
    lo, hi = min(x), max(x)
    overshoot = max(lo - m, m - hi, 0.0)
    return max(0.0, overshoot / max(hi, 1e-300) - tol)


def _measure_elimination(mean, wit, tol):
    x, w, z = wit["x"], wit["w"], wit["z"]
    base = evaluate(mean, x, w)
    errs = {}
    for eps in (1e-6, 1e-9):
        appended = evaluate(mean, list(x) + [z], list(w) + [eps])
        errs[eps] = _rel_gap(base, appended)
    # the perturbation must both be small and shrink with eps
    viol = max(0.0, errs[1e-6] - 1e-2)
    viol = max(viol, errs[1e-9] - max(0.1 * errs[1e-6], 100 * tol))
    return viol


def _measure_symmetric(mean, wit, tol):
    x, w, perm = wit["x"], wit["w"], wit["perm"]
    base = evaluate(mean, x, w)
    permuted = evaluate(mean, [x[i] for i in perm], [w[i] for i in perm])
    return max(0.0, _rel_gap(base, permuted) - tol)


def _measure_monotone(mean, wit, tol):
    x, w, j, delta = wit["x"], wit["w"], wit["j"], wit["delta"]
    base = evaluate(mean, x, w)
    bumped = list(x)
    bumped[j] += delta
    after = evaluate(mean, bumped, w)
    drop = (base - after) / max(abs(base), 1e-300)
    return max(0.0, drop - tol)


def _measure_concave(mean, wit, tol):
    x, y, w = wit["x"], wit["y"], wit["w"]
    mid = evaluate(mean, [(a + b) / 2 for a, b in zip(x, y)], w)
    avg = (evaluate(mean, x, w) + evaluate(mean, y, w)) / 2
    gap = (avg - mid) / max(abs(avg), 1e-300)
    return max(0.0, gap - tol)


def _measure_homogeneous(mean, wit, tol):
    x, w, t = wit["x"], wit["w"], wit["t"]
    base = evaluate(mean, x, w)
    scaled = evaluate(mean, [t * v for v in x], w)
    return max(0.0, _rel_gap(t * base, scaled) - tol)


_MEASURES = {
    "nullhomogeneity": _measure_nullhomogeneity,
    "reduction": _measure_reduction,
    "mean_value": _measure_mean_value,
    "elimination": _measure_elimination,
    "symmetric": _measure_symmetric,
    "monotone": _measure_monotone,
    "concave": _measure_concave,
    "homogeneous": _measure_homogeneous,
}


def replay_axiom(mean: MeanSpec, axiom: str, witness: dict, tol: float = DEFAULT_AXIOM_TOL) -> float:
    """Recompute the violation magnitude of a stored witness."""
    return _MEASURES[axiom](mean, witness, tol)


def _rand_positive(rng, lo=0.1, hi=10.0):
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def _rand_instance(rng, nmin=1, nmax=6):
    n = rng.randint(nmin, nmax)
    x = [_rand_positive(rng) for _ in range(n)]
    w = [_rand_positive(rng) for _ in range(n)]
    return x, w


def _make_witness(axiom, rng):
    if axiom == "reduction":
        x, lam = _rand_instance(rng)
        mu = [_rand_positive(rng) for _ in lam]
        return {"x": x, "lam": lam, "mu": mu}
    x, w = _rand_instance(rng)
    wit = {"x": x, "w": w}
    if axiom == "nullhomogeneity":
        wit["t"] = _rand_positive(rng, 1e-3, 1e3)
    elif axiom == "elimination":
        wit["z"] = _rand_positive(rng)
    elif axiom == "symmetric":
        perm = list(range(len(x)))
        rng.shuffle(perm)
        wit["perm"] = perm
    elif axiom == "monotone":
        wit["j"] = rng.randrange(len(x))
        wit["delta"] = _rand_positive(rng, 0.01, 5.0)
    elif axiom == "concave":
        wit["y"] = [_rand_positive(rng) for _ in x]
    elif axiom == "homogeneous":
        wit["t"] = _rand_positive(rng, 1e-3, 1e3)
    return wit


def check_axioms(mean: MeanSpec, trials: int = 200, seed: int = 0,
                 tol: float = DEFAULT_AXIOM_TOL) -> AxiomReport:
    """Randomized empirical check of the weighted-mean axioms plus every
    claimed shape flag.

    The four axioms always run, except that the elimination check (append
    an entry with weight eps and let eps shrink) only applies to means
    declared continuous in the weights; min/max-type means jump when a
    new extremum enters with arbitrarily small weight. Claimed flags run
    their own randomized checks; unclaimed flags are recorded as skipped.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    report = AxiomReport(mean_name=str(mean), tol=tol, seed=seed)
    axioms = ["nullhomogeneity", "reduction", "mean_value", "elimination"]
    flag_checks = ["symmetric", "monotone", "concave", "homogeneous"]
    for name in axioms + flag_checks:
        if name == "elimination" and not mean.flags.continuous_in_weights:
            report.outcomes[name] = CheckOutcome(
                name, 0, 0, 0.0, skipped="mean not declared continuous in weights")
            continue
        if name in flag_checks and not getattr(mean.flags, name):
            report.outcomes[name] = CheckOutcome(name, 0, 0, 0.0, skipped="flag not claimed")
            continue
        rng = random.Random(f"axioms:{seed}:{name}")
        failures = 0
        worst = 0.0
        worst_wit = None
        for _ in range(trials):
            wit = _make_witness(name, rng)
            viol = _MEASURES[name](mean, wit, tol)
            if viol > 0:
                failures += 1
                if viol > worst:
                    worst, worst_wit = viol, wit
        report.outcomes[name] = CheckOutcome(name, trials, failures, worst, worst_wit)
    return report
