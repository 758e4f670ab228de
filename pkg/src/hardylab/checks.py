"""Constructive rearrangement and executable comparison checks.

Implements the equal-sum nonincreasing rearrangement (expand by integer
weight counts, sort, re-average per block), the prefix-mean comparison it
feeds, the coarsening comparison of arithmetic constants at matched
truncations, nonincreasing running means of step profiles, the perturbed
dyadic family's constants, and the sup-at-ones cap sweep.

Checks that assert a theorem under its hypotheses report pass/fail and a
signed worst margin (the minimum slack of the asserted inequality;
negative means violated). When a mean does not claim the hypotheses, the
same machinery runs as a counterexample search and reports found / not
found instead, since a random search proves nothing by coming up empty.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .scalars import Number, json_ready
from .kernel import MeanSpec, StepFunction, WeightVector, evaluate, interval_mean
from .families import power
from .weights import WeightSeq, is_coarsening_of, make_sequence, random_rational_sequence
from .search import OptimizerConfig
from . import hardy as _hardy

DEFAULT_MARGIN_TOL = 1e-10

# expanding rationals to unit atoms is exact or nothing; reject instead of
# approximating when the scaled weights would need more atoms than this
DEFAULT_EXPANSION_BUDGET = 1_000_000


class ExpansionBudgetError(RuntimeError):
    """Integer-scaling the weights would exceed the atom budget."""


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification run.

    margin is the worst (minimum) signed slack of the asserted
    inequality over everything tried; the stored witness re-evaluates to
    that margin. outcome refines `passed` for counterexample searches,
    where "inconclusive" (nothing found) is not a pass and
    "counterexample_found" is the search succeeding.
    """

    check: str
    passed: bool
    outcome: str  # pass | fail | counterexample_found | inconclusive
    instances: int
    margin: float
    witness: Optional[dict] = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "passed": self.passed,
            "outcome": self.outcome,
            "instances": self.instances,
            "margin": self.margin,
            "details": json_ready(self.details),
        }
        if self.witness is not None:
            out["witness"] = json_ready(self.witness)
        return out


# ---------------------------------------------------------------------------
# equal-sum rearrangement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RearrangementResult:
    """Nonincreasing block-average rearrangement with the same weighted sum.

    y holds exact rationals (input floats are embedded exactly), K is the
    integer scaling factor applied to the weights, expansion_size the
    number of unit atoms the construction sorted.
    """

    y: Tuple[Fraction, ...]
    scale_factor: int
    expansion_size: int

    def y_floats(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.y)

    def to_json(self) -> dict:
        return {
            "y": json_ready(self.y),
            "y_float": list(self.y_floats()),
            "scale_factor": self.scale_factor,
            "expansion_size": self.expansion_size,
        }


def equal_sum_rearrangement(x: Sequence[Number], w,
                            budget: int = DEFAULT_EXPANSION_BUDGET) -> RearrangementResult:
    """Sort x into nonincreasing block averages without moving weight.

    Scales the rational weights by their common denominator K, expands
    each x_i into its integer count of unit atoms, sorts the atoms
    nonincreasing, and averages them back blockwise under the original
    weights. The weighted sum is preserved exactly; the output is
    nonincreasing envelope-by-envelope even when x was not.
    """
    wv = w if isinstance(w, WeightVector) else WeightVector.of(w)
    if wv.number_mode != "exact_rational":
        raise TypeError("rearrangement needs rational weights (use p/q literals)")
    if len(x) != len(wv):
        raise ValueError("x and w must have equal length")
    counts_frac = [Fraction(v) for v in wv]
    K = math.lcm(*(f.denominator for f in counts_frac))
    counts = [int(f * K) for f in counts_frac]
    total = sum(counts)
    if total > budget:
        raise ExpansionBudgetError(
            f"scaling weights by K={K} expands to {total} atoms, over the "
            f"budget of {budget}")
    xs = [Fraction(v) for v in x]
    atoms: List[Tuple[Fraction, int]] = []  # (value, multiplicity), kept run-length
    for v, c in zip(xs, counts):
        atoms.append((v, c))
    atoms.sort(key=lambda t: t[0], reverse=True)
    y: List[Fraction] = []
    it = iter(atoms)
    cur_v, cur_c = Fraction(0), 0
    for c in counts:
        need = c
        acc = Fraction(0)
        while need:
            if cur_c == 0:
                cur_v, cur_c = next(it)
            take = min(need, cur_c)
            acc += cur_v * take
            cur_c -= take
            need -= take
        y.append(acc / c)
    assert sum(a * b for a, b in zip(y, counts)) == sum(a * b for a, b in zip(xs, counts))
    return RearrangementResult(y=tuple(y), scale_factor=K, expansion_size=total)


# ---------------------------------------------------------------------------
# prefix-mean comparison against the rearrangement
# ---------------------------------------------------------------------------


def _claims_hypotheses(mean: MeanSpec) -> bool:
    return mean.flags.monotone and mean.flags.concave


def verify_jcin(mean: MeanSpec, x: Sequence[Number], w,
                tol: float = DEFAULT_MARGIN_TOL) -> CheckReport:
    """Prefix means of x never exceed those of its rearrangement.

    Claimed for symmetric monotone concave means; for means that do not
    claim those flags this runs as a counterexample probe on the single
    instance. margin is the minimum over prefixes of (rearranged mean -
    original mean).
    """
    wv = w if isinstance(w, WeightVector) else WeightVector.of(w)
    res = equal_sum_rearrangement(x, wv)
    xs = [float(v) for v in x]
    ys = list(res.y_floats())
    ws = list(wv)
    margin = math.inf
    worst_n = 0
    lhs_w = rhs_w = 0.0
    for n in range(1, len(xs) + 1):
        lhs = evaluate(mean, xs[:n], ws[:n])
        rhs = evaluate(mean, ys[:n], ws[:n])
        if rhs - lhs < margin:
            margin, worst_n, lhs_w, rhs_w = rhs - lhs, n, lhs, rhs
    ok = margin >= -tol
    if _claims_hypotheses(mean):
        outcome = "pass" if ok else "fail"
    else:
        outcome = "inconclusive" if ok else "counterexample_found"
    return CheckReport(
        check="jcin", passed=ok, outcome=outcome, instances=1, margin=margin,
        witness={
            "x": list(x), "w": list(wv), "y": res.y,
            "prefix": worst_n, "original_mean": lhs_w, "rearranged_mean": rhs_w,
        },
        details={"mean": mean.name, "hypotheses_claimed": _claims_hypotheses(mean)})


def _random_instance(rng: random.Random, *, max_len: int = 8,
                     integer_weights: bool = True) -> Tuple[list, list]:
    n = rng.randint(1, max_len)
    x = [Fraction(rng.randint(1, 400), rng.randint(1, 40)) for _ in range(n)]
    if integer_weights:
        w = [rng.randint(1, 6) for _ in range(n)]
    else:
        w = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
    return x, w


def jcin_sweep(mean: MeanSpec, trials: int = 200, seed: int = 0, *,
               tol: float = DEFAULT_MARGIN_TOL,
               integer_weights: bool = False) -> CheckReport:
    """Random-instance sweep of verify_jcin, merged by worst margin."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    margin = math.inf
    witness = None
    search_mode = not _claims_hypotheses(mean)
    tried = 0
    for i in range(trials):
        rng = random.Random(f"hardylab-jcin:{seed}:{i}")
        x, w = _random_instance(rng, integer_weights=integer_weights)
        rep = verify_jcin(mean, x, w, tol=tol)
        tried += 1
        if rep.margin < margin:
            margin, witness = rep.margin, rep.witness
        if search_mode and not rep.passed:
            break
    ok = margin >= -tol
    if search_mode:
        outcome = "inconclusive" if ok else "counterexample_found"
    else:
        outcome = "pass" if ok else "fail"
    return CheckReport(
        check="jcin-sweep", passed=ok, outcome=outcome, instances=tried,
        margin=margin, witness=witness,
        details={"mean": mean.name, "seed": seed,
                 "hypotheses_claimed": not search_mode})


# ---------------------------------------------------------------------------
# coarsening comparison at matched truncations
# ---------------------------------------------------------------------------


def _match_boundaries(psi: WeightSeq, lam: WeightSeq, terms: int, *,
                      max_steps: int = 500_000) -> List[int]:
    """n_m with psi.partial_sum(m) == lam.partial_sum(n_m), for m = 1..terms."""
    if not (psi.exact and lam.exact):
        raise TypeError("matched truncations need exact-rational sequences")
    out: List[int] = []
    n = 0
    lam_sum: Number = 0
    steps = 0
    for m in range(1, terms + 1):
        target = psi.partial_sum(m)
        while lam_sum < target:
            n += 1
            steps += 1
            if steps > max_steps:
                raise RuntimeError(
                    f"walked {max_steps} terms of {lam.descriptor} without "
                    f"matching partial sum {m} of {psi.descriptor}")
            lam_sum = lam.partial_sum(n)
        if lam_sum != target:
            raise _hardy.HypothesisViolation(
                f"{psi.descriptor} is not a coarsening of {lam.descriptor}: "
                f"partial sum {m} falls between consecutive partial sums")
        out.append(n)
    return out


def verify_cut(mean_or_closed_form: Union[str, MeanSpec], psi: WeightSeq,
               lam: WeightSeq, N: int, tol: float = 1e-2, *,
               config: OptimizerConfig = OptimizerConfig()) -> CheckReport:
    """Coarser weights never raise the constant.

    "arithmetic" mode compares exact partial sums sum psi_m/Psi_m <=
    sum lam_n/Lam_n at every matched truncation m <= N (margin from the
    last, pass/fail from all, both exact). A MeanSpec instead runs the
    finite-section search on both sequences and asserts ordering within
    tol; that mode is numerical evidence, not proof.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    if isinstance(mean_or_closed_form, str):
        if mean_or_closed_form not in ("arithmetic", "power:1"):
            raise ValueError(
                f"unknown closed form {mean_or_closed_form!r}; expected 'arithmetic'")
        ns = _match_boundaries(psi, lam, N)
        coarse: Number = 0
        margin = None
        worst = {}
        ok = True
        n_done = 0
        fine: Number = 0
        for m, n_m in enumerate(ns, start=1):
            coarse += Fraction(psi.term(m)) / Fraction(psi.partial_sum(m))
            while n_done < n_m:
                n_done += 1
                fine += Fraction(lam.term(n_done)) / Fraction(lam.partial_sum(n_done))
            slack = fine - coarse
            if slack < 0:
                ok = False
            if margin is None or slack < margin:
                margin = slack
                worst = {"truncation": m, "matched_fine_index": n_m,
                         "coarse_sum": coarse, "fine_sum": fine, "slack": slack}
        return CheckReport(
            check="cut", passed=ok, outcome="pass" if ok else "fail",
            instances=N, margin=float(margin),
            witness=worst,
            details={"mode": "arithmetic-exact", "psi": psi.descriptor,
                     "lam": lam.descriptor, "matched_indices": ns[:32]})
    mean = mean_or_closed_form
    if not (mean.flags.monotone and mean.flags.concave):
        raise _hardy.HypothesisViolation(
            f"{mean.name}: the coarsening comparison claims monotone concave "
            "means only")
    if not is_coarsening_of(psi, lam, min(N, 64)):
        raise _hardy.HypothesisViolation(
            f"{psi.descriptor} is not a prefix-certified coarsening of {lam.descriptor}")
    lo_psi = _hardy.finite_lower_bound(mean, psi, N, config)
    lo_lam = _hardy.finite_lower_bound(mean, lam, N, config)
    margin = lo_lam.value + tol - lo_psi.value
    ok = margin >= 0
    return CheckReport(
        check="cut", passed=ok, outcome="pass" if ok else "fail",
        instances=1, margin=float(lo_lam.value - lo_psi.value),
        witness={"coarse_bound": lo_psi.value, "fine_bound": lo_lam.value},
        details={"mode": "finite-section", "mean": mean.name, "tol": tol,
                 "psi": psi.descriptor, "lam": lam.descriptor, "N": N})


# ---------------------------------------------------------------------------
# nonincreasing running means over step profiles
# ---------------------------------------------------------------------------


def verify_decreasing(mean: MeanSpec, f: StepFunction,
                      grid: Sequence[Number], tol: float = 1e-9) -> CheckReport:
    """Running means u -> mean of f over (0, u] are nonincreasing.

    Claimed for monotone means over nonincreasing profiles; refuses
    profiles that are not nonincreasing instead of reporting on them.
    """
    if not f.is_nonincreasing():
        raise _hardy.HypothesisViolation("profile is not nonincreasing")
    pts = list(grid)
    if len(pts) < 2:
        raise ValueError("need at least two grid points")
    last = pts[0]
    if not last > 0:
        raise ValueError("grid points must be positive")
    for u in pts[1:]:
        if not u > last:
            raise ValueError("grid points must be strictly increasing")
        last = u
    values = [interval_mean(mean, f, 0, u) for u in pts]
    margin = math.inf
    worst = 0
    for i in range(len(values) - 1):
        slack = values[i] - values[i + 1]
        if slack < margin:
            margin, worst = slack, i
    ok = margin >= -tol
    return CheckReport(
        check="decreasing", passed=ok, outcome="pass" if ok else "fail",
        instances=len(pts) - 1, margin=margin,
        witness={"u_left": pts[worst], "u_right": pts[worst + 1],
                 "value_left": values[worst], "value_right": values[worst + 1]},
        details={"mean": mean.name, "grid": [float(u) for u in pts],
                 "values": values})


# ---------------------------------------------------------------------------
# lower-semicontinuity example table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LscReport:
    """Constants of the bumped dyadic family against the dyadic baseline.

    rows pair each bump position k with the constant of the weights whose
    k-th term was raised to 1. The family converges pointwise to the
    plain dyadic weights while the constants converge to baseline + 1/2,
    so the limit constant overshoots the constant of the limit: exactly
    the one-sided (lower semicontinuous) behaviour. Early bump positions
    may undershoot the baseline (k=1 does); dip_positions records them.
    """

    rows: Tuple[Tuple[int, float], ...]
    baseline: float
    limit_value: float
    N: int

    @property
    def converged(self) -> bool:
        return abs(self.rows[-1][1] - self.limit_value) <= 1e-3

    @property
    def dip_positions(self) -> Tuple[int, ...]:
        return tuple(k for k, v in self.rows if v < self.baseline)

    @property
    def tail_min(self) -> float:
        tail = [v for k, v in self.rows if k >= 2]
        return min(tail) if tail else math.inf

    def to_json(self) -> dict:
        return {
            "rows": [{"k": k, "value": v} for k, v in self.rows],
            "baseline": self.baseline,
            "limit_value": self.limit_value,
            "N": self.N,
            "converged": self.converged,
            "dip_positions": list(self.dip_positions),
        }

    def csv_rows(self) -> List[List[object]]:
        out: List[List[object]] = [["k", "value"]]
        out.extend([k, repr(v)] for k, v in self.rows)
        return out


def lsc_example_table(kmax: int, N: int = 200) -> LscReport:
    """Arithmetic constants of perturbed-dyadic weights for k = 1..kmax."""
    if kmax < 1:
        raise ValueError("need kmax >= 1")
    if N < kmax + 8:
        raise ValueError("N must exceed kmax by a safe truncation margin")
    base = _hardy.arithmetic_hardy(make_sequence("dyadic"), N).value
    rows = []
    for k in range(1, kmax + 1):
        seq = make_sequence(f"perturbed-dyadic:{k}")
        rows.append((k, _hardy.arithmetic_hardy(seq, N).value))
    return LscReport(rows=tuple(rows), baseline=base,
                     limit_value=base + 0.5, N=N)


# ---------------------------------------------------------------------------
# sup-at-ones cap sweep
# ---------------------------------------------------------------------------


def mu1_sweep(mean: MeanSpec, trials: int = 50, N: int = 256, seed: int = 0, *,
              cap: Optional[float] = None, tol: float = 1e-3,
              config: OptimizerConfig = OptimizerConfig()) -> CheckReport:
    """No random rational weights beat the unweighted constant.

    Runs the finite-section search over random rational weight sequences
    and asserts every bound stays below cap + tol. cap defaults to the
    closed-form constant of the power-mean order and must be given for
    other families. margin is the minimum of cap + tol - value.
    """
    if trials < 1:
        raise ValueError("need trials >= 1")
    if cap is None:
        if mean.family != "power":
            raise ValueError("no closed-form cap for this mean family; pass cap=")
        cap = _hardy.copson_constant(float(mean.params))
    margin = math.inf
    witness = None
    for i in range(trials):
        lam = random_rational_sequence(seed * 1_000_003 + i)
        est = _hardy.finite_lower_bound(mean, lam, N, config)
        slack = cap + tol - est.value
        if slack < margin:
            margin = slack
            witness = {"weights": lam.descriptor, "value": est.value,
                       "trial": i}
    ok = margin >= 0
    return CheckReport(
        check="mu1-sweep", passed=ok, outcome="pass" if ok else "fail",
        instances=trials, margin=margin, witness=witness,
        details={"mean": mean.name, "cap": cap, "tol": tol, "N": N,
                 "seed": seed})
