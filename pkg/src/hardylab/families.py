"""Concrete mean families.

Power means over the full extended order range [-inf, +inf] (min,
geometric, arithmetic, max as special orders) and quasi-arithmetic means
built from forward/inverse generator pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .kernel import MeanDomainError, MeanFlags, MeanSpec, WeightVector, _validate_points
from .scalars import all_exact, format_number, parse_number

# below this magnitude an order behaves as 0 (geometric), above the upper
# cutoff as +/-inf (max/min); in between, sums go through shifted
# exponentials so large orders cannot overflow
GEOMETRIC_ORDER_CUTOFF = 1e-8
EXTREME_ORDER_CUTOFF = 1e8


def _normalized_weights(w) -> list:
    """Weights scaled to unit total, exactly in rational mode so that
    rescaling the weight vector cancels exactly."""
    entries = WeightVector.of(w).entries
    total = sum(entries)
    if all_exact(entries):
        return [float(Fraction(e) / total) for e in entries]
    ft = float(total)
    return [float(e) / ft for e in entries]


def power_mean(p: float, x, w) -> float:
    """Weighted power mean of order p at points x with weights w.

    Orders -inf/+inf give the min/max, order 0 the geometric mean. The
    result is clamped into [min x, max x]; the clamp only ever corrects
    float rounding, since containment is guaranteed mathematically.
    """
    xs = _validate_points(x)
    nw = _normalized_weights(w)
    if len(xs) != len(nw):
        raise ValueError(f"length mismatch: {len(xs)} points vs {len(nw)} weights")
    p = float(p)
    if math.isnan(p):
        raise MeanDomainError("power order must not be NaN")
    lo, hi = min(xs), max(xs)
    if lo == hi:
        return lo
    if p > EXTREME_ORDER_CUTOFF:
        return hi
    if p < -EXTREME_ORDER_CUTOFF:
        return lo
    if abs(p) < GEOMETRIC_ORDER_CUTOFF:  # covers p == 0
        out = math.exp(sum(nwi * math.log(v) for nwi, v in zip(nw, xs)))
    elif p == 1.0:
        out = sum(nwi * v for nwi, v in zip(nw, xs))
    else:
        z = [p * math.log(v) for v in xs]
        zmax = max(z)
        s = sum(nwi * math.exp(zi - zmax) for nwi, zi in zip(nw, z))
        out = math.exp((zmax + math.log(s)) / p)
    return min(hi, max(lo, out))


def power(p: float, flags: Optional[MeanFlags] = None) -> MeanSpec:
    """MeanSpec for the order-p power mean.

    Default flags: symmetric, monotone, homogeneous; concave exactly for
    p <= 1; continuous in the weights only for finite orders (min/max jump
    when a new extremum enters with arbitrarily small weight). An explicit
    `flags` argument overrides the defaults, e.g. to plant a wrong claim
    for the axiom checker to find.
    """
    p = float(p)
    if math.isnan(p):
        raise MeanDomainError("power order must not be NaN")
    if flags is None:
        flags = MeanFlags(
            symmetric=True,
            monotone=True,
            concave=(p <= 1),
            homogeneous=True,
            continuous_in_weights=math.isfinite(p),
        )
    return MeanSpec(
        family="power",
        params=p,
        flags=flags,
        fn=lambda xs, ws: power_mean(p, xs, ws),
        name=f"power:{format_number(p)}",
    )


# ---------------------------------------------------------------------------
# quasi-arithmetic means
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorHandle:
    """Strictly monotone generator and its inverse; both should accept
    scalars (numpy arrays too, for the fast estimation paths)."""

    name: str
    forward: Callable
    inverse: Callable


def make_generator(name: str, forward: Callable, inverse: Callable,
                   sample: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 7.5),
                   tol: float = 1e-9) -> GeneratorHandle:
    """Pair a generator with its inverse, validating the round trip on
    sample points."""
    for t in sample:
        with np.errstate(all="ignore"):
            back = float(inverse(forward(t)))
        # negated form so NaN round trips count as failures too
        if not (abs(back - t) <= tol * max(1.0, abs(t))):
            raise ValueError(f"inverse fails to invert forward at t={t}: got {back}")
    return GeneratorHandle(name, forward, inverse)


_BUILTIN_GENERATORS = {
    "log": (np.log, np.exp),
    "identity": (lambda t: t, lambda t: t),
    "sqrt": (np.sqrt, np.square),
}


def builtin_generator(name: str) -> GeneratorHandle:
    try:
        fwd, inv = _BUILTIN_GENERATORS[name]
    except KeyError:
        known = ", ".join(sorted(_BUILTIN_GENERATORS))
        raise ValueError(f"unknown generator {name!r}; built-ins: {known}") from None
    return GeneratorHandle(name, fwd, inv)


def quasiarithmetic_mean(gen: GeneratorHandle, x, w) -> float:
    """Quasi-arithmetic mean: inverse(sum w_i * forward(x_i) / sum w).

    The result is not clamped, so a broken generator stays visible to the
    mean-value check.
    """
    xs = _validate_points(x)
    nw = _normalized_weights(w)
    if len(xs) != len(nw):
        raise ValueError(f"length mismatch: {len(xs)} points vs {len(nw)} weights")
    if len(xs) == 1:
        return xs[0]
    try:
        s = sum(nwi * float(gen.forward(v)) for nwi, v in zip(nw, xs))
        out = float(gen.inverse(s))
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise MeanDomainError(f"generator {gen.name!r} failed on {xs}: {exc}") from exc
    if not math.isfinite(out):
        raise MeanDomainError(f"generator {gen.name!r} produced non-finite value on {xs}")
    return out


# generators equivalent to a power mean, for default flag derivation
_GENERATOR_ORDER = {"log": 0.0, "identity": 1.0, "sqrt": 0.5}


def quasiarithmetic(gen: GeneratorHandle, flags: Optional[MeanFlags] = None) -> MeanSpec:
    """MeanSpec for the quasi-arithmetic mean of a generator.

    Built-in generators that reproduce a power mean inherit that mean's
    flags; unknown generators default to symmetric+monotone only (flags
    are user claims, verified empirically by check_axioms).
    """
    if flags is None:
        order = _GENERATOR_ORDER.get(gen.name)
        if order is not None:
            flags = MeanFlags(symmetric=True, monotone=True,
                              concave=(order <= 1), homogeneous=True)
        else:
            flags = MeanFlags(symmetric=True, monotone=True)
    return MeanSpec(
        family="quasiarithmetic",
        params=gen,
        flags=flags,
        fn=lambda xs, ws: quasiarithmetic_mean(gen, xs, ws),
        name=f"quasiarithmetic:{gen.name}",
    )


def parse_mean(text: str) -> MeanSpec:
    """Parse a mean descriptor.

    Forms: "power:P" with P a number or +/-inf (e.g. "power:0.5",
    "power:-inf"), "quasiarithmetic:NAME" with a built-in generator name,
    and the alias "arithmetic" for power:1.
    """
    token = text.strip()
    head, sep, arg = token.partition(":")
    if head == "arithmetic" and not sep:
        return power(1.0)
    if head == "power" and sep:
        try:
            return power(float(parse_number(arg)))
        except ValueError:
            raise ValueError(f"bad power order {arg!r} in {text!r}") from None
    if head == "quasiarithmetic" and sep:
        return quasiarithmetic(builtin_generator(arg))
    raise ValueError(
        f"unknown mean descriptor {text!r}; expected 'power:P', "
        "'quasiarithmetic:NAME', or 'arithmetic'")
