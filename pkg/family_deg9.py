"""
🌳 Degree-9 family: composition of two monic cubics

    P(z) = Cbeta(Calpha(z))
    Calpha(z) = z^3 + alpha2 z^2 + alpha1 z + alpha0
    Cbeta(y)  = y^3 + beta2 y^2 + beta1 y + beta0

Forward map, cubic cascade solver, the six S-expressions, constraint
residuals, gauge-fixed recovery and the shift gauge itself.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from numeric_core import (
    DEFAULT_TOLERANCES,
    InvalidInputError,
    MonicPoly,
    RootSet,
    ToleranceConfig,
    ensure_finite,
    monic_from_full,
    overflow_guard,
    poly_compose,
    require_finite,
    require_residuals,
    solve_cubic,
)

logger = logging.getLogger(__name__)

DEGREE = 9
PARAM_NAMES9 = ("alpha0", "alpha1", "alpha2", "beta0", "beta1", "beta2")
# sources of each S-expression: single coefficients, then coefficient pairs
S_EXPRESSION_LABELS = ("c6", "c5", "c4", "c2c1", "c3c1", "c3c2")
CONSTRAINT_LABELS9 = S_EXPRESSION_LABELS[1:]


@dataclass(frozen=True)
class ParamSet9:
    alpha0: complex
    alpha1: complex
    alpha2: complex
    beta0: complex
    beta1: complex
    beta2: complex

    def __post_init__(self):
        for name in PARAM_NAMES9:
            object.__setattr__(self, name, ensure_finite(getattr(self, name), name))

    def as_dict(self) -> Dict[str, complex]:
        return {name: getattr(self, name) for name in PARAM_NAMES9}


@dataclass(frozen=True)
class CascadeTrace9:
    """``y[mu]`` solves Cbeta; ``z[lam][mu]`` solves Calpha(z) = y[mu]."""

    y: Tuple[complex, complex, complex]
    z: Tuple[Tuple[complex, complex, complex], ...]


@dataclass(frozen=True)
class SExpressions:
    """Six expressions that all equal 3*alpha0 + beta2 on the family.

    ``values[k]`` is None when its denominator is too small to divide by.
    """

    values: Tuple[Optional[complex], ...]
    numerators: Tuple[complex, ...]
    denominators: Tuple[complex, ...]

    @property
    def determinate(self) -> Dict[str, complex]:
        return {
            label: value
            for label, value in zip(S_EXPRESSION_LABELS, self.values)
            if value is not None
        }


@dataclass(frozen=True)
class Diagnosis9:
    in_family: bool
    constraint_residuals: Tuple[float, float, float, float, float]
    recovered: Optional[ParamSet9]
    gauge_alpha0: complex
    round_trip_error: float


def _require_degree(c: MonicPoly) -> None:
    if c.degree != DEGREE:
        raise InvalidInputError(f"degree-9 family needs a degree-9 polynomial, got degree {c.degree}")


def forward9(p: ParamSet9) -> MonicPoly:
    c_alpha = (p.alpha0, p.alpha1, p.alpha2, 1.0)
    c_beta = (p.beta0, p.beta1, p.beta2, 1.0)
    return monic_from_full(poly_compose(c_beta, c_alpha), "forward9")


def solve9(
    p: ParamSet9, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> Tuple[RootSet, CascadeTrace9]:
    poly = forward9(p)
    ys = solve_cubic(p.beta2, p.beta1, p.beta0, cfg)
    per_y = [solve_cubic(p.alpha2, p.alpha1, p.alpha0 - y, cfg) for y in ys]
    trace = CascadeTrace9(
        y=ys,
        z=tuple(tuple(per_y[mu][lam] for mu in range(3)) for lam in range(3)),
    )
    roots = [z for triple in per_y for z in triple]
    require_residuals(poly, roots, cfg, "solve9")
    return RootSet(tuple(roots)), trace


def _leading_params(c: MonicPoly) -> Tuple[complex, complex]:
    """alpha2 and alpha1 are fixed by c8 and c7 alone."""
    c7, c8 = c.coeffs[7], c.coeffs[8]
    return c8 / 3, (3 * c7 - c8 ** 2) / 9


def _s_terms(c: MonicPoly):
    """(numerator, denominator, numerator monomials) for each S-expression."""
    c0, c1, c2, c3, c4, c5, c6, _, _ = c.coeffs
    with overflow_guard("S-expressions"):
        a2, a1 = _leading_params(c)
        terms = (
            (c6 - a2 * (6 * a1 + a2 ** 2), 1.0 + 0j, (c6, 6 * a1 * a2, a2 ** 3)),
            (c5 - 3 * a1 * (a1 + a2 ** 2), 2 * a2, (c5, 3 * a1 * (a1 + a2 ** 2))),
            (c4 - 3 * a1 ** 2 * a2, 2 * a1 + a2 ** 2, (c4, 3 * a1 ** 2 * a2)),
            (c2 * a1 - c1 * a2, a1 ** 3, (c2 * a1, c1 * a2)),
            (c3 * a1 - c1 - a1 ** 4, 2 * a1 ** 2 * a2, (c3 * a1, c1, a1 ** 4)),
            (c3 * a2 - c2 - a1 ** 3 * a2, a1 * (2 * a2 ** 2 - a1), (c3 * a2, c2, a1 ** 3 * a2)),
        )
    for num, den, monomials in terms:
        require_finite((num, den) + monomials, "S-expressions")
    return terms


def s_expressions(c: MonicPoly, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SExpressions:
    """Evaluate the six S-expressions; near-zero denominators give None.

    An entry is indeterminate when |den| < denom_floor * (1 + |num|).
    """
    _require_degree(c)
    values, nums, dens = [], [], []
    for num, den, _ in _s_terms(c):
        nums.append(num)
        dens.append(den)
        if abs(den) < cfg.denom_floor * (1.0 + abs(num)):
            values.append(None)
        else:
            values.append(num / den)
    return SExpressions(tuple(values), tuple(nums), tuple(dens))


@dataclass(frozen=True)
class Relation9:
    """Cross-multiplied relation numerator - S * denominator."""

    label: str
    raw: complex
    scale: float

    @property
    def residual(self) -> float:
        return abs(self.raw) / self.scale


def relations9(c: MonicPoly) -> Tuple[Relation9, ...]:
    """The five relations tying each S-expression to the c6 one, unscaled.

    Only four are independent: the c2c1 relation equals
    alpha2 * (c3c1 relation) - alpha1 * (c3c2 relation) identically.
    """
    _require_degree(c)
    terms = _s_terms(c)
    s_value = terms[0][0]
    relations = []
    for label, (num, den, monomials) in zip(CONSTRAINT_LABELS9, terms[1:]):
        product = s_value * den
        scale = max(1.0, abs(product), max(abs(m) for m in monomials))
        require_finite((num - product, scale), "relations9")
        relations.append(Relation9(label, num - product, scale))
    return tuple(relations)


def constraints9(c: MonicPoly) -> Tuple[float, float, float, float, float]:
    """Scaled residuals of the five cross-multiplied relations."""
    return tuple(r.residual for r in relations9(c))


def recover9(
    c: MonicPoly, gauge_alpha0: complex = 0, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> ParamSet9:
    """Parameters reproducing c with alpha0 fixed to the gauge value.

    beta2 comes from the c6 S-expression, beta1 from the c3 identity and
    beta0 from the c0 identity, each linear in its unknown once alpha0 is
    fixed, so no data-dependent division happens.
    """
    _require_degree(c)
    t = ensure_finite(gauge_alpha0, "gauge_alpha0")
    c0, c3, c6 = c.coeffs[0], c.coeffs[3], c.coeffs[6]
    with overflow_guard("recover9"):
        alpha2, alpha1 = _leading_params(c)

    if t != 0 and abs(2 * (t + alpha1 * alpha2)) < cfg.denom_floor:
        logger.warning(
            f"⚠️ gauge alpha0={t!r} makes the c3 coefficient of beta2 vanish; "
            f"falling back to alpha0=0"
        )
        t = 0j

    with overflow_guard("recover9"):
        s_value = c6 - alpha2 * (6 * alpha1 + alpha2 ** 2)
        beta2 = s_value - 3 * t
        beta1 = c3 - 3 * t * (t + 2 * alpha1 * alpha2) - 2 * beta2 * (t + alpha1 * alpha2) - alpha1 ** 3
        beta0 = c0 - t * (beta1 + t * (t + beta2))
    require_finite((alpha1, alpha2, beta0, beta1, beta2), "recover9")
    return ParamSet9(t, alpha1, alpha2, beta0, beta1, beta2)


def shift_gauge9(p: ParamSet9, t: complex) -> ParamSet9:
    """Equivalent parameters with alpha0 shifted by t.

    Calpha gains +t and Cbeta is re-expanded about y - t, so
    forward9(shift_gauge9(p, t)) == forward9(p).
    """
    t = ensure_finite(t, "t")
    with overflow_guard("shift_gauge9"):
        shifted = (
            p.alpha0 + t,
            -(t ** 3) + p.beta2 * t ** 2 - p.beta1 * t + p.beta0,
            3 * t ** 2 - 2 * p.beta2 * t + p.beta1,
            p.beta2 - 3 * t,
        )
    require_finite(shifted, "shift_gauge9")
    alpha0, beta0, beta1, beta2 = shifted
    return ParamSet9(alpha0, p.alpha1, p.alpha2, beta0, beta1, beta2)


def round_trip_error(c: MonicPoly, rebuilt: MonicPoly) -> float:
    return max(abs(x - y) for x, y in zip(rebuilt.coeffs, c.coeffs)) / c.coeff_scale


def detect9(
    c: MonicPoly, cfg: ToleranceConfig = DEFAULT_TOLERANCES, gauge_alpha0: complex = 0
) -> Diagnosis9:
    residuals = constraints9(c)
    candidate = recover9(c, gauge_alpha0, cfg)
    rt_error = round_trip_error(c, forward9(candidate))
    in_family = max(residuals) <= cfg.rel_residual and rt_error <= cfg.rel_residual
    logger.debug(
        f"detect9: residuals={['%.2e' % r for r in residuals]} round_trip={rt_error:.2e} "
        f"in_family={in_family}"
    )
    return Diagnosis9(
        in_family=in_family,
        constraint_residuals=residuals,
        recovered=candidate if in_family else None,
        gauge_alpha0=candidate.alpha0,
        round_trip_error=rt_error,
    )


def closed_form_coefficients9(p: ParamSet9) -> Tuple[complex, ...]:
    """c0..c8 from the hand-expanded coefficient formulas."""
    a0, a1, a2, b0, b1, b2 = (p.alpha0, p.alpha1, p.alpha2, p.beta0, p.beta1, p.beta2)
    return (
        a0 * (b1 + a0 * (a0 + b2)) + b0,
        a0 * a1 * (3 * a0 + 2 * b2) + a1 * b1,
        3 * a0 * (a1 ** 2 + a0 * a2) + b2 * (a1 ** 2 + 2 * a0 * a2) + a2 * b1,
        3 * a0 * (a0 + 2 * a1 * a2) + 2 * b2 * (a0 + a1 * a2) + a1 ** 3 + b1,
        3 * a0 * (2 * a1 + a2 ** 2) + 3 * a1 ** 2 * a2 + (2 * a1 + a2 ** 2) * b2,
        3 * a1 * (a1 + a2 ** 2) + 2 * a2 * (3 * a0 + b2),
        3 * a0 + a2 * (6 * a1 + a2 ** 2) + b2,
        3 * (a1 + a2 ** 2),
        3 * a2,
    )


def cross_check9(p: ParamSet9) -> Tuple[float, ...]:
    """Relative deviation of each closed-form coefficient from the convolution."""
    composed = forward9(p).coeffs
    with overflow_guard("cross_check9"):
        closed = closed_form_coefficients9(p)
    deviations = tuple(abs(x - y) / max(1.0, abs(y)) for x, y in zip(closed, composed))
    require_finite(deviations, "cross_check9")
    return deviations


def inverse_formula_check9(
    c: MonicPoly, p: ParamSet9, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> Dict[str, Optional[float]]:
    """Check the explicit inverse formulas against a representation p of c.

    Each formula predicts one parameter from c and the others; the result
    maps the predicted parameter to its relative deviation from p, or None
    when the formula's denominator is below denom_floor. ``beta2_printed``
    uses the commonly printed alpha0 - 2*alpha1*alpha2 factor; the
    expansion of the c3 identity gives alpha0 + 2*alpha1*alpha2, and the
    two agree only at alpha0 == 0.
    """
    _require_degree(c)
    c0, c1, _, c3, c4 = c.coeffs[:5]
    a0, a1, a2, b0, b1, b2 = (p.alpha0, p.alpha1, p.alpha2, p.beta0, p.beta1, p.beta2)

    def deviation(num, den, actual):
        if abs(den) < cfg.denom_floor:
            return None
        return abs(num / den - actual) / max(1.0, abs(actual))

    with overflow_guard("inverse_formula_check9"):
        alpha0_den = 3 * (2 * a1 + a2 ** 2)
        beta2_den = 2 * (a0 + a1 * a2)
        checks = {
            "alpha0": deviation(c4 - 3 * a1 ** 2 * a2 - b2 * alpha0_den / 3, alpha0_den, a0),
            "beta2": deviation(c3 - 3 * a0 * (a0 + 2 * a1 * a2) - a1 ** 3 - b1, beta2_den, b2),
            "beta2_printed": deviation(
                c3 - 3 * a0 * (a0 - 2 * a1 * a2) - a1 ** 3 - b1, beta2_den, b2
            ),
            "beta1": deviation(c1 - a0 * a1 * (3 * a0 + 2 * b2), a1, b1),
            "beta0": deviation(c0 - a0 * (a0 ** 2 + a0 * b2 + b1), 1.0, b0),
        }
    require_finite([v for v in checks.values() if v is not None], "inverse_formula_check9")
    return checks
