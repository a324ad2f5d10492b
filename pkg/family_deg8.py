"""
🌲 Degree-8 family: triple composition of monic quadratics

    P(z) = Qgamma(Qbeta(Qalpha(z)))
    Qalpha(z) = z^2 + alpha1 z + alpha0
    Qbeta(y)  = y^2 + beta1 y + beta0
    Qgamma(x) = x^2 + gamma1 x + gamma0

Forward map, cascade solver, membership detector and parameter recovery.
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
    solve_quadratic,
)

logger = logging.getLogger(__name__)

DEGREE = 8
PARAM_NAMES8 = ("alpha0", "alpha1", "beta0", "beta1", "gamma0", "gamma1")
# each constraint pins the coefficient it is named after
CONSTRAINT_LABELS8 = ("c5", "c3", "c2", "c1")


@dataclass(frozen=True)
class ParamSet8:
    alpha0: complex
    alpha1: complex
    beta0: complex
    beta1: complex
    gamma0: complex
    gamma1: complex

    def __post_init__(self):
        for name in PARAM_NAMES8:
            object.__setattr__(self, name, ensure_finite(getattr(self, name), name))

    def as_dict(self) -> Dict[str, complex]:
        return {name: getattr(self, name) for name in PARAM_NAMES8}


@dataclass(frozen=True)
class CascadeTrace8:
    """Intermediate roots of the cascade.

    ``x[nu]`` solves Qgamma, ``y[mu][nu]`` solves Qbeta(y) = x[nu] and
    ``z[lam][mu][nu]`` solves Qalpha(z) = y[mu][nu].
    """

    x: Tuple[complex, complex]
    y: Tuple[Tuple[complex, complex], Tuple[complex, complex]]
    z: Tuple[
        Tuple[Tuple[complex, complex], Tuple[complex, complex]],
        Tuple[Tuple[complex, complex], Tuple[complex, complex]],
    ]


@dataclass(frozen=True)
class Diagnosis8:
    in_family: bool
    constraint_residuals: Tuple[float, float, float, float]
    recovered: Optional[ParamSet8]
    gauge_alpha0: complex
    gauge_beta0: complex
    round_trip_error: float


def _require_degree(c: MonicPoly) -> None:
    if c.degree != DEGREE:
        raise InvalidInputError(f"degree-8 family needs a degree-8 polynomial, got degree {c.degree}")


def forward8(p: ParamSet8) -> MonicPoly:
    """Expand the composition by coefficient convolution."""
    q_alpha = (p.alpha0, p.alpha1, 1.0)
    q_beta = (p.beta0, p.beta1, 1.0)
    q_gamma = (p.gamma0, p.gamma1, 1.0)
    inner = poly_compose(q_beta, q_alpha)
    return monic_from_full(poly_compose(q_gamma, inner), "forward8")


def solve8(
    p: ParamSet8, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> Tuple[RootSet, CascadeTrace8]:
    """Roots of forward8(p) through three layers of quadratics."""
    poly = forward8(p)
    xs = solve_quadratic(p.gamma1, p.gamma0)
    # ys[nu][mu], zs[nu][mu][lam]
    ys = [solve_quadratic(p.beta1, p.beta0 - x) for x in xs]
    zs = [[solve_quadratic(p.alpha1, p.alpha0 - y) for y in ys_nu] for ys_nu in ys]

    trace = CascadeTrace8(
        x=xs,
        y=tuple(tuple(ys[nu][mu] for nu in range(2)) for mu in range(2)),
        z=tuple(
            tuple(tuple(zs[nu][mu][lam] for nu in range(2)) for mu in range(2))
            for lam in range(2)
        ),
    )
    roots = [z for per_x in zs for per_y in per_x for z in per_y]
    require_residuals(poly, roots, cfg, "solve8")
    return RootSet(tuple(roots)), trace


def _constraint_terms8(c: MonicPoly):
    """(lhs, rhs, monomials) per constraint, in CONSTRAINT_LABELS8 order."""
    c0, c1, c2, c3, c4, c5, c6, c7 = c.coeffs
    return (
        (
            c5,
            c7 * (24 * c6 - 7 * c7 ** 2) / 32,
            (c5, 3 * c7 * c6 / 4, 7 * c7 ** 3 / 32),
        ),
        (
            c3,
            c7 * (128 * c4 - 20 * c6 * c7 ** 2 + 7 * c7 ** 4) / 256,
            (c3, c7 * c4 / 2, 5 * c6 * c7 ** 3 / 64, 7 * c7 ** 5 / 256),
        ),
        (
            c2,
            (
                512 * c4 * (4 * c6 - c7 ** 2)
                - 64 * (8 * c6 - 3 * c7 ** 2) * c6 ** 2
                + (16 * c6 - 7 * c7 ** 2) * c7 ** 4
            )
            / 4096,
            (
                c2,
                c4 * c6 / 2,
                c4 * c7 ** 2 / 8,
                c6 ** 3 / 8,
                3 * c7 ** 2 * c6 ** 2 / 64,
                c6 * c7 ** 4 / 256,
                7 * c7 ** 6 / 4096,
            ),
        ),
        (
            c1,
            c7 * (8 * c6 - 3 * c7 ** 2) * (32 * c4 - 8 * c6 ** 2 + c7 ** 4) / 2048,
            (
                c1,
                c4 * c6 * c7 / 8,
                c6 ** 3 * c7 / 32,
                c6 * c7 ** 5 / 256,
                3 * c4 * c7 ** 3 / 64,
                3 * c6 ** 2 * c7 ** 3 / 256,
                3 * c7 ** 7 / 2048,
            ),
        ),
    )


def constraints8(c: MonicPoly) -> Tuple[float, float, float, float]:
    """Relative residuals of the four polynomial identities every member satisfies.

    Each residual is |lhs - rhs| divided by max(1, largest monomial magnitude
    in the identity), so a member gives values at rounding level whatever
    the size of its coefficients.
    """
    _require_degree(c)
    residuals = []
    with overflow_guard("constraints8"):
        terms = _constraint_terms8(c)
    for lhs, rhs, monomials in terms:
        require_finite((lhs, rhs) + monomials, "constraints8")
        scale = max(1.0, max(abs(m) for m in monomials))
        residuals.append(abs(lhs - rhs) / scale)
    require_finite(residuals, "constraints8")
    return tuple(residuals)


def recover8(
    c: MonicPoly, gauge_alpha0: complex = 0, gauge_beta0: complex = 0
) -> ParamSet8:
    """Parameters reproducing c, with alpha0 and beta0 fixed by the caller.

    Members have a two-parameter family of representations; shifting z-side
    and y-side constants changes nothing about the polynomial, so alpha0 and
    beta0 are free and the remaining four follow from c7, c6, c4 and c0.
    """
    _require_degree(c)
    a0 = ensure_finite(gauge_alpha0, "gauge_alpha0")
    b0 = ensure_finite(gauge_beta0, "gauge_beta0")
    c0, _, _, _, c4, _, c6, c7 = c.coeffs

    with overflow_guard("recover8"):
        alpha1 = c7 / 4
        beta1 = -(32 * a0 - 8 * c6 + 3 * c7 ** 2) / 16
        gamma1 = -a0 * c6 + 2 * (a0 ** 2 - b0) + c4 + (-8 * c6 ** 2 + 12 * a0 * c7 ** 2 + c7 ** 4) / 32
        gamma0 = c0 - (
            (a0 * (8 * c6 - 3 * c7 ** 2) - 16 * (a0 ** 2 - b0))
            * (c7 ** 4 - 8 * c6 ** 2 + 32 * c4 - 2 * a0 * (8 * c6 - 3 * c7 ** 2) + 32 * (a0 ** 2 - b0))
            / 512
        )
    require_finite((alpha1, beta1, gamma0, gamma1), "recover8")
    return ParamSet8(a0, alpha1, b0, beta1, gamma0, gamma1)


def round_trip_error(c: MonicPoly, rebuilt: MonicPoly) -> float:
    """max|c'_m - c_m| / max(1, max|c_m|)."""
    return max(abs(x - y) for x, y in zip(rebuilt.coeffs, c.coeffs)) / c.coeff_scale


def detect8(
    c: MonicPoly,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    gauge_alpha0: complex = 0,
    gauge_beta0: complex = 0,
) -> Diagnosis8:
    """Decide membership and, for members, return recovered parameters."""
    residuals = constraints8(c)
    candidate = recover8(c, gauge_alpha0, gauge_beta0)
    rt_error = round_trip_error(c, forward8(candidate))
    in_family = max(residuals) <= cfg.rel_residual and rt_error <= cfg.rel_residual
    logger.debug(
        f"detect8: residuals={['%.2e' % r for r in residuals]} round_trip={rt_error:.2e} "
        f"in_family={in_family}"
    )
    return Diagnosis8(
        in_family=in_family,
        constraint_residuals=residuals,
        recovered=candidate if in_family else None,
        gauge_alpha0=candidate.alpha0,
        gauge_beta0=candidate.beta0,
        round_trip_error=rt_error,
    )


def closed_form_coefficients8(p: ParamSet8, printed_c0: bool = False) -> Tuple[complex, ...]:
    """c0..c7 from the hand-expanded coefficient formulas.

    With ``printed_c0`` the constant term carries the commonly printed
    2*alpha0**2*beta1 bracket term; the expansion has 2*alpha0*beta1, and
    the two differ by 2*beta1*alpha0**3*(alpha0 - 1).
    """
    a0, a1, b0, b1, g0, g1 = (p.alpha0, p.alpha1, p.beta0, p.beta1, p.gamma0, p.gamma1)
    c7 = 4 * a1
    c6 = 4 * a0 + 6 * a1 ** 2 + 2 * b1
    c5 = 12 * a0 * a1 + 4 * a1 ** 3 + 6 * a1 * b1
    c4 = (
        6 * a0 * (a0 + 2 * a1 ** 2 + b1)
        + a1 ** 2 * (a1 ** 2 + 6 * b1)
        + 2 * b0
        + b1 ** 2
        + g1
    )
    c3 = 4 * a0 * a1 * (3 * a0 + a1 ** 2 + 3 * b1) + 2 * a1 * (
        2 * b0 + a1 ** 2 * b1 + b1 ** 2 + g1
    )
    c2 = (
        2 * a0 * (2 * a0 ** 2 + 3 * a0 * a1 ** 2 + 2 * b0 + 3 * (a0 + a1 ** 2) * b1 + b1 ** 2)
        + 2 * a1 ** 2 * b0
        + (2 * b0 + a1 ** 2 * b1) * b1
        + (2 * a0 + a1 ** 2 + b1) * g1
    )
    c1 = a1 * (
        2 * a0 * (2 * a0 ** 2 + 2 * b0 + (3 * a0 + b1) * b1)
        + 2 * b0 * b1
        + (2 * a0 + b1) * g1
    )
    cross = 2 * a0 ** 2 * b1 if printed_c0 else 2 * a0 * b1
    c0 = (
        a0 * (a0 ** 3 + a0 * (2 * b0 + cross + b1 ** 2) + 2 * b0 * b1 + (a0 + b1) * g1)
        + b0 * (b0 + g1)
        + g0
    )
    return (c0, c1, c2, c3, c4, c5, c6, c7)


@dataclass(frozen=True)
class FormulaCheck8:
    """Closed-form coefficients against the convolution expansion."""

    deviations: Tuple[float, ...]
    printed_c0_deviation: float
    printed_c0_excess: complex

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


def cross_check8(p: ParamSet8) -> FormulaCheck8:
    """Relative deviation per coefficient, plus the printed constant-term variant."""
    composed = forward8(p).coeffs
    with overflow_guard("cross_check8"):
        closed = closed_form_coefficients8(p)
        printed_c0 = closed_form_coefficients8(p, printed_c0=True)[0]
    deviations = tuple(abs(x - y) / max(1.0, abs(y)) for x, y in zip(closed, composed))
    excess = printed_c0 - composed[0]
    printed_dev = abs(excess) / max(1.0, abs(composed[0]))
    require_finite(deviations + (printed_dev,), "cross_check8")
    if printed_dev > DEFAULT_TOLERANCES.rel_residual:
        logger.info(
            f"printed constant-term formula deviates by {printed_dev:.3e} "
            f"(alpha0={p.alpha0:.4g}, beta1={p.beta1:.4g})"
        )
    return FormulaCheck8(deviations, printed_dev, excess)
