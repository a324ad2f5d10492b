"""
🔢 Numeric core for radical cascades
Complex scalar checks, closed-form quadratic/cubic solvers, Horner evaluation,
the Durand-Kerner oracle and root multiset matching.
"""

import cmath
import logging
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from dotenv import dotenv_values
from scipy.optimize import linear_sum_assignment

logger = logging.getLogger(__name__)


class CascadeError(Exception):
    """Base class for every error the cascade library raises on purpose."""


class InvalidInputError(CascadeError, ValueError):
    """Input rejected before any arithmetic was attempted."""


class NumericalFailureError(CascadeError, ArithmeticError):
    """A computation left the finite range or missed its residual bound."""

    def __init__(
        self,
        message: str,
        best_iterate: Optional[Iterable[complex]] = None,
        residual: Optional[float] = None,
        index: Optional[int] = None,
    ):
        super().__init__(message)
        self.best_iterate = tuple(best_iterate) if best_iterate is not None else None
        self.residual = residual
        self.index = index


# dotenv key -> (field, parser)
_CONFIG_KEYS = {
    "CASCADE_REL_RESIDUAL": ("rel_residual", float),
    "CASCADE_PAIRING_TOL": ("pairing_tol", float),
    "CASCADE_DENOM_FLOOR": ("denom_floor", float),
    "CASCADE_DK_MAX_ITERS": ("dk_max_iters", int),
    "CASCADE_DK_CONV_TOL": ("dk_conv_tol", float),
}


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances shared by the solvers, detectors and the oracle."""

    rel_residual: float = 1e-9
    pairing_tol: float = 1e-6
    denom_floor: float = 1e-12
    dk_max_iters: int = 500
    dk_conv_tol: float = 1e-13

    def __post_init__(self):
        for name in ("rel_residual", "pairing_tol", "denom_floor", "dk_conv_tol"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidInputError(f"{name} must be a real number, got {value!r}")
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be finite and > 0, got {value!r}")
        iters = self.dk_max_iters
        if isinstance(iters, bool) or not isinstance(iters, int) or iters < 1:
            raise InvalidInputError(f"dk_max_iters must be an integer >= 1, got {iters!r}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ToleranceConfig":
        """Build a config from CASCADE_* keys; missing or blank keys keep defaults."""
        kwargs = {}
        for key, (name, parse) in _CONFIG_KEYS.items():
            raw = mapping.get(key)
            if raw is None or str(raw).strip() == "":
                continue
            try:
                kwargs[name] = parse(str(raw).strip())
            except ValueError as e:
                raise InvalidInputError(f"{key}: cannot parse {raw!r}") from e
        return cls(**kwargs)

    @classmethod
    def from_env_file(cls, path: str) -> "ToleranceConfig":
        """Load tolerances from a dotenv file without touching os.environ."""
        if not os.path.isfile(path):
            raise InvalidInputError(f"config file not found: {path}")
        values = dotenv_values(path)
        logger.debug(f"Loaded {len(values)} keys from {path}")
        return cls.from_mapping(values)

    def with_overrides(self, **fields: Any) -> "ToleranceConfig":
        """Copy with the given fields replaced; None values are ignored."""
        return replace(self, **{k: v for k, v in fields.items() if v is not None})


DEFAULT_TOLERANCES = ToleranceConfig()


def ensure_finite(value: Any, name: str = "value") -> complex:
    """Coerce to complex and reject NaN/Inf components."""
    if isinstance(value, bool):
        raise InvalidInputError(f"{name} must be a number, got {value!r}")
    try:
        z = complex(value)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} must be a number, got {value!r}") from e
    if not cmath.isfinite(z):
        raise InvalidInputError(f"{name} must be finite, got {z!r}")
    return z


def canonical_order(values: Iterable[complex]) -> Tuple[complex, ...]:
    """Sort ascending by real part, ties by imaginary part."""
    return tuple(sorted((complex(v) for v in values), key=lambda v: (v.real, v.imag)))


@dataclass(frozen=True)
class MonicPoly:
    """z^N + c_{N-1} z^{N-1} + ... + c_0, coefficients stored lowest first."""

    degree: int
    coeffs: Tuple[complex, ...]

    def __post_init__(self):
        if isinstance(self.degree, bool) or not isinstance(self.degree, (int, np.integer)):
            raise InvalidInputError(f"degree must be an integer, got {self.degree!r}")
        if self.degree < 1:
            raise InvalidInputError(f"degree must be >= 1, got {self.degree}")
        coeffs = tuple(ensure_finite(c, f"c{m}") for m, c in enumerate(self.coeffs))
        if len(coeffs) != self.degree:
            raise InvalidInputError(
                f"expected {self.degree} coefficients for degree {self.degree}, got {len(coeffs)}"
            )
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex]) -> "MonicPoly":
        return cls(len(coeffs), tuple(coeffs))

    def highest_first(self) -> np.ndarray:
        """Full coefficient vector, leading 1 first (numpy.polyval order)."""
        return np.array((1.0,) + self.coeffs[::-1], dtype=complex)

    @property
    def coeff_scale(self) -> float:
        return max(1.0, max(abs(c) for c in self.coeffs))


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicity, always held in canonical order."""

    roots: Tuple[complex, ...]

    def __post_init__(self):
        roots = tuple(ensure_finite(r, "root") for r in self.roots)
        object.__setattr__(self, "roots", canonical_order(roots))

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)


@dataclass(frozen=True)
class RootPairing:
    """Outcome of matching two root multisets.

    ``pairs`` maps positions in the first set to positions in the second and
    is present only when every matched distance is within tolerance;
    ``max_distance`` is the bottleneck distance of the best assignment.
    """

    matched: bool
    pairs: Optional[Tuple[Tuple[int, int], ...]]
    max_distance: float


def require_finite(values: Sequence[complex], what: str) -> None:
    """Raise NumericalFailureError if any value is NaN or infinite."""
    if not all(cmath.isfinite(v) for v in values):
        raise NumericalFailureError(f"{what} produced a non-finite value", best_iterate=values)


@contextmanager
def overflow_guard(what: str):
    """Re-raise OverflowError (complex powers, int to float) as NumericalFailureError."""
    try:
        yield
    except OverflowError as e:
        raise NumericalFailureError(f"{what} overflowed: {e}") from e


def solve_quadratic(a1: complex, a0: complex) -> Tuple[complex, complex]:
    """Both roots of x^2 + a1 x + a0 = 0, larger-magnitude root first.

    The larger root uses the radical whose sign matches a1, the smaller one
    comes from the product of the roots, so no cancellation occurs.
    """
    a1 = ensure_finite(a1, "a1")
    a0 = ensure_finite(a0, "a0")
    radical = cmath.sqrt(a1 * a1 - 4.0 * a0)
    if (a1.conjugate() * radical).real < 0.0:
        radical = -radical
    big = -0.5 * (a1 + radical)
    if big == 0:
        # only reachable when a1 == a0 == 0
        return 0j, 0j
    roots = (big, a0 / big)
    require_finite(roots, "solve_quadratic")
    return roots


_OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
_OMEGA_BAR = _OMEGA.conjugate()


def _principal_cbrt(w: complex) -> complex:
    if w == 0:
        return 0j
    return w ** (1.0 / 3.0)


def solve_cubic(
    a2: complex, a1: complex, a0: complex, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> Tuple[complex, complex, complex]:
    """All three roots of x^3 + a2 x^2 + a1 x + a0 = 0 (Cardano, complex form).

    The cubic is depressed with x = y - a2/3 to y^3 + p y + q = 0; the Cardano
    radical with the larger magnitude gives u, the partner is v = -p/(3u), and
    the three roots are the rotations of (u, v) by the primitive cube roots of
    unity.
    """
    a2 = ensure_finite(a2, "a2")
    a1 = ensure_finite(a1, "a1")
    a0 = ensure_finite(a0, "a0")

    shift = a2 / 3.0
    p = a1 - a2 * shift
    q = a0 - shift * a1 + 2.0 * shift * shift * shift
    require_finite((p, q), "solve_cubic")

    half_q = -0.5 * q
    radical = cmath.sqrt(0.25 * q * q + p * p * p / 27.0)
    if (half_q.conjugate() * radical).real < 0.0:
        radical = -radical
    require_finite((half_q + radical,), "solve_cubic")
    with overflow_guard("solve_cubic"):
        u = _principal_cbrt(half_q + radical)
    # |u| below the floor means p and q both vanish to working precision
    v = 0j if abs(u) < cfg.denom_floor else -p / (3.0 * u)

    roots = (
        u + v - shift,
        _OMEGA * u + _OMEGA_BAR * v - shift,
        _OMEGA_BAR * u + _OMEGA * v - shift,
    )
    require_finite(roots, "solve_cubic")

    scale = max(1.0, abs(a2), abs(a1), abs(a0))
    for r in roots:
        with overflow_guard("solve_cubic"):
            residual = abs(((r + a2) * r + a1) * r + a0) / (scale * max(1.0, abs(r)) ** 3)
        if not math.isfinite(residual) or residual > cfg.rel_residual:
            raise NumericalFailureError(
                f"solve_cubic root {r!r} has scaled residual {residual:.3e}",
                best_iterate=roots,
                residual=residual,
            )
    return roots


def eval_poly(p: MonicPoly, z: complex) -> complex:
    """Horner evaluation of z^N + sum c_m z^m."""
    z = ensure_finite(z, "z")
    acc = 1.0 + 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    if not cmath.isfinite(acc):
        raise NumericalFailureError(f"eval_poly overflowed at z={z!r}", best_iterate=(z,))
    return acc


def residual_scale(p: MonicPoly, z: complex) -> float:
    """max(1, max|c_m|) * max(1, |z|)^N, the uniform root-acceptance scale."""
    with overflow_guard("residual_scale"):
        return p.coeff_scale * max(1.0, abs(z)) ** p.degree


def scaled_residual(p: MonicPoly, z: complex) -> float:
    return abs(eval_poly(p, z)) / residual_scale(p, z)


def verify_roots(p: MonicPoly, roots: Iterable[complex]) -> Tuple[float, ...]:
    """Scaled residual of every root, in the order given."""
    return tuple(scaled_residual(p, r) for r in roots)


def max_scaled_residual(p: MonicPoly, roots: Iterable[complex]) -> float:
    residuals = verify_roots(p, roots)
    return max(residuals) if residuals else 0.0


def require_residuals(
    p: MonicPoly, roots: Sequence[complex], cfg: ToleranceConfig, what: str
) -> float:
    """Raise NumericalFailureError unless every root meets rel_residual."""
    worst = max_scaled_residual(p, roots)
    if worst > cfg.rel_residual:
        raise NumericalFailureError(
            f"{what}: max scaled residual {worst:.3e} exceeds {cfg.rel_residual:.1e}",
            best_iterate=roots,
            residual=worst,
        )
    return worst


def poly_compose(outer: Sequence[complex], inner: Sequence[complex]) -> np.ndarray:
    """Coefficients (lowest first) of outer(inner(z)).

    Both arguments are full coefficient vectors, lowest degree first and
    including the leading coefficient. Horner substitution: each step
    convolves the running result with ``inner`` and adds the next outer
    coefficient.
    """
    inner_arr = np.asarray(inner, dtype=complex)
    result = np.array([outer[-1]], dtype=complex)
    for coeff in outer[-2::-1]:
        result = np.convolve(result, inner_arr)
        result[0] += coeff
    return result


def monic_from_full(full: np.ndarray, what: str) -> MonicPoly:
    """MonicPoly from a full lowest-first vector whose last entry is 1."""
    if not np.all(np.isfinite(full)):
        raise NumericalFailureError(f"{what} produced a non-finite coefficient")
    if full[-1] != 1:
        raise NumericalFailureError(f"{what} lost monicity: leading coefficient {full[-1]!r}")
    return MonicPoly(len(full) - 1, tuple(complex(c) for c in full[:-1]))


def poly_from_roots(roots: Sequence[complex]) -> MonicPoly:
    """Monic polynomial prod(z - r) for the given roots."""
    highest_first = np.poly(np.asarray(roots, dtype=complex)).astype(complex)
    return monic_from_full(highest_first[::-1], "poly_from_roots")


def min_root_separation(roots: Union[RootSet, Sequence[complex]]) -> float:
    """Smallest pairwise distance; infinity for fewer than two roots."""
    arr = np.asarray(tuple(roots), dtype=complex)
    if arr.size < 2:
        return math.inf
    dist = np.abs(arr[:, None] - arr[None, :])
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())


_DK_SEED = complex(0.4, 0.9)


def durand_kerner(p: MonicPoly, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> RootSet:
    """All roots of p by simultaneous Weierstrass iteration.

    Used as an independent oracle for the closed-form cascades: it knows
    nothing about the families and only sees coefficients.
    """
    n = p.degree
    coeffs = p.highest_first()
    radius = 1.0 + max(abs(c) for c in p.coeffs)
    roots = radius * _DK_SEED ** np.arange(n)
    best = roots.copy()
    converged = False
    iterations = 0

    with np.errstate(all="ignore"):
        for iterations in range(1, cfg.dk_max_iters + 1):
            diffs = roots[:, None] - roots[None, :]
            np.fill_diagonal(diffs, 1.0)
            denom = diffs.prod(axis=1)
            # coincident iterates: nudge instead of dividing by zero
            denom[denom == 0] = cfg.denom_floor
            step = np.polyval(coeffs, roots) / denom
            candidate = roots - step
            if not np.all(np.isfinite(candidate)):
                break
            roots = candidate
            best = roots.copy()
            if np.max(np.abs(step)) < cfg.dk_conv_tol * (1.0 + np.max(np.abs(roots))):
                converged = True
                break

    values = np.abs(np.polyval(coeffs, best))
    scales = p.coeff_scale * np.maximum(1.0, np.abs(best)) ** n
    worst = float(np.max(values / scales))
    if not math.isfinite(worst) or worst > cfg.rel_residual:
        raise NumericalFailureError(
            f"durand_kerner did not converge in {iterations} iterations "
            f"(max scaled residual {worst:.3e})",
            best_iterate=tuple(complex(r) for r in best),
            residual=worst,
        )
    if converged:
        logger.debug(f"durand_kerner converged in {iterations} iterations for degree {n}")
    else:
        logger.warning(
            f"⚠️ durand_kerner hit dk_max_iters={cfg.dk_max_iters} but meets the residual bound "
            f"({worst:.3e})"
        )
    return RootSet(tuple(complex(r) for r in best))


def _as_rootset(value: Union[RootSet, Sequence[complex]]) -> RootSet:
    return value if isinstance(value, RootSet) else RootSet(tuple(value))


def match_root_multisets(
    a: Union[RootSet, Sequence[complex]],
    b: Union[RootSet, Sequence[complex]],
    tol: float,
) -> RootPairing:
    """Bottleneck assignment between two root multisets.

    Finds the smallest distance threshold that still admits a perfect
    matching, then the minimum-sum assignment among edges under it. The
    pairing is returned only if its largest distance is within ``tol``.
    """
    a = _as_rootset(a)
    b = _as_rootset(b)
    if len(a) != len(b):
        raise InvalidInputError(f"root sets differ in size: {len(a)} vs {len(b)}")
    if not len(a):
        return RootPairing(True, (), 0.0)

    dist = np.abs(a.as_array()[:, None] - b.as_array()[None, :])
    thresholds = np.unique(dist)
    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        over = (dist > thresholds[mid]).astype(float)
        rows, cols = linear_sum_assignment(over)
        if over[rows, cols].sum() == 0:
            hi = mid
        else:
            lo = mid + 1

    bottleneck = thresholds[lo]
    penalty = float(dist.max()) * len(a) + 1.0
    rows, cols = linear_sum_assignment(np.where(dist <= bottleneck, dist, penalty))
    max_distance = float(dist[rows, cols].max())
    if max_distance <= tol:
        pairs = tuple((int(r), int(c)) for r, c in zip(rows, cols))
        return RootPairing(True, pairs, max_distance)
    return RootPairing(False, None, max_distance)
