"""Polynomials F driving the planar system xdot = y - F(x), ydot = -x.

Two flavors:

* :class:`CMonicPolynomial` — the certified class: monic of degree n, zero
  constant term, every other coefficient strictly below C in absolute value.
  All bound formulas and the inequality verifier require this flavor.
* :class:`RawPolynomial` — anything with real coefficients.  Accepted only by
  the dynamics/cycles test harness (classic odd-degree benchmark systems such
  as F = x^3 - x are too useful as integrator oracles to exclude), and
  refused everywhere a certified constant is computed.

Evaluation is nested (Horner) throughout and polymorphic over floats,
complexes, and numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "CMonicPolynomial",
    "RawPolynomial",
    "Polynomial",
    "GrowthMargins",
    "check_growth_properties",
    "random_c_monic",
]

Scalar = Union[float, complex, np.ndarray]


def _horner(coeffs_ascending: Sequence[float], x: Scalar) -> Scalar:
    """Evaluate sum(c_i x^i) by the nested scheme; dtype follows ``x``."""
    acc = x * 0
    for c in reversed(coeffs_ascending):
        acc = acc * x + c
    return acc


def _derivative(coeffs_ascending: Sequence[float]) -> tuple[float, ...]:
    if len(coeffs_ascending) <= 1:
        return (0.0,)
    return tuple(i * c for i, c in enumerate(coeffs_ascending) if i > 0)


class _EvalMixin:
    """Shared evaluation machinery; subclasses define coeffs_ascending."""

    coeffs_ascending: tuple[float, ...]

    def eval(self, x: Scalar) -> Scalar:
        """F(x) by Horner's scheme."""
        return _horner(self.coeffs_ascending, x)

    def eval_complex(self, z: complex) -> complex:
        """F(z); the identical nested scheme, so it agrees with eval on R."""
        return _horner(self.coeffs_ascending, complex(z))

    def derivative_coeffs(self) -> tuple[float, ...]:
        """Ascending coefficients of F'."""
        return _derivative(self.coeffs_ascending)

    def eval_deriv(self, x: Scalar) -> Scalar:
        """F'(x) by Horner's scheme."""
        return _horner(_derivative(self.coeffs_ascending), x)

    def __call__(self, x: Scalar) -> Scalar:
        return self.eval(x)

    def _pretty(self) -> str:
        terms = []
        for i in range(len(self.coeffs_ascending) - 1, -1, -1):
            c = self.coeffs_ascending[i]
            if c == 0:
                continue
            mag = abs(c)
            coef = "" if (mag == 1 and i > 0) else f"{mag:g}"
            if i == 0:
                body = coef
            elif i == 1:
                body = f"{coef}x"
            else:
                body = f"{coef}x^{i}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class CMonicPolynomial(_EvalMixin):
    """Monic degree-n polynomial, zero constant term, |a_i| < C for 1 <= i < n.

    ``coeffs`` lists a_1 ... a_{n-1} in ascending power order; the leading 1
    and the constant 0 are implicit so those two invariants cannot be broken
    by construction.  C >= 2 here (the growth properties below hold from 2);
    bound computations tighten this to C >= 4 via SystemParams.
    """

    n: int
    C: float
    coeffs: tuple[float, ...]
    paper_mode: bool = field(default=True, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"degree must be an even integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.C) and self.C >= 2):
            raise ValueError(f"coefficient bound C must be finite and >= 2, got {self.C}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) != self.n - 1:
            raise ValueError(
                f"need exactly n-1 = {self.n - 1} coefficients a_1..a_{{n-1}}, "
                f"got {len(self.coeffs)}"
            )
        for i, c in enumerate(self.coeffs, start=1):
            if not math.isfinite(c):
                raise ValueError(f"coefficient a_{i} is not finite: {c}")
            if abs(c) >= self.C:
                raise ValueError(
                    f"|a_{i}| = {abs(c)} violates the strict bound |a_i| < C = {self.C}"
                )

    @property
    def degree(self) -> int:
        return self.n

    @property
    def a1(self) -> float:
        return self.coeffs[0]

    @property
    def coeffs_ascending(self) -> tuple[float, ...]:  # type: ignore[override]
        return (0.0, *self.coeffs, 1.0)

    def tail(self, u: Scalar) -> Scalar:
        """sum_{i>=2} a_i u^{i-1} — F(u)/u minus the linear coefficient.

        This is the remainder the small-ball estimates control; evaluated as
        u * Horner(a_2..a_{n-1}, 1) so it is exact at u = 0.
        """
        return u * _horner((*self.coeffs[1:], 1.0), u)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "C": self.C, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CMonicPolynomial":
        return cls(n=int(d["n"]), C=float(d["C"]), coeffs=tuple(d["coeffs"]))

    def __str__(self) -> str:
        return self._pretty()


@dataclass(frozen=True)
class RawPolynomial(_EvalMixin):
    """Arbitrary real polynomial, ascending coefficients (constant term first).

    Dynamics-harness only: no growth certificate, so every bound or verifier
    entry point refuses it.
    """

    raw_coeffs: tuple[float, ...]
    paper_mode: bool = field(default=False, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.raw_coeffs)
        if not coeffs:
            coeffs = (0.0,)
        for c in coeffs:
            if not math.isfinite(c):
                raise ValueError(f"coefficient is not finite: {c}")
        object.__setattr__(self, "raw_coeffs", coeffs)

    @property
    def degree(self) -> int:
        for i in range(len(self.raw_coeffs) - 1, -1, -1):
            if self.raw_coeffs[i] != 0:
                return i
        return 0

    @property
    def coeffs_ascending(self) -> tuple[float, ...]:  # type: ignore[override]
        return self.raw_coeffs

    def to_dict(self) -> dict[str, Any]:
        return {"raw_coeffs": list(self.raw_coeffs)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RawPolynomial":
        return cls(raw_coeffs=tuple(d["raw_coeffs"]))

    def __str__(self) -> str:
        return self._pretty()


Polynomial = Union[CMonicPolynomial, RawPolynomial]


def polynomial_from_dict(d: dict[str, Any]) -> Polynomial:
    if "raw_coeffs" in d:
        return RawPolynomial.from_dict(d)
    return CMonicPolynomial.from_dict(d)


@dataclass(frozen=True)
class GrowthMargins:
    """Worst observed LHS/RHS ratio per growth property (<= 1 when certified)."""

    ratios: dict[int, float]
    X: float
    samples: int

    @property
    def all_within(self) -> bool:
        return all(r <= 1.0 for r in self.ratios.values())


def check_growth_properties(
    F: CMonicPolynomial,
    X: float,
    samples: int = 4096,
    properties: Iterable[int] = (1, 2, 3),
    p3_radius: float = 0.5,
) -> GrowthMargins:
    """Sampled sup/bound ratios for the three growth properties.

    1. max over [0, X] of |F|  vs  2 X^n          (needs X >= C + 1)
    2. max over [0, X] of |F'| vs  C n^2 X^(n-1)  (needs X >= 1)
    3. max over |z| = p3_radius of |F(z)| vs 2 C |z|   (needs radius <= 1/2)

    Property 3 is sampled on the circle only: F(z)/z is holomorphic (zero
    constant term), so its modulus over the closed disk peaks on the boundary.
    """
    if not getattr(F, "paper_mode", False):
        raise TypeError("growth properties are claims about C-monic polynomials only")
    props = tuple(properties)
    for p in props:
        if p not in (1, 2, 3):
            raise ValueError(f"unknown growth property {p}")
    if samples < 2:
        raise ValueError("need at least 2 sample points")
    n, C = F.n, F.C
    ratios: dict[int, float] = {}

    if 1 in props:
        if X < C + 1:
            raise ValueError(f"property 1 requires X >= C+1 = {C + 1}, got {X}")
        xs = np.linspace(0.0, X, samples)
        ratios[1] = float(np.max(np.abs(F.eval(xs))) / (2.0 * X**n))
    if 2 in props:
        if X < 1:
            raise ValueError(f"property 2 requires X >= 1, got {X}")
        xs = np.linspace(0.0, X, samples)
        ratios[2] = float(np.max(np.abs(F.eval_deriv(xs))) / (C * n**2 * X ** (n - 1)))
    if 3 in props:
        if not 0 < p3_radius <= 0.5:
            raise ValueError(f"property 3 requires 0 < radius <= 1/2, got {p3_radius}")
        theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        z = p3_radius * np.exp(1j * theta)
        ratios[3] = float(np.max(np.abs(F.eval(z))) / (2.0 * C * p3_radius))

    return GrowthMargins(ratios=ratios, X=float(X), samples=samples)


def random_c_monic(
    rng: np.random.Generator,
    n: int,
    C: float,
    a1_abs_range: tuple[float, float] = (0.1, 1.9),
    a1: float | None = None,
) -> CMonicPolynomial:
    """Draw a random C-monic polynomial in the focus regime.

    a_1 is drawn with |a_1| in ``a1_abs_range`` and random sign (or pinned by
    ``a1``); higher coefficients are uniform on (-C, C).
    """
    if a1 is None:
        mag = rng.uniform(*a1_abs_range)
        a1 = float(mag * (1.0 if rng.random() < 0.5 else -1.0))
    higher = rng.uniform(-C, C, size=max(n - 2, 0))
    # uniform() is half-open at -C; nudge any boundary draw inside.
    higher = np.clip(higher, -C * (1 - 1e-12), C * (1 - 1e-12))
    return CMonicPolynomial(n=n, C=C, coeffs=(float(a1), *map(float, higher)))
