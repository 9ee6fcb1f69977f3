"""Deformation parameters and q-number arithmetic.

All q-numbers are evaluated in closed real form: ``sinh(x*lam)/sinh(lam)``
with ``lam = ln q`` for real q, and ``sin(x*tau)/sin(tau)`` for a pure
phase ``q = exp(i*tau)``. The undeformed point (q = 1, tau = 0) is an
explicit branch that returns ``x`` itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Kind = Literal["real", "phase"]

# |[n]_q| below this is treated as a root-of-unity zero
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class DeformationParameter:
    """The deformation parameter q, real positive or a pure phase e^{i tau}.

    ``value`` is q itself for ``kind="real"`` and the angle tau for
    ``kind="phase"``.
    """

    kind: Kind
    value: float

    def __post_init__(self):
        if self.kind == "real":
            if not self.value > 0:
                raise ValueError(f"real q must be positive, got {self.value}")
        elif self.kind == "phase":
            if not -math.pi < self.value <= math.pi:
                raise ValueError(f"tau must lie in (-pi, pi], got {self.value}")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def real(cls, q: float) -> DeformationParameter:
        return cls("real", float(q))

    @classmethod
    def phase(cls, tau: float) -> DeformationParameter:
        return cls("phase", float(tau))

    @property
    def is_classical(self) -> bool:
        return self.value == (1.0 if self.kind == "real" else 0.0)

    @property
    def log(self) -> complex:
        """ln q: real for real kind, i*tau for phase kind."""
        if self.kind == "real":
            return complex(math.log(self.value))
        return complex(0.0, self.value)

    @property
    def q(self) -> complex:
        if self.kind == "real":
            return complex(self.value)
        return complex(math.cos(self.value), math.sin(self.value))

    def inverse(self) -> DeformationParameter:
        if self.kind == "real":
            return DeformationParameter.real(1.0 / self.value)
        # tau = pi is its own inverse (q = -1)
        tau = -self.value if self.value != math.pi else math.pi
        return DeformationParameter.phase(tau)

    def power(self, d: int) -> DeformationParameter:
        """q^d, as used for the node parameters q_i = q^{d_i}."""
        if self.kind == "real":
            return DeformationParameter.real(self.value**d)
        return DeformationParameter.phase(self.value * d)

    def pow(self, x):
        """Elementwise q**x for real (possibly half-integer) exponents x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "real":
            return np.power(self.value, x)
        return np.exp(1j * self.value * x)

    def __str__(self) -> str:
        if self.kind == "real":
            return f"q={self.value:g}"
        return f"tau={self.value:g}"


def as_parameter(q) -> DeformationParameter:
    """Coerce a float (read as real q) or a DeformationParameter."""
    if isinstance(q, DeformationParameter):
        return q
    if isinstance(q, complex):
        if abs(abs(q) - 1.0) < 1e-14 and q.imag != 0:
            return DeformationParameter.phase(math.atan2(q.imag, q.real))
        q = q.real
    return DeformationParameter.real(float(q))


def q_number(x, q):
    """The q-bracket [x]_q = (q^x - q^-x)/(q - q^-1).

    Vectorized over ``x``; the result is always real for the admissible
    parameter kinds.

    >>> float(q_number(2, 2.0))
    2.5
    """
    q = as_parameter(q)
    x = np.asarray(x, dtype=float)
    if q.is_classical:
        out = x.copy()
    elif q.kind == "real":
        lam = math.log(q.value)
        out = np.sinh(x * lam) / math.sinh(lam)
    else:
        tau = q.value
        out = np.sin(x * tau) / math.sin(tau)
    return out if out.ndim else float(out)


def q_factorial(n: int, q) -> float:
    if n < 0:
        raise ValueError(f"q_factorial needs n >= 0, got {n}")
    out = 1.0
    for k in range(1, n + 1):
        out *= q_number(k, q)
    return out


def q_binomial(m: int, n: int, q) -> float:
    if not 0 <= n <= m:
        raise ValueError(f"q_binomial needs 0 <= n <= m, got m={m}, n={n}")
    return q_factorial(m, q) / (q_factorial(m - n, q) * q_factorial(n, q))


@dataclass(frozen=True)
class ValidityReport:
    parameter: DeformationParameter
    n_max: int
    violations: list[int] = field(default_factory=list)
    dressing_violations: list[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations and not self.dressing_violations

    def __bool__(self) -> bool:
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return f"{self.parameter} valid up to n={self.n_max}"
        parts = []
        if self.violations:
            parts.append(f"[n]_q not positive for n in {self.violations}")
        if self.dressing_violations:
            parts.append(f"q^n + q^-n not positive for n in {self.dressing_violations}")
        return f"{self.parameter} invalid: " + "; ".join(parts)


def validate_parameter(q, n_max: int, dressing_max: int = 0) -> ValidityReport:
    """Check that q stays clear of roots of unity on a truncated sector.

    Passes iff [n]_q is nonzero for 1 <= n <= n_max and, for phase q, also
    positive so that every ladder radicand is. ``dressing_max`` extends the
    check to the factors q^n + q^-n = 2cos(n tau), n <= dressing_max, that
    appear under square roots in the so_q(3)/so_q(5) realizations.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    q = as_parameter(q)
    ns = np.arange(1, n_max + 1)
    vals = np.atleast_1d(q_number(ns, q))
    if q.kind == "real":
        bad = ns[np.abs(vals) < ZERO_TOL]
    else:
        bad = ns[vals < ZERO_TOL]
    dressing_bad: list[int] = []
    if q.kind == "phase" and dressing_max > 0:
        ds = np.arange(0, dressing_max + 1)
        dressing_bad = [int(n) for n in ds[np.cos(ds * q.value) < ZERO_TOL]]
    return ValidityReport(q, n_max, [int(n) for n in bad], dressing_bad)


class ParameterError(ValueError):
    """Raised when q is outside the validity domain of a finite sector."""


def require_valid(q, n_max: int, dressing_max: int = 0) -> DeformationParameter:
    q = as_parameter(q)
    report = validate_parameter(q, max(n_max, 1), dressing_max)
    if not report.valid:
        raise ParameterError(report.describe())
    return q
