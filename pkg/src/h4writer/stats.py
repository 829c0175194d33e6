"""Statistics for session analysis.

One-way repeated-measures ANOVA and least-squares learning-curve fits.
The F-distribution tail probability is computed here directly via the
regularized incomplete beta function (continued fraction, Lentz's method,
accurate to ~1e-12) so the analysis has no statistics-library dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class AnovaResult:
    effect: str
    F: float
    df1: int
    df2: int
    p: float

    def __str__(self) -> str:
        return f"{self.effect}: F({self.df1},{self.df2}) = {self.F:.4g}, p = {self.p:.4g}"


@dataclass(frozen=True)
class FitResult:
    model: str  # "linear" | "power"
    coefficients: tuple[float, float]  # linear: (intercept, slope); power: (a, b) in a*x**b
    r_squared: float

    def predict(self, x: float) -> float:
        c0, c1 = self.coefficients
        if self.model == "linear":
            return c0 + c1 * x
        return c0 * x**c1

    def __str__(self) -> str:
        c0, c1 = self.coefficients
        if self.model == "linear":
            return f"y = {c0:.4g} + {c1:.4g} x (R^2 = {self.r_squared:.4f})"
        return f"y = {c0:.4g} x^{c1:.4g} (R^2 = {self.r_squared:.4f})"


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise StatsError(f"x must be in [0,1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the continued fraction on whichever side converges fast.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail P(F >= f) of the F distribution."""
    if f <= 0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return betainc_regularized(df2 / 2.0, df1 / 2.0, x)


def rm_anova(values: Sequence[Sequence[float]], effect: str = "condition") -> AnovaResult:
    """One-way repeated-measures ANOVA on a participant x condition matrix.

    F = MS_condition / MS_error with df1 = k-1, df2 = (k-1)(n-1), where the
    error term is the within-subjects residual after removing the subject
    effect.
    """
    n = len(values)
    if n < 2:
        raise StatsError("need at least 2 participants")
    k = len(values[0])
    if k < 2:
        raise StatsError("need at least 2 conditions")
    if any(len(row) != k for row in values):
        raise StatsError("incomplete matrix: every participant needs every condition")

    grand = sum(sum(row) for row in values) / (n * k)
    cond_means = [sum(row[j] for row in values) / n for j in range(k)]
    subj_means = [sum(row) / k for row in values]

    ss_cond = n * sum((m - grand) ** 2 for m in cond_means)
    ss_subj = k * sum((m - grand) ** 2 for m in subj_means)
    ss_total = sum((v - grand) ** 2 for row in values for v in row)
    ss_error = ss_total - ss_cond - ss_subj

    df1 = k - 1
    df2 = (k - 1) * (n - 1)
    ms_cond = ss_cond / df1
    ms_error = ss_error / df2
    if ms_error <= 0:
        # Zero residual variance: degenerate but well defined by convention.
        f = math.inf if ms_cond > 0 else 0.0
        return AnovaResult(effect, f, df1, df2, 0.0 if ms_cond > 0 else 1.0)
    f = ms_cond / ms_error
    return AnovaResult(effect, f, df1, df2, f_sf(f, df1, df2))


def fit_learning_curve(
    points: Sequence[tuple[float, float]], model: str = "power"
) -> FitResult:
    """Least-squares fit of value vs. block.

    linear: y = c0 + c1 x. power: y = a x^b, fit as a linear regression on
    log-log; R^2 is computed in the fitting space in both cases.
    """
    if len(points) < 2:
        raise StatsError("need at least 2 points")
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    if len(set(xs)) < 2:
        raise StatsError("degenerate x values: need at least 2 distinct")

    if model == "power":
        if any(x <= 0 for x in xs) or any(y <= 0 for y in ys):
            raise StatsError("power model requires positive x and y values")
        lx = [math.log(x) for x in xs]
        ly = [math.log(y) for y in ys]
        c0, c1, r2 = _linfit(lx, ly)
        return FitResult("power", (math.exp(c0), c1), r2)
    if model == "linear":
        c0, c1, r2 = _linfit(xs, ys)
        return FitResult("linear", (c0, c1), r2)
    raise StatsError(f"unknown model {model!r}")


def _linfit(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - my) ** 2 for y in ys)
    if ss_res == 0.0:
        r2 = 1.0
    elif ss_tot == 0.0:
        r2 = 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return intercept, slope, r2
