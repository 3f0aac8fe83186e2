"""Feature tables, Pearson correlation matrix and the two-sample F-test for variances.

The F distribution CDF is evaluated through the regularized incomplete beta
function, computed with a Lentz continued fraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, lgamma, log

import numpy as np
from scipy.optimize import brentq

from nldmarkers.series import session_sort_key

__all__ = [
    "FeatureRow",
    "FeatureTable",
    "CorrelationMatrix",
    "FTestReport",
    "pearson",
    "pearson_matrix",
    "f_test_two_sample",
    "f_cdf",
    "f_sf",
    "f_crit",
    "betainc_reg",
    "first_last_delta",
    "VARIABLES",
]

VARIABLES = {"H": "h", "D": "d", "S": "s", "Experience": "experience", "Age": "age"}

_CF_MAX_ITER = 20000
_CF_EPS = 1e-15
_TINY = 1e-300


@dataclass(frozen=True)
class FeatureRow:
    subject_id: int
    session_label: str
    s: float
    h: float
    d: float
    age: float
    experience: float


@dataclass
class FeatureTable:
    """Rows keyed by unique (subject, session); iterated in canonical session order."""

    rows: list[FeatureRow] = field(default_factory=list)

    def __post_init__(self):
        keys = [(r.subject_id, r.session_label) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (subject_id, session_label) rows")

    def __len__(self) -> int:
        return len(self.rows)

    def sorted(self) -> "FeatureTable":
        """Copy ordered by subject, then canonical session order (stable for other labels)."""
        return FeatureTable(sorted(self.rows, key=lambda r: (r.subject_id, session_sort_key(r.session_label))))

    def column(self, name: str) -> np.ndarray:
        attr = VARIABLES.get(name, name)
        return np.array([getattr(r, attr) for r in self.rows], dtype=float)

    def subjects(self) -> dict[int, list[FeatureRow]]:
        out: dict[int, list[FeatureRow]] = {}
        for r in self.sorted().rows:
            out.setdefault(r.subject_id, []).append(r)
        return out


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: list[str]
    values: np.ndarray

    def __getitem__(self, key: tuple[str, str]) -> float:
        i, j = (self.labels.index(k) for k in key)
        return float(self.values[i, j])


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    den = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if den == 0:
        raise ValueError("correlation undefined for a constant variable")
    return float(np.clip(np.sum(dx * dy) / den, -1.0, 1.0))


def pearson_matrix(t: FeatureTable, variables=("H", "D", "S", "Experience", "Age")) -> CorrelationMatrix:
    variables = list(variables)
    if len(t) < 3:
        raise ValueError("Pearson matrix needs at least 3 rows")
    cols = {}
    for v in variables:
        col = t.column(v)
        if np.all(col == col[0]):
            raise ValueError(f"correlation undefined: variable {v!r} is constant")
        cols[v] = col
    k = len(variables)
    mat = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            mat[i, j] = mat[j, i] = pearson(cols[variables[i]], cols[variables[j]])
    return CorrelationMatrix(variables, mat)


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``; pass ``y = 1 - x`` when it is known more accurately."""
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbt = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(y)
    if x < (a + 1.0) / (a + b + 2.0):
        return exp(lbt) * _betacf(a, b, x) / a
    return 1.0 - exp(lbt) * _betacf(b, a, y) / b


def _f_beta_args(x: float, df1: int, df2: int) -> tuple[float, float]:
    if df1 < 1 or df2 < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x < 0:
        raise ValueError("F statistic must be non-negative")
    num = df1 * x
    return num / (num + df2), df2 / (num + df2)


def f_cdf(x: float, df1: int, df2: int) -> float:
    """``P(F <= x)`` for ``F ~ F(df1, df2)``."""
    if np.isinf(x):
        return 1.0
    z, w = _f_beta_args(x, df1, df2)
    return betainc_reg(df1 / 2.0, df2 / 2.0, z, w)


def f_sf(x: float, df1: int, df2: int) -> float:
    """Upper tail ``P(F > x)``, computed without cancellation."""
    if np.isinf(x):
        return 0.0
    z, w = _f_beta_args(x, df1, df2)
    return betainc_reg(df2 / 2.0, df1 / 2.0, w, z)


def f_crit(alpha: float, df1: int, df2: int) -> float:
    """Upper-tail critical value: the ``x`` with ``P(F > x) = alpha``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    hi = 2.0
    while f_sf(hi, df1, df2) > alpha:
        hi *= 2.0
    return brentq(lambda v: f_sf(v, df1, df2) - alpha, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class FTestReport:
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    n_a: int
    n_b: int
    df_a: int
    df_b: int
    f: float
    p_one_tail: float
    f_crit: float
    alpha: float = 0.05
    label_a: str = "a"
    label_b: str = "b"

    @property
    def significant(self) -> bool:
        return self.p_one_tail < self.alpha

    def to_text(self) -> str:
        """Two-column layout in the style of a spreadsheet variance F-test."""
        rows = [
            ("", self.label_a, self.label_b),
            ("Mean", f"{self.mean_a:.6g}", f"{self.mean_b:.6g}"),
            ("Variance", f"{self.var_a:.6g}", f"{self.var_b:.6g}"),
            ("Observations", str(self.n_a), str(self.n_b)),
            ("df", str(self.df_a), str(self.df_b)),
            ("F", f"{self.f:.6g}", ""),
            ("P(F<=f) one-tail", f"{self.p_one_tail:.6g}", ""),
            ("F Critical one-tail", f"{self.f_crit:.6f}", ""),
        ]
        width = max(len(r[0]) for r in rows) + 2
        return "\n".join(f"{a:<{width}}{b:<16}{c}".rstrip() for a, b, c in rows)


def f_test_two_sample(a, b, alpha: float = 0.05, labels=("a", "b")) -> FTestReport:
    """F = var(a) / var(b). The one-tail p is the upper tail when F > 1, else the lower tail."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 observations")
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    if va == 0 or vb == 0:
        raise ValueError("degenerate variance: a sample is constant")
    dfa, dfb = a.size - 1, b.size - 1
    f = va / vb
    p = f_sf(f, dfa, dfb) if f > 1 else f_cdf(f, dfa, dfb)
    return FTestReport(
        float(a.mean()), float(b.mean()), va, vb, a.size, b.size, dfa, dfb, f, p,
        f_crit(alpha, dfa, dfb), alpha, labels[0], labels[1],
    )


@dataclass(frozen=True)
class DeltaRow:
    subject_id: int
    first_session: str | None
    last_session: str | None
    h_first: float | None
    h_last: float | None
    delta: float | None
    flagged: bool = False


def first_last_delta(t: FeatureTable) -> list[DeltaRow]:
    """Per subject: H of the last session minus H of the first (canonical order)."""
    out = []
    for sid, rows in t.subjects().items():
        if len(rows) < 2:
            r = rows[0]
            out.append(DeltaRow(sid, r.session_label, None, r.h, None, None, True))
            continue
        first, last = rows[0], rows[-1]
        out.append(DeltaRow(sid, first.session_label, last.session_label, first.h, last.h, last.h - first.h))
    return out
