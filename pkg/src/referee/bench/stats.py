"""Correlation coefficients with informational p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy import special
from scipy.stats import rankdata

from ..errors import AllTied, LengthMismatch, ZeroVariance


def _pair(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise LengthMismatch(f"vectors differ in length: {xa.shape} vs {ya.shape}")
    if xa.size < 2:
        raise LengthMismatch("need at least two observations")
    return xa, ya


def _t_pvalue(r: float, n: int) -> float:
    if n < 3:
        return math.nan
    if abs(r) >= 1.0:
        return 0.0
    df = n - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return float(2.0 * special.stdtr(df, -abs(t)))


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    xa, ya = _pair(x, y)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0 or np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise ZeroVariance("an input has zero variance")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return r, _t_pvalue(r, xa.size)


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson over average ranks."""
    xa, ya = _pair(x, y)
    return pearson(rankdata(xa), rankdata(ya))


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Tie-corrected tau-b over all pairs; p from the normal approximation."""
    xa, ya = _pair(x, y)
    n = xa.size
    sx = np.sign(xa[:, None] - xa[None, :])
    sy = np.sign(ya[:, None] - ya[None, :])
    upper = np.triu_indices(n, k=1)
    sx, sy = sx[upper], sy[upper]
    s = int(np.sum(sx * sy))  # concordant - discordant
    untied_x = int(np.count_nonzero(sx))  # n0 - n1
    untied_y = int(np.count_nonzero(sy))  # n0 - n2
    if untied_x == 0 or untied_y == 0:
        raise AllTied("an input is constant; tau-b is undefined")
    tau = s / math.sqrt(untied_x * untied_y)
    tau = max(-1.0, min(1.0, tau))
    if n < 3:
        return tau, math.nan
    z = s / math.sqrt(n * (n - 1) * (2 * n + 5) / 18.0)
    return tau, float(2.0 * special.ndtr(-abs(z)))


@dataclass(frozen=True)
class CorrelationResult:
    pearson: float
    spearman: float
    kendall: float
    n: int
    p_values: dict[str, float]

    @property
    def average(self) -> float:
        return (self.pearson + self.spearman + self.kendall) / 3.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "pearson": self.pearson,
            "spearman": self.spearman,
            "kendall": self.kendall,
            "average": self.average,
            "n": self.n,
            "p_values": {k: (None if math.isnan(v) else v) for k, v in self.p_values.items()},
        }


def correlate(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    rp, pp = pearson(x, y)
    rs, ps = spearman(x, y)
    tau, pt = kendall_tau(x, y)
    return CorrelationResult(rp, rs, tau, len(x), {"pearson": pp, "spearman": ps, "kendall": pt})
