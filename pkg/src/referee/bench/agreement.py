"""Krippendorff's alpha over a raters x items matrix with missing entries."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Hashable, Sequence

import numpy as np

from ..errors import InputError, InsufficientData


class Level(str, Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class AgreementResult:
    alpha: float
    level: Level
    raters: int
    items: int

    def to_dict(self) -> dict[str, Any]:
        return {"alpha": self.alpha, "level": self.level.value, "raters": self.raters, "items": self.items}


def _ordinal_delta(marginals: np.ndarray) -> np.ndarray:
    # squared sum of marginals between c and k, minus half of both endpoints
    cum = np.concatenate([[0.0], np.cumsum(marginals)])
    k = len(marginals)
    delta = np.zeros((k, k))
    for c in range(k):
        for d in range(k):
            lo, hi = min(c, d), max(c, d)
            between = cum[hi + 1] - cum[lo]
            delta[c, d] = (between - (marginals[c] + marginals[d]) / 2.0) ** 2
    return delta


def _default_level(labels) -> Level:
    values = {v for row in labels for v in row if v is not None}
    numeric = all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values)
    return Level.ORDINAL if numeric and not values <= {0, 1} else Level.NOMINAL


def krippendorff_alpha(
    labels: Sequence[Sequence[Hashable | None]], level: Level | str | None = None
) -> AgreementResult:
    """``labels[r][i]`` is rater r's value for item i, ``None`` when missing.

    Without ``level``, numeric scales use ordinal and binary or categorical
    labels use nominal.
    """
    level = Level(level) if level is not None else _default_level(labels)
    if len(labels) < 2:
        raise InsufficientData("need at least two raters")
    width = len(labels[0])
    if any(len(row) != width for row in labels):
        raise InputError("every rater row must cover the same items")
    units = []
    for i in range(width):
        values = [row[i] for row in labels if row[i] is not None]
        if len(values) >= 2:
            units.append(values)
    if not units:
        raise InsufficientData("no item has two or more ratings")

    try:
        categories = sorted({v for unit in units for v in unit})
    except TypeError as exc:
        if level is Level.ORDINAL:
            raise InputError("ordinal alpha needs comparable values") from exc
        categories = list(dict.fromkeys(v for unit in units for v in unit))
    index = {v: k for k, v in enumerate(categories)}

    coincidences = np.zeros((len(categories), len(categories)))
    for unit in units:
        counts = np.zeros(len(categories))
        for v in unit:
            counts[index[v]] += 1
        # ordered pairs of distinct ratings within the unit, weighted 1/(m_u - 1)
        coincidences += (np.outer(counts, counts) - np.diag(counts)) / (len(unit) - 1)

    marginals = coincidences.sum(axis=1)
    n = marginals.sum()
    if level is Level.NOMINAL:
        delta = 1.0 - np.eye(len(categories))
    else:
        delta = _ordinal_delta(marginals)
    observed = float((coincidences * delta).sum())
    expected = float((np.outer(marginals, marginals) * delta).sum()) / (n - 1)
    if expected == 0.0:
        # a single category in use: no disagreement is possible
        alpha = 1.0 if observed == 0.0 else float("nan")
    else:
        alpha = 1.0 - observed / expected
    return AgreementResult(alpha, level, len(labels), width)
