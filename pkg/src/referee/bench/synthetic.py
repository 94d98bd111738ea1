"""Deterministic synthetic benchmark whose labels are an affine map of the gold score."""

from __future__ import annotations

import random

from ..graph.model import Language
from .dataset import CRITERION_KEYS, BenchmarkSample, GoldSegment

SCORE_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


def make_synthetic(n: int = 20, seed: int = 0) -> list[BenchmarkSample]:
    """Sample ``i`` has gold score ``SCORE_LEVELS[i % 5]`` and label ``1 + 4 * score``."""
    rng = random.Random(seed)
    samples = []
    for i in range(n):
        score = SCORE_LEVELS[i % len(SCORE_LEVELS)]
        n_segments = rng.randint(1, 6)
        total = 4 * n_segments
        passes = round(score * total)
        cells = [1] * passes + [0] * (total - passes)
        rng.shuffle(cells)
        texts = [f"Sentence {k + 1} describes what helper_{i} does." for k in range(n_segments)]
        segments = tuple(
            GoldSegment(text, dict(zip(CRITERION_KEYS, cells[4 * k : 4 * k + 4]))) for k, text in enumerate(texts)
        )
        language = Language.PYTHON if i % 2 == 0 else Language.JAVA
        code = (
            f"def helper_{i}(x):\n    return x + {i}\n"
            if language is Language.PYTHON
            else f"int helper_{i}(int x) {{\n    return x + {i};\n}}\n"
        )
        samples.append(
            BenchmarkSample(
                id=f"syn-{i:03d}",
                language=language,
                input_code=code,
                summary=" ".join(texts),
                summary_label=int(1 + 4 * score),
                segments=segments,
            )
        )
    return samples
