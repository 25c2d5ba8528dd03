"""The module which evaluates batches of image pairs and builds the JSON metric report.

The report schema is the :class:`MetricReport` model:

.. code-block:: json

    {
        "pairs": [
            {"reference": "a.png", "candidate": "b.png", "psnr": 24.05, "ssim": 0.9, "ws_psnr": 24.05, "ws_ssim": 0.9}
        ],
        "mean": {"psnr": 24.05, "ssim": 0.9, "ws_psnr": 24.05, "ws_ssim": 0.9}
    }
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import BaseModel, TypeAdapter

from omnisr.io.rasters import read_image
from omnisr.metrics.quality import psnr, ssim, ws_psnr, ws_ssim


class MetricScores(BaseModel):
    """The four metrics of a pair (or their means over pairs)."""
    psnr: float
    ssim: float
    ws_psnr: float
    ws_ssim: float


class PairScores(MetricScores):
    """The metrics of a named pair."""
    reference: str
    candidate: str


class MetricReport(BaseModel):
    """The report of a batch evaluation; ``mean`` is ``None`` for an empty batch."""
    pairs: list[PairScores]
    mean: MetricScores | None


PairList = TypeAdapter(list[tuple[Path, Path]])
"""The validator of the JSON pair lists ``[[reference, candidate], ...]``."""


def evaluate_pair(a: np.ndarray, b: np.ndarray, per_channel: bool = False) -> MetricScores:
    """Computes the four metrics of two images."""
    return MetricScores(
        psnr=psnr(a, b, per_channel),
        ssim=ssim(a, b, per_channel),
        ws_psnr=ws_psnr(a, b, per_channel=per_channel),
        ws_ssim=ws_ssim(a, b, per_channel=per_channel),
    )


def mean_scores(scores: list[MetricScores]) -> MetricScores | None:
    """Averages each metric over a batch."""
    if not scores:
        return None
    return MetricScores(**{
        name: float(np.mean([getattr(s, name) for s in scores])) for name in MetricScores.model_fields
    })


def evaluate_pairs(pairs: list[tuple[Path, Path]], per_channel: bool = False, threads: int = 1) -> MetricReport:
    """Reads and evaluates image pairs, in the given order.

    Raises:
        :class:`~omnisr.errors.errors.OmniError`:
            ``Files.ReadError`` or ``Metrics.ShapeMismatch`` for the first pair which fails.
    """
    logger.info(f"Attempt to evaluate {len(pairs)} pairs ...")

    def run(pair: tuple[Path, Path]) -> PairScores:
        reference, candidate = pair
        scores = evaluate_pair(read_image(reference), read_image(candidate), per_channel)
        return PairScores(reference=str(reference), candidate=str(candidate), **scores.model_dump())

    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(run, pairs))
    logger.info("Evaluation of the pairs is successful.")
    return MetricReport(pairs=results, mean=mean_scores(results))
