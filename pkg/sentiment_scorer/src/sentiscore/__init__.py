"""News-to-sentiment scorer feeding the cryptocast forecaster.

Reads dated news text, merges it per calendar day, scores each day
with a sentiment classifier, and writes the date,score CSV that
cryptocast trains on. The default lexicon:v1 backend is deterministic
and self-contained; pretrained transformer checkpoints plug in behind
the same interface via --model.
"""

from sentiscore.news import (
    SEPARATOR,
    DailyBundle,
    NewsError,
    NewsItem,
    load_news,
    merge_daily_news,
)
from sentiscore.scoring import (
    ModelLoadError,
    ScoredBundle,
    ScoringError,
    chunk_text,
    emit_scores,
    get_backend,
    label_score,
    score_bundle,
    score_bundles,
)

__version__ = "0.1.0"

__all__ = [
    "SEPARATOR",
    "DailyBundle",
    "NewsError",
    "NewsItem",
    "load_news",
    "merge_daily_news",
    "ModelLoadError",
    "ScoredBundle",
    "ScoringError",
    "chunk_text",
    "emit_scores",
    "get_backend",
    "label_score",
    "score_bundle",
    "score_bundles",
    "__version__",
]
