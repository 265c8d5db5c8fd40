"""Bundle scoring and CSV emission.

A backend labels one chunk of text at a time: score_text(chunk) gives
(label, confidence) with confidence in [0, 1]. Long merged texts are
split into chunks of at most backend.max_words words, each chunk's
label maps to a signed score (positive -> +confidence, negative ->
-confidence, neutral -> 0), and the chunk scores are mean-pooled. The
pooled sign decides the day's label; its magnitude is the confidence.

emit_scores writes the date,score CSV the cryptocast forecaster
ingests. That file is the whole interface between the two packages;
`cryptocast sentiment-check <file>` must accept every file written
here.
"""

from __future__ import annotations

import csv
import datetime
import math
import re
from dataclasses import dataclass
from pathlib import Path

from sentiscore.lexicon import MODEL_ID as LEXICON_ID
from sentiscore.lexicon import LexiconBackend
from sentiscore.news import DailyBundle

VALID_LABELS = ("positive", "neutral", "negative")

_SPLIT_RE = re.compile(r"\S+")


class ScoringError(ValueError):
    """Text that cannot be scored or a result outside the contract."""


class ModelLoadError(ScoringError):
    """The requested classifier backend is unavailable."""


@dataclass(frozen=True)
class ScoredBundle:
    """One day's pooled classifier verdict.

    label follows the sign of score, confidence equals its magnitude,
    and score stays within [-1, 1]; __post_init__ rejects anything
    else so a bad backend cannot smuggle out-of-range values into the
    output file.
    """

    day: datetime.date
    label: str
    confidence: float
    score: float

    def __post_init__(self) -> None:
        if not isinstance(self.day, datetime.date):
            raise ScoringError(f"day must be a datetime.date, got {type(self.day).__name__}")
        if self.label not in VALID_LABELS:
            raise ScoringError(f"label must be one of {VALID_LABELS}, got {self.label!r}")
        if not (isinstance(self.score, float) and math.isfinite(self.score)):
            raise ScoringError(f"score must be a finite float, got {self.score!r} for {self.day}")
        if not -1.0 <= self.score <= 1.0:
            raise ScoringError(f"score must be in [-1, 1], got {self.score} for {self.day}")
        if self.confidence != abs(self.score):
            raise ScoringError(
                f"confidence must equal |score|, got {self.confidence} vs {self.score}"
            )
        expected = "positive" if self.score > 0 else "negative" if self.score < 0 else "neutral"
        if self.label != expected:
            raise ScoringError(
                f"label {self.label!r} contradicts score {self.score} for {self.day}"
            )


def label_score(label: str, confidence: float) -> float:
    """Signed score for one chunk: positive -> +c, negative -> -c, neutral -> 0."""
    if not (isinstance(confidence, (int, float)) and math.isfinite(confidence)):
        raise ScoringError(f"confidence must be finite, got {confidence!r}")
    if not 0.0 <= confidence <= 1.0:
        raise ScoringError(f"confidence must be in [0, 1], got {confidence}")
    key = label.strip().lower()
    if key not in VALID_LABELS:
        raise ScoringError(f"unknown label {label!r}, expected one of {VALID_LABELS}")
    if key == "positive":
        return float(confidence)
    if key == "negative":
        return -float(confidence)
    return 0.0


def chunk_text(text: str, max_words: int) -> list[str]:
    """Split on whitespace into runs of at most max_words words."""
    if max_words < 1:
        raise ScoringError(f"max_words must be at least 1, got {max_words}")
    words = _SPLIT_RE.findall(text)
    return [" ".join(words[i : i + max_words]) for i in range(0, len(words), max_words)]


def score_bundle(bundle: DailyBundle, backend) -> ScoredBundle:
    """Score one day's merged text with the given backend."""
    chunks = chunk_text(bundle.merged_text, backend.max_words)
    if not chunks:
        raise ScoringError(f"no scorable text for {bundle.day}")
    scores = []
    for chunk in chunks:
        label, confidence = backend.score_text(chunk)
        scores.append(label_score(label, confidence))
    # each chunk score is in [-1, 1], so the correctly rounded mean is too
    pooled = math.fsum(scores) / len(scores)
    label = "positive" if pooled > 0 else "negative" if pooled < 0 else "neutral"
    return ScoredBundle(bundle.day, label, abs(pooled), pooled)


def score_bundles(bundles, backend) -> tuple[ScoredBundle, ...]:
    return tuple(score_bundle(b, backend) for b in bundles)


def emit_scores(scored, path) -> None:
    """Write date,score rows in ascending date order.

    Scores are written with str(float), which round-trips exactly.
    Duplicate or out-of-order days are rejected; an empty input still
    writes the header so downstream validation has a schema to check.
    """
    rows = list(scored)
    for prev, cur in zip(rows, rows[1:]):
        if cur.day <= prev.day:
            raise ScoringError(
                f"days must be strictly increasing, got {prev.day} then {cur.day}"
            )
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "score"])
        for sb in rows:
            writer.writerow([sb.day.isoformat(), str(sb.score)])


class TransformersBackend:
    """Pretrained sequence-classifier backend behind the same chunk interface.

    Loads a Hugging Face checkpoint whose labels are positive, negative,
    and neutral (financial-sentiment models follow this convention) and
    reports the argmax label with its softmax probability. Requires the
    transformers and torch packages plus a reachable model cache; any
    failure on that path surfaces as ModelLoadError.
    """

    max_words = 200

    def __init__(self, model_id: str):
        self.model_id = model_id
        try:
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise ModelLoadError(
                f"model {model_id!r} needs the transformers backend; "
                f"install sentiscore[transformers] ({exc})"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_id)
            self._model = AutoModelForSequenceClassification.from_pretrained(model_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
        self._model.eval()
        labels = {v.lower() for v in self._model.config.id2label.values()}
        if not labels <= set(VALID_LABELS):
            raise ModelLoadError(
                f"model {model_id!r} emits labels {sorted(labels)}, "
                f"expected a subset of {VALID_LABELS}"
            )

    def score_text(self, text: str) -> tuple[str, float]:
        import torch

        inputs = self._tokenizer(text, return_tensors="pt", truncation=True)
        with torch.no_grad():
            logits = self._model(**inputs).logits[0]
        probs = torch.softmax(logits, dim=-1)
        idx = int(torch.argmax(probs).item())
        return self._model.config.id2label[idx].lower(), float(probs[idx].item())


def get_backend(model_id: str):
    """Resolve a model id to a backend instance."""
    if model_id == LEXICON_ID:
        return LexiconBackend()
    return TransformersBackend(model_id)
