"""Deterministic word-count sentiment backend, model id "lexicon:v1".

Counts hits against fixed positive and negative financial word lists;
a chunk's raw score is (pos - neg) / (pos + neg), zero when nothing
matches. No network, no weights, bit-stable across runs, which makes
it the default backend and the one the golden tests pin.

The word lists are part of the model identity. Editing them changes
scores, so any change must ship under a new id (lexicon:v2, ...).
"""

from __future__ import annotations

import re

MODEL_ID = "lexicon:v1"

_WORD_RE = re.compile(r"[a-z']+")

POSITIVE = frozenset(
    """
    gain gains rally rallies rallied surge surges surged soar soars
    soared bullish record profit profits profitable beat beats upgrade
    upgraded growth strong strength rebound rebounds recovery recover
    recovers optimism optimistic boom breakout outperform outperforms
    upside adoption approval approved milestone win wins winning jump
    jumps jumped climb climbs climbed rise rises rose
    """.split()
)

NEGATIVE = frozenset(
    """
    loss losses plunge plunges plunged crash crashes crashed bearish
    selloff fraud hack hacked hacks ban bans banned lawsuit fear fears
    drop drops dropped fall falls fell decline declines declined
    downgrade downgraded weak weakness panic liquidation liquidations
    default bankruptcy scam dump dumps dumped slump slumps crackdown
    warning warn warns tumble tumbles tumbled
    """.split()
)


class LexiconBackend:
    """Chunk scorer over the pinned v1 word lists."""

    model_id = MODEL_ID
    max_words = 200

    def score_text(self, text: str) -> tuple[str, float]:
        """Label one chunk: counts decide the sign, their imbalance the confidence."""
        tokens = _WORD_RE.findall(text.lower())
        pos = sum(1 for t in tokens if t in POSITIVE)
        neg = sum(1 for t in tokens if t in NEGATIVE)
        if pos + neg == 0:
            return "neutral", 0.0
        raw = (pos - neg) / (pos + neg)
        if raw > 0:
            return "positive", raw
        if raw < 0:
            return "negative", -raw
        return "neutral", 0.0
