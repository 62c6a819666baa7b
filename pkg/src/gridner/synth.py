"""Seeded generator for the imbalanced synthetic classification set.

Positive records lean on symptom-flavored signal words; negatives mostly
draw background chatter.  Texts include mentions, hashtags, and emojis so
the normalization step in the pipeline actually does something.
"""

from __future__ import annotations

import random

from .ensemble import LabeledDataset, Record

__all__ = ["gen_synth"]

SIGNAL_WORDS = (
    "fever", "cough", "fatigue", "headache", "chills", "nausea", "dizzy",
    "congestion", "sneezing", "ache", "sore", "throat", "shivering", "weak",
    "breathless", "tested", "positive", "symptoms", "sick", "flu",
)

BACKGROUND_WORDS = (
    "today", "really", "morning", "coffee", "traffic", "weather", "game",
    "music", "movie", "weekend", "friends", "dinner", "work", "meeting",
    "funny", "love", "great", "tired", "school", "study", "news", "photo",
    "walk", "park", "rain", "sunny", "happy", "maybe", "later", "home",
    "again", "still", "never", "always", "people", "city", "team", "win",
    "lost", "phone", "book", "video", "online", "thanks", "please", "good",
    "night", "early", "week", "year",
)

HANDLES = ("ana", "luis", "maria", "jose", "carmen", "pablo")
TAGS = ("covid", "salud", "lunes", "vibes", "news", "2021")
EMOJIS = ("\U0001F637", "\U0001F600", "\U0001F912", "\U0001F927", "❤️")


def _make_text(rng: random.Random, label: int) -> str:
    signal_rate = 0.30 if label == 1 else 0.06
    parts = []
    for _ in range(rng.randint(6, 18)):
        roll = rng.random()
        if roll < 0.05:
            parts.append("@" + rng.choice(HANDLES))
        elif roll < 0.13:
            parts.append("#" + rng.choice(TAGS))
        elif roll < 0.18:
            parts.append(rng.choice(EMOJIS))
        elif rng.random() < signal_rate:
            parts.append(rng.choice(SIGNAL_WORDS))
        else:
            parts.append(rng.choice(BACKGROUND_WORDS))
    return " ".join(parts)


def gen_synth(n: int, pos_rate: float = 0.176, seed: int = 0) -> LabeledDataset:
    """n records with exactly round(n * pos_rate) positives, order shuffled."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= pos_rate <= 1:
        raise ValueError("pos_rate must be in [0, 1]")
    rng = random.Random(seed)
    n_pos = round(n * pos_rate)
    labels = [1] * n_pos + [0] * (n - n_pos)
    rng.shuffle(labels)
    records = [
        Record(f"synth-{i:05d}", _make_text(rng, label), label)
        for i, label in enumerate(labels)
    ]
    return LabeledDataset(records)
