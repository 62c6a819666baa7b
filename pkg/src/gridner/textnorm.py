"""Tweet text normalization and offset-tracked tokenization.

Cleans the three noise sources typical of social-media text (emojis,
usernames, hashtags) and tokenizes the result while keeping exact
codepoint offsets into the source string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import DataError

__all__ = [
    "EmojiMap",
    "Token",
    "load_emoji_map",
    "default_emoji_map",
    "is_emoji_char",
    "replace_emojis",
    "replace_usernames",
    "split_hashtags",
    "normalize",
    "tokenize",
]

# Codepoint blocks treated as emoji for the deletion fallback.  Kept
# conservative: pictographic blocks plus the joiners/modifiers that only
# occur in emoji sequences.  Plain-text symbols (arrows, (c), (r), ...)
# are deliberately excluded.
_EMOJI_RANGES = (
    (0x1F000, 0x1F0FF),  # mahjong tiles, dominoes, playing cards
    (0x1F1E6, 0x1F1FF),  # regional indicators (flag halves)
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F700, 0x1F77F),
    (0x1F780, 0x1F8FF),
    (0x1F900, 0x1F9FF),
    (0x1FA00, 0x1FAFF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
    (0x231A, 0x231B),
    (0x23E9, 0x23F3),
    (0x23F8, 0x23FA),
)
_EMOJI_SINGLETONS = frozenset(
    {
        0x200D,  # zero-width joiner
        0xFE0F,  # variation selector 16
        0x20E3,  # combining enclosing keycap
        0x2B05, 0x2B06, 0x2B07, 0x2B1B, 0x2B1C, 0x2B50, 0x2B55,
        0x2934, 0x2935, 0x3030, 0x303D, 0x3297, 0x3299,
    }
)

_USERNAME_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(?=\w)")
_WS_RE = re.compile(r"\s+")


def is_emoji_char(ch: str) -> bool:
    """True if the single character falls in the emoji codepoint ranges."""
    cp = ord(ch)
    if cp in _EMOJI_SINGLETONS:
        return True
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


@dataclass(frozen=True)
class Token:
    """A tokenized slice of the source text, offsets in codepoints."""

    surface: str
    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty token span [{self.start}, {self.end})")


class EmojiMap:
    """Ordered emoji-sequence -> description lookup, longest match first.

    Descriptions must be emoji-free so that replacement is idempotent.
    """

    def __init__(self, entries: dict[str, str]):
        if not entries:
            raise DataError("emoji map has no entries")
        for key, desc in entries.items():
            if not key:
                raise DataError("emoji map key is empty")
            if any(is_emoji_char(c) for c in desc):
                raise DataError(f"emoji map description for {key!r} contains emoji")
        self.entries = dict(entries)
        # Bucket keys by first codepoint, longest first, so lookup is a
        # cheap startswith scan.
        by_first: dict[str, list[str]] = {}
        for key in entries:
            by_first.setdefault(key[0], []).append(key)
        for keys in by_first.values():
            keys.sort(key=len, reverse=True)
        self._by_first = by_first

    def __len__(self) -> int:
        return len(self.entries)

    def match_at(self, text: str, pos: int) -> str | None:
        """Longest map key matching text at pos, or None."""
        for key in self._by_first.get(text[pos], ()):
            if text.startswith(key, pos):
                return key
        return None


def load_emoji_map(path) -> EmojiMap:
    """Load a UTF-8 TSV map: one `<emoji sequence>\\t<description>` per line.

    Lines starting with `#` are comments, blank lines are skipped.
    """
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise DataError("emoji map line has no tab separator", line=lineno)
            key, desc = line.split("\t", 1)
            entries[key] = desc
    return EmojiMap(entries)


_DEFAULT_MAP: EmojiMap | None = None


def default_emoji_map() -> EmojiMap:
    """The map bundled with the package (loaded once, cached)."""
    global _DEFAULT_MAP
    if _DEFAULT_MAP is None:
        ref = resources.files("gridner").joinpath("data/emoji_default.tsv")
        with resources.as_file(ref) as path:
            _DEFAULT_MAP = load_emoji_map(path)
    return _DEFAULT_MAP


def replace_usernames(text: str) -> str:
    """Replace every @-mention (maximal run of word characters) with `@user`."""
    return _USERNAME_RE.sub("@user", text)


def split_hashtags(text: str) -> str:
    """Insert a space between `#` and a following word character."""
    return _HASHTAG_RE.sub("# ", text)


def replace_emojis(text: str, emap: EmojiMap) -> str:
    """Replace mapped emoji sequences by space-padded descriptions.

    Lookup is longest-match-first; emoji codepoints absent from the map
    are deleted (they carry no usable text), everything else is kept.
    """
    out: list[str] = []
    pos = 0
    n = len(text)
    while pos < n:
        key = emap.match_at(text, pos)
        if key is not None:
            out.append(f" {emap.entries[key]} ")
            pos += len(key)
        elif is_emoji_char(text[pos]):
            pos += 1
        else:
            out.append(text[pos])
            pos += 1
    return "".join(out)


def normalize(text: str, emap: EmojiMap | None = None) -> str:
    """Full cleanup: emojis, then usernames, then hashtags, then whitespace.

    Emoji handling goes first because descriptions introduce spaces; the
    username/hashtag patterns are ASCII-anchored and unaffected by it.
    The result is a fixed point: normalize(normalize(t)) == normalize(t).
    """
    if emap is None:
        emap = default_emoji_map()
    text = replace_emojis(text, emap)
    text = replace_usernames(text)
    text = split_hashtags(text)
    return _WS_RE.sub(" ", text).strip()


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str) -> list[Token]:
    """Whitespace tokenization with leading/trailing punctuation split off.

    Each punctuation character at a chunk boundary becomes its own token.
    Offsets are Unicode codepoints; every non-whitespace character is
    covered by exactly one token.
    """
    tokens: list[Token] = []
    for match in re.finditer(r"\S+", text):
        start, end = match.span()
        while start < end and not _is_word_char(text[start]):
            tokens.append(Token(text[start], start, start + 1))
            start += 1
        trailing: list[Token] = []
        while end > start and not _is_word_char(text[end - 1]):
            trailing.append(Token(text[end - 1], end - 1, end))
            end -= 1
        if start < end:
            tokens.append(Token(text[start:end], start, end))
        tokens.extend(reversed(trailing))
    return tokens
