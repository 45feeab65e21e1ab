"""Text matchers for transcript and on-screen-text scoring.

Exact case-insensitive substring containment scores 1.0. Anything else
falls back to normalized edit distance, with scores below 0.5 zeroed so
weak coincidental matches never leak into the signal.
"""
from __future__ import annotations

FUZZY_THRESHOLD = 0.5


def _normalize(text: str) -> str:
    return " ".join(text.casefold().split())


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[len(b)]


def similarity(a: str, b: str) -> float:
    """1 - edits / max(len); 1.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def match_score(query: str, candidate: str) -> float:
    """Whole-string match score for one detection or token string."""
    q, c = _normalize(query), _normalize(candidate)
    if not q or not c:
        return 0.0
    if q in c:
        return 1.0
    score = similarity(q, c)
    return score if score >= FUZZY_THRESHOLD else 0.0


def windowed_match_score(query: str, text: str) -> float:
    """Best match of the query against word windows of the text.

    Window widths of the query's word count plus or minus one are scanned
    so a query can align to its own span inside a longer utterance instead
    of being diluted by the whole string.
    """
    q, t = _normalize(query), _normalize(text)
    if not q or not t:
        return 0.0
    if q in t:
        return 1.0
    q_words = q.split()
    t_words = t.split()
    widths = {w for w in (len(q_words) - 1, len(q_words), len(q_words) + 1) if w >= 1}
    best = 0.0
    for width in sorted(widths):
        if width > len(t_words):
            continue
        for i in range(len(t_words) - width + 1):
            best = max(best, similarity(q, " ".join(t_words[i : i + width])))
    return best if best >= FUZZY_THRESHOLD else 0.0
