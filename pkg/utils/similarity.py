"""
Name similarity used to match atomic propositions against a library
"""

import re
from typing import Dict, Iterable, Optional, Sequence, Set, Tuple

SIMILARITY_THRESHOLD = 0.6

_DIGIT = re.compile(r"\d")


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs"""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def normalized_levenshtein(a: str, b: str) -> float:
    a, b = a.lower(), b.lower()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def name_tokens(name: str) -> Set[str]:
    return {part for part in name.lower().split("_") if part}


def token_jaccard(a: str, b: str) -> float:
    left, right = name_tokens(a), name_tokens(b)
    if not left and not right:
        return 1.0
    return len(left & right) / len(left | right)


def quantities_conflict(a: str, b: str) -> bool:
    """Both names carry quantities (digit-bearing tokens) and they differ"""
    left = {t for t in name_tokens(a) if _DIGIT.search(t)}
    right = {t for t in name_tokens(b) if _DIGIT.search(t)}
    return bool(left) and bool(right) and left != right


def ap_similarity(a: str, b: str) -> float:
    if a == b:
        return 1.0
    if quantities_conflict(a, b):
        return 0.0
    return max(normalized_levenshtein(a, b), token_jaccard(a, b))


def best_match(name: str, library: Sequence[str]) -> Tuple[Optional[str], float]:
    """Most similar library entry; ties go to the earlier entry"""
    best, best_score = None, -1.0
    for candidate in library:
        score = ap_similarity(name, candidate)
        if score > best_score:
            best, best_score = candidate, score
    return best, max(best_score, 0.0)


def similarity_map(names: Iterable[str], library: Sequence[str],
                   threshold: float = SIMILARITY_THRESHOLD) -> Dict[str, str]:
    """Rename map for names whose best library match clears the threshold"""
    mapping = {}
    for name in names:
        if name in library:
            continue
        match, score = best_match(name, library)
        if match is not None and score >= threshold:
            mapping[name] = match
    return mapping
