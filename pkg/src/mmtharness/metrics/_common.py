from __future__ import annotations

from ..textproc import TokenSeq, tokenize_hi


def as_tokens(x) -> list[str]:
    """Accept a TokenSeq, a token list, or raw text (tokenized as Hindi)."""
    if isinstance(x, TokenSeq):
        return list(x.tokens)
    if isinstance(x, str):
        return list(tokenize_hi(x).tokens)
    return list(x)
