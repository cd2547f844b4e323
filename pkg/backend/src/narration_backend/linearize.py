"""Marker linearization of RDF triples: '<H> head <R> relation <T> tail'.

This is the wire-format counterpart of the analysis pipeline's rule: the
marker token prefixes each of head, relation, and tail, triples are joined
by single spaces, and fields never contain the marker substrings.
"""

from __future__ import annotations

MARKERS = ("<H>", "<R>", "<T>")


class MalformedRecord(ValueError):
    pass


def linearize_triples(triples) -> str:
    parts = []
    for head, relation, tail in triples:
        for name, field in (("head", head), ("relation", relation), ("tail", tail)):
            if not field or field != field.strip():
                raise MalformedRecord(f"bad {name} field {field!r}")
            if any(marker in field for marker in MARKERS):
                raise MalformedRecord(f"{name} field {field!r} contains a marker")
        parts.append(f"<H> {head} <R> {relation} <T> {tail}")
    if not parts:
        raise MalformedRecord("record has no triples")
    return " ".join(parts)


def parse_linearized(text: str):
    """Inverse of :func:`linearize_triples` on its image."""
    if not text.startswith("<H> "):
        raise MalformedRecord("linearization must start with '<H> '")
    triples = []
    for chunk in text.split("<H> ")[1:]:
        if " <R> " not in chunk:
            raise MalformedRecord(f"chunk {chunk!r} missing <R>")
        head, rest = chunk.split(" <R> ", 1)
        if " <T> " not in rest:
            raise MalformedRecord(f"chunk {chunk!r} missing <T>")
        relation, tail = rest.split(" <T> ", 1)
        tail = tail[:-1] if tail.endswith(" ") else tail
        if not head or not relation or not tail:
            raise MalformedRecord(f"empty field in chunk {chunk!r}")
        triples.append((head, relation, tail))
    return triples


def chunk_linearized(text: str, max_tokens: int):
    """Split an over-long linearization at triple boundaries.

    Each chunk re-linearizes a consecutive run of triples and stays within
    ``max_tokens`` whitespace tokens (a single triple longer than the limit
    becomes its own chunk rather than being split mid-triple).
    """
    triples = parse_linearized(text)
    chunks = []
    current: list = []
    current_len = 0
    for triple in triples:
        piece = f"<H> {triple[0]} <R> {triple[1]} <T> {triple[2]}"
        length = len(piece.split())
        if current and current_len + length > max_tokens:
            chunks.append(" ".join(current))
            current, current_len = [], 0
        current.append(piece)
        current_len += length
    if current:
        chunks.append(" ".join(current))
    return chunks
