"""Reference implementation of the conlleval span segmentation rules.

Kept independent of seqlab.evaluation: spans are recovered with the
start-of-chunk / end-of-chunk predicate pair of the original scorer rather
than a stateful segmentation loop.
"""


def _split(tag):
    if tag == "O":
        return "O", None
    prefix, kind = tag.split("-", 1)
    return prefix, kind


def _is_chunk_end(prev, tag):
    p_prefix, p_kind = _split(prev)
    prefix, kind = _split(tag)
    if p_prefix == "O":
        return False
    if prefix == "O":
        return True
    if p_kind != kind:
        return True
    return prefix == "B"


def _is_chunk_start(prev, tag):
    p_prefix, p_kind = _split(prev)
    prefix, kind = _split(tag)
    if prefix == "O":
        return False
    if p_prefix == "O":
        return True
    if p_kind != kind:
        return True
    return prefix == "B"


def reference_spans(labels):
    """(start, end, type) triples per the conlleval repair convention."""
    spans = []
    start = None
    prev = "O"
    for i, tag in enumerate(list(labels) + ["O"]):
        if start is not None and _is_chunk_end(prev, tag):
            spans.append((start, i - 1, _split(prev)[1]))
            start = None
        if _is_chunk_start(prev, tag):
            start = i
        prev = tag
    return spans
