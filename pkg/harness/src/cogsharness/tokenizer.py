"""Whitespace-marker subword tokenizer with ordered added tokens.

Mirrors the behavior class of marker-based subword tokenizers: whitespace is
a character, each word is segmented as one marker-prefixed piece string, and
user-added tokens are cut out of the raw text *before* subword segmentation,
one added token at a time in the order they were added. That ordering is
load-bearing. For a sentinel like ``[w0]`` the correct setup adds the
whitespace-prepended variant ``" [w0]"`` first and the bare variant second:

* only the bare variant: the space before a sequence-medial sentinel is
  dropped at decode time;
* only the prepended variant: a sequence-initial sentinel is shattered into
  single characters;
* both but bare first: the bare variant wins the extraction and the medial
  space is lost again.

Word-level segmentation drops a segment-trailing space (the space belongs
to the following word, which the extraction removed), which is exactly what
produces the first and third failure modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MARKER = "▁"

PAD, EOS, UNK = 0, 1, 2
_SPECIALS = ["<pad>", "</s>", "<unk>"]


class TokenizerError(Exception):
    pass


@dataclass
class MarkerTokenizer:
    piece_to_id: dict[str, int] = field(default_factory=dict)
    id_to_piece: dict[int, str] = field(default_factory=dict)
    added_order: list[str] = field(default_factory=list)
    added_to_id: dict[str, int] = field(default_factory=dict)
    unused_ids: list[int] = field(default_factory=list)
    _max_piece_len: int = 1

    # -- construction -------------------------------------------------------

    @classmethod
    def train(cls, texts, reserve_unused: int = 8) -> "MarkerTokenizer":
        """Build the base vocabulary: one piece per word plus character pieces.

        ``reserve_unused`` extra ids are allocated but never produced by
        encoding; they model leftover embedding rows.
        """
        tok = cls()
        for i, sp in enumerate(_SPECIALS):
            tok.piece_to_id[sp] = i
            tok.id_to_piece[i] = sp
        pieces: set[str] = {MARKER}
        for text in texts:
            for word in text.split(" "):
                if word:
                    pieces.add(MARKER + word)
                    pieces.update(word)
        for piece in sorted(pieces):
            pid = len(tok.piece_to_id)
            tok.piece_to_id[piece] = pid
            tok.id_to_piece[pid] = piece
        for k in range(reserve_unused):
            pid = len(tok.piece_to_id)
            name = f"<unused_{k}>"
            tok.piece_to_id[name] = pid
            tok.id_to_piece[pid] = name
            tok.unused_ids.append(pid)
        tok._max_piece_len = max(len(p) for p in tok.piece_to_id)
        return tok

    @property
    def vocab_size(self) -> int:
        return len(self.piece_to_id) + len(self.added_order)

    def add_token(self, token: str) -> int:
        """Register an added token; extraction honors registration order."""
        if token in self.added_to_id:
            raise TokenizerError(f"token {token!r} was already added")
        if token in self.piece_to_id:
            raise TokenizerError(f"token {token!r} already exists in the base vocabulary")
        tid = self.vocab_size
        self.added_order.append(token)
        self.added_to_id[token] = tid
        return tid

    def is_added_id(self, tid: int) -> bool:
        return tid >= len(self.piece_to_id)

    # -- encoding -----------------------------------------------------------

    def _extract_added(self, text: str) -> list[tuple[str, str]]:
        segments: list[tuple[str, str]] = [("raw", text)]
        for token in self.added_order:
            out: list[tuple[str, str]] = []
            for kind, value in segments:
                if kind != "raw" or token not in value:
                    out.append((kind, value))
                    continue
                parts = value.split(token)
                for i, part in enumerate(parts):
                    if part:
                        out.append(("raw", part))
                    if i < len(parts) - 1:
                        out.append(("added", token))
            segments = out
        return segments

    def _segment_pieces(self, marked: str) -> list[int]:
        ids: list[int] = []
        i = 0
        n = len(marked)
        while i < n:
            for length in range(min(self._max_piece_len, n - i), 0, -1):
                piece = marked[i : i + length]
                pid = self.piece_to_id.get(piece)
                if pid is not None:
                    ids.append(pid)
                    i += length
                    break
            else:
                ids.append(UNK)
                i += 1
        return ids

    def encode(self, text: str) -> list[int]:
        ids: list[int] = []
        for kind, value in self._extract_added(text):
            if kind == "added":
                ids.append(self.added_to_id[value])
                continue
            # Word-level marker substitution: every word becomes one
            # marker-prefixed chunk; a trailing space leaves no trace.
            marked = "".join(MARKER + w for w in value.split(" ") if w)
            ids.extend(self._segment_pieces(marked))
        return ids

    # -- decoding -----------------------------------------------------------

    def decode(self, ids) -> str:
        parts: list[str] = []
        first_is_piece = None
        for tid in ids:
            tid = int(tid)
            if tid in (PAD, EOS):
                continue
            if self.is_added_id(tid):
                parts.append(self.added_order[tid - len(self.piece_to_id)])
                if first_is_piece is None:
                    first_is_piece = False
            else:
                piece = self.id_to_piece.get(tid, "")
                if piece in _SPECIALS or piece.startswith("<unused_"):
                    piece = ""
                parts.append(piece)
                if first_is_piece is None and piece:
                    first_is_piece = True
        text = "".join(parts).replace(MARKER, " ")
        if first_is_piece and text.startswith(" "):
            text = text[1:]
        return text
