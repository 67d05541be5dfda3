"""Corpus loading, tokenization, and the inverted n-gram index.

Documents come from a directory of ``.txt`` files or a line-delimited JSON
record file. Tokens are maximal runs of Unicode letters/digits, lowercased,
with optional accent folding (default on). Every contiguous token window of
length 1..max_n becomes an indexed n-gram occurrence; the index is the fact
base the rule engine evaluates against.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

MAX_NGRAM_ARITY = 5

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class IngestError(Exception):
    """Raised when a corpus source cannot be turned into documents."""


@dataclass(frozen=True)
class TokenizerConfig:
    """Normalization settings shared by indexing and rule-text lookup."""

    fold_accents: bool = True

    def to_dict(self) -> dict:
        return {"fold_accents": self.fold_accents}

    @classmethod
    def from_dict(cls, data: dict) -> "TokenizerConfig":
        return cls(fold_accents=bool(data.get("fold_accents", True)))


_NON_WORD_RE = re.compile(r"[\W_]+", re.UNICODE)


def _fold_accents(text: str) -> str:
    # decompose, drop combining marks, and discard any punctuation residue
    # compatibility decomposition may leave behind (e.g. parenthesized forms)
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return _NON_WORD_RE.sub("", stripped)


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[tuple[str, int, int]]:
    """Split ``text`` into (token, char_start, char_end) triples.

    Tokens are maximal letter/digit runs, lowercased; char spans always index
    the original text. With ``fold_accents`` the token text is additionally
    stripped of combining marks, so "unanimità" yields "unanimita".
    """
    tokens: list[tuple[str, int, int]] = []
    for match in _TOKEN_RE.finditer(text):
        raw = match.group()
        token = (_fold_accents(raw) if config.fold_accents else raw).lower()
        if token:
            tokens.append((token, match.start(), match.end()))
    return tokens


def normalize_gram(text: str, config: TokenizerConfig = TokenizerConfig()) -> str:
    """Canonical single-spaced form of an n-gram, for index keys and lookups."""
    return " ".join(tok for tok, _, _ in tokenize(text, config))


@dataclass
class Document:
    id: str
    source: str
    text: str
    tokens: list[tuple[str, int, int]]

    @property
    def token_texts(self) -> list[str]:
        return [tok for tok, _, _ in self.tokens]

    def check_invariants(self) -> None:
        prev_end = -1
        for tok, start, end in self.tokens:
            if not tok or tok != tok.lower():
                raise AssertionError(f"token {tok!r} not normalized")
            if not (0 <= start < end <= len(self.text)):
                raise AssertionError(f"span ({start},{end}) outside text bounds")
            if start < prev_end:
                raise AssertionError(f"span ({start},{end}) overlaps previous token")
            prev_end = end


@dataclass
class Corpus:
    documents: list[Document]
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)

    def __post_init__(self) -> None:
        self.by_id = {doc.id: doc for doc in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def doc(self, doc_id: str) -> Document:
        return self.by_id[doc_id]

    def content_hash(self) -> str:
        import hashlib

        digest = hashlib.sha256()
        for doc in self.documents:
            digest.update(doc.id.encode("utf-8"))
            digest.update(b"\x00")
            digest.update(doc.text.encode("utf-8"))
            digest.update(b"\x01")
        return digest.hexdigest()


def _documents_from_directory(root: Path, config: TokenizerConfig) -> list[Document]:
    paths = sorted(p for p in root.iterdir() if p.is_file() and p.suffix == ".txt")
    if not paths:
        raise IngestError(f"no .txt files found in {root}")
    docs = []
    for path in paths:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read {path}: {exc}") from exc
        docs.append(Document(id=path.stem, source=str(path), text=text, tokens=tokenize(text, config)))
    return docs


def _documents_from_records(path: Path, config: TokenizerConfig) -> list[Document]:
    docs = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}:{lineno}: invalid record: {exc}") from exc
        if "id" not in record or "text" not in record:
            raise IngestError(f"{path}:{lineno}: record needs 'id' and 'text' fields")
        doc_id = str(record["id"])
        text = str(record["text"])
        docs.append(Document(id=doc_id, source=f"{path}#{lineno}", text=text, tokens=tokenize(text, config)))
    if not docs:
        raise IngestError(f"no records found in {path}")
    return docs


def ingest_corpus(source: str | Path, config: TokenizerConfig = TokenizerConfig()) -> Corpus:
    """Load a corpus from a directory of ``.txt`` files or a JSONL record file.

    Documents are ordered by id; duplicate ids and empty texts are rejected.
    """
    root = Path(source)
    if not root.exists():
        raise IngestError(f"corpus source does not exist: {root}")
    if root.is_dir():
        docs = _documents_from_directory(root, config)
    else:
        docs = _documents_from_records(root, config)

    seen: dict[str, int] = defaultdict(int)
    for doc in docs:
        seen[doc.id] += 1
    duplicates = sorted(doc_id for doc_id, count in seen.items() if count > 1)
    if duplicates:
        raise IngestError(f"duplicate document ids: {', '.join(duplicates)}")

    empty = sorted(doc.id for doc in docs if not doc.text.strip())
    if empty:
        raise IngestError(f"documents with empty text: {', '.join(empty)}")

    docs.sort(key=lambda d: d.id)
    return Corpus(documents=docs, tokenizer=config)


@dataclass(frozen=True)
class NGramOccurrence:
    doc_id: str
    n: int
    text: str
    token_pos: int
    char_start: int
    char_end: int


def extract_ngrams(doc: Document, max_n: int) -> list[NGramOccurrence]:
    """Every contiguous token window of length 1..max_n, with source spans."""
    if not 1 <= max_n <= MAX_NGRAM_ARITY:
        raise ValueError(f"max_n must be in 1..{MAX_NGRAM_ARITY}, got {max_n}")
    occurrences = []
    tokens = doc.tokens
    for n in range(1, max_n + 1):
        for pos in range(len(tokens) - n + 1):
            window = tokens[pos : pos + n]
            occurrences.append(
                NGramOccurrence(
                    doc_id=doc.id,
                    n=n,
                    text=" ".join(tok for tok, _, _ in window),
                    token_pos=pos,
                    char_start=window[0][1],
                    char_end=window[-1][2],
                )
            )
    return occurrences


@dataclass
class NGramIndex:
    """Inverted index from (n, gram text) to occurrences, plus df counts.

    Immutable once built; safe to share across readers.
    """

    max_n: int
    tokenizer: TokenizerConfig
    grams: dict[tuple[int, str], list[NGramOccurrence]]
    doc_token_counts: dict[str, int]
    doc_ids: list[str]

    def __post_init__(self) -> None:
        self._df = {key: len({occ.doc_id for occ in occs}) for key, occs in self.grams.items()}
        self._doc_grams: dict[str, set[tuple[int, str]]] = defaultdict(set)
        self._unigram_counts: dict[tuple[str, str], int] = defaultdict(int)
        for (n, text), occs in self.grams.items():
            for occ in occs:
                self._doc_grams[occ.doc_id].add((n, text))
                if n == 1:
                    self._unigram_counts[(occ.doc_id, text)] += 1

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def normalize(self, text: str) -> str:
        return normalize_gram(text, self.tokenizer)

    def lookup(self, n: int, text: str) -> list[NGramOccurrence]:
        """Occurrences of the gram, after the same normalization as tokenize."""
        if not 1 <= n <= self.max_n:
            raise ValueError(f"n must be in 1..{self.max_n}, got {n}")
        return self.grams.get((n, self.normalize(text)), [])

    def doc_contains(self, doc_id: str, n: int, text: str) -> bool:
        return (n, self.normalize(text)) in self._doc_grams.get(doc_id, ())

    def occurrences_in_doc(self, doc_id: str) -> list[NGramOccurrence]:
        found = []
        for key in sorted(self._doc_grams.get(doc_id, ())):
            found.extend(occ for occ in self.grams[key] if occ.doc_id == doc_id)
        found.sort(key=lambda occ: (occ.n, occ.token_pos, occ.text))
        return found

    def df(self, n: int, text: str) -> int:
        return self._df.get((n, self.normalize(text)), 0)

    def unigram_count(self, doc_id: str, term: str) -> int:
        return self._unigram_counts.get((doc_id, term), 0)

    def unigrams(self) -> list[str]:
        return sorted(text for (n, text) in self.grams if n == 1)

    def to_dict(self) -> dict:
        return {
            "max_n": self.max_n,
            "tokenizer": self.tokenizer.to_dict(),
            "doc_ids": self.doc_ids,
            "doc_token_counts": dict(sorted(self.doc_token_counts.items())),
            "grams": {
                f"{n}\t{text}": [
                    [occ.doc_id, occ.token_pos, occ.char_start, occ.char_end] for occ in occs
                ]
                for (n, text), occs in sorted(self.grams.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def build_index(corpus: Corpus, max_n: int = 3) -> NGramIndex:
    """Index every document of the corpus. Deterministic for a fixed corpus."""
    if len(corpus) == 0:
        raise ValueError("cannot index an empty corpus")
    if not 1 <= max_n <= MAX_NGRAM_ARITY:
        raise ValueError(f"max_n must be in 1..{MAX_NGRAM_ARITY}, got {max_n}")
    grams: dict[tuple[int, str], list[NGramOccurrence]] = defaultdict(list)
    for doc in corpus:
        for occ in extract_ngrams(doc, max_n):
            grams[(occ.n, occ.text)].append(occ)
    for occs in grams.values():
        occs.sort(key=lambda occ: (occ.doc_id, occ.token_pos))
    return NGramIndex(
        max_n=max_n,
        tokenizer=corpus.tokenizer,
        grams=dict(grams),
        doc_token_counts={doc.id: len(doc.tokens) for doc in corpus},
        doc_ids=[doc.id for doc in corpus],
    )


def iter_gram_texts(index: NGramIndex, n: int) -> Iterable[str]:
    return sorted(text for (gram_n, text) in index.grams if gram_n == n)
