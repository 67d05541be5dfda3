"""Attribute matrix construction: unigram features weighted by TF-IDF.

Feature selection applies document-frequency floors/ceilings, stopword
removal, and an optional cap on the feature count (ranked by corpus-wide
TF-IDF mass). The distance used downstream is cosine distance over the
resulting rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, NGramIndex, normalize_gram


class FeatureSelectionError(Exception):
    """Raised when feature selection or matrix construction yields nothing usable."""


@dataclass(frozen=True)
class FeatureConfig:
    min_df: int = 1
    max_df_ratio: float = 1.0
    max_features: int | None = None
    stopwords: frozenset[str] = frozenset()
    feature_weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if not 0 < self.max_df_ratio <= 1:
            raise ValueError("max_df_ratio must be in (0, 1]")
        if any(mult <= 0 for mult in self.feature_weights.values()):
            raise ValueError("feature weight multipliers must be > 0")

    def to_dict(self) -> dict:
        return {
            "min_df": self.min_df,
            "max_df_ratio": self.max_df_ratio,
            "max_features": self.max_features,
            "stopwords": sorted(self.stopwords),
            "feature_weights": dict(sorted(self.feature_weights.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureConfig":
        return cls(
            min_df=data.get("min_df", 1),
            max_df_ratio=data.get("max_df_ratio", 1.0),
            max_features=data.get("max_features"),
            stopwords=frozenset(data.get("stopwords", ())),
            feature_weights=dict(data.get("feature_weights", {})),
        )


def tfidf_score(count: int, df: int, n_docs: float) -> float:
    """Log-scaled term frequency times raw-ratio inverse document frequency."""
    if count <= 0:
        return 0.0
    return (1.0 + math.log(count)) * math.log(n_docs / df)


def select_features(index: NGramIndex, config: FeatureConfig = FeatureConfig()) -> list[str]:
    """Unigrams passing the df floor/ceiling and stopword filter, sorted.

    When more than ``max_features`` survive, the top ones by corpus-wide
    TF-IDF mass are kept (multipliers do not influence the ranking, so a
    weight change never alters which features are selected).
    """
    n_docs = index.n_docs
    stop = {normalize_gram(term, index.tokenizer) for term in config.stopwords}
    kept = []
    for term in index.unigrams():
        df = index.df(1, term)
        if df < config.min_df:
            continue
        if df / n_docs > config.max_df_ratio:
            continue
        if term in stop:
            continue
        kept.append(term)
    if not kept:
        raise FeatureSelectionError(
            "feature selection produced an empty set; loosen min_df/max_df_ratio or the stopword list"
        )
    if config.max_features is not None and len(kept) > config.max_features:
        mass = {}
        for term in kept:
            df = index.df(1, term)
            mass[term] = sum(
                tfidf_score(index.unigram_count(doc_id, term), df, n_docs)
                for doc_id in index.doc_ids
            )
        kept.sort(key=lambda term: (-mass[term], term))
        kept = kept[: config.max_features]
    return sorted(kept)


def tfidf_weight(
    index: NGramIndex,
    features: list[str],
    doc_id: str,
    config: FeatureConfig = FeatureConfig(),
) -> np.ndarray:
    """TF-IDF weight vector of one document over the selected features."""
    n_docs = index.n_docs
    vector = np.zeros(len(features))
    for j, term in enumerate(features):
        count = index.unigram_count(doc_id, term)
        if count:
            weight = tfidf_score(count, index.df(1, term), n_docs)
            vector[j] = weight * config.feature_weights.get(term, 1.0)
    return vector


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v); a zero vector is at distance 1 from everything."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        return 1.0
    return max(0.0, 1.0 - float(np.dot(u, v) / (norm_u * norm_v)))


@dataclass
class FeatureMatrix:
    doc_ids: list[str]
    features: list[str]
    weights: np.ndarray
    row_norms: np.ndarray
    degenerate: list[str]
    dropped_features: list[str]

    def __post_init__(self) -> None:
        self.row_index = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
        self._unit_rows: np.ndarray | None = None

    def row(self, doc_id: str) -> np.ndarray:
        return self.weights[self.row_index[doc_id]]

    def unit_rows(self) -> np.ndarray:
        """Rows scaled to unit L2 norm; degenerate rows stay zero."""
        if self._unit_rows is None:
            norms = np.where(self.row_norms == 0.0, 1.0, self.row_norms)
            self._unit_rows = self.weights / norms[:, None]
        return self._unit_rows

    def to_csv_triplets(self) -> str:
        """Sparse (doc_id, term, weight) rows for debugging."""
        lines = ["doc_id,term,weight"]
        for i, doc_id in enumerate(self.doc_ids):
            for j, term in enumerate(self.features):
                w = self.weights[i, j]
                if w != 0.0:
                    lines.append(f"{doc_id},{term},{w!r}")
        return "\n".join(lines) + "\n"


def build_feature_matrix(
    corpus: Corpus,
    index: NGramIndex,
    config: FeatureConfig = FeatureConfig(),
) -> FeatureMatrix:
    """Documents x features TF-IDF matrix, rows in corpus order.

    Features whose column is all zero (terms present in every document, so
    idf = 0) are dropped and reported; rows with zero norm are flagged as
    degenerate but kept clusterable.
    """
    features = select_features(index, config)
    doc_ids = [doc.id for doc in corpus]
    weights = np.vstack([tfidf_weight(index, features, doc_id, config) for doc_id in doc_ids])

    nonzero_cols = np.any(weights != 0.0, axis=0)
    dropped = [term for term, keep in zip(features, nonzero_cols) if not keep]
    if dropped:
        features = [term for term, keep in zip(features, nonzero_cols) if keep]
        weights = weights[:, nonzero_cols]
    if not features:
        raise FeatureSelectionError("all selected features weigh zero everywhere; loosen thresholds")

    row_norms = np.linalg.norm(weights, axis=1)
    degenerate = [doc_id for doc_id, norm in zip(doc_ids, row_norms) if norm == 0.0]
    if len(degenerate) == len(doc_ids):
        raise FeatureSelectionError("every document row is degenerate (all-zero)")
    return FeatureMatrix(
        doc_ids=doc_ids,
        features=features,
        weights=weights,
        row_norms=row_norms,
        degenerate=degenerate,
        dropped_features=dropped,
    )
