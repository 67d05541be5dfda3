"""Recursive seeded k-means over the feature matrix, producing a typology.

Spherical variant: documents are unit rows, centroids are L2-normalized
means, and the objective is the within-cluster sum of cosine distances.
Cluster codes follow the ``#i#j`` convention: each level appends ``#<index>``
to the parent code, the root being the empty code.
"""

from __future__ import annotations

import copy
import hashlib
import json
import zlib
from dataclasses import dataclass, field

import numpy as np

from .vectorize import FeatureMatrix

_MONOTONE_TOL = 1e-9
_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class ClusterParams:
    k: int = 10
    depth: int = 2
    restarts: int = 10
    max_iter: int = 100
    seed: int = 0
    min_size: int | None = None
    max_size: int | None = None
    min_split: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @property
    def effective_min_split(self) -> int:
        return self.min_split if self.min_split is not None else 2 * self.k

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "depth": self.depth,
            "restarts": self.restarts,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "min_size": self.min_size,
            "max_size": self.max_size,
            "min_split": self.min_split,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterParams":
        return cls(**{key: data.get(key, default) for key, default in (
            ("k", 10), ("depth", 2), ("restarts", 10), ("max_iter", 100),
            ("seed", 0), ("min_size", None), ("max_size", None), ("min_split", None),
        )})


@dataclass
class KMeansResult:
    assignment: dict[str, int]
    centroids: np.ndarray
    objective: float
    iterations: int


def _restart_rng(seed: int, node_code: str, restart: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(node_code.encode("utf-8")), restart])


def _clip_distance(raw: np.ndarray | float):
    # distances within float noise of zero are exact zeros (a point compared
    # against itself after renormalization)
    return np.where(np.asarray(raw) < _ZERO_TOL, 0.0, raw)


def _distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # rows/centroids are unit or zero vectors, so 1 - dot is the cosine
    # distance and zero vectors land at 1 automatically
    return _clip_distance(1.0 - points @ centroids.T)


def _normalized_mean(points: np.ndarray) -> np.ndarray:
    total = points.sum(axis=0)
    norm = np.linalg.norm(total)
    return total / norm if norm > 0.0 else np.zeros_like(total)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = len(points)
    chosen = [int(rng.integers(m))]
    d2 = np.maximum(0.0, 1.0 - points @ points[chosen[0]]) ** 2
    while len(chosen) < k:
        total = d2.sum()
        if total > 0.0:
            pick = int(rng.choice(m, p=d2 / total))
        else:
            remaining = [i for i in range(m) if i not in set(chosen)]
            pick = remaining[int(rng.integers(len(remaining)))]
        chosen.append(pick)
        d2 = np.minimum(d2, np.maximum(0.0, 1.0 - points @ points[pick]) ** 2)
    return points[chosen].copy()


def _kmeans_once(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int) -> tuple[np.ndarray, np.ndarray, float, int]:
    m = len(points)
    centroids = _kmeans_pp_init(points, k, rng)
    assignment: np.ndarray | None = None
    prev_objective = float("inf")
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dist = _distances(points, centroids)
        new_assignment = np.argmin(dist, axis=1)  # argmin ties -> lowest index

        counts = np.bincount(new_assignment, minlength=k)
        for j in np.flatnonzero(counts == 0):
            # reseed the empty cluster with the worst-fit point, never
            # stealing the only member of another cluster
            point_dist = dist[np.arange(m), new_assignment]
            for i in np.argsort(-point_dist, kind="stable"):
                if counts[new_assignment[i]] > 1:
                    counts[new_assignment[i]] -= 1
                    new_assignment[i] = j
                    counts[j] = 1
                    centroids[j] = points[i]
                    break

        for j in range(k):
            members = points[new_assignment == j]
            if len(members):
                centroids[j] = _normalized_mean(members)

        objective = float(_distances(points, centroids)[np.arange(m), new_assignment].sum())
        if objective > prev_objective + _MONOTONE_TOL:
            raise AssertionError(
                f"k-means objective increased: {prev_objective} -> {objective}"
            )
        prev_objective = objective
        if assignment is not None and np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
    return assignment, centroids, prev_objective, iterations


def kmeans(matrix: FeatureMatrix, rows: list[str], params: ClusterParams, node_code: str = "") -> KMeansResult:
    """Best-of-restarts seeded k-means over a subset of matrix rows.

    Fewer rows than k degenerates to one singleton cluster per row.
    """
    if not rows:
        raise ValueError("kmeans needs at least one row")
    ordered = sorted(rows, key=lambda doc_id: matrix.row_index[doc_id])
    points = matrix.unit_rows()[[matrix.row_index[doc_id] for doc_id in ordered]]

    if len(ordered) < params.k:
        centroids = points.copy()
        objective = float(_clip_distance(1.0 - np.einsum("ij,ij->i", points, points)).sum())
        return KMeansResult(
            assignment={doc_id: i for i, doc_id in enumerate(ordered)},
            centroids=centroids,
            objective=objective,
            iterations=0,
        )

    best: tuple[np.ndarray, np.ndarray, float, int] | None = None
    for restart in range(params.restarts):
        rng = _restart_rng(params.seed, node_code, restart)
        run = _kmeans_once(points, params.k, rng, params.max_iter)
        if best is None or run[2] < best[2]:
            best = run
    assignment, centroids, objective, iterations = best
    return KMeansResult(
        assignment={doc_id: int(assignment[i]) for i, doc_id in enumerate(ordered)},
        centroids=centroids,
        objective=objective,
        iterations=iterations,
    )


def enforce_size_bounds(
    assignment: dict[str, int],
    matrix: FeatureMatrix,
    params: ClusterParams,
) -> tuple[dict[str, int], list[str]]:
    """Move members out of oversized clusters; report undersized ones.

    Each move takes the member farthest from its cluster centroid to the
    nearest cluster that still has room, so the loop always terminates.
    Clusters below min_size are only warned about, never force-merged.
    """
    assignment = dict(assignment)
    n_clusters = max(assignment.values()) + 1 if assignment else 0
    warnings: list[str] = []
    if params.max_size is not None:
        if n_clusters * params.max_size < len(assignment):
            raise ValueError(
                f"infeasible bounds: {n_clusters} clusters x max_size {params.max_size} "
                f"< {len(assignment)} rows"
            )
        while True:
            sizes = [0] * n_clusters
            for cluster in assignment.values():
                sizes[cluster] += 1
            oversized = [j for j, size in enumerate(sizes) if size > params.max_size]
            if not oversized:
                break
            j = oversized[0]
            centroids = _assignment_centroids(assignment, matrix, n_clusters)
            members = sorted(doc_id for doc_id, cluster in assignment.items() if cluster == j)
            far_doc = max(
                members,
                key=lambda doc_id: (_row_distance(matrix, doc_id, centroids[j]), doc_id),
            )
            open_clusters = [c for c in range(n_clusters) if c != j and sizes[c] < params.max_size]
            target = min(
                open_clusters,
                key=lambda c: (_row_distance(matrix, far_doc, centroids[c]), c),
            )
            assignment[far_doc] = target
    if params.min_size is not None:
        sizes = [0] * n_clusters
        for cluster in assignment.values():
            sizes[cluster] += 1
        for j, size in enumerate(sizes):
            if size < params.min_size:
                warnings.append(f"cluster {j} has {size} members, below min_size {params.min_size}")
    return assignment, warnings


def _assignment_centroids(assignment: dict[str, int], matrix: FeatureMatrix, n_clusters: int) -> np.ndarray:
    unit = matrix.unit_rows()
    centroids = np.zeros((n_clusters, unit.shape[1]))
    for j in range(n_clusters):
        rows = [matrix.row_index[doc_id] for doc_id, c in assignment.items() if c == j]
        if rows:
            centroids[j] = _normalized_mean(unit[rows])
    return centroids


def _row_distance(matrix: FeatureMatrix, doc_id: str, centroid: np.ndarray) -> float:
    point = matrix.unit_rows()[matrix.row_index[doc_id]]
    return float(_clip_distance(1.0 - float(point @ centroid)))


@dataclass
class TypologyNode:
    code: str
    members: list[str]
    top_terms: list[tuple[str, float]] = field(default_factory=list)
    children: list["TypologyNode"] = field(default_factory=list)
    centroid: np.ndarray | None = None

    def find(self, code: str) -> "TypologyNode | None":
        if self.code == code:
            return self
        for child in self.children:
            if code == child.code or code.startswith(child.code + "#"):
                return child.find(code)
        return None

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "members": sorted(self.members),
            "top_terms": [[term, score] for term, score in self.top_terms],
            "children": [child.to_dict() for child in self.children],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TypologyNode":
        return cls(
            code=data["code"],
            members=list(data["members"]),
            top_terms=[(term, float(score)) for term, score in data["top_terms"]],
            children=[cls.from_dict(child) for child in data["children"]],
        )


@dataclass
class Typology:
    root: TypologyNode
    params: ClusterParams
    objective_per_node: dict[str, float] = field(default_factory=dict)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    def find(self, code: str) -> TypologyNode:
        node = self.root.find(code)
        if node is None:
            raise KeyError(f"unknown typology code: {code!r}")
        return node

    def leaves(self) -> list[TypologyNode]:
        return [node for node in self.root.walk() if not node.children]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "objective_per_node": dict(sorted(self.objective_per_node.items())),
            "warnings": [[code, message] for code, message in self.warnings],
            "root": self.root.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Typology":
        return cls(
            root=TypologyNode.from_dict(data["root"]),
            params=ClusterParams.from_dict(data["params"]),
            objective_per_node={code: float(obj) for code, obj in data["objective_per_node"].items()},
            warnings=[(code, message) for code, message in data["warnings"]],
        )

    def to_dot(self) -> str:
        lines = ["digraph typology {", '  node [shape=box];']
        for node in self.root.walk():
            name = node.code or "root"
            label = f"{name}\\n{len(node.members)} docs"
            if node.top_terms:
                label += "\\n" + ", ".join(term for term, _ in node.top_terms[:3])
            lines.append(f'  "{name}" [label="{label}"];')
            for child in node.children:
                lines.append(f'  "{name}" -> "{child.code}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def typology_hash(typology: Typology) -> str:
    return hashlib.sha256(typology.to_json().encode("utf-8")).hexdigest()


def representative_terms(node: TypologyNode, matrix: FeatureMatrix, limit: int = 15) -> list[tuple[str, float]]:
    """Highest-weighted centroid terms, descending, ties broken alphabetically."""
    centroid = node.centroid
    if centroid is None:
        rows = [matrix.row_index[doc_id] for doc_id in node.members]
        centroid = _normalized_mean(matrix.unit_rows()[rows])
    scored = [
        (term, float(weight))
        for term, weight in zip(matrix.features, centroid)
        if weight > 0.0
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:limit]


def _cluster_node(
    node: TypologyNode,
    matrix: FeatureMatrix,
    params: ClusterParams,
    remaining_depth: int,
    objectives: dict[str, float],
    warnings: list[tuple[str, str]],
) -> None:
    if remaining_depth == 0:
        return
    result = kmeans(matrix, node.members, params, node_code=node.code)
    assignment = result.assignment
    if params.max_size is not None or params.min_size is not None:
        assignment, bound_warnings = enforce_size_bounds(assignment, matrix, params)
        warnings.extend((node.code, message) for message in bound_warnings)
    groups: dict[int, list[str]] = {}
    for doc_id, cluster in assignment.items():
        groups.setdefault(cluster, []).append(doc_id)
    for cluster in sorted(groups):
        child = TypologyNode(code=f"{node.code}#{cluster}", members=sorted(groups[cluster]))
        _finish_node(child, matrix, objectives)
        node.children.append(child)
    for child in node.children:
        if len(child.members) >= params.effective_min_split:
            _cluster_node(child, matrix, params, remaining_depth - 1, objectives, warnings)


def _finish_node(node: TypologyNode, matrix: FeatureMatrix, objectives: dict[str, float]) -> None:
    rows = [matrix.row_index[doc_id] for doc_id in node.members]
    unit = matrix.unit_rows()[rows]
    node.centroid = _normalized_mean(unit)
    node.top_terms = representative_terms(node, matrix)
    objectives[node.code] = float(_clip_distance(1.0 - unit @ node.centroid).sum())


def build_typology(matrix: FeatureMatrix, params: ClusterParams) -> Typology:
    """Cluster the corpus recursively into a coded tree of document groups."""
    objectives: dict[str, float] = {}
    warnings: list[tuple[str, str]] = []
    root = TypologyNode(code="", members=sorted(matrix.doc_ids))
    _finish_node(root, matrix, objectives)
    _cluster_node(root, matrix, params, params.depth, objectives, warnings)
    return Typology(root=root, params=params, objective_per_node=objectives, warnings=warnings)


def _in_subtree(code: str, subtree_code: str) -> bool:
    return code == subtree_code or code.startswith(subtree_code + "#")


def recluster_subtree(
    typology: Typology,
    matrix: FeatureMatrix,
    code: str,
    params: ClusterParams,
) -> Typology:
    """Rebuild the subtree rooted at ``code``; everything else is untouched."""
    rebuilt = copy.deepcopy(typology)
    try:
        node = rebuilt.find(code)
    except KeyError:
        raise ValueError(f"unknown typology code: {code!r}") from None
    rebuilt.objective_per_node = {
        c: obj for c, obj in rebuilt.objective_per_node.items() if not _in_subtree(c, code)
    }
    rebuilt.warnings = [
        (c, message) for c, message in rebuilt.warnings if not _in_subtree(c, code)
    ]
    node.children = []
    _finish_node(node, matrix, rebuilt.objective_per_node)
    _cluster_node(node, matrix, params, params.depth, rebuilt.objective_per_node, rebuilt.warnings)
    if code == "":
        rebuilt.params = params
    return rebuilt
