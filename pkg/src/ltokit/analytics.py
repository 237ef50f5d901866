"""Ontology-aware retrieval over an annotated corpus.

A story tagged with a specific theme also counts for every ancestor of that
theme. Enrichment, differential usage, similarity, recommendation and
clustering all work on that propagated view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection, Mapping

from .diagnostics import AnalysisError, UnknownStoryError
from .ontology import ThemeOntology
from .stats import bh_adjust, bonferroni_adjust, fisher_two_sided, hypergeometric_upper_tail
from .textio import AnnotatedCorpus, StoryEntry

__all__ = [
    "TIER_WEIGHTS",
    "DifferentialRow",
    "EnrichmentRow",
    "ThemeIncidence",
    "agglomerative_cluster",
    "differential_usage",
    "enrich",
    "propagate",
    "recommend",
    "stories_with_theme",
    "story_similarity",
    "story_weights",
]

TIER_WEIGHTS = {"choice": 3, "major": 2, "minor": 1}


@dataclass(frozen=True)
class ThemeIncidence:
    """Per-theme story sets after ancestor propagation.

    ``stories[t]`` holds every story annotated with ``t`` or a descendant of
    ``t``; ``direct[t]`` counts stories annotated with ``t`` itself.
    """

    stories: Mapping[str, frozenset[str]]
    direct: Mapping[str, int]

    def __getitem__(self, theme: str) -> frozenset[str]:
        return self.stories[theme]

    def count(self, theme: str) -> int:
        return len(self.stories[theme])


def propagate(corpus: AnnotatedCorpus, ont: ThemeOntology) -> ThemeIncidence:
    """Propagate every annotation to the annotated theme's ancestors.

    Raises :class:`~ltokit.diagnostics.UnknownThemeError` for annotations the
    ontology does not know (i.e. a corpus that was not cross-checked).
    """
    hits: dict[str, set[str]] = {name: set() for name in ont}
    direct: dict[str, int] = {name: 0 for name in ont}
    for story in corpus:
        for a in story.annotations:
            name = ont.resolve(a.theme)
            direct[name] += 1
            hits[name].add(story.story_id)
            for anc in ont.ancestor_set(name):
                hits[anc].add(story.story_id)
    return ThemeIncidence(
        stories={k: frozenset(v) for k, v in hits.items()},
        direct=direct,
    )


def stories_with_theme(corpus: AnnotatedCorpus, ont: ThemeOntology, theme: str) -> list[str]:
    """Ids of stories annotated with ``theme`` or any of its descendants."""
    name = ont.resolve(theme)
    return sorted(
        s.story_id for s in corpus if any(ont.subsumes(name, a.theme) for a in s.annotations)
    )


def _adjust(pvalues, correction):
    if correction == "bh":
        return bh_adjust(pvalues)
    if correction == "bonferroni":
        return bonferroni_adjust(pvalues)
    raise ValueError(f"unknown correction {correction!r}; use 'bh' or 'bonferroni'")


def _story_ids(corpus, ids):
    ids = set(ids)
    for sid in sorted(ids):
        if sid not in corpus:
            raise UnknownStoryError(sid)
    return ids


@dataclass(frozen=True)
class EnrichmentRow:
    theme: str
    k: int
    n: int
    K: int
    N: int
    p: float
    q: float

    def as_dict(self) -> dict:
        return {"theme": self.theme, "k": self.k, "n": self.n, "K": self.K, "N": self.N, "p": self.p, "q": self.q}


def enrich(
    corpus: AnnotatedCorpus,
    ont: ThemeOntology,
    query_ids: Collection[str],
    background_ids: Collection[str] | None = None,
    min_count: int = 2,
    correction: str = "bh",
) -> list[EnrichmentRow]:
    """Over-representation of themes in ``query_ids`` relative to a background.

    The background defaults to the whole corpus. One row per non-root theme
    with at least ``min_count`` background hits, sorted by (p, theme).
    """
    query = _story_ids(corpus, query_ids)
    if not query:
        raise AnalysisError("EMPTY_QUERY", "query story set is empty")
    background = set(corpus.ids()) if background_ids is None else _story_ids(corpus, background_ids)
    if not background:
        raise AnalysisError("EMPTY_BACKGROUND", "background story set is empty")
    if not query <= background:
        missing = ", ".join(sorted(query - background))
        raise AnalysisError("QUERY_NOT_IN_BACKGROUND", f"query stories missing from background: {missing}")

    incidence = propagate(corpus, ont)
    n, N = len(query), len(background)
    raw = []
    for theme in ont:
        if theme == ont.root:
            continue
        hits = incidence[theme]
        K = len(hits & background)
        if K < min_count or K == 0:
            continue
        k = len(hits & query)
        raw.append((theme, k, K, hypergeometric_upper_tail(k, K, n, N)))
    qs = _adjust([r[3] for r in raw], correction)
    rows = [EnrichmentRow(t, k, n, K, N, p, q) for (t, k, K, p), q in zip(raw, qs)]
    rows.sort(key=lambda r: (r.p, r.theme))
    return rows


@dataclass(frozen=True)
class DifferentialRow:
    theme: str
    hits_a: int
    misses_a: int
    hits_b: int
    misses_b: int
    p: float
    q: float

    def as_dict(self) -> dict:
        return {
            "theme": self.theme,
            "hits_a": self.hits_a,
            "misses_a": self.misses_a,
            "hits_b": self.hits_b,
            "misses_b": self.misses_b,
            "p": self.p,
            "q": self.q,
        }


def differential_usage(
    corpus: AnnotatedCorpus,
    ont: ThemeOntology,
    group_a: Collection[str],
    group_b: Collection[str],
    min_count: int = 2,
    correction: str = "bh",
) -> list[DifferentialRow]:
    """Two-sided Fisher test per theme between two disjoint story groups.

    Themes whose combined hit count is below ``min_count`` are skipped.
    """
    a = _story_ids(corpus, group_a)
    b = _story_ids(corpus, group_b)
    if not a or not b:
        raise AnalysisError("EMPTY_GROUP", "both groups need at least one story")
    if a & b:
        raise AnalysisError("GROUP_OVERLAP", f"stories in both groups: {', '.join(sorted(a & b))}")
    incidence = propagate(corpus, ont)
    raw = []
    for theme in ont:
        if theme == ont.root:
            continue
        hits = incidence[theme]
        ha, hb = len(hits & a), len(hits & b)
        if ha + hb < min_count or ha + hb == 0:
            continue
        table = (ha, len(a) - ha, hb, len(b) - hb)
        raw.append((theme, table, fisher_two_sided(*table)))
    qs = _adjust([r[2] for r in raw], correction)
    rows = [DifferentialRow(t, *table, p, q) for (t, table, p), q in zip(raw, qs)]
    rows.sort(key=lambda r: (r.p, r.theme))
    return rows


def story_weights(story: StoryEntry, ont: ThemeOntology) -> dict[str, int]:
    """Propagated tier weights: each theme gets the best tier found at it or below it.

    The root is left out; it carries no information.
    """
    weights: dict[str, int] = {}
    for a in story.annotations:
        name = ont.resolve(a.theme)
        w = TIER_WEIGHTS[a.tier]
        for t in (name, *ont.ancestor_set(name)):
            if t != ont.root and weights.get(t, 0) < w:
                weights[t] = w
    return weights


def _weighted_jaccard(wa: Mapping[str, int], wb: Mapping[str, int]) -> float:
    keys = wa.keys() | wb.keys()
    if not keys:
        return 0.0
    num = sum(min(wa.get(t, 0), wb.get(t, 0)) for t in keys)
    den = sum(max(wa.get(t, 0), wb.get(t, 0)) for t in keys)
    return num / den


def story_similarity(corpus: AnnotatedCorpus, ont: ThemeOntology, a: str, b: str) -> float:
    """Weighted Jaccard similarity of two stories' propagated weights."""
    return _weighted_jaccard(story_weights(corpus.story(a), ont), story_weights(corpus.story(b), ont))


def recommend(corpus: AnnotatedCorpus, ont: ThemeOntology, story_id: str, k: int = 5) -> list[tuple[str, float]]:
    """Top-``k`` most similar other stories, ties broken by story id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    target = story_weights(corpus.story(story_id), ont)
    scored = [
        (sid, _weighted_jaccard(target, story_weights(s, ont)))
        for sid, s in corpus.stories.items()
        if sid != story_id
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def agglomerative_cluster(
    corpus: AnnotatedCorpus, ont: ThemeOntology, threshold: float
) -> list[list[str]]:
    """Average-linkage clustering on ``1 - similarity``.

    Clusters merge while the closest pair is at distance ``<= threshold``.
    Ties go to the lexicographically smallest pair of cluster labels, where a
    cluster's label is its smallest story id. Returns sorted member lists,
    ordered by label.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    ids = corpus.ids()
    if not ids:
        raise ValueError("cannot cluster an empty corpus")
    weights = {sid: story_weights(corpus.story(sid), ont) for sid in ids}

    members = {sid: [sid] for sid in ids}
    # summed pairwise distance between clusters, keyed by ordered label pair
    total: dict[tuple[str, str], float] = {}
    for i, x in enumerate(ids):
        for y in ids[i + 1:]:
            total[x, y] = 1.0 - _weighted_jaccard(weights[x], weights[y])

    def pair(x, y):
        return (x, y) if x < y else (y, x)

    while len(members) > 1:
        best = None
        for (x, y), s in total.items():
            d = s / (len(members[x]) * len(members[y]))
            key = (d, x, y)
            if best is None or key < best:
                best = key
        d, x, y = best
        if d > threshold and not math.isclose(d, threshold, rel_tol=0.0, abs_tol=1e-12):
            break
        # y merges into x; x < y so x stays the label
        for z in members:
            if z in (x, y):
                continue
            total[pair(x, z)] = total[pair(x, z)] + total.pop(pair(y, z))
        del total[x, y]
        members[x] = sorted(members[x] + members.pop(y))
    return [members[label] for label in sorted(members)]
