"""Literary theme ontology toolkit: a validated is-a DAG of themes, its text
formats, and ontology-aware story retrieval."""

from .bundled import fixture_story_path, fixture_theme_path, snapshot_manifest, snapshot_path
from .analytics import (
    DifferentialRow,
    EnrichmentRow,
    ThemeIncidence,
    agglomerative_cluster,
    differential_usage,
    enrich,
    propagate,
    recommend,
    stories_with_theme,
    story_similarity,
    story_weights,
)
from .diagnostics import (
    AnalysisError,
    Diagnostic,
    DomainError,
    LTOError,
    OntologyError,
    UnknownStoryError,
    UnknownThemeError,
    ValidationReport,
)
from .ontology import OntologyStats, SearchHit, Theme, ThemeOntology, build_ontology, search, stats, validate
from .stats import bh_adjust, bonferroni_adjust, fisher_two_sided, hypergeometric_upper_tail
from .textio import (
    AnnotatedCorpus,
    Annotation,
    StoryEntry,
    export_owl,
    load_corpus,
    parse_story_document,
    parse_theme_document,
    serialize_story_document,
    serialize_theme_document,
)

__version__ = "0.1.0"
