"""Theme classes and the validated is-a DAG they form."""

from __future__ import annotations

import unicodedata
from collections import defaultdict, deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .diagnostics import (
    ERROR,
    WARNING,
    Diagnostic,
    OntologyError,
    UnknownThemeError,
    ValidationReport,
)

__all__ = [
    "SUFFIX",
    "OntologyStats",
    "SearchHit",
    "Theme",
    "ThemeOntology",
    "build_ontology",
    "normalize_name",
    "search",
    "stats",
    "validate",
]

#: naming convention for upper-level classes
SUFFIX = "thematic entity"


def normalize_name(value: str) -> str:
    """Return the canonical form of a theme name (NFC, trimmed).

    Raises ``ValueError`` for empty names or names containing line breaks.
    """
    if not isinstance(value, str):
        raise TypeError(f"theme name must be str, not {type(value).__name__}")
    name = unicodedata.normalize("NFC", value).strip()
    if not name:
        raise ValueError("theme name is empty")
    if name.splitlines() != [name]:
        raise ValueError(f"theme name contains a line break: {name!r}")
    return name


def _unique(values, what, owner):
    seen = set()
    for v in values:
        if v in seen:
            raise ValueError(f"{owner!r}: duplicate {what} {v!r}")
        seen.add(v)


@dataclass(frozen=True)
class Theme:
    """One ontology class."""

    name: str
    definition: str = ""
    parents: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()
    references: tuple[str, ...] = ()
    examples: str = ""
    notes: str = ""

    def __post_init__(self):
        name = normalize_name(self.name)
        parents = tuple(normalize_name(p) for p in self.parents)
        aliases = tuple(normalize_name(a) for a in self.aliases)
        _unique(parents, "parent", name)
        _unique(aliases, "alias", name)
        if name in parents:
            raise ValueError(f"{name!r} lists itself as a parent")
        if name in aliases:
            raise ValueError(f"{name!r} lists itself as an alias")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "aliases", aliases)
        object.__setattr__(self, "references", tuple(self.references))

    @property
    def is_root(self) -> bool:
        return not self.parents


def _err(code, message, theme=None):
    return Diagnostic(ERROR, code, message, theme=theme)


def _structural_issues(themes: Iterable[Theme]) -> list[Diagnostic]:
    """Every violated ontology invariant, as error diagnostics."""
    themes = list(themes)
    issues = []

    by_name: dict[str, list[Theme]] = defaultdict(list)
    for t in themes:
        by_name[t.name].append(t)
    for name, group in by_name.items():
        if len(group) > 1:
            issues.append(_err("DUP_NAME", f"theme {name!r} defined {len(group)} times", name))

    # duplicate definitions are merged for the remaining checks so the outcome
    # does not depend on input order
    parents: dict[str, set[str]] = {name: set() for name in by_name}
    for t in themes:
        parents[t.name].update(t.parents)

    alias_owners: dict[str, set[str]] = defaultdict(set)
    for t in themes:
        for a in t.aliases:
            alias_owners[a].add(t.name)
    for alias, owners in alias_owners.items():
        if alias in by_name:
            for owner in sorted(owners):
                issues.append(
                    _err("ALIAS_CLASH", f"alias {alias!r} of {owner!r} is also a theme name", owner)
                )
        if len(owners) > 1:
            listed = ", ".join(sorted(owners))
            issues.append(_err("ALIAS_CLASH", f"alias {alias!r} claimed by {listed}", alias))

    for name in sorted(parents):
        for p in sorted(parents[name]):
            if p not in by_name:
                hint = ""
                if p in alias_owners:
                    hint = f" (it is an alias of {', '.join(sorted(alias_owners[p]))})"
                issues.append(_err("DANGLING_PARENT", f"parent {p!r} of {name!r} is not a theme{hint}", name))

    roots = sorted(name for name, ps in parents.items() if not ps)
    if themes and len(roots) != 1:
        if roots:
            msg = f"{len(roots)} parentless themes: {', '.join(roots)}"
        else:
            msg = "no parentless theme"
        issues.append(_err("MULTI_ROOT", msg))

    edges = {name: sorted(p for p in ps if p in parents) for name, ps in parents.items()}
    for cycle in _witness_cycles(edges):
        issues.append(_err("CYCLE", "cycle: " + " -> ".join(cycle), cycle[0]))
    return issues


def _strongly_connected(edges: Mapping[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out = []
    counter = 0
    for start in sorted(edges):
        if start in index:
            continue
        work = [(start, iter(edges[start]))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
    return out


def _witness_cycles(edges: Mapping[str, list[str]]) -> list[list[str]]:
    """One shortest cycle per cyclic component, starting at its smallest name."""
    cycles = []
    for comp in _strongly_connected(edges):
        members = set(comp)
        start = min(comp)
        if len(comp) == 1 and start not in edges[start]:
            continue
        prev = {start: None}
        queue = deque([start])
        found = None
        while queue and found is None:
            node = queue.popleft()
            for nxt in edges[node]:
                if nxt not in members:
                    continue
                if nxt == start:
                    found = node
                    break
                if nxt not in prev:
                    prev[nxt] = node
                    queue.append(nxt)
        path = [start]
        node = found
        while node is not None and node != start:
            path.append(node)
            node = prev[node]
        path = [start] + path[1:][::-1] + [start]
        cycles.append(path)
    return sorted(cycles)


class ThemeOntology:
    """Immutable rooted DAG of themes with a precomputed closure index.

    Build instances with :func:`build_ontology`. Every query method accepts an
    alias wherever a theme name is expected.
    """

    __slots__ = (
        "_themes",
        "_root",
        "_aliases",
        "_children",
        "_depth",
        "_ancestors",
        "_descendants",
        "_order",
    )

    def __init__(self, themes: Mapping[str, Theme], root: str):
        # trusted constructor; build_ontology does the checking
        self._themes = MappingProxyType(dict(sorted(themes.items())))
        self._root = root
        self._aliases = MappingProxyType(
            {a: t.name for t in self._themes.values() for a in t.aliases}
        )
        children: dict[str, list[str]] = {name: [] for name in self._themes}
        for t in self._themes.values():
            for p in t.parents:
                children[p].append(t.name)
        self._children = {k: tuple(sorted(v)) for k, v in children.items()}

        topo = self._topological_order()
        depth: dict[str, int] = {}
        ancestors: dict[str, frozenset[str]] = {}
        for name in topo:
            ps = self._themes[name].parents
            depth[name] = max((depth[p] + 1 for p in ps), default=0)
            acc = set(ps)
            for p in ps:
                acc |= ancestors[p]
            ancestors[name] = frozenset(acc)
        self._depth = depth
        self._ancestors = ancestors
        desc: dict[str, set[str]] = {name: set() for name in self._themes}
        for name, anc in ancestors.items():
            for a in anc:
                desc[a].add(name)
        self._descendants = {k: frozenset(v) for k, v in desc.items()}
        self._order = {name: (depth[name], name) for name in self._themes}

    def _topological_order(self) -> list[str]:
        indeg = {name: len(t.parents) for name, t in self._themes.items()}
        queue = deque(sorted(n for n, d in indeg.items() if d == 0))
        out = []
        while queue:
            node = queue.popleft()
            out.append(node)
            for c in self._children[node]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return out

    # mapping-ish access

    @property
    def themes(self) -> Mapping[str, Theme]:
        return self._themes

    @property
    def root(self) -> str:
        return self._root

    @property
    def aliases(self) -> Mapping[str, str]:
        """Alias -> theme name."""
        return self._aliases

    def __len__(self):
        return len(self._themes)

    def __iter__(self):
        return iter(self._themes)

    def __contains__(self, name):
        try:
            self.resolve(name)
        except (UnknownThemeError, ValueError, TypeError):
            return False
        return True

    def __getitem__(self, name) -> Theme:
        return self._themes[self.resolve(name)]

    def __eq__(self, other):
        if not isinstance(other, ThemeOntology):
            return NotImplemented
        return self._root == other._root and dict(self._themes) == dict(other._themes)

    def __hash__(self):
        return hash((self._root, tuple(self._themes.values())))

    def __repr__(self):
        return f"<ThemeOntology root={self._root!r} themes={len(self)}>"

    # closure queries

    def resolve(self, name: str) -> str:
        """Return the theme name for ``name`` or one of its aliases."""
        key = normalize_name(name)
        if key in self._themes:
            return key
        if key in self._aliases:
            return self._aliases[key]
        raise UnknownThemeError(name)

    def depth(self, name: str) -> int:
        """Length of the longest path from the root."""
        return self._depth[self.resolve(name)]

    def parents(self, name: str) -> tuple[str, ...]:
        return self._themes[self.resolve(name)].parents

    def children(self, name: str) -> tuple[str, ...]:
        return self._children[self.resolve(name)]

    def ancestor_set(self, name: str) -> frozenset[str]:
        return self._ancestors[self.resolve(name)]

    def descendant_set(self, name: str) -> frozenset[str]:
        return self._descendants[self.resolve(name)]

    def ancestors(self, name: str) -> list[str]:
        """Proper ancestors ordered by (depth, name)."""
        return sorted(self.ancestor_set(name), key=self._order.__getitem__)

    def descendants(self, name: str) -> list[str]:
        """Proper descendants ordered by (depth, name)."""
        return sorted(self.descendant_set(name), key=self._order.__getitem__)

    def subsumes(self, general: str, specific: str) -> bool:
        g = self.resolve(general)
        s = self.resolve(specific)
        return g == s or g in self._ancestors[s]

    def leaves(self) -> list[str]:
        return [n for n in self._themes if not self._children[n]]

    def sort_key(self, name: str):
        return self._order[self.resolve(name)]


def build_ontology(themes: Iterable[Theme]) -> ThemeOntology:
    """Validate ``themes`` and index them.

    Raises :class:`OntologyError` carrying a :class:`ValidationReport` that
    lists every violated invariant.
    """
    themes = list(themes)
    issues = _structural_issues(themes)
    if not themes:
        issues.append(_err("MULTI_ROOT", "no themes"))
    if issues:
        raise OntologyError(ValidationReport.from_issues(issues))
    by_name = {t.name: t for t in themes}
    root = next(t.name for t in themes if t.is_root)
    return ThemeOntology(by_name, root)


def _longest_depths(themes: list[Theme]) -> dict[str, int]:
    """Depths for a theme list that may not be a valid ontology.

    Themes on or below a cycle, or under a dangling parent, get no depth.
    """
    parents = defaultdict(set)
    for t in themes:
        parents[t.name].update(t.parents)
    children = defaultdict(set)
    for name, ps in parents.items():
        for p in ps:
            children[p].add(name)
    indeg = {n: len(ps) for n, ps in parents.items()}
    queue = deque(sorted(n for n, d in indeg.items() if d == 0))
    depth = {n: 0 for n in queue}
    while queue:
        node = queue.popleft()
        for c in sorted(children[node]):
            if c not in indeg:
                continue
            depth[c] = max(depth.get(c, 0), depth[node] + 1)
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    return {n: d for n, d in depth.items() if indeg.get(n, 0) == 0}


def validate(themes: Iterable[Theme], strict_lint: bool = False) -> ValidationReport:
    """Structural errors plus curation warnings; never raises.

    Warnings: ``NO_DEFINITION``, ``NO_REFERENCE`` and, with ``strict_lint``,
    ``SUFFIX_CONVENTION`` for themes within two levels of the root whose
    name does not end in "thematic entity".
    """
    themes = list(themes)
    issues = _structural_issues(themes)
    if not themes:
        issues.append(_err("MULTI_ROOT", "no themes"))
    for t in themes:
        if not t.definition.strip():
            issues.append(Diagnostic(WARNING, "NO_DEFINITION", f"{t.name!r} has no definition", t.name))
        if not t.references:
            issues.append(Diagnostic(WARNING, "NO_REFERENCE", f"{t.name!r} has no reference", t.name))
    if strict_lint:
        depths = _longest_depths(themes)
        for t in themes:
            d = depths.get(t.name)
            if d is not None and d <= 2 and not t.name.endswith(SUFFIX):
                issues.append(
                    Diagnostic(
                        WARNING,
                        "SUFFIX_CONVENTION",
                        f"{t.name!r} (depth {d}) does not end in {SUFFIX!r}",
                        t.name,
                    )
                )
    return ValidationReport.from_issues(issues)


@dataclass(frozen=True)
class OntologyStats:
    class_count: int
    leaf_count: int
    max_depth: int
    root_branch_sizes: Mapping[str, int] = field(default_factory=dict)
    multi_parent_count: int = 0

    def as_dict(self) -> dict:
        return {
            "class_count": self.class_count,
            "leaf_count": self.leaf_count,
            "max_depth": self.max_depth,
            "root_branch_sizes": dict(self.root_branch_sizes),
            "multi_parent_count": self.multi_parent_count,
        }


def stats(ont: ThemeOntology) -> OntologyStats:
    branches = {c: len(ont.descendant_set(c)) for c in ont.children(ont.root)}
    return OntologyStats(
        class_count=len(ont),
        leaf_count=len(ont.leaves()),
        max_depth=max(ont.depth(n) for n in ont),
        root_branch_sizes=dict(sorted(branches.items())),
        multi_parent_count=sum(1 for t in ont.themes.values() if len(t.parents) > 1),
    )


class SearchHit(NamedTuple):
    theme: str
    match_field: str
    score: float


# exact matches outrank substring matches; within each, name > alias > definition
_FIELD_RANK = {"name": 0, "alias": 1, "definition": 2}


def search(ont: ThemeOntology, query: str) -> list[SearchHit]:
    """Case-insensitive substring search over names, aliases and definitions.

    Each theme appears once, under its best-ranked matching field. ``score`` is
    the fraction of the matched text covered by the query (1.0 for an exact
    match).
    """
    q = unicodedata.normalize("NFC", query).strip().casefold()
    if not q:
        raise ValueError("empty search query")
    ranked = []
    for t in ont.themes.values():
        candidates = [("name", t.name)] + [("alias", a) for a in t.aliases]
        if t.definition:
            candidates.append(("definition", t.definition))
        best = None
        for fld, text in candidates:
            folded = text.casefold()
            if q not in folded:
                continue
            exact = folded == q
            key = (0 if exact else 1, _FIELD_RANK[fld])
            if best is None or key < best[0]:
                best = (key, fld, len(q) / len(folded))
        if best is not None:
            key, fld, score = best
            ranked.append((key, t.name, SearchHit(t.name, fld, score)))
    ranked.sort(key=lambda item: (item[0], item[1]))
    return [hit for _, _, hit in ranked]
