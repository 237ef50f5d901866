"""Command-line entry point: ``lto <subcommand> --themes FILE ...``.

Exit codes: 0 success, 1 validation errors found, 2 usage error, 3 fatal I/O
or ontology build failure. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click

from . import __version__
from .analytics import (
    agglomerative_cluster,
    differential_usage,
    enrich,
    recommend,
    stories_with_theme,
    story_similarity,
)
from .bundled import snapshot_manifest
from .diagnostics import AnalysisError, LTOError, OntologyError, UnknownStoryError, UnknownThemeError
from .ontology import search, stats, validate
from .textio import export_owl, load_corpus, parse_theme_document, read_text

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_FATAL = 0, 1, 2, 3
THEME_PATH_ENV = "LTO_THEME_PATH"


class Fatal(click.ClickException):
    exit_code = EXIT_FATAL


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return ""
    return str(value)


def emit(fmt: str, columns: list[str], rows):
    """Write rows as TSV (with header) or JSON lines."""
    out = click.get_text_stream("stdout")
    if fmt == "tsv":
        out.write("\t".join(columns) + "\n")
        for row in rows:
            out.write("\t".join(_fmt(row[c]) for c in columns) + "\n")
    else:
        for row in rows:
            out.write(json.dumps({c: row[c] for c in columns}, ensure_ascii=False) + "\n")


def _report(diagnostics):
    for d in diagnostics:
        click.echo(str(d), err=True)


def _theme_paths(paths):
    if paths:
        return list(paths)
    env = os.environ.get(THEME_PATH_ENV, "")
    found = [p for p in env.split(os.pathsep) if p]
    if not found:
        raise click.UsageError(f"no theme file given; pass --themes or set {THEME_PATH_ENV}")
    return found


def _load(themes, stories=()):
    try:
        ont, corpus, diags = load_corpus(_theme_paths(themes), list(stories))
    except OntologyError as exc:
        _report(exc.report.issues)
        raise Fatal(f"ontology build failed with {exc.report.error_count} error(s)") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise Fatal(str(exc)) from None
    _report(diags)
    return ont, corpus


def _read_ids(path):
    try:
        text = read_text(path)
    except (OSError, UnicodeDecodeError) as exc:
        raise Fatal(str(exc)) from None
    ids = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            ids.append(line)
    return ids


def common(with_stories=False):
    """Options shared by every data subcommand."""

    def deco(f):
        f = click.option("--format", "fmt", type=click.Choice(["tsv", "json-lines"]), default="tsv",
                         show_default=True, help="Output format.")(f)
        if with_stories:
            f = click.option("--stories", "stories", multiple=True, type=click.Path(dir_okay=False),
                             help="Story document (repeatable).")(f)
        f = click.option("--themes", "themes", multiple=True, type=click.Path(dir_okay=False),
                         help=f"Theme document (repeatable). Defaults to ${THEME_PATH_ENV}.")(f)
        return f

    return deco


def user_errors(f):
    """Map lookup and selection errors to usage errors."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (UnknownThemeError, UnknownStoryError, AnalysisError) as exc:
            raise click.UsageError(f"{exc.code}: {exc}") from None
        except LTOError as exc:
            raise Fatal(str(exc)) from None

    return wrapper


def _print_version(ctx, _param, value):
    if not value or ctx.resilient_parsing:
        return
    manifest = snapshot_manifest()
    click.echo(f"ltokit {__version__}")
    click.echo(f"bundled snapshot {manifest['version']} ({manifest['class_count']} classes)")
    ctx.exit()


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--version", is_flag=True, expose_value=False, is_eager=True, callback=_print_version,
              help="Show toolkit and bundled snapshot versions.")
def main():
    """Literary theme ontology toolkit."""


@main.command("help")
@click.argument("command", required=False)
@click.pass_context
def help_(ctx, command):
    """Show help for the toolkit or one subcommand."""
    group = ctx.parent.command
    if command is None:
        click.echo(group.get_help(ctx.parent))
        return
    sub = group.get_command(ctx, command)
    if sub is None:
        raise click.UsageError(f"no such command {command!r}")
    with click.Context(sub, info_name=command, parent=ctx.parent) as sub_ctx:
        click.echo(sub.get_help(sub_ctx))


def _validation(themes, stories, strict_lint):
    paths = _theme_paths(themes)
    parsed, diags = [], []
    try:
        for path in paths:
            ts, ds = parse_theme_document(read_text(path), str(path))
            parsed.extend(ts)
            diags.extend(ds)
    except (OSError, UnicodeDecodeError) as exc:
        raise Fatal(str(exc)) from None
    report = validate(parsed, strict_lint=strict_lint)
    issues = list(diags) + list(report.issues)
    if report.ok and stories:
        try:
            _, _, story_diags = load_corpus(paths, list(stories))
        except (OSError, UnicodeDecodeError) as exc:
            raise Fatal(str(exc)) from None
        issues.extend(d for d in story_diags if d.file in {str(s) for s in stories})
    errors = sum(d.is_error for d in issues)
    warnings = len(issues) - errors
    failed = errors > 0 or (strict_lint and warnings > 0)
    return len(parsed), issues, errors, warnings, failed


@main.command("validate")
@common(with_stories=True)
@click.option("--strict-lint", is_flag=True, help="Also check the naming convention; warnings fail.")
def validate_cmd(themes, stories, fmt, strict_lint):
    """Check structure, definitions and references; print a summary."""
    count, issues, errors, warnings, failed = _validation(themes, stories, strict_lint)
    _report(issues)
    if fmt == "tsv":
        click.echo(f"{count} themes, {errors} errors, {warnings} warnings")
    else:
        emit(fmt, ["themes", "errors", "warnings"], [{"themes": count, "errors": errors, "warnings": warnings}])
    sys.exit(EXIT_INVALID if failed else EXIT_OK)


@main.command("lint")
@common(with_stories=True)
@click.option("--strict-lint", is_flag=True, help="Also check the naming convention; warnings fail.")
def lint_cmd(themes, stories, fmt, strict_lint):
    """List every validation issue as a table row."""
    count, issues, errors, warnings, failed = _validation(themes, stories, strict_lint)
    rows = [
        {"severity": d.severity, "code": d.code, "theme": d.theme, "file": d.file, "line": d.line, "message": d.message}
        for d in issues
    ]
    emit(fmt, ["severity", "code", "theme", "file", "line", "message"], rows)
    click.echo(f"{count} themes, {errors} errors, {warnings} warnings", err=True)
    sys.exit(EXIT_INVALID if failed else EXIT_OK)


@main.command("stats")
@common()
def stats_cmd(themes, fmt):
    """Class, leaf and depth counts, plus the size of each root branch."""
    ont, _ = _load(themes)
    s = stats(ont)
    rows = [
        {"metric": "class_count", "value": s.class_count},
        {"metric": "leaf_count", "value": s.leaf_count},
        {"metric": "max_depth", "value": s.max_depth},
        {"metric": "multi_parent_count", "value": s.multi_parent_count},
        {"metric": "root", "value": ont.root},
    ]
    rows += [{"metric": f"branch:{name}", "value": size} for name, size in s.root_branch_sizes.items()]
    emit(fmt, ["metric", "value"], rows)


@main.command("query")
@click.argument("mode", type=click.Choice(["ancestors", "descendants", "subsumes", "stories"]))
@click.argument("names", nargs=-1, required=True)
@common(with_stories=True)
@user_errors
def query_cmd(mode, names, themes, stories, fmt):
    """Closure queries: ancestors NAME, descendants NAME, subsumes GENERAL SPECIFIC, stories NAME."""
    expected = 2 if mode == "subsumes" else 1
    if len(names) != expected:
        raise click.UsageError(f"{mode} takes {expected} theme name(s)")
    ont, corpus = _load(themes, stories)
    if mode == "subsumes":
        general, specific = names
        emit(fmt, ["general", "specific", "subsumes"],
             [{"general": ont.resolve(general), "specific": ont.resolve(specific),
               "subsumes": ont.subsumes(general, specific)}])
    elif mode == "stories":
        if not stories:
            raise click.UsageError("query stories needs --stories")
        emit(fmt, ["story_id"], [{"story_id": sid} for sid in stories_with_theme(corpus, ont, names[0])])
    else:
        found = ont.ancestors(names[0]) if mode == "ancestors" else ont.descendants(names[0])
        emit(fmt, ["theme", "depth"], [{"theme": t, "depth": ont.depth(t)} for t in found])


@main.command("search")
@click.argument("query")
@common()
def search_cmd(query, themes, fmt):
    """Case-insensitive search over names, aliases and definitions."""
    if not query.strip():
        raise click.UsageError("empty query")
    ont, _ = _load(themes)
    emit(fmt, ["theme", "field", "score"],
         [{"theme": h.theme, "field": h.match_field, "score": h.score} for h in search(ont, query)])


_correction = click.option("--correction", type=click.Choice(["bh", "bonferroni"]), default="bh",
                           show_default=True, help="Multiple-testing adjustment.")
_min_count = click.option("--min-count", type=click.IntRange(min=0), default=2, show_default=True,
                          help="Skip themes with fewer hits.")


@main.command("enrich")
@click.option("--query", "query_file", required=True, type=click.Path(dir_okay=False),
              help="File of query story ids, one per line.")
@click.option("--background", "background_file", type=click.Path(dir_okay=False),
              help="File of background story ids (default: every story).")
@_min_count
@_correction
@common(with_stories=True)
@user_errors
def enrich_cmd(query_file, background_file, min_count, correction, themes, stories, fmt):
    """Themes over-represented in a query set of stories."""
    ont, corpus = _load(themes, stories)
    background = _read_ids(background_file) if background_file else None
    rows = enrich(corpus, ont, _read_ids(query_file), background, min_count, correction)
    emit(fmt, ["theme", "k", "n", "K", "N", "p", "q"], [r.as_dict() for r in rows])


@main.command("diff")
@click.option("--group-a", "a_file", required=True, type=click.Path(dir_okay=False))
@click.option("--group-b", "b_file", required=True, type=click.Path(dir_okay=False))
@_min_count
@_correction
@common(with_stories=True)
@user_errors
def diff_cmd(a_file, b_file, min_count, correction, themes, stories, fmt):
    """Themes used differently by two groups of stories (two-sided Fisher test)."""
    ont, corpus = _load(themes, stories)
    rows = differential_usage(corpus, ont, _read_ids(a_file), _read_ids(b_file), min_count, correction)
    emit(fmt, ["theme", "hits_a", "misses_a", "hits_b", "misses_b", "p", "q"], [r.as_dict() for r in rows])


@main.command("similar")
@click.argument("story_a")
@click.argument("story_b")
@common(with_stories=True)
@user_errors
def similar_cmd(story_a, story_b, themes, stories, fmt):
    """Weighted Jaccard similarity of two stories."""
    ont, corpus = _load(themes, stories)
    sim = story_similarity(corpus, ont, story_a, story_b)
    emit(fmt, ["story_a", "story_b", "similarity"], [{"story_a": story_a, "story_b": story_b, "similarity": sim}])


@main.command("recommend")
@click.argument("story_id")
@click.option("-k", "--k", "k", type=click.IntRange(min=1), default=5, show_default=True)
@common(with_stories=True)
@user_errors
def recommend_cmd(story_id, k, themes, stories, fmt):
    """Most similar stories to STORY_ID."""
    ont, corpus = _load(themes, stories)
    rows = [{"story_id": sid, "similarity": sim} for sid, sim in recommend(corpus, ont, story_id, k)]
    emit(fmt, ["story_id", "similarity"], rows)


@main.command("cluster")
@click.option("--threshold", type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True,
              help="Stop merging once the closest clusters are farther apart than this.")
@common(with_stories=True)
@user_errors
def cluster_cmd(threshold, themes, stories, fmt):
    """Average-linkage clusters of stories; one row per story."""
    ont, corpus = _load(themes, stories)
    if not len(corpus):
        raise click.UsageError("no stories to cluster; pass --stories")
    rows = []
    for members in agglomerative_cluster(corpus, ont, threshold):
        rows.extend({"cluster": members[0], "size": len(members), "story_id": sid} for sid in members)
    emit(fmt, ["cluster", "size", "story_id"], rows)


@main.command("export-owl")
@common()
def export_owl_cmd(themes, fmt):
    """OWL2 functional-syntax rendering of the ontology."""
    ont, _ = _load(themes)
    doc = export_owl(ont)
    if fmt == "tsv":
        click.get_text_stream("stdout").write(doc)
    else:
        emit(fmt, ["document"], [{"document": doc}])


def run(argv=None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        main.main(args=argv, prog_name="lto", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return EXIT_FATAL
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
