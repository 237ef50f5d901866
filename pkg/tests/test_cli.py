import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

import ltokit
from ltokit.cli import main, run

THEMES = str(ltokit.fixture_theme_path())
STORIES = str(ltokit.fixture_story_path())


def invoke(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env, catch_exceptions=False)


def tsv(text):
    lines = text.rstrip("\n").split("\n")
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


@pytest.fixture
def alien_ids(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text("# the two alien visits\nmovie-day-earth-stood-still-1951\nsts-1x01\n")
    return str(path)


class TestValidate:
    def test_fixture_summary(self):
        result = invoke("validate", "--themes", THEMES)
        assert result.exit_code == 0
        assert result.stdout == "20 themes, 0 errors, 0 warnings\n"

    def test_errors_exit_one(self, tmp_path):
        bad = tmp_path / "bad.lto.txt"
        bad.write_text("a\n===\n\n:: Parents\nb\n\nc\n===\n\n:: Parents\na\n")
        result = invoke("validate", "--themes", str(bad))
        assert result.exit_code == 1
        assert "DANGLING_PARENT" in result.stderr
        assert "error" in result.stdout

    def test_strict_lint_warnings_fail(self):
        assert invoke("validate", "--themes", THEMES, "--strict-lint").exit_code == 1
        lint = invoke("lint", "--themes", THEMES, "--strict-lint")
        assert lint.exit_code == 1
        rows = tsv(lint.stdout)
        assert {r["code"] for r in rows} == {"SUFFIX_CONVENTION"}
        assert all(r["severity"] == "warning" for r in rows)

    def test_lint_clean(self):
        result = invoke("lint", "--themes", THEMES, "--stories", STORIES)
        assert result.exit_code == 0
        assert result.stdout == "severity\tcode\ttheme\tfile\tline\tmessage\n"

    def test_json_summary(self):
        result = invoke("validate", "--themes", THEMES, "--format", "json-lines")
        assert json.loads(result.stdout) == {"themes": 20, "errors": 0, "warnings": 0}


class TestQueries:
    def test_ancestors(self):
        result = invoke("query", "ancestors", "Venusian extraterrestrial", "--themes", THEMES)
        assert result.exit_code == 0
        themes = [r["theme"] for r in tsv(result.stdout)]
        assert {"extraterrestrial being", "locationally distinguished being"} <= set(themes)
        assert themes[0] == "literary thematic entity"

    def test_descendants_json(self):
        result = invoke("query", "descendants", "WMD", "--themes", THEMES, "--format", "json-lines")
        records = [json.loads(line) for line in result.stdout.splitlines()]
        assert {r["theme"] for r in records} == {"biological weapons", "chemical weapons", "nuclear weapons"}
        assert all(set(r) == {"theme", "depth"} for r in records)

    def test_subsumes(self):
        result = invoke("query", "subsumes", "alien", "Venusian extraterrestrial", "--themes", THEMES)
        assert tsv(result.stdout) == [
            {"general": "extraterrestrial being", "specific": "Venusian extraterrestrial", "subsumes": "true"}
        ]

    def test_stories(self):
        result = invoke("query", "stories", "extraterrestrial being", "--themes", THEMES, "--stories", STORIES)
        assert [r["story_id"] for r in tsv(result.stdout)] == ["movie-day-earth-stood-still-1951", "sts-1x01"]

    def test_unknown_theme_is_usage_error(self):
        result = invoke("query", "ancestors", "Martian extraterrestrial", "--themes", THEMES)
        assert result.exit_code == 2
        assert "Martian extraterrestrial" in result.stderr

    def test_wrong_arity(self):
        assert invoke("query", "subsumes", "alien", "--themes", THEMES).exit_code == 2

    def test_search(self):
        rows = tsv(invoke("search", "vengeance", "--themes", THEMES).stdout)
        assert rows[0] == {"theme": "the desire for vengeance", "field": "alias", "score": "1"}

    def test_stats(self):
        rows = {r["metric"]: r["value"] for r in tsv(invoke("stats", "--themes", THEMES).stdout)}
        assert rows["class_count"] == "20"
        assert len([m for m in rows if m.startswith("branch:")]) == 3


class TestAnalytics:
    def test_enrich(self, alien_ids):
        result = invoke("enrich", "--query", alien_ids, "--themes", THEMES, "--stories", STORIES)
        assert result.exit_code == 0
        first = tsv(result.stdout)[0]
        assert first["theme"] == "extraterrestrial being"
        assert first["p"] == "0.0151515"

    def test_enrich_json_full_precision(self, alien_ids):
        result = invoke("enrich", "--query", alien_ids, "--themes", THEMES, "--stories", STORIES,
                        "--format", "json-lines")
        first = json.loads(result.stdout.splitlines()[0])
        assert list(first) == ["theme", "k", "n", "K", "N", "p", "q"]
        assert first["p"] == pytest.approx(1 / 66, abs=1e-12)

    def test_enrich_unknown_story(self, tmp_path):
        q = tmp_path / "q.txt"
        q.write_text("nope\n")
        result = invoke("enrich", "--query", str(q), "--themes", THEMES, "--stories", STORIES)
        assert result.exit_code == 2

    def test_diff(self, tmp_path, alien_ids):
        others = tmp_path / "b.txt"
        others.write_text("\n".join(f"sts-1x{i:02d}" for i in range(2, 11)) + "\nmovie-last-woman-on-earth-1960\n")
        result = invoke("diff", "--group-a", alien_ids, "--group-b", str(others), "--themes", THEMES,
                        "--stories", STORIES)
        first = tsv(result.stdout)[0]
        assert (first["theme"], first["hits_a"], first["hits_b"], first["p"]) == ("extraterrestrial being", "2", "0",
                                                                                  "0.0151515")
        overlap = invoke("diff", "--group-a", alien_ids, "--group-b", alien_ids, "--themes", THEMES,
                         "--stories", STORIES)
        assert overlap.exit_code == 2
        assert "GROUP_OVERLAP" in overlap.stderr

    def test_similar_and_recommend(self):
        sim = tsv(invoke("similar", "movie-day-earth-stood-still-1951", "sts-1x01", "--themes", THEMES,
                         "--stories", STORIES).stdout)
        assert sim[0]["similarity"] == "0.75"
        rec = tsv(invoke("recommend", "movie-day-earth-stood-still-1951", "-k", "2", "--themes", THEMES,
                         "--stories", STORIES).stdout)
        assert len(rec) == 2
        assert rec[0] == {"story_id": "sts-1x01", "similarity": "0.75"}

    def test_cluster(self):
        rows = tsv(invoke("cluster", "--threshold", "0.5", "--themes", THEMES, "--stories", STORIES).stdout)
        assert len(rows) == 12
        alien = [r for r in rows if r["story_id"] in ("movie-day-earth-stood-still-1951", "sts-1x01")]
        assert alien[0]["cluster"] == alien[1]["cluster"]
        assert alien[0]["size"] == "2"

    def test_cluster_bad_threshold(self):
        assert invoke("cluster", "--threshold", "2", "--themes", THEMES, "--stories", STORIES).exit_code == 2

    def test_export_owl(self):
        out = invoke("export-owl", "--themes", THEMES).stdout
        assert out.startswith("Prefix(")
        assert out.count("Declaration(Class(") == 21


class TestPlumbing:
    def test_env_theme_path(self):
        result = invoke("stats", env={"LTO_THEME_PATH": THEMES})
        assert result.exit_code == 0
        assert "class_count\t20" in result.stdout

    def test_missing_themes_is_usage(self):
        result = invoke("stats", env={"LTO_THEME_PATH": ""})
        assert result.exit_code == 2
        assert "LTO_THEME_PATH" in result.stderr

    def test_missing_file_is_fatal(self, tmp_path):
        result = invoke("stats", "--themes", str(tmp_path / "absent.lto.txt"))
        assert result.exit_code == 3

    def test_broken_ontology_is_fatal(self, tmp_path):
        bad = tmp_path / "cyc.lto.txt"
        bad.write_text("a\n===\n\n:: Parents\nb\n\nb\n===\n\n:: Parents\na\n")
        result = invoke("stats", "--themes", str(bad))
        assert result.exit_code == 3
        assert "CYCLE" in result.stderr

    def test_version(self):
        result = invoke("--version")
        assert result.exit_code == 0
        assert result.stdout.splitlines()[0] == f"ltokit {ltokit.__version__}"
        assert "2656 classes" in result.stdout

    def test_help(self):
        assert "enrich" in invoke("help").stdout
        assert "--threshold" in invoke("help", "cluster").stdout
        assert invoke("help", "nonsense").exit_code == 2

    def test_unknown_subcommand(self):
        assert invoke("frobnicate").exit_code == 2

    def test_run_returns_codes(self, capfd):
        assert run(["validate", "--themes", THEMES]) == 0
        assert run(["stats", "--themes", "/nonexistent/x.lto.txt"]) == 3
        assert run(["cluster", "--threshold", "9", "--themes", THEMES]) == 2
        assert run(["--version"]) == 0
        capfd.readouterr()

    def test_console_module(self):
        proc = subprocess.run([sys.executable, "-m", "ltokit.cli", "stats", "--themes", THEMES],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert proc.stdout.startswith("metric\tvalue\nclass_count\t20\n")
