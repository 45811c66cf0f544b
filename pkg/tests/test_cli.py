import pytest

from autotrace.cli import EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from autotrace.streamio import parse_events, parse_tasks, strip_markers


@pytest.fixture
def jacobi_file(tmp_path):
    path = tmp_path / "jacobi.txt"
    assert main(["generate", "jacobi", "--iterations", "200", "-o", str(path)]) == EXIT_OK
    return path


def test_generate_writes_a_parseable_stream(jacobi_file):
    assert len(parse_tasks(jacobi_file.read_text())) == 600


def test_run_writes_all_outputs(jacobi_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", str(jacobi_file), "--out-dir", str(out), "--min-trace-length", "6",
                 "--multi-scale-factor", "12", "--batchsize", "768", "--max-trace-length", "48",
                 "--workers", "0", "--window", "500"])
    assert code == EXIT_OK
    events = parse_events((out / "annotated.txt").read_text())
    assert strip_markers(events) == parse_tasks(jacobi_file.read_text())
    assert (out / "cost.csv").read_text().startswith("index,kind,charge\n")
    assert len((out / "fraction.csv").read_text().splitlines()) == 601
    assert "ingest job=0" in (out / "decisions.log").read_text()
    assert "tasks=600 " in capsys.readouterr().out


def test_replicate(jacobi_file, capsys):
    code = main(["replicate", str(jacobi_file), "--nodes", "3", "--min-trace-length", "6",
                 "--multi-scale-factor", "12", "--batchsize", "768", "--max-latency", "0.001"])
    assert code == EXIT_OK
    assert "identical=yes" in capsys.readouterr().out


def test_repeats_dump(capsys):
    assert main(["repeats", "aabcbcbaa", "--chars", "--min-length", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "repeat aa starts=0,7" in out
    assert "repeat bc starts=2,4" in out
    assert "coverage=8/9" in out


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("task A\ntask B r:nope:f\n")
    assert main(["run", str(bad), "--out-dir", str(tmp_path)]) == EXIT_PARSE
    assert "line 2" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "missing.txt")]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["run"],
        ["frobnicate"],
        ["generate", "nope"],
        ["run", "x", "--batchsize", "0"],
    ],
)
def test_usage_errors_exit_one(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


def test_semantic_usage_errors(jacobi_file, tmp_path):
    assert main(["run", str(jacobi_file), "--min-trace-length", "10", "--max-trace-length", "5"]) == EXIT_USAGE
    assert main(["run", str(jacobi_file), "--alpha-r", "0.01", "--out-dir", str(tmp_path)]) == EXIT_USAGE
    assert main(["replicate", str(jacobi_file), "--nodes", "1"]) == EXIT_USAGE
