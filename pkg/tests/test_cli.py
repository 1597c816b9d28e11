"""CLI behavior: exit codes, stream discipline, end-to-end pipelines.

Everything drives main(argv) in process; no subprocess spawning, so the
exit-code contract (0 ok, 1 usage, 2 data error) is asserted directly.
"""

import json

import pytest

from opbench.cli import main
from opbench.graph_ir import read_json, write_json
from opbench.ingest import parse_trace

from .conftest import tiny_graph


@pytest.fixture
def tiny_graph_file(tmp_path):
    p = tmp_path / "tiny.graph.json"
    write_json(p, tiny_graph().to_json())
    return p


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_missing_required_arg_is_usage_error(tmp_path, tiny_graph_file):
    with pytest.raises(SystemExit) as exc:
        main(["profile", str(tiny_graph_file)])  # no -o
    assert exc.value.code == 1


def test_validate_graph(tiny_graph_file, capsys):
    assert main(["validate", str(tiny_graph_file)]) == 0
    err = capsys.readouterr().err
    assert "OK" in err and "opbench-graph/1" in err


def test_validate_records(fixture_dir, capsys):
    assert main(["validate", str(fixture_dir / "table2_records.json")]) == 0
    assert "30 shape records" in capsys.readouterr().err


def test_validate_trace(fixture_dir, capsys):
    assert main(["validate", str(fixture_dir / "gpt2_sample.trace.json")]) == 0
    assert "opbench-trace/1" in capsys.readouterr().err


def test_validate_unknown_version(tmp_path, capsys):
    p = tmp_path / "odd.json"
    write_json(p, {"version": "opbench-graph/99"})
    assert main(["validate", str(p)]) == 2
    assert "unknown or missing version" in capsys.readouterr().err


def test_validate_missing_file(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "nope.json")]) == 2
    assert "error" in capsys.readouterr().err


def test_validate_broken_graph(tmp_path, capsys):
    obj = tiny_graph().to_json()
    obj["nodes"][1]["inputs"] = ["ghost"]
    p = tmp_path / "broken.graph.json"
    write_json(p, obj)
    assert main(["validate", str(p)]) == 2


def test_classify_writes_stdout(capsys):
    assert main(["classify", "torch.nn.GELU"]) == 0
    out, err = capsys.readouterr()
    assert out == "torch.nn.GELU\tActivation\n"
    assert err == ""


def test_classify_rules_flag(tmp_path, capsys):
    rules = tmp_path / "rules.json"
    write_json(rules, [{"pattern": "gelu", "group": "Uncategorized"}])
    assert main(["classify", "gelu", "--rules", str(rules)]) == 0
    assert capsys.readouterr().out.endswith("\tUncategorized\n")


def test_classify_rules_env(tmp_path, capsys, monkeypatch):
    rules = tmp_path / "rules.json"
    write_json(rules, [{"pattern": "gelu", "group": "Memory"}])
    monkeypatch.setenv("OPBENCH_RULES", str(rules))
    assert main(["classify", "gelu"]) == 0
    assert capsys.readouterr().out.endswith("\tMemory\n")


def test_classify_flag_overrides_env(tmp_path, capsys, monkeypatch):
    env_rules = tmp_path / "env.json"
    write_json(env_rules, [{"pattern": "gelu", "group": "Memory"}])
    flag_rules = tmp_path / "flag.json"
    write_json(flag_rules, [{"pattern": "gelu", "group": "Uncategorized"}])
    monkeypatch.setenv("OPBENCH_RULES", str(env_rules))
    assert main(["classify", "gelu", "--rules", str(flag_rules)]) == 0
    assert capsys.readouterr().out.endswith("\tUncategorized\n")


def test_profile_then_report_pipeline(tmp_path, tiny_graph_file, capsys):
    trace = tmp_path / "out.trace.json"
    rc = main(["profile", str(tiny_graph_file), "-o", str(trace),
               "--warmup", "1", "--repeats", "2"])
    assert rc == 0
    assert trace.exists()
    run = parse_trace(trace)
    assert [s.node_id for s in run.samples] == ["a", "b"]
    capsys.readouterr()

    assert main(["report", str(trace)]) == 0
    out, err = capsys.readouterr()
    payload = json.loads(out)
    assert payload["kind"] == "breakdown"
    assert err == ""


def test_profile_metadata_flags(tmp_path, tiny_graph_file):
    trace = tmp_path / "out.trace.json"
    assert main(["profile", str(tiny_graph_file), "-o", str(trace),
                 "--warmup", "0", "--repeats", "1",
                 "--model", "cli_name", "--batch", "16"]) == 0
    obj = read_json(trace)
    assert obj["model_name"] == "cli_name"
    assert obj["batch_size"] == 16


def test_report_to_file(tmp_path, fixture_dir, capsys):
    out = tmp_path / "report.csv"
    rc = main(["report", str(fixture_dir / "gpt2_sample.trace.json"),
               "--format", "csv", "-o", str(out)])
    assert rc == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "wrote csv report" in captured.err
    assert out.read_text(encoding="utf-8").startswith("group,")


def test_report_compare(fixture_dir, capsys):
    rc = main(["report", str(fixture_dir / "avg_cpu.trace.json"),
               "--compare", str(fixture_dir / "avg_gpu.trace.json")])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "comparison"
    assert payload["nongemm"]["ratio"] == pytest.approx(55.0 / 27.0)


def test_report_bad_format_is_usage_error(fixture_dir):
    with pytest.raises(SystemExit) as exc:
        main(["report", str(fixture_dir / "gpt2_sample.trace.json"),
              "--format", "yaml"])
    assert exc.value.code == 1


def test_ingest_native_trace(tmp_path, fixture_dir, capsys):
    out = tmp_path / "norm.trace.json"
    rc = main(["ingest", str(fixture_dir / "gpt2_sample.trace.json"), "-o", str(out)])
    assert rc == 0
    assert "19 samples" in capsys.readouterr().err
    assert read_json(out)["version"] == "opbench-trace/1"


def test_ingest_chrome_trace(tmp_path, fixture_dir, capsys):
    out = tmp_path / "chrome.trace.json"
    rc = main(["ingest", str(fixture_dir / "chrome_50.json"), "--chrome", "-o", str(out)])
    assert rc == 0
    assert "23 samples" in capsys.readouterr().err
    run = parse_trace(out)
    assert run.model_name == "chrome_sample"


def test_ingest_chrome_flag_required_for_chrome_files(tmp_path, fixture_dir):
    out = tmp_path / "x.json"
    rc = main(["ingest", str(fixture_dir / "chrome_50.json"), "-o", str(out)])
    assert rc == 2


def test_ubench_gen_and_run(tmp_path, fixture_dir, capsys):
    suite = tmp_path / "suite.json"
    rc = main(["ubench", "gen", str(fixture_dir / "table2_records.json"),
               "-o", str(suite), "--group", "Activation"])
    assert rc == 0
    assert "generated 5 specs" in capsys.readouterr().err

    results = tmp_path / "results.json"
    rc = main(["ubench", "run", str(suite), "-o", str(results),
               "--warmup", "0", "--iterations", "1"])
    assert rc == 0
    err = capsys.readouterr().err
    assert "5 specs: 5 ok, 0 unrunnable, 0 error" in err
    obj = read_json(results)
    assert len(obj["results"]) == 5


def test_ubench_gen_op_filter(tmp_path, fixture_dir, capsys):
    suite = tmp_path / "suite.json"
    rc = main(["ubench", "gen", str(fixture_dir / "table2_records.json"),
               "-o", str(suite), "--op", "NMS"])
    assert rc == 0
    obj = read_json(suite)
    assert [s["op_name"] for s in obj["specs"]] == ["NMS"]


def test_validate_ubench_suite(tmp_path, fixture_dir, capsys):
    suite = tmp_path / "suite.json"
    main(["ubench", "gen", str(fixture_dir / "table2_records.json"), "-o", str(suite)])
    capsys.readouterr()
    assert main(["validate", str(suite)]) == 0
    assert "30 microbenchmark specs" in capsys.readouterr().err
