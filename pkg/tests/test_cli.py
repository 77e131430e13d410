import json

import pytest

from rrgroupoid import cli


def _run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_gf_cohomology_json(capsys):
    code, out = _run(["gf-cohomology", "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    dims = next(r for r in rows if r.get("check") == "H^k dims k=0..5")
    assert dims["got"] == [1, 0, 1, 1, 0, 1] and dims["status"] == "pass"
    assert rows[-1] == {"total": len(rows) - 1, "passed": len(rows) - 1, "failed": 0}


def test_json_is_deterministic(capsys):
    first = _run(["gf-cohomology", "--format", "json", "--seed", "3"], capsys)[1]
    second = _run(["gf-cohomology", "--format", "json", "--seed", "3"], capsys)[1]
    assert first == second


def test_riemann_roch_degree(capsys):
    code, out = _run(["riemann-roch", "--degree", "2", "--grid", "32", "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)[0]
    assert row["expected"] == 6 and abs(row["got"] - 6) < 1e-3


def test_markdown_output(capsys):
    code, out = _run(["riemann-roch", "--degree", "0", "--grid", "24"], capsys)
    assert code == 0 and "| riemann-roch | Riemann-Roch d=0 | pass |" in out


def test_failure_gives_nonzero_exit(capsys):
    # an absurd tolerance forces the numeric check to fail
    code, out = _run(["riemann-roch", "--degree", "1", "--grid", "16", "--tol", "1e-30"], capsys)
    assert code == 1 and "FAIL" in out


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nformat = json\ngrid = 24\nseed=5\n")
    args = cli.build_parser().parse_args(["riemann-roch", "--config", str(cfg), "--grid", "32"])
    conf = cli.make_config(args)
    assert conf.format == "json" and conf.grid == 32 and conf.seed == 5


def test_invalid_config_is_usage_error(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("jet_order = 2\n")
    with pytest.raises(SystemExit) as exc:
        cli.main(["gf-cohomology", "--config", str(bad)])
    assert exc.value.code == 2
    bad.write_text("colour = blue\n")
    with pytest.raises(SystemExit):
        cli.main(["gf-cohomology", "--config", str(bad)])
    with pytest.raises(SystemExit):
        cli.main(["no-such-command"])


def test_hopf_verify_small(capsys):
    code, out = _run(["hopf-verify", "--max-degree", "2", "--format", "json"], capsys)
    assert code == 0
    names = {r.get("check") for r in json.loads(out)}
    assert {"coassociativity", "antipode", "b^2", "tau_3^4"} <= names


def test_report_all_covers_every_suite():
    assert cli.SUITES["report"] == [cli.hopf_suite, cli.gf_suite, cli.charmap_suite, cli.surface_suite]
