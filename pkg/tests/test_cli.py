import pytest

from otw.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    main,
    parse_checks,
    resolve_threads,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_dims(capsys):
    code, out, _ = run(capsys, "verify", "-m", "3", "--check", "dims")
    assert code == EXIT_OK
    assert "PASS  dims" in out and "dim T = 35" in out


def test_verify_centralizer_m2(capsys):
    code, out, _ = run(capsys, "verify", "-m", "2", "--check", "centralizer")
    assert code == EXIT_OK


def test_verify_blockdiag_m3(capsys):
    code, out, _ = run(capsys, "verify", "-m", "3", "--check", "blockdiag")
    assert code == EXIT_OK
    assert "block sizes (4,3,2,2,1,1)" in out
    assert "multiplicities (1,3,2,6,2,4)" in out


def test_verify_all_small(capsys):
    code, out, _ = run(capsys, "verify", "-m", "2", "--threads", "3")
    assert code == EXIT_OK
    assert "blockdiag" not in out
    assert out.count("PASS") == 5


@pytest.mark.parametrize("argv", [
    ["verify", "-m", "7"],
    ["verify", "-m", "0"],
    ["decompose", "-m", "6"],
    ["export", "-m", "2"],
    ["verify", "-m", "3", "--check", "nonsense"],
    ["verify", "-m", "2", "--check", "blockdiag"],
    ["build", "-m", "3", "--check", "dims"],
    ["verify", "-m", "3", "--threads", "0"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert "error" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate", "-m", "3"])
    assert e.value.code == EXIT_USAGE


def test_check_parsing():
    assert parse_checks(["lemma51,dims", "dims"], 3) == ("dims", "lemma51")
    assert parse_checks(None, 6)[-1] == "lemma51"
    assert parse_checks(["all"], 4)[-1] == "blockdiag"
    with pytest.raises(UsageError):
        parse_checks(["dim"], 3)


def test_thread_resolution():
    assert resolve_threads(None, None) == 1
    assert resolve_threads(None, "4") == 4
    assert resolve_threads(2, "8") == 2
    with pytest.raises(UsageError):
        resolve_threads(None, "many")


def test_env_threads_bad_value(capsys, monkeypatch):
    monkeypatch.setenv("OTW_THREADS", "x")
    code, _, err = run(capsys, "verify", "-m", "2", "--check", "dims")
    assert code == EXIT_USAGE and "OTW_THREADS" in err


def test_failing_check_exits_1(capsys, monkeypatch):
    import otw.cli as cli

    from otw.checks import CheckReport

    def broken(*args, **kwargs):
        rep = CheckReport("dims")
        rep.record("forced", False)
        return rep

    monkeypatch.setattr(cli, "verify_dimensions", broken)
    code, out, _ = run(capsys, "verify", "-m", "3", "--check", "dims,lemma51")
    assert code == EXIT_FAIL
    assert "FAIL  dims" in out and "PASS  lemma51" in out


def test_build(capsys):
    code, out, _ = run(capsys, "build", "-m", "4")
    assert code == EXIT_OK
    assert "[5, -4, 3, -2, 1]" in out and "70" in out


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "-m", "3")
    assert code == EXIT_OK
    assert "center dimension 6" in out


def test_export_writes_bundle(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "-m", "3", "--out", str(tmp_path / "b"), "--format", "json")
    assert code == EXIT_OK
    names = sorted(p.name for p in (tmp_path / "b").iterdir())
    assert "upsilon.json" in names and "blocks.json" in names and "manifest.json" in names


def test_export_io_error(capsys, tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    code, _, err = run(capsys, "export", "-m", "3", "--out", str(blocker / "x"))
    assert code == EXIT_FAIL
    assert str(blocker) in err
