import pytest

from padicauto import codec
from padicauto.affine import synth_affine
from padicauto.cli import main


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def machine(tmp_path, capsys):
    path = tmp_path / "m.fsm"
    assert cli(capsys, "synth", "--a", "3/5", "--b", "1/3", "--out", str(path))[0] == 0
    return path


def test_synth_round_trips_through_codec(machine):
    assert codec.read(machine) == synth_affine("3/5", "1/3", 2)


def test_predict_reports_knots(capsys):
    code, out, _ = cli(capsys, "predict", "--a", "3/5", "--b", "1/3")
    assert code == 0
    assert "knots: 2" in out


def test_verify_exit_codes(capsys, machine):
    assert cli(capsys, "verify", "--machine", str(machine), "--a", "3/5", "--b", "1/3", "--kmax", "10")[0] == 0
    assert cli(capsys, "verify", "--machine", str(machine), "--a", "3/5", "--b", "2/3", "--kmax", "10")[0] == 1


def test_malformed_machine_names_line(capsys, tmp_path, machine):
    lines = machine.read_text().splitlines()
    lines[-1] = lines[-1] + " junk junk"
    bad = tmp_path / "bad.fsm"
    bad.write_text("\n".join(lines) + "\n")
    code, _, err = cli(capsys, "components", "--machine", str(bad))
    assert code == 2
    assert f"line {len(lines)}" in err


def test_missing_file_is_io_error(capsys, tmp_path):
    code, _, err = cli(capsys, "components", "--machine", str(tmp_path / "nope.fsm"))
    assert code == 3
    assert "nope.fsm" in err


def test_bad_rational_is_usage_error(capsys):
    code, _, err = cli(capsys, "predict", "--a", "3/0", "--b", "1")
    assert code == 2
    assert "zero denominator" in err


@pytest.mark.parametrize("cmd", [
    ["plot", "--k", "10", "--width", "2"],
    ["plot", "--k", "10", "--mode", "sample:64", "--seed", "5", "--format", "svg"],
    ["detect", "--k", "12"],
])
def test_outputs_are_byte_deterministic_and_ignore_jobs(capsys, tmp_path, machine, cmd):
    outs = []
    for i, jobs in enumerate(["1", "1", "3"]):
        path = tmp_path / f"o{i}"
        argv = ["--jobs", jobs, *cmd, "--machine", str(machine), "--out", str(path)]
        assert cli(capsys, *argv)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert outs[0]


def test_run_reads_msb_first(capsys, machine, tmp_path):
    ident = tmp_path / "id.fsm"
    assert cli(capsys, "synth", "--a", "1", "--b", "0", "--out", str(ident))[0] == 0
    code, out, _ = cli(capsys, "run", "--machine", str(ident), "--input", "0110")
    assert code == 0 and out.strip() == "0110"
    code, out, _ = cli(capsys, "adder", "--out", str(tmp_path / "add.fsm"))
    code, out, _ = cli(capsys, "run", "--machine", str(tmp_path / "add.fsm"), "--input", "0011", "--input", "0101")
    assert code == 0 and out.strip() == "1000"


def test_vdp_and_kernel(capsys, machine):
    code, out, _ = cli(capsys, "vdp", "--machine", str(machine), "--mmax", "8")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0].startswith("m,")
    assert len(rows) == 9
    code, out, _ = cli(capsys, "kernel", "--machine", str(machine))
    assert code == 0 and "finite" in out.lower()


def test_export_requires_writable_target(capsys, tmp_path, machine):
    pts = tmp_path / "pts.csv"
    assert cli(capsys, "plot", "--machine", str(machine), "--k", "8", "--out", str(pts))[0] == 0
    code, _, err = cli(capsys, "export", "--points", str(pts), "--format", "pgm",
                       "--out", str(tmp_path / "no" / "such" / "x.pgm"))
    assert code == 3
    assert cli(capsys, "export", "--points", str(pts), "--format", "svg", "--cable", "3/5:1/3",
               "--out", str(tmp_path / "x.svg"))[0] == 0
    assert (tmp_path / "x.svg").read_text().startswith("<")
