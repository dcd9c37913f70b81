import pytest

from markovbits.cli import main, unpack_bits

from conftest import TABLE_MATRIX


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(name, text, mode="w"):
        path = tmp_path / name
        if mode == "wb":
            path.write_bytes(text)
        else:
            path.write_text(text)
        return str(path)
    return _write


@pytest.mark.parametrize("trajectory, expected", [
    ("1 1 2 1", "0"), ("1 2 1 1", "1"), ("1 2 2 1", ""), ("1 1 1 1", ""),
])
def test_extract_four_step_table(write, tmp_path, trajectory, expected):
    alph = write("alph.txt", "1 2\n")
    src = write("in.txt", trajectory + "\n")
    dst = tmp_path / "out.txt"
    assert main(["extract", "--algorithm", "a", "--alphabet", alph, "--input", src,
                 "--output", str(dst)]) == 0
    assert dst.read_text() == (expected + "\n" if expected else "")


def test_extract_comma_tokens_and_bytes(write, tmp_path):
    src = write("in.txt", "0,1,0,0\n")
    dst = tmp_path / "o"
    assert main(["extract", "--states", "2", "--input", src, "--output", str(dst)]) == 0
    assert dst.read_text() == "0\n"
    raw = write("in.bin", bytes([0, 1, 0, 0]), "wb")
    assert main(["extract", "--states", "2", "--input-format", "bytes", "--input", raw,
                 "--output", str(dst)]) == 0
    assert dst.read_text() == "0\n"


def test_empty_input(write, tmp_path):
    src = write("empty.txt", "")
    dst = tmp_path / "o"
    for fmt in ("ascii01", "packed"):
        assert main(["extract", "--states", "3", "--input", src, "--output", str(dst),
                     "--format", fmt]) == 0
        assert dst.read_bytes() == b""


def test_streaming_worked_example(write, tmp_path):
    dst = tmp_path / "o"
    src = write("in.txt", "1 1 1 2 2 2 1 2\n")
    alph = write("alph.txt", "1 2")
    args = ["extract", "--algorithm", "b", "--window", "4", "--alphabet", alph, "--output", str(dst)]
    assert main(args + ["--input", src]) == 0
    assert dst.read_text() == ""
    src = write("in.txt", "1 1 1 2 2 2 1 2 2\n")
    assert main(args + ["--input", src]) == 0
    assert dst.read_text() == "10\n"


def test_packed_format(write, tmp_path):
    src = write("in.txt", " ".join("0 1" for _ in range(40)))
    ascii_out, packed_out = tmp_path / "a", tmp_path / "p"
    base = ["extract", "--algorithm", "vn", "--states", "2", "--input", src]
    assert main(base + ["--output", str(ascii_out)]) == 0
    assert main(base + ["--output", str(packed_out), "--format", "packed"]) == 0
    bits = ascii_out.read_text().strip()
    assert bits == "0" * 40
    data = packed_out.read_bytes()
    assert data == bytes([0, 0, 0, 0, 0, 8])
    assert unpack_bits(data) == bits
    assert unpack_bits(bytes([0b10100000, 3])) == "101"


def test_bad_symbol_and_flags(write, capsys):
    src = write("in.txt", "0 1 7 0")
    code, _, err = run(capsys, "extract", "--states", "2", "--input", src)
    assert code == 2 and "position 2" in err
    assert run(capsys, "extract", "--states", "2", "--window", "4", "--input", src)[0] == 1
    assert run(capsys, "extract", "--input", src)[0] == 1
    assert run(capsys, "extract", "--states", "3", "--psi", "peres", "--algorithm", "a",
               "--input", src)[0] == 1
    assert run(capsys, "extract", "--bogus")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_sampling_mode_is_deterministic(write, tmp_path):
    chain = write("chain.yaml", "states: [x, y]\nrows:\n  - [0.3, 0.7]\n  - [0.6, 0.4]\n")
    outs = []
    for i in range(2):
        dst = tmp_path / f"o{i}"
        assert main(["extract", "--chain", chain, "--length", "5000", "--seed", "3",
                     "--algorithm", "b", "--window", "8", "--output", str(dst)]) == 0
        outs.append(dst.read_bytes())
    assert outs[0] == outs[1] and len(outs[0]) > 1000


def test_analyze_enumerate(write, capsys):
    rows = "\n".join("  - [" + ", ".join(r) + "]" for r in TABLE_MATRIX)
    chain = write("chain.yaml", f"states: [s1, s2, s3]\nrows:\n{rows}\ntolerance: 1.0e-5\n")
    code, out, _ = run(capsys, "analyze", "enumerate", "--chain", chain, "--length", "8",
                       "--algorithm", "c")
    assert code == 0
    fields = dict(line.split("=", 1) for line in out.splitlines())
    assert fields["trajectories"] == str(3**7)
    assert fields["uniform"] == "true"
    code, out, _ = run(capsys, "analyze", "enumerate", "--states", "3", "--length", "9",
                       "--budget", "100")
    assert code == 3
    code, out, _ = run(capsys, "analyze", "enumerate", "--states", "2", "--length", "4",
                       "--algorithm", "a", "--table")
    assert code == 0 and out.splitlines()[-1] == "E[length]    0.250"


def test_analyze_efficiency_and_entropy(capsys):
    code, out, _ = run(capsys, "analyze", "efficiency", "--states", "3", "--windows", "2,15")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "2 0.333333"
    assert lines[2].startswith("15 1.134")
    code, out, _ = run(capsys, "analyze", "entropy", "--states", "4")
    assert code == 0 and "entropy_rate=2.000000000" in out


def test_verify_feasibility(write, capsys):
    alph = write("alph.txt", "s1 s2 s3 s4")
    good = write("good.txt", "s1\ns4 s3 s1 s2\ns1 s3 s3\ns2 s1 s4\ns2 s1\n")
    code, out, _ = run(capsys, "verify", "feasibility", good, "--alphabet", alph)
    assert code == 0 and "feasible end=s1" in out
    assert "trajectory=s1 s4 s2 s1 s3 s2 s3 s1 s1 s2 s3 s4 s1" in out
    bad = write("bad.txt", "s1\ns4 s3 s1 s2\ns1 s3 s3\ns2 s1 s4\ns1 s2\n")
    code, out, _ = run(capsys, "verify", "feasibility", bad, "--alphabet", alph)
    assert code == 4 and out.strip() == "infeasible"
    empty_lane = write("lane.txt", "0\n1\n\n")
    code, out, _ = run(capsys, "verify", "feasibility", empty_lane, "--states", "2")
    assert code == 0 and "end=1" in out


def test_verify_counting_and_roundtrip(capsys):
    code, out, _ = run(capsys, "verify", "counting", "--states", "3", "--length", "7",
                       "--algorithm", "c")
    assert code == 0 and out.startswith("pass")
    code, out, _ = run(capsys, "verify", "counting", "--states", "2", "--length", "4",
                       "--algorithm", "concat1")
    assert code == 4 and "counterexample" in out
    code, out, _ = run(capsys, "verify", "roundtrip", "--states", "3", "--length", "9")
    assert code == 0 and out.strip() == f"pass trajectories={3**9}"
