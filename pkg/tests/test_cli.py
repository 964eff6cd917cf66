import json

from hermwitt import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ring_verb(capsys):
    code, out, _ = run(capsys, "ring", "--ring", "Z/45")
    assert code == 0
    assert "Z/9" in out and "Z/5" in out


def test_witt_table_gf3(capsys):
    code, out, _ = run(capsys, "witt", "table", "--ring", "GF(3)", "--eps", "+1")
    assert code == 0
    assert "structure: [4]" in out


def test_witt_table_json_roundtrip(capsys):
    code, out, _ = run(
        capsys, "--json", "witt", "table", "--ring", "GF(5)", "--eps", "+1"
    )
    assert code == 0
    data = json.loads(out)
    assert data["structure"] == [2, 2]
    assert len(data["addition"]) == 4


def test_even_modulus_exit_code(capsys):
    code, _, err = run(
        capsys, "octagon", "check", "--ring", "Z/4",
        "--alpha", "2", "--beta", "2", "--eps", "+1",
    )
    assert code == 2
    assert "invertible" in err


def test_octagon_check_exit_zero(capsys):
    code, out, _ = run(
        capsys, "octagon", "check", "--ring", "Z/3",
        "--alpha", "2", "--beta", "2", "--eps", "+1",
    )
    assert code == 0
    assert out.count("exact") >= 8


def test_octagon_make(capsys):
    code, out, _ = run(
        capsys, "octagon", "make", "--ring", "Z/9",
        "--alpha", "2", "--beta", "5", "--eps", "-1",
    )
    assert code == 0
    assert "T connected: True" in out


def test_jacobson_verb(capsys):
    code, out, _ = run(
        capsys, "jacobson", "--ring", "GF(3)", "--alpha", "2", "--form", "1"
    )
    assert code == 0
    assert "isotropy transfer: True" in out


def test_sequence_five(capsys):
    code, out, _ = run(
        capsys, "sequence", "five", "--ring", "Z/3", "--alpha", "2"
    )
    assert code == 0
    assert "sequence exact: True" in out


def test_form_verbs(capsys):
    code, out, _ = run(
        capsys, "form", "witt", "--ring", "Z/3", "--entries", "1,-1,1"
    )
    assert code == 0
    assert "hyperbolic planes split: 1" in out
    code, out, _ = run(
        capsys, "form", "disc", "--ring", "Z/3", "--entries", "1,1"
    )
    assert code == 0
    assert "trivial: False" in out
    code, out, _ = run(
        capsys, "form", "isometric", "--ring", "Z/3",
        "--entries", "1,2", "--entries2", "2,1",
    )
    assert code == 0
    assert "isometric: True" in out


def test_form_quaternion_entries(capsys):
    code, out, _ = run(
        capsys, "form", "diag", "--ring", "Z/3",
        "--algebra", "quaternion:2,2", "--eps", "-1", "--entries", "lam,mu",
    )
    assert code == 0
    assert "unimodular: True" in out


def test_finer_verb(capsys):
    code, out, _ = run(
        capsys, "octagon", "finer", "--ring", "Z/3",
        "--alpha", "2", "--beta", "2", "--eps", "+1",
        "--part", "iv", "--form", "1",
    )
    assert code == 0
    assert "agreement: True" in out
