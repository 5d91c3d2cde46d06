"""Config parsing, experiment dispatch, and CSV determinism."""

import numpy as np
import pytest

from memdiff.cli import build_kernel, main, parse_config
from memdiff.errors import ConfigError
from memdiff.kernels import Exponential, PowerLaw

MINIMAL_SOLVE = """\
[kernel]
family = heat
a0 = 1.0

[initial]
type = gaussian
width = 1.0

[grid]
dimension = 1
modes_per_axis = 16
xi_max = 4.0

[time]
t_end = 1.0
n_steps = 100

[experiment]
t_list = 0.0, 1.0
output = {out}
"""

CONVERGE = """\
[kernel]
family = exponential
mu = 1.0
c = 1.0

[initial]
type = gaussian

[grid]
dimension = 1
modes_per_axis = 32
xi_max = 6.0

[experiment]
big_t_list = 10, 100, 1000
t_list = 1.0
s = 0.0
beta = 0.0
output = {out}
"""


def test_parse_minimal_config():
    cfg = parse_config(MINIMAL_SOLVE.format(out="x.csv"), "solve")
    assert cfg.get("kernel", "family") == "heat"
    assert isinstance(float(cfg.get("grid", "xi_max")), float)


def test_parse_collects_all_errors_with_line_numbers():
    text = "\n".join([
        "[kernel]",            # 1
        "family = powerlaw",   # 2
        "beta = 1.7",          # 3
        "nope = 1",            # 4
        "",                    # 5
        "[kernel]",            # 6
        "[grid]",              # 7
        "modes_per_axis = 7",  # 8
    ])
    with pytest.raises(ConfigError) as exc:
        parse_config(text, "validate-kernel")
    problems = exc.value.problems
    lines = [ln for ln, _ in problems]
    assert 3 in lines and 4 in lines and 6 in lines and 8 in lines
    msgs = {ln: msg for ln, msg in problems}
    assert "(-1, 1]" in msgs[3]  # range error names the constraint
    assert "first at line 1" in msgs[6]  # duplicate section, both line numbers


def test_parse_missing_section():
    with pytest.raises(ConfigError) as exc:
        parse_config("[kernel]\nfamily = heat\n", "solve")
    assert any("missing section" in msg for _, msg in exc.value.problems)


def test_build_kernel_families():
    cfg = parse_config("[kernel]\nfamily = exponential\nmu = 2.0\nc = 3.0\n",
                       "validate-kernel")
    k = build_kernel(cfg)
    assert isinstance(k, Exponential)
    assert k.mu == 2.0 and k.c == 3.0
    cfg = parse_config("[kernel]\nfamily = fractional\nbeta = -0.5\n",
                       "validate-kernel")
    assert isinstance(build_kernel(cfg), PowerLaw)


def test_solve_writes_initial_data_at_time_zero(tmp_path):
    out = tmp_path / "solve.csv"
    cfg_file = tmp_path / "cfg.ini"
    cfg_file.write_text(MINIMAL_SOLVE.format(out=out))
    assert main(["solve", str(cfg_file)]) == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    header, body = rows[0], rows[1:]
    assert header.split(",")[:2] == ["t", "xi1"]
    t0 = [r.split(",") for r in body if r.split(",")[0] == "0.0"]
    # At t = 0 the field equals u0_hat = e^{-xi^2/2} at every mode.
    for row in t0:
        xi = float(row[1])
        assert abs(float(row[2]) - np.exp(-0.5 * xi**2)) < 1e-12
        assert float(row[3]) == 0.0


def test_converge_csv_distances_decreasing(tmp_path):
    out = tmp_path / "conv.csv"
    cfg_file = tmp_path / "cfg.ini"
    cfg_file.write_text(CONVERGE.format(out=out))
    assert main(["converge", str(cfg_file)]) == 0
    rows = [l.split(",") for l in out.read_text().splitlines()
            if l and not l.startswith("#")][1:]
    dists = [float(r[2]) for r in rows]
    assert all(b < a for a, b in zip(dists, dists[1:]))


def test_determinism_byte_identical(tmp_path):
    # The identical config text (including the output path) must produce
    # byte-identical CSVs across runs.
    out = tmp_path / "a.csv"
    cfg_file = tmp_path / "cfg.ini"
    cfg_file.write_text(CONVERGE.format(out=out))
    assert main(["converge", str(cfg_file)]) == 0
    first = out.read_bytes()
    out.unlink()
    assert main(["converge", str(cfg_file)]) == 0
    assert out.read_bytes() == first


def test_refusal_exit_code_and_message(tmp_path, capsys):
    text = CONVERGE.format(out=tmp_path / "x.csv").replace(
        "family = exponential\nmu = 1.0\nc = 1.0", "family = cosine"
    )
    cfg_file = tmp_path / "cfg.ini"
    cfg_file.write_text(text)
    code = main(["converge", str(cfg_file)])
    assert code == 3
    err = capsys.readouterr().err
    assert "refused" in err and "regularly varying" in err


def test_config_error_exit_code(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.ini"
    cfg_file.write_text("[kernel]\nfamily = powerlaw\nbeta = 2.0\n")
    code = main(["validate-kernel", str(cfg_file)])
    assert code == 2
    assert "line 3" in capsys.readouterr().err


def test_validate_kernel_cosine_report(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.ini"
    cfg_file.write_text("[kernel]\nfamily = cosine\n")
    assert main(["validate-kernel", str(cfg_file)]) == 0
    outtext = capsys.readouterr().out
    assert "positive-definite: yes" in outtext
    assert "regularly-varying: no" in outtext


def test_ml_table(capsys):
    assert main(["ml", "--alpha", "1.0", "--zmin", "-2", "--zmax", "0", "--n", "3"]) == 0
    out = capsys.readouterr().out
    body = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert body[0] == "z,E_alpha"
    z, val = body[1].split(",")
    assert abs(float(val) - np.exp(float(z))) < 1e-12


def test_ml_rejects_bad_args(capsys):
    assert main(["ml", "--alpha", "3.0", "--zmin", "-1", "--zmax", "0"]) == 2
    assert main(["ml", "--alpha", "1.0", "--zmin", "0", "--zmax", "-1"]) == 2


def test_missing_config_file(capsys):
    assert main(["solve", "/nonexistent/path.ini"]) == 2
