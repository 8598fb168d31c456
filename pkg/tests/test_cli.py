import json
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ohmic_oscillator.cli import main, run, write_csv
from ohmic_oscillator.config import (
    ConfigSyntaxError,
    InvariantViolation,
    RunConfig,
    TypeMismatch,
    UnknownKey,
    parse_config,
    serialize,
)
from ohmic_oscillator.lattice_oracle import LatticeConfig
from ohmic_oscillator.model import ModelParams

BASIC = "model.omega=1.0\nmodel.eps=1.0\nmodel.cutoff=1000\n"


def test_parse_basic_with_defaults():
    cfg = parse_config(BASIC)
    assert cfg.model == ModelParams(omega=1.0, eps=1.0, cutoff=1000.0)
    assert cfg.lattice is None and cfg.output_format == "csv"


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\nmodel.omega = 2.0  # trailing\n")
    assert cfg.model.omega == 2.0


def test_invariant_violation_names_key_and_line():
    with pytest.raises(InvariantViolation) as exc:
        parse_config("model.omega=-1")
    assert exc.value.key == "model.omega" and exc.value.line == 1


@pytest.mark.parametrize(
    "text, err, line",
    [
        ("model.omga=1", UnknownKey, 1),
        ("model.omega=1\nlattice.foo=3", UnknownKey, 2),
        ("model.omega=abc", TypeMismatch, 1),
        ("model.omega=1\nlattice.n_sites=4.5", TypeMismatch, 2),
        ("model.omega 1", ConfigSyntaxError, 1),
        ("omega=1", ConfigSyntaxError, 1),
        ("model.omega=1\nmodel.omega=2", ConfigSyntaxError, 2),
        ("output.format=xml", TypeMismatch, 1),
    ],
)
def test_parse_errors(text, err, line):
    with pytest.raises(err) as exc:
        parse_config(text)
    assert exc.value.line == line
    assert str(line) in str(exc.value)


def test_sweep_axis_must_be_model_field():
    with pytest.raises(InvariantViolation):
        parse_config("sweep.axis=temperature\nsweep.values=1,2")
    with pytest.raises(InvariantViolation):
        parse_config("sweep.axis=eps")


def test_lattice_section_validated():
    with pytest.raises(InvariantViolation):
        parse_config(BASIC + "lattice.dt=0.5\n")
    cfg = parse_config(BASIC + "lattice.window=30,60\nlattice.smear_sigma=none\n")
    assert cfg.lattice == LatticeConfig()


configs = st.builds(
    RunConfig,
    model=st.builds(
        lambda o, e, lam, mu: ModelParams(omega=o, eps=e, cutoff=1e4, lambda_th=lam, mu=mu if lam else 0.0),
        st.floats(0.1, 5),
        st.floats(0, 2),
        st.one_of(st.none(), st.floats(0.2, 3)),
        st.floats(0, 0.05),
    ),
    lattice=st.one_of(st.none(), st.just(LatticeConfig()), st.just(LatticeConfig(smear_sigma=0.15))),
    sweep_axis=st.just("eps"),
    sweep_values=st.lists(st.floats(0, 3), min_size=1, max_size=4).map(tuple),
    output_format=st.sampled_from(["csv", "json"]),
    output_path=st.one_of(st.none(), st.just("out.csv")),
    quad_tol=st.floats(1e-14, 1e-6),
)


@given(configs)
def test_round_trip(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert parse_config(serialize(cfg)) == cfg


def test_moments_decoupled():
    res = run("moments", parse_config("model.omega=2.0\nmodel.eps=0\n"))
    row = res.rows[0]
    assert row["qq"] == 0.25 and row["qp"] == 0.0 and row["pp"] == 1.0
    assert res.ok


def test_temperature_weak_coupling():
    res = run("temperature", parse_config("model.omega=1\nmodel.eps=0.1\nmodel.cutoff=100\n"))
    row = res.rows[0]
    assert row["nu"] == pytest.approx(0.5, abs=5e-3) and row["nu"] > 0.5
    assert row["temperature"] < 0.2


def test_thermometer_sweep_extrapolates():
    text = BASIC + "model.lambda_th=0.7\nsweep.axis=mu\nsweep.values=1e-2,3e-3,1e-3\n"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run("thermometer", parse_config(text))
    last = res.rows[-1]
    assert last["label"] == "extrapolated"
    assert last["zz"] == pytest.approx(0.714286, abs=1e-4)
    assert res.ok


def test_csv_is_deterministic_and_versioned():
    cfg = parse_config(BASIC)
    a, b = write_csv(run("temperature", cfg)), write_csv(run("temperature", cfg))
    assert a == b
    assert a.startswith("#schema=1")
    value = a.splitlines()[2].split(",")[4]
    assert len(value.replace(".", "").replace("-", "").lstrip("0")) <= 12


def test_main_writes_output_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(BASIC)
    out = tmp_path / "out.csv"
    assert main(["moments", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text().startswith("#schema=1 command=moments")
    bad = tmp_path / "bad.cfg"
    bad.write_text("model.omga=1\n")
    assert main(["moments", "--config", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["oracle", "--config", str(cfg)]) == 2


def test_main_json(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(BASIC + "output.format=json\n")
    assert main(["temperature", "--config", str(cfg)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["command"] == "temperature" and doc["ok"] is True
    assert doc["rows"][0]["nu"] > 0.5


def test_module_errors_are_surfaced(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model.omega=1\nmodel.eps=1\n")
    assert main(["thermometer", "--config", str(cfg)]) == 2
    assert "lambda_th" in capsys.readouterr().err


def test_sweep_preserves_order():
    cfg = parse_config("model.omega=1\nsweep.axis=eps\nsweep.values=1.5,0.5,1.0\n")
    res = run("sweep", cfg)
    assert [r["axis_value"] for r in res.rows] == [1.5, 0.5, 1.0]
    assert [r["eps"] for r in res.rows] == [1.5, 0.5, 1.0]


def test_correlations_command():
    res = run("correlations", parse_config(BASIC))
    assert res.ok
    assert res.report["decay_rate"] == pytest.approx(0.25, rel=0.1)


def test_oracle_command_with_series(tmp_path):
    series = tmp_path / "series.csv"
    text = (
        "model.omega=1\nmodel.eps=0\n"
        "lattice.n_sites=800\nlattice.t_final=10\nlattice.window=5,10\nlattice.profile_span=4\n"
        f"output.series={series}\n"
    )
    cfg = tmp_path / "o.cfg"
    cfg.write_text(text)
    assert main(["oracle", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 0
    lines = series.read_text().splitlines()
    assert lines[0].startswith("#schema=1") and lines[1] == "t,qq,qp,pp"
