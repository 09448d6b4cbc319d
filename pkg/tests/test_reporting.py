"""Report envelope tests: serialization round-trips and reproducibility."""

import json

import numpy as np
import pytest

from nuwalk import (
    DisorderSpec,
    LatticeSpec,
    ReportEnvelope,
    WalkKind,
    band_scan,
    band_scan_envelope,
    classify_reality,
    eigendecompose,
    ensemble_envelope,
    envelope_to_dict,
    make_envelope,
    parse_report,
    phase_map,
    phase_map_envelope,
    quasi_energies,
    read_csv_config,
    report_timestamp,
    run_ensemble,
    serialize,
    spectrum_envelope,
    symmetry_envelope,
    verification_envelope,
    write_csv,
    write_json,
    write_report,
)
from nuwalk.operators import CoinField, compose_walk


def tiny_envelope():
    return make_envelope(
        "symmetry_report",
        config={"n": 8, "gamma": 0.25},
        summary={"max_residual": 1e-15},
        columns=("relation", "residual"),
        rows=[("PT:operator", 1e-15)],
    )


class TestEnvelopeValidation:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            make_envelope("mystery", {}, {}, ("a",), [])

    def test_row_width_mismatch_rejected(self):
        with pytest.raises(ValueError):
            make_envelope("symmetry_report", {}, {}, ("a", "b"), [(1,)])

    def test_complex_values_rejected(self):
        with pytest.raises(TypeError):
            make_envelope("symmetry_report", {}, {}, ("a", "b"),
                          [("x", 1.0 + 2.0j)])

    def test_numpy_scalars_become_builtins(self):
        env = make_envelope("symmetry_report", {"n": np.int64(8)},
                            {"x": np.float64(0.5), "flag": np.bool_(True)},
                            ("a", "b"), [(np.int32(1), np.float32(2.0))])
        assert type(env.config["n"]) is int
        assert type(env.summary["x"]) is float
        assert type(env.summary["flag"]) is bool
        assert type(env.rows[0][0]) is int
        assert type(env.rows[0][1]) is float


class TestTimestamp:
    def test_source_date_epoch_pins_the_clock(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        assert report_timestamp() == "2023-11-14T22:13:20+00:00"

    def test_live_clock_is_utc_seconds(self, monkeypatch):
        monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
        stamp = report_timestamp()
        assert stamp.endswith("+00:00")
        assert "." not in stamp


class TestSerialization:
    def test_json_round_trip_is_exact(self):
        env = tiny_envelope()
        back = parse_report(serialize(env, "json"), "json")
        assert back == env

    def test_csv_round_trip_recovers_everything(self):
        env = tiny_envelope()
        back = parse_report(serialize(env, "csv"), "csv")
        assert back.kind == env.kind
        assert back.tool_version == env.tool_version
        assert back.created_at == env.created_at
        assert back.config == env.config
        assert back.summary == env.summary
        assert back.columns == env.columns
        assert back.rows == env.rows

    def test_awkward_floats_survive_the_csv_round_trip(self):
        values = (0.1 + 0.2, 1.0 / 3.0, 1e-300, -4.9e-324, np.pi,
                  float(np.nextafter(1.0, 2.0)))
        env = make_envelope("band_scan", {}, {},
                            ("k", "eps_plus_re", "eps_plus_im", "eps_minus_re",
                             "eps_minus_im", "lambda_plus_re"),
                            [values])
        back = parse_report(serialize(env, "csv"), "csv")
        for got, want in zip(back.rows[0], values):
            assert got == want

    def test_format_aliases(self):
        env = tiny_envelope()
        assert serialize(env, "delimited-text") == serialize(env, "csv")
        assert serialize(env, "structured-record") == serialize(env, "json")

    def test_unsupported_format_rejected(self):
        env = tiny_envelope()
        with pytest.raises(ValueError):
            serialize(env, "xml")
        with pytest.raises(ValueError):
            parse_report(b"", "xml")

    def test_serialize_is_byte_stable(self):
        env = tiny_envelope()
        for fmt in ("json", "csv"):
            assert serialize(env, fmt) == serialize(env, fmt)

    def test_identical_payloads_identical_bytes(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        assert serialize(tiny_envelope(), "csv") == serialize(tiny_envelope(), "csv")

    def test_csv_header_lines(self):
        text = serialize(tiny_envelope(), "csv").decode("utf-8")
        lines = text.split("\n")
        assert lines[0] == "# nuwalk symmetry_report"
        assert lines[1].startswith("# tool_version: ")
        assert lines[2].startswith("# created_at: ")
        assert lines[3].startswith("# config: ")
        assert lines[4].startswith("# summary: ")
        assert lines[5] == "relation,residual"
        assert text.endswith("\n")

    def test_csv_booleans_become_ints(self):
        env = make_envelope("phase_map", {}, {},
                            ("i", "j", "theta1", "theta2", "presence", "ratio"),
                            [(0, 0, 0.1, 0.2, True, 0.5)])
        text = serialize(env, "csv").decode("utf-8")
        assert "True" not in text
        assert ",1," in text.splitlines()[-1]

    def test_parse_rejects_missing_provenance(self):
        body = "# nuwalk band_scan\nk\n1.0\n"
        with pytest.raises(ValueError):
            parse_report(body.encode("utf-8"), "csv")

    def test_parse_rejects_headerless_body(self):
        lines = serialize(tiny_envelope(), "csv").decode("utf-8").splitlines()
        stripped = "\n".join(line for line in lines if line.startswith("#"))
        with pytest.raises(ValueError):
            parse_report(stripped.encode("utf-8"), "csv")

    def test_envelope_to_dict_is_json_ready(self):
        doc = envelope_to_dict(tiny_envelope())
        json.dumps(doc)
        assert doc["kind"] == "symmetry_report"


class TestFileIO:
    def test_write_and_replay_config(self, tmp_path):
        env = tiny_envelope()
        path = tmp_path / "report.csv"
        write_csv(env, path)
        assert read_csv_config(path) == {"n": 8, "gamma": 0.25}

    def test_write_json_parses_back(self, tmp_path):
        env = tiny_envelope()
        path = tmp_path / "report.json"
        write_json(env, path)
        assert parse_report(path.read_bytes(), "json") == env

    def test_write_report_uses_the_named_format(self, tmp_path):
        env = tiny_envelope()
        path = tmp_path / "report.txt"
        write_report(env, path, "delimited-text")
        assert path.read_bytes().startswith(b"# nuwalk ")


class TestBuilders:
    def test_band_scan_envelope(self):
        scan = band_scan(WalkKind.U1_PT, np.pi / 3, -np.pi / 12, np.log(1.1), 16)
        env = band_scan_envelope(scan, {"num_k": 16})
        assert env.kind == "band_scan"
        assert env.summary["num_momenta"] == 16
        assert len(env.rows) == 16
        assert len(env.columns) == 9
        back = parse_report(serialize(env, "csv"), "csv")
        assert back.rows == env.rows

    def test_spectrum_envelope(self):
        lat = LatticeSpec(6)
        w = compose_walk(WalkKind.U2_TRS, CoinField.homogeneous(0.7, -0.3, lat),
                         0.2, lat)
        s = eigendecompose(w)
        env = spectrum_envelope(s, classify_reality(s), quasi_energies(s), {"n": 6})
        assert env.kind == "spectrum_summary"
        assert env.summary["dim"] == 12
        assert len(env.rows) == 12
        assert env.columns == ("index", "lambda_re", "lambda_im",
                               "eps_re", "eps_im", "residual")

    def test_ensemble_envelope_without_vector_checks(self):
        spec = DisorderSpec(case="A", mean_theta1=np.pi / 3,
                            mean_theta2=-np.pi / 12, gamma=np.log(1.1),
                            lattice=LatticeSpec(8), master_seed=7)
        env = ensemble_envelope(run_ensemble(spec, 3), {"case": "a"})
        assert env.columns == ("realization", "complex_fraction",
                               "max_modulus_deviation")
        assert env.summary["num_realizations"] == 3

    def test_ensemble_envelope_with_vector_checks(self):
        spec = DisorderSpec(case="D", mean_theta1=np.pi / 4,
                            mean_theta2=np.pi / 20, gamma=np.log(1.1),
                            lattice=LatticeSpec(8), master_seed=7)
        env = ensemble_envelope(run_ensemble(spec, 3, check_T_vectors=True),
                                {"case": "d"})
        assert env.columns[-1] == "max_T_vector_residual"
        assert all(isinstance(r[-1], float) for r in env.rows)

    def test_phase_map_envelope(self):
        pm = phase_map("D", [0.3, 0.8], [0.1, 0.5], 2, np.log(1.1),
                       LatticeSpec(8), 7)
        env = phase_map_envelope(pm, {"seed": 7})
        assert env.kind == "phase_map"
        assert env.summary["grid_shape"] == [2, 2]
        assert len(env.rows) == 4
        for row in env.rows:
            assert row[4] in (0, 1)

    def test_symmetry_envelope(self):
        env = symmetry_envelope({"PT:operator": 1e-16, "T:operator": 0.1},
                                {"n": 8}, extra_summary={"frame": "symmetry"})
        assert env.summary["max_residual"] == 0.1
        assert env.summary["frame"] == "symmetry"
        assert len(env.rows) == 2

    def test_verification_envelope(self):
        env = verification_envelope(
            [("a", 1e-16, 1e-12, True), ("b", 0.5, 1e-12, False)], {}
        )
        assert env.summary == {"num_checks": 2, "num_failed": 1}
        assert env.rows[0][3] == "pass"
        assert env.rows[1][3] == "fail"
        back = parse_report(serialize(env, "csv"), "csv")
        assert back.rows[1][3] == "fail"
