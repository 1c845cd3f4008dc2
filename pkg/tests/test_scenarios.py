import json

import numpy as np
import pytest

from reslab import cli, model
from reslab.errors import ConfigError
from reslab.scenarios import (
    SCENARIOS,
    Scenario,
    TimeGrid,
    parse_config,
    resolve_params,
    run_scenario,
    serialize_scenario,
)


class TestParseConfig:
    def test_memory_default_is_resonant(self):
        sc = parse_config('{"name": "memory", "params": {"delta1": 0}}')
        p = resolve_params(sc)
        assert p.omega2 == 0.0
        assert model.DerivedMemoryParams.from_params(p).chi == 0.0

    def test_sweep_three_points(self):
        sc = parse_config('{"name": "sweep", "sweep_axis": ["gamma", [1, 10, 100]]}')
        assert sc.sweep_axis == ("gamma", (1.0, 10.0, 100.0))

    def test_rejects_negative_drive(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"name": "nonadiabatic", "params": {"omega2": -1}}')
        assert err.value.path == ("params", "omega2")

    def test_rejects_unknown_parameter(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"name": "nonadiabatic", "params": {"bogus": 1}}')
        assert err.value.path == ("params", "bogus")

    def test_rejects_unknown_top_level_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"name": "nonadiabatic", "bogus": {}}')
        assert err.value.path == ("bogus",)

    def test_rejects_malformed_json(self):
        with pytest.raises(ConfigError):
            parse_config("{not json")

    def test_rejects_non_finite(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"name": "nonadiabatic", "params": {"g": NaN}}')
        assert err.value.path == ("params", "g")

    def test_rejects_unknown_scenario(self):
        with pytest.raises(ConfigError):
            parse_config('{"name": "wat"}')

    def test_rejects_empty_sweep(self):
        with pytest.raises(ConfigError):
            parse_config('{"name": "sweep", "sweep_axis": ["gamma", []]}')

    def test_rejects_sweep_axis_elsewhere(self):
        with pytest.raises(ConfigError):
            parse_config('{"name": "memory", "sweep_axis": ["gamma", [1]]}')

    def test_option_validation(self):
        sc = parse_config('{"name": "interferometer", "options": {"include_tl_decay": true}}')
        assert sc.options == {"include_tl_decay": True}
        with pytest.raises(ConfigError):
            parse_config('{"name": "interferometer", "options": {"include_gamma": true}}')


class TestRoundTrip:
    @pytest.mark.parametrize(
        "sc",
        [
            Scenario(name="nonadiabatic"),
            Scenario(name="memory", params={"delta1": 1000.0, "g": 2e5}),
            Scenario(
                name="interferometer",
                grid=TimeGrid(t_end=1e-6, n_samples=301),
                options={"include_tl_decay": True},
            ),
            Scenario(
                name="sweep",
                sweep_axis=("gamma", (1.0, 2.0)),
                options={"base": "nonadiabatic"},
                unit_scale=2.0,
            ),
            Scenario(name="effective-check", options={"branch": "memory", "chi": 1.0}),
        ],
    )
    def test_parse_serialize_round_trip(self, sc):
        assert parse_config(serialize_scenario(sc)) == sc


class TestResolution:
    def test_detunings_follow_overridden_drives(self):
        sc = parse_config('{"name": "nonadiabatic", "params": {"omega1": 1000.0, "omega2": 50.0}}')
        p = resolve_params(sc)
        assert p.delta2 == -2000.0
        assert p.delta_a == -50.0
        assert model.check_regime(p, "nonadiabatic").ok

    def test_explicit_detunings_respected(self):
        sc = parse_config('{"name": "nonadiabatic", "params": {"delta2": -7.0}}')
        assert resolve_params(sc).delta2 == -7.0

    def test_unit_scale(self):
        sc = parse_config(
            '{"name": "nonadiabatic", "params": {"g": 1.0, "Gamma": 20.0, "gamma": 0.0,'
            ' "omega1": 400.0, "omega2": 20.0}, "unit_scale": 2.0}'
        )
        p = resolve_params(sc)
        assert (p.g, p.Gamma, p.omega1) == (2.0, 40.0, 800.0)
        assert p.delta2 == -1600.0


class TestRunScenario:
    def test_nonadiabatic_reference_summary(self):
        result = run_scenario(Scenario(name="nonadiabatic"))
        derived = result.summary["derived"]
        assert derived["rate_eng"] == 1e4
        assert derived["rate_ratio"] == 100.0
        assert abs(derived["fidelity_formula"] - 803.0 / 806.0) < 1e-12
        assert set(result.summary["resolved_params"]) == {
            "g", "omega1", "omega2", "phi1", "phi2",
            "delta_a", "delta1", "delta2", "Gamma", "gamma", "n_max",
        }
        assert result.summary["integrator"]["refinements"] >= 1

    def test_fidelity_predictions_reported_side_by_side(self):
        derived = run_scenario(Scenario(name="nonadiabatic")).summary["derived"]
        assert derived["fidelity_formula"] != derived["fidelity_rate_equations"]
        assert abs(derived["fidelity_steady"] - derived["fidelity_rate_equations"]) < 1e-9

    def test_memory_summary(self):
        result = run_scenario(Scenario(name="memory", params={"delta1": 0.0}))
        derived = result.summary["derived"]
        assert derived["chi"] == 0.0
        assert derived["g_tilde"] == pytest.approx(1e5)
        assert derived["rate_ratio"] == pytest.approx(100.0)
        assert abs(derived["fidelity_formula"] - 101.0 / 102.0) < 1e-12

    def test_phase_cycle_summary(self):
        derived = run_scenario(Scenario(name="phase-cycle")).summary["derived"]
        assert derived["geometric_phase"] == pytest.approx(-np.pi, abs=1e-3)
        assert derived["dynamic_phase"] == pytest.approx(-np.pi * 0.05 / 2.0, abs=1e-3)

    def test_sweep_fidelity_column(self):
        sc = parse_config(
            '{"name": "sweep", "sweep_axis": ["gamma", [10000.0, 1000.0, 100.0]]}'
        )
        result = run_scenario(sc)
        col = result.series_header.index("fidelity_formula")
        values = [row[col] for row in result.series_rows]
        expected = [1.0 - 3.0 / 14.0, 83.0 / 86.0, 803.0 / 806.0]
        assert np.allclose(values, expected, atol=1e-12, rtol=0.0)

    def test_elimination_check_summary(self):
        sc = Scenario(
            name="elimination-check",
            params={"g": 1.0, "omega1": 400.0, "omega2": 20.0, "Gamma": 20.0},
            unit_scale=1.0,
        )
        derived = run_scenario(sc).summary["derived"]
        assert derived["Gamma_over_g"] == 20.0
        assert derived["max_trace_distance_after_transient"] < 0.05

    def test_effective_check_memory_branch(self):
        sc = Scenario(
            name="effective-check",
            params={"g": 1.0, "omega1": 200.0, "Gamma": 20.0, "gamma": 0.0},
            options={"branch": "memory", "chi": 1.0},
        )
        derived = run_scenario(sc).summary["derived"]
        assert derived["worst_fidelity"] > 0.99

    def test_determinism(self, tmp_path):
        sc = parse_config('{"name": "nonadiabatic", "grid": {"n_samples": 50}}')
        r1 = run_scenario(sc, out_dir=tmp_path / "a")
        r2 = run_scenario(sc, out_dir=tmp_path / "b")
        s1, s2 = dict(r1.summary), dict(r2.summary)
        s1.pop("wall_time_s"), s2.pop("wall_time_s")
        assert json.dumps(s1, sort_keys=True, default=str) == json.dumps(
            s2, sort_keys=True, default=str
        )
        csv1 = (r1.out_dir / "series.csv").read_bytes()
        csv2 = (r2.out_dir / "series.csv").read_bytes()
        assert csv1 == csv2

    def test_output_files(self, tmp_path):
        sc = parse_config('{"name": "phase-cycle", "grid": {"n_samples": 257}}')
        result = run_scenario(sc, out_dir=tmp_path)
        assert result.out_dir.parent.name == "phase-cycle"
        for name in ("summary.json", "series.csv", "resolved_config.json"):
            assert (result.out_dir / name).exists()
        summary = json.loads((result.out_dir / "summary.json").read_text())
        assert summary["schema"] == "reslab/v1"
        header = (result.out_dir / "series.csv").read_text().splitlines()[0]
        assert header.split(",")[0] == "t"
        resolved = json.loads((result.out_dir / "resolved_config.json").read_text())
        assert resolved["name"] == "phase-cycle"

    def test_sweep_parallel_matches_serial(self):
        sc = parse_config('{"name": "sweep", "sweep_axis": ["gamma", [100.0, 1000.0]]}')
        serial = run_scenario(sc, workers=1)
        parallel = run_scenario(sc, workers=2)
        assert serial.series_rows == parallel.series_rows


class TestCli:
    def write(self, tmp_path, doc):
        f = tmp_path / "config.json"
        f.write_text(json.dumps(doc))
        return str(f)

    def test_run_success(self, tmp_path, capsys):
        cfg = self.write(tmp_path, {"name": "nonadiabatic", "grid": {"n_samples": 50}})
        code = cli.main(["run", cfg, "--out", str(tmp_path / "runs")])
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert out["scenario"] == "nonadiabatic"
        assert (tmp_path / "runs" / "nonadiabatic").exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        cfg = self.write(tmp_path, {"name": "nonadiabatic", "params": {"omega2": -1}})
        code = cli.main(["run", cfg])
        assert code == 2
        payload = json.loads(capsys.readouterr().out)
        assert payload["exit_code"] == 2
        assert payload["error"]["path"] == ["params", "omega2"]

    def test_missing_file_is_config_error(self, capsys):
        assert cli.main(["run", "/nonexistent/config.json"]) == 2

    def test_regime_violation_exit_code(self, tmp_path, capsys):
        cfg = self.write(
            tmp_path,
            {"name": "effective-check", "params": {"delta_a": -123.0}},
        )
        code = cli.main(["run", cfg, "--out", str(tmp_path / "runs")])
        assert code == 4
        payload = json.loads(capsys.readouterr().out)
        assert payload["error"]["type"] == "RegimeError"

    def test_validate_ok(self, tmp_path, capsys):
        cfg = self.write(tmp_path, {"name": "nonadiabatic"})
        assert cli.main(["validate", cfg]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] and report["regime_ok"]

    def test_validate_flags_regime(self, tmp_path, capsys):
        cfg = self.write(tmp_path, {"name": "nonadiabatic", "params": {"delta2": -1.0}})
        assert cli.main(["validate", cfg]) == 4

    def test_list_scenarios(self, capsys):
        assert cli.main(["list-scenarios"]) == 0
        out = capsys.readouterr().out
        for name in SCENARIOS:
            assert name in out

    def test_exit_code_classification(self):
        from reslab.errors import (
            IntegrationDivergenceError,
            RegimeError,
            SteadyStateError,
        )

        assert cli._classify(ConfigError("bad")) == 2
        assert cli._classify(IntegrationDivergenceError(1.0, 1e-8)) == 3
        assert cli._classify(SteadyStateError("no null vector")) == 3
        assert cli._classify(RegimeError(report="r")) == 4
        with pytest.raises(KeyError):
            cli._classify(KeyError("unrelated errors propagate"))


class TestSummaryBounds:
    @pytest.mark.parametrize(
        "sc",
        [
            Scenario(name="nonadiabatic"),
            Scenario(name="memory"),
            Scenario(name="effective-check", params={
                "g": 1.0, "omega1": 400.0, "omega2": 20.0, "Gamma": 20.0, "gamma": 0.0,
            }),
        ],
    )
    def test_reported_fidelities_bounded(self, sc):
        derived = run_scenario(sc).summary["derived"]
        for key, value in derived.items():
            if key.startswith("fidelity") or key == "worst_fidelity":
                assert 0.0 <= value <= 1.0 + 1e-8
