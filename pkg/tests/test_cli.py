import io
import json
import math
import os

import pytest

from maxent_bayes import cli
from maxent_bayes.errors import MaxentError
from maxent_bayes.jsonio import csv_text, dumps, format_float, sha256_text


def tilt_config(target=0.25):
    return {
        "command": "tilt",
        "inputs": {"q": [0.5, 0.5], "potential": [0, 1], "target": target},
        "seed": 7,
    }


def run_quiet(config, out_dir, **kwargs):
    return cli.run(config, out_dir=out_dir, stdout=io.StringIO(), **kwargs)


class TestValidate:
    def test_valid_config_has_no_diagnostics(self):
        assert cli.validate(tilt_config()) == []

    def test_infeasible_target_is_one_diagnostic(self):
        diags = cli.validate(tilt_config(target=5.0))
        assert len(diags) == 1
        assert diags[0]["family"] == "infeasible"
        assert diags[0]["error"] == "InfeasibleConstraint"

    def test_enumeration_guard_reports_computed_size(self):
        config = {
            "command": "sanov",
            "inputs": {
                "P": [0.25, 0.25, 0.25, 0.25],
                "potential": [0, 1, 2, 3],
                "target_interval": [2.0, 3.0],
                "n_grid": [500],
                "method": "exact",
            },
        }
        diags = cli.validate(config)
        assert len(diags) == 1
        assert diags[0]["family"] == "resource"
        assert str(math.comb(503, 3)) in diags[0]["message"]

    def test_unknown_command(self):
        assert cli.validate({"command": "nope", "inputs": {}})[0]["family"] == "validation"

    def test_command_mismatch_flagged(self):
        assert cli.validate(tilt_config(), command="sanov")[0]["family"] == "validation"


class TestRun:
    def test_tilt_writes_json_and_manifest(self, tmp_path):
        out = io.StringIO()
        manifest = cli.run(tilt_config(), out_dir=tmp_path, stdout=out)
        payload = json.loads(out.getvalue())
        assert payload["lambda"] == pytest.approx(1.098612, abs=1e-6)
        result_path = tmp_path / "tilt_result.json"
        assert result_path.exists()
        text = result_path.read_text(encoding="utf-8")
        assert manifest.outputs["tilt_result.json"] == sha256_text(text)
        assert json.loads(text)["lambda"] == payload["lambda"]

    def test_rate_csv_contains_zero_rate_row(self, tmp_path):
        config = {
            "command": "rate",
            "inputs": {"P": [0.5, 0.5], "potential": [0, 1], "xi_grid": [0.25, 0.5, 0.75]},
        }
        run_quiet(config, tmp_path)
        text = (tmp_path / "rate_function.csv").read_bytes().decode("utf-8")
        assert text.startswith("xi,rate,feasible\r\n")
        rows = [line.split(",") for line in text.strip().split("\r\n")[1:]]
        by_xi = {float(r[0]): float(r[1]) for r in rows}
        assert by_xi[0.5] == 0.0
        assert by_xi[0.75] == pytest.approx(0.130812, abs=1e-6)

    def test_format_json_skips_csv(self, tmp_path):
        config = {
            "command": "rate",
            "inputs": {"P": [0.5, 0.5], "potential": [0, 1], "xi_grid": [0.5]},
            "format": "json",
        }
        run_quiet(config, tmp_path)
        assert (tmp_path / "rate_result.json").exists()
        assert not (tmp_path / "rate_function.csv").exists()

    def test_json_floats_round_trip_exactly(self, tmp_path):
        out = io.StringIO()
        cli.run(tilt_config(), out_dir=tmp_path, stdout=out)
        parsed = json.loads(out.getvalue())
        reparsed = json.loads(dumps(parsed))
        assert reparsed["lambda"] == parsed["lambda"]
        assert reparsed["realized"] == parsed["realized"]

    def test_config_output_dir_is_the_fallback(self, tmp_path):
        config = tilt_config()
        config["output_dir"] = str(tmp_path / "from_config")
        cli.run(config, stdout=io.StringIO())
        assert (tmp_path / "from_config" / "tilt_result.json").exists()
        explicit = tmp_path / "explicit"
        cli.run(config, out_dir=explicit, stdout=io.StringIO())
        assert (explicit / "tilt_result.json").exists()

    def test_unwritable_output_dir_is_a_validation_error(self, tmp_path):
        blocker = tmp_path / "occupied"
        blocker.write_text("not a directory", encoding="utf-8")
        from maxent_bayes.errors import ConfigInvalid

        with pytest.raises(ConfigInvalid):
            cli.run(tilt_config(), out_dir=blocker / "sub", stdout=io.StringIO())

    def test_bayes_command_reports_decision(self, tmp_path):
        config = {
            "command": "bayes",
            "inputs": {
                "posterior": {"alphabet": [0, 1], "weights": [0.9, 0.1]},
                "loss": {
                    "prediction_alphabet": ["left", "right"],
                    "label_alphabet": [0, 1],
                    "entries": [[0, 1], [1, 0]],
                },
            },
        }
        out = io.StringIO()
        cli.run(config, out_dir=tmp_path, stdout=out)
        payload = json.loads(out.getvalue())
        assert payload["decision_index"] == 0
        assert payload["decision"] == "left"
        assert payload["expected_loss"] == pytest.approx(0.1, abs=1e-12)

    def test_negative_seed_rejected(self):
        config = tilt_config()
        config["seed"] = -3
        assert cli.validate(config)[0]["family"] == "validation"


class TestMain:
    def test_malformed_json_exits_2_and_writes_nothing(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        out_dir = tmp_path / "out"
        code = cli.main(["tilt", "--config", str(bad), "--out", str(out_dir)])
        assert code == 2
        assert not out_dir.exists()
        assert "ConfigInvalid" in capsys.readouterr().err

    def test_infeasible_exits_3(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(tilt_config(target=5.0)), encoding="utf-8")
        assert cli.main(["tilt", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
        capsys.readouterr()

    def test_resource_guard_exits_5(self, tmp_path, capsys):
        config = {
            "command": "gibbs",
            "inputs": {
                "P": [0.25, 0.25, 0.25, 0.25],
                "potential": [0, 1, 2, 3],
                "Xi": [2.0, 3.0],
                "n_grid": [500],
            },
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(config), encoding="utf-8")
        assert cli.main(["gibbs", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 5
        capsys.readouterr()

    def test_validate_only_reports_diagnostics(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(tilt_config(target=5.0)), encoding="utf-8")
        code = cli.main(["tilt", "--config", str(cfg), "--validate-only"])
        assert code == 3
        payload = json.loads(capsys.readouterr().out)
        assert payload["diagnostics"][0]["error"] == "InfeasibleConstraint"

    def test_successful_run_exits_0(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(tilt_config()), encoding="utf-8")
        assert cli.main(["tilt", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        capsys.readouterr()

    def test_threads_env_fallback(self, monkeypatch):
        monkeypatch.setenv(cli.THREADS_ENV_VAR, "3")
        assert cli._default_threads() == 3
        monkeypatch.setenv(cli.THREADS_ENV_VAR, "zzz")
        assert cli._default_threads() == (os.cpu_count() or 1)


def read_outputs(out_dir):
    payload = {}
    for path in sorted(out_dir.iterdir()):
        if path.name == "manifest.json":
            continue
        payload[path.name] = path.read_bytes()
    return payload


class TestDeterminism:
    SANOV_MC = {
        "command": "sanov",
        "inputs": {
            "P": [0.5, 0.5],
            "potential": [0, 1],
            "target_interval": [0.7, 1.0],
            "n_grid": [10, 20],
            "method": "monte-carlo",
            "trials": 5000,
        },
        "seed": 11,
    }

    def test_identical_seeds_are_byte_identical_across_thread_counts(self, tmp_path):
        manifests = []
        outputs = []
        for i, threads in enumerate((1, 1, os.cpu_count() or 2)):
            out = tmp_path / f"run{i}"
            manifests.append(run_quiet(self.SANOV_MC, out, threads=threads))
            outputs.append(read_outputs(out))
        assert outputs[0] == outputs[1] == outputs[2]
        assert manifests[0].outputs == manifests[1].outputs == manifests[2].outputs

    def test_different_seed_changes_monte_carlo(self, tmp_path):
        a = run_quiet(self.SANOV_MC, tmp_path / "a")
        b = run_quiet(self.SANOV_MC, tmp_path / "b", seed=999)
        assert a.outputs != b.outputs

    def test_exact_commands_ignore_seed(self, tmp_path):
        config = {
            "command": "gibbs",
            "inputs": {"P": [0.5, 0.5], "potential": [0, 1], "Xi": [0.7, 0.8], "n_grid": [20, 40]},
        }
        a = run_quiet(config, tmp_path / "a", seed=1)
        b = run_quiet(config, tmp_path / "b", seed=2)
        assert a.outputs == b.outputs


class TestJsonIo:
    def test_format_float_17_digits(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(0.25) == "0.25"
        assert float(format_float(1 / 3)) == 1 / 3
        assert format_float(float("inf")) == "inf"
        assert format_float(float("-inf")) == "-inf"

    def test_nonfinite_floats_become_null_in_json(self):
        assert dumps({"a": float("inf")}) == '{"a": null}\n'

    def test_csv_is_rfc4180(self):
        text = csv_text(("a", "b"), [(1, 0.5), (2, float("-inf"))])
        assert text == "a,b\r\n1,0.5\r\n2,-inf\r\n"


def _fuzz_configs(rng):
    """Seeded stream of valid and corrupted configs across all commands."""
    valid = [
        tilt_config(),
        {
            "command": "project",
            "inputs": {"P": [0.4, 0.6], "potential": [0, 1], "target_interval": [0.7, 0.9]},
        },
        {
            "command": "necessity",
            "inputs": {
                "generator": "squared_euclidean",
                "q": [1 / 3, 1 / 3, 1 / 3],
                "potential": [0, 1, 2],
                "target": 0.5,
            },
        },
        {
            "command": "bayes",
            "inputs": {
                "posterior": {"alphabet": [0, 1], "weights": [0.9, 0.1]},
                "loss": {
                    "prediction_alphabet": [0, 1],
                    "label_alphabet": [0, 1],
                    "entries": [[0, 1], [1, 0]],
                },
            },
        },
        {
            "command": "sanov",
            "inputs": {
                "P": [0.5, 0.5],
                "potential": [0, 1],
                "target_interval": [0.7, 1.0],
                "n_grid": [10, 15],
                "method": "exact",
            },
        },
        {
            "command": "gibbs",
            "inputs": {"P": [0.5, 0.5], "potential": [0, 1], "Xi": [0.7, 0.8], "n_grid": [15]},
        },
        {
            "command": "rate",
            "inputs": {"P": [0.5, 0.5], "potential": [0, 1], "xi_grid": [0.25, 0.5, 1.5]},
        },
        {
            "command": "meta",
            "inputs": {
                "P": [0.5, 0.5],
                "loss_row": [0, 1],
                "n": 12,
                "Xi": [0.6, 0.9],
                "U": {"kind": "identity"},
                "eta": 0.7,
                "model_grid_step": 0.01,
            },
        },
        {
            "command": "corr",
            "inputs": {
                "sigma_y": 1.0,
                "epsilon": 0.0,
                "loss": {"kind": "quadratic"},
                "r_grid": [0.0, 0.2, 0.4, 0.6, 0.8],
                "grid_points": 401,
            },
        },
    ]

    def corrupt(config):
        config = json.loads(json.dumps(config))
        kind = rng.integers(0, 6)
        inputs = config["inputs"]
        if kind == 0 and inputs:
            inputs.pop(sorted(inputs)[rng.integers(0, len(inputs))])
        elif kind == 1:
            if "target" in inputs:
                inputs["target"] = 50.0
            elif "target_interval" in inputs:
                inputs["target_interval"] = [50.0, 60.0]
            elif "Xi" in inputs:
                inputs["Xi"] = [50.0, 60.0]
            else:
                inputs["potential" if "potential" in inputs else "eta"] = "bogus"
        elif kind == 2 and "n_grid" in inputs:
            inputs["n_grid"] = [100_000_000]
        elif kind == 3:
            config["format"] = "xml"
        elif kind == 4:
            config["command"] = "mystery"
        else:
            for key in ("q", "P", "posterior"):
                if key in inputs:
                    inputs[key] = [0.9, 0.9]
                    break
            else:
                inputs["eta"] = float("nan") if "eta" in inputs else inputs.get("eta")
                config["seed"] = "not an int"
        return config

    for config in valid:
        yield config
    for _ in range(60):
        base = valid[rng.integers(0, len(valid))]
        yield corrupt(base)


class TestValidationCompleteness:
    STATIC_FAMILIES = {2: "validation", 3: "infeasible", 5: "resource"}

    def test_validate_and_run_agree_on_static_error_families(self, tmp_path, rng):
        for i, config in enumerate(_fuzz_configs(rng)):
            diags = cli.validate(config)
            out = tmp_path / f"case{i}"
            error = None
            try:
                run_quiet(config, out, threads=1)
            except MaxentError as exc:
                error = exc
            if not diags:
                # statically clean configs must not fail with a static family
                assert error is None or error.exit_code == 4, (config, error)
            else:
                assert error is not None, config
                family = self.STATIC_FAMILIES.get(error.exit_code, "numerical")
                assert diags[0]["family"] == family, (config, diags, error)
