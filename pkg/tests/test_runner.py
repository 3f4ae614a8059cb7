import json

import pytest

from isinglab.errors import ConfigError, SchemaMismatchError
from isinglab.lab.core import (ExperimentConfig, ExperimentRegistry, ExperimentRunner,
                               RecordWriter, ResultRecord, canonical_json, load_config,
                               plot_rows, read_manifest, read_records)


def test_defaults_validate():
    cfg = ExperimentConfig().validate()

    assert cfg.kind == "verify"
    assert cfg.resolved_boundary() == "periodic"
    assert ExperimentConfig(kind="arm").resolved_boundary() == "plus"


def test_registry_knows_every_kind():
    assert sorted(ExperimentRegistry.all()) == sorted(
        ["autocorr", "arm", "spectral", "verify", "shellsum", "fit"]
    )


def test_load_toml_with_aliases(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        "[experiment]\nkind = 'autocorr'\nseed = 7\n"
        "[lattice]\nsizes = [1]\n"
        "[budget]\nreplicas = 40\n"
        "[output]\ndir = 'out'\n"
    )
    cfg = load_config(path, environ={})

    assert cfg.kind == "autocorr"
    assert cfg.seed == 7
    assert cfg.replicas == 40
    assert cfg.output_dir == "out"


def test_unknown_keys_are_located(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[lattice]\ncolour = 'red'\n")
    with pytest.raises(ConfigError) as exc:
        load_config(path, environ={})
    assert exc.value.field == "lattice.colour"

    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_mapping({"physics": {}})
    assert exc.value.field == "physics"


def test_malformed_toml(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[lattice\n")
    with pytest.raises(ConfigError):
        load_config(path, environ={})


def test_validation_paths():
    cases = [
        ({"sizes": [2, -1]}, "lattice.sizes[1]"),
        ({"kind": "autocorr", "replicas": 1}, "budget.replicas"),
        ({"kind": "autocorr", "boundary": "plus"}, "lattice.boundary"),
        ({"kind": "arm", "boundary": "free"}, "lattice.boundary"),
        ({"kind": "shellsum", "sizes": [1]}, "lattice.sizes[0]"),
        ({"kind": "shellsum", "sizes": [10], "delta": 0.5}, "fit.delta"),
        ({"family": "kawasaki"}, "dynamics.family"),
        ({"t0": 2.0, "t_max": 1.0}, "time.t_max"),
        ({"window": [3.0, 1.0]}, "fit.window"),
        ({"kind": "fit"}, "fit.input"),
        ({"boundary": "fixed"}, "lattice.boundary"),
    ]
    for overrides, field in cases:
        with pytest.raises(ConfigError) as exc:
            ExperimentConfig().with_overrides(overrides).validate()
        assert exc.value.field == field


def test_replicas_message():
    with pytest.raises(ConfigError, match="replicas >= 2 required for stderr"):
        ExperimentConfig(kind="autocorr", replicas=1).validate()


def test_environment_seed():
    cfg = load_config(overrides={"seed": 3}, environ={"LAB_SEED": "11"})
    assert cfg.seed == 11
    assert load_config(overrides={"seed": 3}, environ={"LAB_SEED": ""}).seed == 3
    with pytest.raises(ConfigError):
        load_config(environ={"LAB_SEED": "many"})


def test_digest_ignores_output_and_workers():
    base = ExperimentConfig()

    assert base.digest() == base.with_overrides({"output_dir": "elsewhere", "workers": 4}).digest()
    assert base.digest() != base.with_overrides({"seed": 1}).digest()
    assert base.with_overrides({"seed": None}).seed == 0


def test_canonical_json_is_stable():
    assert canonical_json({"b": 1, "a": [1.5, None]}) == '{"a":[1.5,null],"b":1}'


def test_writer_and_schema_check(tmp_path):
    writer = RecordWriter(tmp_path, "abc", {"kind": "verify"})
    writer.write(ResultRecord.create("abc", "verify", "x", {"value": 1.0}, True))
    with pytest.raises(ValueError):
        writer.write(ResultRecord.create("other", "verify", "x", {}))
    writer.write_manifest(0)

    (record,) = read_records(tmp_path / "records.jsonl")
    assert record.payload == {"value": 1.0}
    assert read_manifest(tmp_path)["records"] == 1

    stale = tmp_path / "old"
    stale.mkdir()
    line = json.loads(record.to_json())
    line["schema_version"] = 99
    (stale / "records.jsonl").write_text(json.dumps(line) + "\n")
    with pytest.raises(SchemaMismatchError):
        read_records(stale / "records.jsonl")


async def test_verify_run_passes(tmp_path):
    cfg = ExperimentConfig(output_dir=str(tmp_path / "verify"), functions=20)
    result = await ExperimentRunner(cfg).run()

    assert result.status == 0
    assert result.failed == []
    names = {r.inequality for r in result.reports}
    for expected in (
        "axiom_detailed_balance_heatbath",
        "axiom_translation_metropolis",
        "generator_reversibility",
        "spectral_gap_inequality",
        "gap_dominates_lsi",
        "bodineau_helffer",
        "bodineau_helffer_entropy",
        "entropy_monotone",
        "de_bruijn",
        "second_moment_identity",
        "efron_stein",
        "conditional_entropy_identity",
        "projection_idempotent",
        "conditional_factorization",
        "jensen_step",
        "schedule_boundedness",
    ):
        assert expected in names

    lines = (tmp_path / "verify" / "records.jsonl").read_text().splitlines()
    assert len(lines) == len(result.reports)
    for line, report in zip(lines, result.reports):
        record = json.loads(line)
        payload = record["payload"]
        assert record["label"] == f"torus-2x2:{report.inequality}"
        assert record["config_digest"] == cfg.digest()
        assert record["passed"] is payload["passed"] is True
        assert payload["geometry"] == "torus-2x2"
        assert payload["inequality"] == report.inequality
        assert set(payload) >= set(report.to_dict())

    manifest = read_manifest(tmp_path / "verify")
    assert manifest["status"] == 0
    assert manifest["records"] == len(result.reports)
    assert manifest["config_digest"] == cfg.digest()
    assert "summary.md" in manifest["files"]
    assert (tmp_path / "verify" / "summary.md").read_text().startswith("#")


async def test_autocorr_run_is_independent_of_workers(tmp_path):
    base = ExperimentConfig(kind="autocorr", sizes=[1], replicas=60, t_max=2.0, ratio=1.5, seed=5)
    serial = await ExperimentRunner(base.with_overrides({"output_dir": str(tmp_path / "a")})).run()
    parallel = await ExperimentRunner(
        base.with_overrides({"output_dir": str(tmp_path / "b"), "workers": 2})
    ).run()

    assert [r.payload_json() for r in serial.records] == [
        r.payload_json() for r in parallel.records
    ]
    header, rows = plot_rows([tmp_path / "a"])
    assert header == ["t", "C", "C_err", "series"]
    assert rows[0][:2] == (0.0, 1.0)
    assert (tmp_path / "a" / "autocorr_torus-2x2.csv").exists()


async def test_shellsum_then_fit(tmp_path):
    shell = ExperimentConfig(
        kind="shellsum", sizes=[10, 100, 1000], delta=1.0, output_dir=str(tmp_path / "s")
    )
    first = await ExperimentRunner(shell).run()
    assert first.status == 0

    fit = ExperimentConfig(kind="fit", input=str(tmp_path / "s"), output_dir=str(tmp_path / "f"))
    result = await ExperimentRunner(fit).run()
    (record,) = result.records
    assert record.label == "fit_shell_sum_d2_delta1"
    assert record.payload["series"][0]["exponent"] is not None
    assert record.payload["columns"] == ["L", "S_scaled", "err"]
