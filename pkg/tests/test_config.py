import json

import pytest

from config import (
    RunConfig, config_from_dict, config_to_dict, load_config_file, parse_arguments,
    parse_variant, validate_config,
)
from core.errors import ConfigError, DataError


def test_defaults():
    cfg = RunConfig()
    assert (cfg.model.d_embed, cfg.model.gcn_hidden, cfg.model.gru_hidden) == (128, 128, 128)
    assert cfg.model.gcn_layers == 2
    assert cfg.model.dropout == 0.5
    assert cfg.train.list_size == 10
    assert cfg.train.lr == 0.001
    assert cfg.train.target_offset == 1
    assert cfg.eval.rbp_p == 0.95
    assert cfg.eval.ks == (1, 10, 50, 100, 200)
    validate_config(cfg)


class TestParseArguments:
    def test_flags(self):
        cfg = parse_arguments(["train", "--seed", "7", "--lr", "0.01", "--hidden-dim", "16",
                               "--window-length", "3", "--verbose"])
        assert cfg.command == "train"
        assert cfg.seed == cfg.world.seed == cfg.model.seed == cfg.train.seed == 7
        assert cfg.train.lr == 0.01
        assert cfg.model.gru_hidden == cfg.model.mlp_hidden == 16
        assert cfg.train.window_length == 3
        assert cfg.verbose

    def test_config_file_then_flags(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"train": {"epochs": 5, "lr": 0.5}, "variant": "no-gcn"}),
                        encoding="utf-8")
        cfg = parse_arguments(["ablate", "--lr", "0.02", "--config", str(path)])
        assert cfg.command == "ablate"
        assert cfg.train.epochs == 5
        assert cfg.train.lr == 0.02
        assert cfg.variant == "no-gcn"

    @pytest.mark.parametrize("args", [
        ["fly"],
        ["train", "--bogus"],
        ["train", "--epochs"],
        ["train", "--epochs", "many"],
        ["train", "--config"],
    ])
    def test_usage_errors(self, args):
        with pytest.raises(ConfigError):
            parse_arguments(args)

    def test_help_exits_cleanly(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            parse_arguments(["--help"])
        assert exit_info.value.code == 0
        assert "gradcheck" in capsys.readouterr().out


class TestConfigFile:
    def test_missing(self, tmp_path):
        with pytest.raises(DataError):
            load_config_file(str(tmp_path / "absent.json"))

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"model": {"depth": 3}}), encoding="utf-8")
        with pytest.raises(ConfigError, match="depth"):
            load_config_file(str(path))

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            config_from_dict({"optimizer": {}})

    def test_not_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config_file(str(path))

    def test_dict_round_trip(self):
        cfg = RunConfig(command="sweep", variant="drop-feature:image")
        cfg.eval.ks = (1, 5)
        restored = config_from_dict(config_to_dict(cfg))
        assert restored == cfg

    def test_with_seed(self):
        cfg = RunConfig()
        seeded = cfg.with_seed(4)
        assert seeded.train.seed == seeded.model.seed == seeded.world.seed == 4
        assert cfg.seed == 0


class TestValidate:
    @pytest.mark.parametrize("section, name, value", [
        ("train", "lr", -0.1),
        ("train", "list_size", 1),
        ("train", "window_length", 0),
        ("train", "target_offset", 2),
        ("model", "dropout", 1.0),
        ("model", "gcn_layers", 0),
        ("world", "rho", 1.5),
        ("world", "n_windows", 7),
        ("eval", "rbp_p", 1.0),
        ("eval", "scorer", "astrology"),
        ("sweep", "axis", "depth"),
    ])
    def test_rejects(self, section, name, value):
        cfg = RunConfig()
        setattr(getattr(cfg, section), name, value)
        with pytest.raises(ConfigError):
            validate_config(cfg)

    def test_zero_learning_rate_is_allowed(self):
        cfg = RunConfig()
        cfg.train.lr = 0.0
        validate_config(cfg)

    def test_unknown_variant(self):
        cfg = RunConfig(variant="no-everything")
        with pytest.raises(ConfigError):
            validate_config(cfg)


class TestParseVariant:
    def test_base(self):
        assert parse_variant("no-rnn") == ("no-rnn", None)

    def test_drop_node_kind(self):
        assert parse_variant("drop-node-kind:ImageObject") == ("drop-node-kind", "ImageObject")

    def test_drop_feature(self):
        assert parse_variant("drop-feature:reaction") == ("drop-feature", "reaction")

    @pytest.mark.parametrize("variant", [
        "drop-node-kind:Influencer", "drop-node-kind:Planet", "drop-feature:audio", "shrink",
    ])
    def test_invalid(self, variant):
        with pytest.raises(ConfigError):
            parse_variant(variant)
