import pytest

from yieldpoint.config import RunConfig, load_config, parse_channel
from yieldpoint.errors import ConfigError


def test_defaults():
    cfg = RunConfig()
    assert cfg.max_steps == 200_000
    assert cfg.scheduler.seed == 0
    assert cfg.scheduler.policy == "uniform"
    assert cfg.scheduler.granularity == "atomic"
    assert cfg.channel is None and cfg.overrides == {}


def test_with_overrides_routes_scheduler_keys_and_skips_none():
    cfg = RunConfig().with_overrides(seed=7, policy="round-robin", max_steps=50, assertions=None)
    assert cfg.scheduler.seed == 7
    assert cfg.scheduler.policy == "round-robin"
    assert cfg.max_steps == 50
    assert cfg.assertions is False


def test_overrides_merge():
    cfg = RunConfig().with_overrides(overrides={"n": 2}).with_overrides(overrides={"rounds": 4})
    assert cfg.overrides == {"n": 2, "rounds": 4}


def test_invalid_values_raise_config_error():
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(max_steps=0)
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(policy="random")


@pytest.mark.parametrize("text, order, reliability", [
    ("unordered", "unordered", "reliable"),
    ("unreliable", "fifo", "unreliable"),
    ("unordered,unreliable", "unordered", "unreliable"),
    (" fifo , reliable ", "fifo", "reliable"),
])
def test_parse_channel(text, order, reliability):
    ch = parse_channel(text)
    assert (ch.order, ch.reliability) == (order, reliability)


def test_parse_channel_empty_and_invalid():
    assert parse_channel(None) is None
    assert parse_channel("") is None
    with pytest.raises(ConfigError):
        parse_channel("fifo,unordered")
    with pytest.raises(ConfigError):
        parse_channel("lossy")


def test_load_config(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("max_steps: 1000\nscheduler:\n  seed: 5\n  fairness_bound: 3\n"
                    "channel:\n  order: unordered\noverrides:\n  n: 4\n", encoding="utf-8")
    cfg = load_config(path)
    assert cfg.max_steps == 1000
    assert cfg.scheduler.seed == 5 and cfg.scheduler.fairness_bound == 3
    assert cfg.channel.order == "unordered"
    assert cfg.overrides == {"n": 4}


def test_load_config_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path) == RunConfig()


@pytest.mark.parametrize("body", ["- 1\n- 2\n", "max_steps: [\n", "unknown_key: 1\n"])
def test_load_config_rejects(tmp_path, body):
    path = tmp_path / "bad.yaml"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
