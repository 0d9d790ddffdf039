import pytest

from vogtrack.config import CONFIG_ENV, RunConfig, load_config, parse_config_text


def test_defaults():
    c = RunConfig()
    assert (c.downscale_factor, c.window_width_ratio, c.outlier_k, c.min_samples) == (8, 0.15, 2.0, 8)
    assert (c.corner_side, c.deg_per_px_x, c.deg_per_px_y, c.fps) == ("temporal", 0.05, 0.05, 30.0)


@pytest.mark.parametrize(
    "kw",
    [{"downscale_factor": 0}, {"outlier_k": -1.0}, {"window_width_ratio": 1.0}, {"corner_side": "up"}, {"fps": 0.0}],
)
def test_invalid(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw)


def test_parse_comments_and_blanks():
    text = "# header\n\noutlier_k = 2.5  # tighter\nfps=60\n"
    assert parse_config_text(text) == {"outlier_k": "2.5", "fps": "60"}
    with pytest.raises(ValueError, match="line 2"):
        parse_config_text("fps=30\noops\n")


def test_precedence(tmp_path, monkeypatch):
    f = tmp_path / "a.cfg"
    f.write_text("fps = 60\nmin_samples = 12\n")
    assert load_config(f).fps == 60.0
    assert load_config(f, fps=90).fps == 90.0
    assert load_config(f, fps=None).min_samples == 12
    monkeypatch.setenv(CONFIG_ENV, str(f))
    assert load_config().fps == 60.0
    g = tmp_path / "b.cfg"
    g.write_text("fps = 15\n")
    assert load_config(g).fps == 15.0  # explicit path beats the environment


def test_unknown_key(tmp_path):
    f = tmp_path / "a.cfg"
    f.write_text("speed = 3\n")
    with pytest.raises(KeyError):
        load_config(f)
