"""Config parsing/writing and dataset directory layout."""
import dataclasses

import pytest

from gazeval.config import EvalConfig, parse_config, read_config, write_config
from gazeval.dataset import (
    ClipInfo,
    load_manifest,
    load_recordings,
    prediction_path,
    split_gaze_filename,
)
from gazeval.errors import MalformedRow


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config("pixels_per_degree = 35.2\n")
        assert cfg.pixels_per_degree == 35.2
        assert cfg.fps is None
        assert cfg.eval_width is None
        assert cfg.sigma_space_deg == 1.0
        assert cfg.sigma_time_s == 1.0 / 3.0
        assert cfg.seed == 0
        assert cfg.n_splits == 100
        assert cfg.averaging == "weighted"

    def test_all_keys(self):
        text = "\n".join(
            [
                "pixels_per_degree = 30",
                "fps = 25",
                "eval_width = 320",
                "eval_height = 180",
                "sigma_space_deg = 2.0",
                "sigma_time_s = 0.5",
                "truncation_radius_sigmas = 2.5",
                "seed = 7",
                "n_splits = 10",
                "epsilon = 1e-9",
                "min_confidence = 0.75",
                "bias_weight = 0.25",
                "bias_sigma_deg = 4.0",
                "n_repetitions = 3",
                "subset_repeats = 20",
                "averaging = regular",
            ]
        )
        cfg = parse_config(text)
        assert cfg.fps == 25.0
        assert cfg.eval_width == 320 and cfg.eval_height == 180
        assert cfg.epsilon == 1e-9
        assert cfg.seed == 7 and isinstance(cfg.seed, int)
        assert cfg.averaging == "regular"

    def test_comments_and_blank_lines(self):
        text = (
            "# full-line comment\n"
            "\n"
            "pixels_per_degree = 20  # trailing comment\n"
            "   \n"
            "seed = 3\n"
        )
        cfg = parse_config(text)
        assert cfg.pixels_per_degree == 20.0
        assert cfg.seed == 3

    def test_whitespace_tolerant(self):
        cfg = parse_config("  pixels_per_degree=12.5  ")
        assert cfg.pixels_per_degree == 12.5

    def test_unknown_key(self):
        with pytest.raises(ValueError, match=r"line 2: unknown key 'sigma'"):
            parse_config("pixels_per_degree = 20\nsigma = 3\n")

    def test_duplicate_key(self):
        with pytest.raises(ValueError, match=r"line 3: duplicate key"):
            parse_config("pixels_per_degree = 20\nseed = 1\nseed = 2\n")

    def test_missing_required_key(self):
        with pytest.raises(ValueError, match="pixels_per_degree"):
            parse_config("seed = 1\n")

    def test_missing_equals(self):
        with pytest.raises(ValueError, match=r"line 1: expected 'key = value'"):
            parse_config("pixels_per_degree 20\n")

    def test_bad_float(self):
        with pytest.raises(ValueError, match=r"line 1:"):
            parse_config("pixels_per_degree = abc\n")

    def test_int_key_rejects_float_literal(self):
        with pytest.raises(ValueError, match=r"line 2:"):
            parse_config("pixels_per_degree = 20\nn_splits = 3.5\n")

    def test_empty_text(self):
        with pytest.raises(ValueError, match="pixels_per_degree"):
            parse_config("")


class TestValidation:
    def test_ppd_positive(self):
        with pytest.raises(ValueError, match="pixels_per_degree"):
            EvalConfig(pixels_per_degree=0.0)

    def test_fps_positive(self):
        with pytest.raises(ValueError, match="fps"):
            EvalConfig(pixels_per_degree=20.0, fps=-1.0)

    def test_eval_dims_paired(self):
        with pytest.raises(ValueError, match="together"):
            EvalConfig(pixels_per_degree=20.0, eval_width=320)
        with pytest.raises(ValueError, match="together"):
            EvalConfig(pixels_per_degree=20.0, eval_height=180)

    def test_eval_dims_at_least_one(self):
        with pytest.raises(ValueError, match="eval_width"):
            EvalConfig(pixels_per_degree=20.0, eval_width=0, eval_height=180)

    @pytest.mark.parametrize(
        "name", ["sigma_space_deg", "sigma_time_s", "truncation_radius_sigmas",
                 "epsilon", "bias_sigma_deg"]
    )
    def test_positive_floats(self, name):
        with pytest.raises(ValueError, match=name):
            EvalConfig(pixels_per_degree=20.0, **{name: 0.0})

    @pytest.mark.parametrize("name", ["n_splits", "n_repetitions", "subset_repeats"])
    def test_counts_at_least_one(self, name):
        with pytest.raises(ValueError, match=name):
            EvalConfig(pixels_per_degree=20.0, **{name: 0})

    def test_min_confidence_range(self):
        with pytest.raises(ValueError, match="min_confidence"):
            EvalConfig(pixels_per_degree=20.0, min_confidence=1.5)

    def test_bias_weight_range(self):
        with pytest.raises(ValueError, match="bias_weight"):
            EvalConfig(pixels_per_degree=20.0, bias_weight=-0.1)

    def test_averaging_values(self):
        with pytest.raises(ValueError, match="averaging"):
            EvalConfig(pixels_per_degree=20.0, averaging="median")
        EvalConfig(pixels_per_degree=20.0, averaging="regular")


class TestRoundtrip:
    def test_write_read_lossless(self, tmp_path):
        # awkward floats on purpose: repr must survive the text roundtrip
        cfg = EvalConfig(
            pixels_per_degree=35.714285714285715,
            fps=29.97,
            eval_width=640,
            eval_height=360,
            sigma_time_s=1.0 / 3.0,
            epsilon=1e-12,
            min_confidence=0.1,
            bias_weight=0.4,
            seed=12345,
            averaging="regular",
        )
        path = tmp_path / "eval.cfg"
        write_config(cfg, path)
        assert read_config(path) == cfg

    def test_write_omits_none(self, tmp_path):
        path = tmp_path / "eval.cfg"
        write_config(EvalConfig(pixels_per_degree=20.0), path)
        text = path.read_text()
        assert "fps" not in text
        assert "eval_width" not in text
        assert "pixels_per_degree = 20.0" in text

    def test_defaults_roundtrip(self, tmp_path):
        cfg = EvalConfig(pixels_per_degree=20.0)
        path = tmp_path / "eval.cfg"
        write_config(cfg, path)
        again = tmp_path / "again.cfg"
        write_config(read_config(path), again)
        assert path.read_text() == again.read_text()

    def test_gt_params_mapping(self):
        cfg = EvalConfig(
            pixels_per_degree=24.0,
            sigma_space_deg=1.5,
            sigma_time_s=0.25,
            truncation_radius_sigmas=2.0,
        )
        p = cfg.gt_params(fps=30.0)
        assert p.pixels_per_degree == 24.0
        assert p.fps == 30.0
        assert p.sigma_space_deg == 1.5
        assert p.sigma_time_s == 0.25
        assert p.truncation_radius_sigmas == 2.0

    def test_config_is_plain_dataclass(self):
        names = [f.name for f in dataclasses.fields(EvalConfig)]
        assert names[0] == "pixels_per_degree"


MANIFEST = (
    "clip_id,width,height,fps,frames\n"
    "park,320,240,25,100\n"
    "road__night,640,360,29.97,250\n"
)


def write_dataset(root, manifest=MANIFEST):
    root.mkdir(exist_ok=True)
    (root / "manifest.csv").write_text(manifest)
    return root


class TestManifest:
    def test_load(self, tmp_path):
        clips = load_manifest(write_dataset(tmp_path / "ds"))
        assert list(clips) == ["park", "road__night"]
        park = clips["park"]
        assert park == ClipInfo("park", 320, 240, 25.0, 100)
        assert clips["road__night"].fps == 29.97

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MalformedRow, match="manifest not found"):
            load_manifest(tmp_path)

    def test_bad_header(self, tmp_path):
        ds = write_dataset(tmp_path / "ds", "clip,w,h,fps,frames\npark,1,1,1,1\n")
        with pytest.raises(MalformedRow, match="header"):
            load_manifest(ds)

    def test_duplicate_clip(self, tmp_path):
        bad = MANIFEST + "park,320,240,25,100\n"
        with pytest.raises(MalformedRow, match=r":4: duplicate clip 'park'"):
            load_manifest(write_dataset(tmp_path / "ds", bad))

    def test_bad_number(self, tmp_path):
        bad = "clip_id,width,height,fps,frames\npark,wide,240,25,100\n"
        with pytest.raises(MalformedRow, match=r":2:"):
            load_manifest(write_dataset(tmp_path / "ds", bad))

    def test_wrong_field_count(self, tmp_path):
        bad = "clip_id,width,height,fps,frames\npark,320,240,25\n"
        with pytest.raises(MalformedRow, match="expected 5 fields"):
            load_manifest(write_dataset(tmp_path / "ds", bad))

    def test_no_clips(self, tmp_path):
        ds = write_dataset(tmp_path / "ds", "clip_id,width,height,fps,frames\n")
        with pytest.raises(MalformedRow, match="no clips"):
            load_manifest(ds)

    def test_blank_line_skipped(self, tmp_path):
        ds = write_dataset(tmp_path / "ds", MANIFEST + "\n")
        assert len(load_manifest(ds)) == 2

    def test_clip_info_validation(self):
        with pytest.raises(ValueError, match="non-empty"):
            ClipInfo("", 1, 1, 1.0, 1)
        with pytest.raises(ValueError, match="dimensions"):
            ClipInfo("c", 0, 240, 25.0, 100)
        with pytest.raises(ValueError, match="fps"):
            ClipInfo("c", 320, 240, 0.0, 100)


class TestGazeFilenames:
    def test_simple(self):
        assert split_gaze_filename("park__s01.csv") == ("park", "s01")

    def test_clip_with_double_underscore(self):
        # split on the LAST "__": observer ids never contain it
        assert split_gaze_filename("road__night__s02.csv") == ("road__night", "s02")

    def test_no_extension(self):
        assert split_gaze_filename("park__s01") == ("park", "s01")

    def test_no_separator(self):
        with pytest.raises(MalformedRow):
            split_gaze_filename("park_s01.csv")

    def test_empty_parts(self):
        with pytest.raises(MalformedRow):
            split_gaze_filename("__s01.csv")
        with pytest.raises(MalformedRow):
            split_gaze_filename("park__.csv")


GAZE_ROWS = "t_ms,x,y,label,confidence\n0,10,10,FIX,1.0\n40,11,10,FIX,1.0\n"


class TestLoadRecordings:
    def build(self, tmp_path):
        ds = write_dataset(tmp_path / "ds")
        gd = ds / "gaze"
        gd.mkdir()
        for name in ["park__s02.csv", "park__s01.csv", "road__night__s01.csv"]:
            (gd / name).write_text(GAZE_ROWS)
        return ds

    def test_filters_and_sorts(self, tmp_path):
        recs = load_recordings(self.build(tmp_path), "park")
        assert [r.observer_id for r in recs] == ["s01", "s02"]
        assert all(r.clip_id == "park" for r in recs)
        assert len(recs[0].samples) == 2

    def test_clip_id_with_double_underscore(self, tmp_path):
        recs = load_recordings(self.build(tmp_path), "road__night")
        assert [r.observer_id for r in recs] == ["s01"]

    def test_unknown_clip_empty(self, tmp_path):
        assert load_recordings(self.build(tmp_path), "beach") == []

    def test_no_gaze_dir(self, tmp_path):
        assert load_recordings(write_dataset(tmp_path / "ds"), "park") == []


class TestPredictionPath:
    def test_ssv1_file(self, tmp_path):
        (tmp_path / "park.ssv1").write_bytes(b"")
        assert prediction_path(tmp_path, "park") == tmp_path / "park.ssv1"

    def test_frame_directory(self, tmp_path):
        (tmp_path / "park").mkdir()
        assert prediction_path(tmp_path, "park") == tmp_path / "park"

    def test_file_wins_over_directory(self, tmp_path):
        (tmp_path / "park.ssv1").write_bytes(b"")
        (tmp_path / "park").mkdir()
        assert prediction_path(tmp_path, "park") == tmp_path / "park.ssv1"

    def test_missing(self, tmp_path):
        assert prediction_path(tmp_path, "park") is None
