"""Command line interface.

Subcommands:

* ``gen-gt``: ground-truth volumes (SSV1) plus a location-count table.
* ``evaluate``: score one model's predictions; per-clip JSON reports, a
  dataset summary (CSV and JSON), and score dumps for ``avg-experiment``.
* ``baselines``: the same battery for chance, permutation, centre, one-human
  and infinite-humans predictors.
* ``rank``: mean ranks across summary JSON files.
* ``avg-experiment``: regular vs weighted averaging on score dumps.
* ``bias``: apply the gravity-centre bias to one volume.
* ``sample``: balanced training locations, optionally with subvolume blocks.

All randomness derives from one master seed; reruns with the same inputs and
seed produce byte-identical outputs.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baselines as bl
from . import metrics, pipeline, reports
from .aggregate import ClipScore, ks_test_one_sided, rank_table, subset_experiment
from .config import EvalConfig, read_config
from .dataset import load_manifest, prediction_path
from .errors import GazevalError
from .gaze import Condition
from .ground_truth import build_gt_volume
from .metrics import Metric, MetricScore
from .postprocess import gravity_centre_bias
from .sampler import SubvolumeSpec, dedup_pool_voxels, draw_matched_negatives, extract_subvolume
from .shuffling import derive_seed
from .volume import (
    SaliencyVolume,
    read_volume,
    resize_volume,
    write_rgb_block,
    write_volume,
)


def _conditions(text: str) -> list[Condition]:
    try:
        return [Condition(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{text!r}: conditions are sp, fix, onset (comma-separated)"
        ) from None


def _add_common(p: argparse.ArgumentParser, condition: bool = True) -> None:
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--out", required=True, help="output directory (or file)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker hint; this build always runs clips sequentially",
    )
    if condition:
        p.add_argument(
            "--condition",
            type=_conditions,
            required=True,
            metavar="sp|fix|onset",
            help="evaluation condition(s), comma-separated",
        )


def _load_config(args) -> EvalConfig:
    config = read_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if getattr(args, "jobs", 1) != 1:
        print("note: --jobs > 1 requested; running sequentially", file=sys.stderr)
    return config


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _prepare(dataset_dir, config):
    manifest = load_manifest(dataset_dir)
    recordings = pipeline.load_all_recordings(dataset_dir, manifest)
    sets = {
        cond: pipeline.condition_sets(recordings, manifest, cond, config)
        for cond in Condition
    }
    return manifest, recordings, sets


def cmd_gen_gt(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    manifest, _, sets = _prepare(args.dataset_dir, config)
    wrote = 0
    for cond in args.condition:
        native = sets[cond]
        weight_rows = [["clip_id", "n_locations"]]
        for clip_id in sorted(manifest):
            info = manifest[clip_id]
            width, height = pipeline.eval_dims(info, config)
            locs = pipeline._scaled(native[clip_id], info, width, height)
            weight_rows.append([clip_id, len(locs)])
            if not locs.locations:
                print(
                    f"gen-gt: {clip_id}: no {cond.value} locations, skipped",
                    file=sys.stderr,
                )
                continue
            vol = build_gt_volume(
                locs, config.gt_params(info.fps), width, height, info.frames
            )
            write_volume(vol, out / f"{clip_id}__{cond.value}.ssv1")
            wrote += 1
        reports.write_csv(weight_rows, out / f"weights__{cond.value}.csv")
    if wrote == 0:
        print("gen-gt: no ground truth written", file=sys.stderr)
        return 1
    return 0


def _load_prediction(pred_dir, clip_id, info, width, height):
    path = prediction_path(pred_dir, clip_id)
    if path is None:
        raise GazevalError(f"no prediction for clip {clip_id!r}")
    pred = read_volume(path, clip_id)
    if pred.frames != info.frames:
        raise GazevalError(
            f"prediction has {pred.frames} frames, manifest says {info.frames}"
        )
    if (pred.width, pred.height) != (width, height):
        pred = resize_volume(pred, width, height)
    return pred


def cmd_evaluate(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    (out / "reports").mkdir(exist_ok=True)
    if args.dump_scores:
        (out / "scores").mkdir(exist_ok=True)
    manifest, _, sets = _prepare(args.dataset_dir, config)
    dataset_name = Path(args.dataset_dir).name
    model = args.model_name or Path(args.pred_dir).name
    any_scored = False
    for cond in args.condition:
        clip_scores: dict[str, dict[str, MetricScore]] = {}
        skipped_clips: dict[str, str] = {}
        for clip_id in sorted(manifest):
            info = manifest[clip_id]
            width, height = pipeline.eval_dims(info, config)
            try:
                pred = _load_prediction(args.pred_dir, clip_id, info, width, height)
                inputs = pipeline.build_clip_inputs(
                    clip_id,
                    cond,
                    manifest,
                    sets[cond],
                    sets[Condition.SP],
                    sets[Condition.FIX],
                    config,
                )
                scores, skipped = pipeline.metric_battery(pred, inputs, config)
            except GazevalError as e:
                skipped_clips[clip_id] = str(e)
                print(f"evaluate: {clip_id}: {e}", file=sys.stderr)
                continue
            clip_scores[clip_id] = scores
            reports.write_json(
                reports.clip_report(
                    model,
                    dataset_name,
                    cond.value,
                    clip_id,
                    width,
                    height,
                    info.frames,
                    len(inputs.locs),
                    scores,
                    skipped,
                ),
                out / "reports" / f"{model}__{clip_id}__{cond.value}.json",
            )
            if args.dump_scores:
                for key, arr in pipeline.dump_negative_values(
                    pred, inputs, config
                ).items():
                    np.save(
                        out / "scores" / f"{model}__{clip_id}__{cond.value}.{key}.npy",
                        arr,
                    )
            any_scored = True
        summary = pipeline.summarize(clip_scores)
        reports.write_json(
            reports.summary_report(model, dataset_name, cond.value, summary, skipped_clips),
            out / f"summary__{model}__{cond.value}.json",
        )
        reports.write_csv(
            reports.summary_csv_rows(summary),
            out / f"summary__{model}__{cond.value}.csv",
        )
    return 0 if any_scored else 1


def _mean_scores(
    per_rep: list[dict[str, MetricScore]], weight: int
) -> dict[str, MetricScore]:
    """Average metric values across repetitions/observers (where present)."""
    out: dict[str, MetricScore] = {}
    names = sorted({name for rep in per_rep for name in rep})
    for name in names:
        values = [rep[name].value for rep in per_rep if name in rep]
        metric = next(rep[name].metric for rep in per_rep if name in rep)
        out[name] = MetricScore(metric, float(np.mean(values)), weight)
    return out


def cmd_baselines(args) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    (out / "reports").mkdir(exist_ok=True)
    manifest, recordings, sets = _prepare(args.dataset_dir, config)
    dataset_name = Path(args.dataset_dir).name
    any_scored = False
    for cond in args.condition:
        per_model_scores: dict[str, dict[str, dict[str, MetricScore]]] = {}
        per_model_skips: dict[str, dict[str, str]] = {}

        def record(model, clip_id, scores, skipped, inputs, info, width, height):
            per_model_scores.setdefault(model, {})[clip_id] = scores
            reports.write_json(
                reports.clip_report(
                    model,
                    dataset_name,
                    cond.value,
                    clip_id,
                    width,
                    height,
                    info.frames,
                    len(inputs.locs),
                    scores,
                    skipped,
                ),
                out / "reports" / f"{model}__{clip_id}__{cond.value}.json",
            )

        def skip(model, clip_id, reason):
            per_model_skips.setdefault(model, {})[clip_id] = reason
            print(f"baselines: {model}: {clip_id}: {reason}", file=sys.stderr)

        for clip_id in sorted(manifest):
            info = manifest[clip_id]
            width, height = pipeline.eval_dims(info, config)
            try:
                inputs = pipeline.build_clip_inputs(
                    clip_id,
                    cond,
                    manifest,
                    sets[cond],
                    sets[Condition.SP],
                    sets[Condition.FIX],
                    config,
                )
            except GazevalError as e:
                for model in ("chance", "permutation", "centre", "one_human",
                              "infinite_humans"):
                    skip(model, clip_id, str(e))
                continue
            params = config.gt_params(info.fps)
            weight = len(inputs.locs)

            reps = []
            skipped = {}
            for rep in range(config.n_repetitions):
                vol = bl.chance_map(
                    width, height, info.frames,
                    derive_seed(config.seed, clip_id, cond.value, "chance", rep),
                )
                s, skipped = pipeline.metric_battery(vol, inputs, config)
                reps.append(s)
            record("chance", clip_id, _mean_scores(reps, weight), skipped,
                   inputs, info, width, height)

            try:
                donor_sets = [
                    pipeline._scaled(sets[cond][c], manifest[c], width, height)
                    for c in sorted(manifest)
                ]
                frames_by_clip = {c: manifest[c].frames for c in manifest}
                reps = []
                for rep in range(config.n_repetitions):
                    vol = bl.permutation_map(
                        clip_id, donor_sets, frames_by_clip, params,
                        width, height, info.frames,
                        derive_seed(config.seed, clip_id, cond.value, "perm", rep),
                    )
                    s, skipped = pipeline.metric_battery(vol, inputs, config)
                    reps.append(s)
                record("permutation", clip_id, _mean_scores(reps, weight), skipped,
                       inputs, info, width, height)
            except GazevalError as e:
                skip("permutation", clip_id, str(e))

            vol = bl.centre_map(width, height, info.frames)
            s, skipped = pipeline.metric_battery(vol, inputs, config)
            record("centre", clip_id, s, skipped, inputs, info, width, height)

            def ev(pred_vol, eval_locs):
                gt_small = build_gt_volume(
                    eval_locs, params, width, height, info.frames
                )
                return pipeline.metric_battery(
                    pred_vol, inputs, config, locs=eval_locs, gt_vol=gt_small
                )

            for model, fn in (
                ("one_human", bl.one_human_scores),
                ("infinite_humans", bl.infinite_humans_scores),
            ):
                try:
                    per_obs = fn(
                        recordings[clip_id], cond, params,
                        width, height, info.frames, info.fps,
                        ev, config.min_confidence,
                    )
                except GazevalError as e:
                    skip(model, clip_id, str(e))
                    continue
                rep_scores = [scores for _, (scores, _) in per_obs]
                last_skipped = per_obs[-1][1][1]
                record(model, clip_id, _mean_scores(rep_scores, weight),
                       last_skipped, inputs, info, width, height)
            any_scored = True

        for model in sorted(per_model_scores):
            summary = pipeline.summarize(per_model_scores[model])
            skips = per_model_skips.get(model, {})
            reports.write_json(
                reports.summary_report(model, dataset_name, cond.value, summary, skips),
                out / f"summary__{model}__{cond.value}.json",
            )
            reports.write_csv(
                reports.summary_csv_rows(summary),
                out / f"summary__{model}__{cond.value}.csv",
            )
    return 0 if any_scored else 1


def cmd_rank(args) -> int:
    groups: dict[str, dict[str, dict[str, float]]] = {}
    for path in args.summaries:
        obj = reports.read_json(path)
        group = f"{obj['dataset']}/{obj['condition']}"
        key = "weighted_mean" if obj["condition"] == "sp" else "regular_mean"
        values = {
            name: float(entry[key]) for name, entry in obj["metrics"].items()
        }
        groups.setdefault(group, {})[obj["model"]] = values
    group_names = sorted(groups)
    group_ranks: dict[str, dict[str, float]] = {}
    for group in group_names:
        models = groups[group]
        common = set.intersection(*(set(v) for v in models.values()))
        common.discard(Metric.XAUC.value)
        if not common:
            print(f"rank: {group}: no shared metrics, skipped", file=sys.stderr)
            continue
        dropped = {
            name
            for v in models.values()
            for name in set(v) - common
            if name != Metric.XAUC.value
        }
        if dropped:
            print(
                f"rank: {group}: ignoring metrics not shared by all models:"
                f" {', '.join(sorted(dropped))}",
                file=sys.stderr,
            )
        restricted = {
            model: {name: values[name] for name in common}
            for model, values in models.items()
        }
        group_ranks[group] = rank_table(restricted)
    if not group_ranks:
        print("rank: nothing to rank", file=sys.stderr)
        return 1
    overall: dict[str, float] = {}
    for model in sorted({m for g in group_ranks.values() for m in g}):
        ranks = [g[model] for g in group_ranks.values() if model in g]
        overall[model] = float(np.mean(ranks))
    rows = reports.rank_csv_rows(sorted(group_ranks), group_ranks, overall)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    reports.write_csv(rows, args.out)
    for row in rows:
        print(",".join(str(c) for c in row))
    return 0


def cmd_avg_experiment(args) -> int:
    if len(args.condition) != 1:
        print("avg-experiment: pass exactly one condition", file=sys.stderr)
        return 2
    config = _load_config(args)
    scores_dir = Path(args.scores_dir)
    found: dict[str, dict[str, Path]] = {}
    models = set()
    for path in sorted(scores_dir.glob("*.pos.npy")):
        stem = path.name[: -len(".pos.npy")]
        model, _, rest = stem.partition("__")
        clip_id, _, cond = rest.rpartition("__")
        if not clip_id or cond != args.condition[0].value:
            continue
        models.add(model)
        if args.model and model != args.model:
            continue
        found[clip_id] = {
            "pos": path,
            "neg_uniform": path.with_name(f"{stem}.neg_uniform.npy"),
            "neg_shuffled": path.with_name(f"{stem}.neg_shuffled.npy"),
        }
    if not found:
        print(f"avg-experiment: no score dumps in {scores_dir}", file=sys.stderr)
        return 1
    if not args.model and len(models) > 1:
        print(
            f"avg-experiment: multiple models found ({', '.join(sorted(models))});"
            " pick one with --model",
            file=sys.stderr,
        )
        return 1
    cond = args.condition[0]
    results = []
    for variant, key, metric in (
        ("auc_borji", "neg_uniform", Metric.AUC_BORJI),
        ("sauc", "neg_shuffled", Metric.SAUC),
    ):
        per_clip = []
        for clip_id in sorted(found):
            paths = found[clip_id]
            if not paths[key].is_file():
                continue
            pos = np.load(paths["pos"])
            neg = np.load(paths[key])
            value = metrics.roc_auc_from_scores(pos, neg)
            per_clip.append((ClipScore(clip_id, metric, value, pos.size), pos, neg))
        if len(per_clip) < 3:
            print(
                f"avg-experiment: {variant}: {len(per_clip)} clips with dumps,"
                " need >= 3, skipped",
                file=sys.stderr,
            )
            continue
        result = subset_experiment(
            per_clip,
            n_repeats=config.subset_repeats,
            seed=derive_seed(config.seed, cond.value, variant, "subset"),
        )
        d_plus, p = ks_test_one_sided(result.weighted_errors, result.regular_errors)
        results.append(
            {
                "condition": cond.value,
                "metric": variant,
                "n_clips": len(per_clip),
                "regular_mean_error": result.mean_regular,
                "regular_sd": result.sd_regular,
                "weighted_mean_error": result.mean_weighted,
                "weighted_sd": result.sd_weighted,
                "ks_d_plus": d_plus,
                "ks_p": p,
            }
        )
        print(
            f"avg-experiment: {variant}: regular {result.mean_regular:.5f}"
            f" vs weighted {result.mean_weighted:.5f}, KS p = {p:.3g}"
        )
    if not results:
        return 1
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    reports.write_csv(reports.experiment_csv_rows(results), args.out)
    return 0


def cmd_bias(args) -> int:
    config = _load_config(args)
    vol = read_volume(args.volume)
    biased = gravity_centre_bias(
        vol,
        config.pixels_per_degree,
        config.bias_weight,
        config.bias_sigma_deg,
        config.truncation_radius_sigmas,
    )
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_volume(biased, args.out)
    return 0


def cmd_sample(args) -> int:
    if len(args.condition) != 1:
        print("sample: pass exactly one condition", file=sys.stderr)
        return 2
    config = _load_config(args)
    out = _out_dir(args)
    if args.n_total < 2 or args.n_total % 2:
        print("sample: --n-total must be a positive even number", file=sys.stderr)
        return 2
    manifest, _, sets = _prepare(args.dataset_dir, config)
    cond = args.condition[0]
    native = sets[cond]
    union: list[tuple[str, int, int, int]] = []
    pools: dict[str, list] = {}
    for clip_id in sorted(manifest):
        info = manifest[clip_id]
        if not native[clip_id].locations:
            continue
        vox = dedup_pool_voxels(native[clip_id], info.width, info.height)
        pools[clip_id] = vox
        union.extend((clip_id, x, y, f) for x, y, f in vox)
    if not union:
        print(f"sample: no {cond.value} locations in the dataset", file=sys.stderr)
        return 1
    n_half = args.n_total // 2
    rng = np.random.default_rng(derive_seed(config.seed, cond.value, "sample-pos"))
    idx = rng.choice(len(union), size=n_half, replace=len(union) < n_half)
    drawn: dict[str, list[tuple[int, int, int]]] = {}
    for i in idx:
        clip_id, x, y, f = union[i]
        drawn.setdefault(clip_id, []).append((x, y, f))
    rows: list[list] = [["clip_id", "x", "y", "frame", "label"]]
    blocks: list[tuple[str, int, str, tuple[int, int, int]]] = []
    for clip_id in sorted(drawn):
        info = manifest[clip_id]
        negatives = draw_matched_negatives(
            pools[clip_id],
            info.width,
            info.height,
            info.frames,
            len(drawn[clip_id]),
            np.random.default_rng(
                derive_seed(config.seed, cond.value, "sample-neg", clip_id)
            ),
        )
        for j, (x, y, f) in enumerate(drawn[clip_id]):
            rows.append([clip_id, x, y, f, "pos"])
            blocks.append((clip_id, j, "pos", (x, y, f)))
        for j, (x, y, f) in enumerate(negatives):
            rows.append([clip_id, x, y, f, "neg"])
            blocks.append((clip_id, j, "neg", (x, y, f)))
    reports.write_csv(rows, out / f"locations__{cond.value}.csv")
    if args.subvolumes:
        from .dataset import frames_dir

        (out / "subvolumes").mkdir(exist_ok=True)
        missing: set[str] = set()
        for clip_id, j, label, centre in blocks:
            fdir = frames_dir(args.dataset_dir, clip_id)
            if not fdir.is_dir():
                if clip_id not in missing:
                    missing.add(clip_id)
                    print(f"sample: {clip_id}: no frames/, blocks skipped", file=sys.stderr)
                continue
            spec = SubvolumeSpec(
                centre, args.block_width, args.block_height, args.block_frames
            )
            block = extract_subvolume(fdir, spec)
            name = f"{clip_id}__{j:06d}__{label}"
            if block.ndim == 4:
                write_rgb_block(block, out / "subvolumes" / f"{name}.ssv3")
            else:
                vol = SaliencyVolume(block.astype(np.float32) / 255.0)
                write_volume(vol, out / "subvolumes" / f"{name}.ssv1")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazeval",
        description="Eye-movement-aware evaluation of video saliency predictions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-gt", help="build ground-truth volumes")
    p.add_argument("dataset_dir")
    _add_common(p)
    p.set_defaults(fn=cmd_gen_gt)

    p = sub.add_parser("evaluate", help="score a model's predictions")
    p.add_argument("pred_dir")
    p.add_argument("dataset_dir")
    p.add_argument("--model-name", default=None)
    p.add_argument(
        "--dump-scores",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="write per-clip score arrays for avg-experiment",
    )
    _add_common(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("baselines", help="score the reference predictors")
    p.add_argument("dataset_dir")
    _add_common(p)
    p.set_defaults(fn=cmd_baselines)

    p = sub.add_parser("rank", help="mean-rank models from summary JSONs")
    p.add_argument("summaries", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("avg-experiment", help="regular vs weighted averaging")
    p.add_argument("scores_dir")
    p.add_argument("--model", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_avg_experiment)

    p = sub.add_parser("bias", help="apply the gravity-centre bias")
    p.add_argument("volume")
    _add_common(p, condition=False)
    p.set_defaults(fn=cmd_bias)

    p = sub.add_parser("sample", help="draw balanced training locations")
    p.add_argument("dataset_dir")
    p.add_argument("--n-total", type=int, required=True)
    p.add_argument("--subvolumes", action="store_true")
    p.add_argument("--block-width", type=int, default=128)
    p.add_argument("--block-height", type=int, default=128)
    p.add_argument("--block-frames", type=int, default=15)
    _add_common(p)
    p.set_defaults(fn=cmd_sample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except GazevalError as e:
        print(f"gazeval: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
