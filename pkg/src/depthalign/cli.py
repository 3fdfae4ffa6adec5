"""Command-line front end for the alignment pipeline.

Subcommands run the library directly; `serve` starts the HTTP service for
long-running multi-client use. Every library error class maps to its own
exit code so scripts can distinguish failure modes.
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import io as dio
from .bench import DEFAULT_RUNS, DEFAULT_WARMUP, format_timings, run_benchmark, write_timings_csv
from .core import PROFILES, from_inverse, get_profile, to_inverse
from .errors import DepthAlignError, EmptyList
from .metrics import compare, write_report_csv
from .pipeline import EvalFrame, align_frame, evaluate_frames, frame_seed, make_training_sample
from .sml import SmlConfig, TrainConfig, train_sml
from .sparsify import DENSITY_PRESETS, SparsifierConfig, sample_sparse, synth_prediction

log = logging.getLogger(__name__)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DepthAlignError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


profile_option = click.option(
    "--profile", default="void", type=click.Choice(sorted(PROFILES)), show_default=True
)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose):
    """Metric alignment of monocular inverse-depth predictions."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command("align")
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sparse", required=True, type=click.Path(exists=True, dir_okay=False))
@profile_option
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--encoding", default="mm", type=click.Choice(sorted(dio.ENCODINGS)), show_default=True)
@click.option("--render", type=click.Path(dir_okay=False), help="Also write a depth visualization PNG.")
@handle_errors
def cmd_align(pred, sparse, profile, checkpoint, out, encoding, render):
    """Align one prediction against sparse metric depth and write the result."""
    prof = get_profile(profile)
    z_pred = dio.read_inverse_png(pred)
    points = dio.read_sparse_csv(sparse)
    model = dio.load_checkpoint(checkpoint) if checkpoint else None
    result = align_frame(z_pred, points, prof, model)

    depth = from_inverse(result.z_out, prof.z_floor)
    dio.write_depth_png(depth, out, encoding)
    if render:
        dio.render_depth_map(depth, render)

    a = result.alignment
    click.echo(f"scale={a.scale:.6g} shift={a.shift:.6g} points={a.n_points}")
    click.echo(f"degenerate_fit={a.degenerate}")
    if model is not None:
        click.echo(f"anchors={result.n_anchors} identity_scaffold={result.identity_scaffold}")
    click.echo(f"wrote {out}")


def _load_eval_frames(manifest_path, prof, encoding, density, sparsifier_mode, seed):
    manifest = dio.read_manifest(manifest_path)
    if len(manifest) == 0:
        raise EmptyList(f"{manifest_path}: manifest lists no frames")
    frames = []
    for rec in manifest:
        gt = dio.read_depth_png(rec.gt, encoding)
        if rec.pred is not None:
            pred = dio.read_inverse_png(rec.pred)
        else:
            gt_inv, _ = to_inverse(gt)
            pred = synth_prediction(gt_inv, frame_seed(seed, rec.frame_id, salt=1))
        if rec.sparse is not None:
            points = dio.read_sparse_csv(rec.sparse)
        else:
            points = sample_sparse(
                gt,
                SparsifierConfig(
                    mode=sparsifier_mode,
                    target_count=density,
                    seed=frame_seed(seed, rec.frame_id, salt=2),
                ),
            )
        frames.append(EvalFrame(rec.frame_id, gt, pred, points))
    return frames


@main.command("eval")
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@profile_option
@click.option("--mode", default="ga", type=click.Choice(["ga", "sml", "both"]), show_default=True)
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", required=True, type=click.Path(dir_okay=False))
@click.option("--encoding", default="mm", type=click.Choice(sorted(dio.ENCODINGS)), show_default=True)
@click.option("--density", default=150, show_default=True, help="Sparse point count when the manifest has no sparse files.")
@click.option("--sparsifier", "sparsifier_mode", default="min_distance", type=click.Choice(["min_distance", "clustered"]), show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--pooled", is_flag=True, help="Weight frames by valid pixel count instead of averaging per frame.")
@handle_errors
def cmd_eval(manifest, profile, mode, checkpoint, report, encoding, density, sparsifier_mode, seed, pooled):
    """Evaluate GA and/or GA+SML over a manifest and write CSV reports."""
    prof = get_profile(profile)
    frames = _load_eval_frames(manifest, prof, encoding, density, sparsifier_mode, seed)
    model = None
    if mode in ("sml", "both"):
        if not checkpoint:
            raise click.UsageError("--mode sml/both requires --checkpoint")
        model = dio.load_checkpoint(checkpoint)

    density_tag = str(density)
    reports = {}
    if mode in ("ga", "both"):
        rows, agg = evaluate_frames(frames, prof, None, pooled, density_tag)
        path = report if mode == "ga" else _sibling(report, "ga")
        write_report_csv(path, rows, agg)
        reports["ga"] = agg
        click.echo(f"[ga]  imae={agg.imae:.4f} irmse={agg.irmse:.4f} iabsrel={agg.iabsrel:.4f} ({path})")
    if mode in ("sml", "both"):
        rows, agg = evaluate_frames(frames, prof, model, pooled, density_tag)
        path = report if mode == "sml" else _sibling(report, "sml")
        write_report_csv(path, rows, agg)
        reports["sml"] = agg
        click.echo(f"[sml] imae={agg.imae:.4f} irmse={agg.irmse:.4f} iabsrel={agg.iabsrel:.4f} ({path})")
    if mode == "both":
        reductions = compare(reports["ga"], reports["sml"])
        pretty = " ".join(f"{k}={v:+.2f}%" for k, v in reductions.items())
        click.echo(f"reduction vs ga: {pretty}")


def _sibling(report_path, tag):
    p = Path(report_path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix or '.csv'}"))


def parse_train_config(path) -> tuple[TrainConfig, SmlConfig]:
    """Flat key=value file mirroring the training and architecture fields."""
    train_kwargs = {}
    sml_kwargs = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in ("lr", "weight_decay", "grad_loss_weight"):
            train_kwargs[key] = float(value)
        elif key in ("lr_step_epochs", "epochs", "batch", "pyramid_levels", "seed"):
            train_kwargs[key] = int(value)
        elif key == "betas":
            b1, b2 = (float(s) for s in value.split(","))
            train_kwargs[key] = (b1, b2)
        elif key in ("in_channels", "input_resolution"):
            sml_kwargs[key] = int(value)
        elif key == "stage_widths":
            sml_kwargs[key] = tuple(int(s) for s in value.split(","))
        elif key == "regress_shift":
            sml_kwargs[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            raise click.UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return TrainConfig(**train_kwargs), SmlConfig(**sml_kwargs)


@main.command("train")
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-checkpoint", required=True, type=click.Path(dir_okay=False))
@profile_option
@click.option("--encoding", default="mm", type=click.Choice(sorted(dio.ENCODINGS)), show_default=True)
@click.option("--density", default=150, show_default=True)
@click.option("--sparsifier", "sparsifier_mode", default="min_distance", type=click.Choice(["min_distance", "clustered"]), show_default=True)
@click.option("--trace", type=click.Path(dir_okay=False), help="Loss trace CSV (default: next to the checkpoint).")
@handle_errors
def cmd_train(manifest, config, out_checkpoint, profile, encoding, density, sparsifier_mode, trace):
    """Train the dense scale model on a manifest and write a checkpoint."""
    prof = get_profile(profile)
    train_cfg, sml_cfg = parse_train_config(config)
    frames = _load_eval_frames(manifest, prof, encoding, density, sparsifier_mode, train_cfg.seed)
    samples = [make_training_sample(f, prof) for f in frames]

    model, losses = train_sml(samples, train_cfg, sml_cfg)
    dio.save_checkpoint(model, out_checkpoint)

    trace_path = trace or str(Path(out_checkpoint).with_suffix(".trace.csv"))
    with open(trace_path, "w", encoding="utf-8") as fh:
        fh.write("epoch,loss\n")
        for i, value in enumerate(losses, start=1):
            fh.write(f"{i},{value:.8f}\n")
    click.echo(f"final_loss={losses[-1]:.6f}")
    click.echo(f"wrote {out_checkpoint} and {trace_path}")


@main.command("sparsify")
@click.option("--gt", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", default="min_distance", type=click.Choice(["min_distance", "clustered"]), show_default=True)
@click.option("--count", default=150, show_default=True, help=f"Point count; presets {DENSITY_PRESETS}.")
@click.option("--min-dist", default=5.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--encoding", default="mm", type=click.Choice(sorted(dio.ENCODINGS)), show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@handle_errors
def cmd_sparsify(gt, mode, count, min_dist, seed, encoding, out):
    """Sample sparse metric depth from a ground-truth depth image."""
    frame = dio.read_depth_png(gt, encoding)
    cfg = SparsifierConfig(mode=mode, target_count=count, min_dist=min_dist, seed=seed)
    points = sample_sparse(frame, cfg)
    dio.write_sparse_csv(points, out)
    if len(points) < count:
        click.echo(f"warning: placed {len(points)} of {count} points", err=True)
    click.echo(f"wrote {len(points)} points to {out}")


@main.command("bench")
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sparse", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--gt", type=click.Path(exists=True, dir_okay=False))
@profile_option
@click.option("--encoding", default="mm", type=click.Choice(sorted(dio.ENCODINGS)), show_default=True)
@click.option("--warmup", default=DEFAULT_WARMUP, show_default=True)
@click.option("--runs", default=DEFAULT_RUNS, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Also write the table as CSV.")
@handle_errors
def cmd_bench(pred, sparse, checkpoint, gt, profile, encoding, warmup, runs, out):
    """Time each pipeline stage over warmup + timed runs."""
    prof = get_profile(profile)
    points = dio.read_sparse_csv(sparse)
    model = dio.load_checkpoint(checkpoint)
    gt_frame = dio.read_depth_png(gt, encoding) if gt else None

    timings = run_benchmark(
        lambda: dio.read_inverse_png(pred), points, model, prof, gt_frame, warmup, runs
    )
    click.echo(format_timings(timings))
    if out:
        write_timings_csv(out, timings)
        click.echo(f"wrote {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False))
@handle_errors
def cmd_serve(host, port, checkpoint):
    """Start the HTTP alignment service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(checkpoint), host=host, port=port)


if __name__ == "__main__":
    main()
