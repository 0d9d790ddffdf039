"""vogtrack command line: detect, track, synth, eval, bench.

Exit codes: 0 success, 1 usage or I/O error, 2 detection failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import CONFIG_ENV, load_config
from .errors import PgmFormatError
from .image import read_pgm, write_pgm
from .tracking import observe, records_from, trace_csv, track_directory

EXIT_OK, EXIT_USAGE, EXIT_DETECTION = 0, 1, 2
SYNTH_PROTOCOLS = ("fixation", "pursuit", "range", "static")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for detection failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config_flags(p):
    p.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    p.add_argument("--downscale-factor", type=int)
    p.add_argument("--window-width-ratio", type=float)
    p.add_argument("--outlier-k", type=float)
    p.add_argument("--min-samples", type=int)
    p.add_argument("--corner-side", choices=("temporal", "nasal"))
    p.add_argument("--deg-per-px-x", type=float)
    p.add_argument("--deg-per-px-y", type=float)
    p.add_argument("--fps", type=float)


def _config(args):
    keys = ("downscale_factor", "window_width_ratio", "outlier_k", "min_samples",
            "corner_side", "deg_per_px_x", "deg_per_px_y", "fps")
    return load_config(args.config, **{k: getattr(args, k) for k in keys})


def cmd_detect(args) -> int:
    config = _config(args)
    img = read_pgm(args.image)
    obs, _ = observe(img, 0.0, config)
    rec = records_from([0], [obs], config)[0]
    sys.stdout.write(trace_csv([rec]))
    if not obs.ok:
        print(f"detection failed: {obs.status.replace('_', ' ')}", file=sys.stderr)
        return EXIT_DETECTION
    return EXIT_OK


def cmd_track(args) -> int:
    config = _config(args)
    records = track_directory(args.directory, config, jobs=args.jobs)
    text = trace_csv(records)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    failed = sum(r.status != "ok" for r in records)
    print(f"{len(records)} frames, {failed} failed", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args) -> int:
    from . import synth

    base = synth.EyeScene(noise_sigma=args.sigma, seed=args.seed)
    if args.aperture is not None:
        base = synth.occluded_scene(base, args.aperture)
    fps = args.fps or 30.0
    if args.protocol == "fixation":
        frames = synth.fixation_protocol(base, axis=args.axis, fps=fps)
    elif args.protocol == "pursuit":
        frames = synth.pursuit_protocol(base, axis=args.axis, fps=fps)
    elif args.protocol == "range":
        frames = synth.range_protocol(base, axis=args.axis, fps=fps)
    else:
        frames = synth.static_protocol(base, fps=fps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for f in frames:
        write_pgm(out / f"frame_{f.index:05d}.pgm", f.render())
    (out / "manifest.csv").write_text(synth.manifest_csv(frames), encoding="utf-8")
    print(f"wrote {len(frames)} frames to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    from .evaluation import PROTOCOLS, evaluate

    config = _config(args)
    names = PROTOCOLS if args.protocol == "all" else (args.protocol,)
    reports = [evaluate(p, config, sigma=args.sigma, seed=args.seed) for p in names]
    for r in reports:
        print(r.text())
    rows = "".join(r.csv() if i == 0 else r.csv().split("\n", 1)[1] for i, r in enumerate(reports))
    if args.csv:
        Path(args.csv).write_text(rows, encoding="utf-8")
    else:
        print()
        sys.stdout.write(rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_bench

    report = run_bench(args.iters, _config(args))
    print(report.text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vogtrack", description="Video eye-movement tracking from grayscale frames.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("detect", help="detect pupil and corner in one PGM")
    d.add_argument("image")
    _config_flags(d)
    d.set_defaults(func=cmd_detect)

    t = sub.add_parser("track", help="track a directory of numbered PGM frames")
    t.add_argument("directory")
    t.add_argument("--out", help="CSV output path (default: stdout)")
    t.add_argument("--jobs", type=int, default=1, help="frames detected concurrently")
    _config_flags(t)
    t.set_defaults(func=cmd_track)

    s = sub.add_parser("synth", help="write a synthetic frame sequence and manifest")
    s.add_argument("protocol", choices=SYNTH_PROTOCOLS)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise level")
    s.add_argument("--axis", default="x", choices=("x", "y", "horizontal", "vertical"))
    s.add_argument("--aperture", type=float, help="eyelid aperture in px (occluded scenes)")
    s.add_argument("--fps", type=float)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="run an evaluation suite against its budgets")
    e.add_argument("protocol", choices=("fixation", "pursuit", "range", "all"))
    e.add_argument("--sigma", type=float, default=8.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--csv", help="write the criteria table here instead of stdout")
    _config_flags(e)
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="per-stage timing on a representative frame")
    b.add_argument("--iters", type=int, default=100)
    _config_flags(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.iters < 10:
        parser.error("bench needs --iters >= 10")
    try:
        return args.func(args)
    except (OSError, PgmFormatError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
