"""Command-line front end.

Exit codes: 0 success, 2 bad or missing input, 3 alignment failure,
4 synthesis failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .align import AlignmentError, WarpFunction
from .cost import BandError, dump_pgm
from .degrade import (
    DegradeSpec,
    apply_warp_audio,
    apply_warp_embeddings,
    mix_noise,
    noise_clip,
    occlude_embeddings,
    random_silence,
)
from .evaluation import LAG_MAX, LEAD_MAX, asynchrony_error, ground_truth_warp
from .features import MfccConfig, mfcc
from .pipeline import accumulated_for_dump, align_cost, build_cost, synthesize
from .signal_io import (
    EmbeddingFormatError,
    WavFormatError,
    is_avem,
    read_embeddings,
    read_wav,
    write_embeddings,
    write_wav,
)
from .smooth import SmoothingConfig
from .vocoder import SynthesisError

log = logging.getLogger("avalign")

EXIT_INPUT, EXIT_ALIGN, EXIT_SYNTH = 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _band(text):
    if text in ("auto", "full"):
        return None if text == "full" else "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("band must be 'auto', 'full' or a radius in frames") from None
    if value < 0:
        raise argparse.ArgumentTypeError("band radius must be non-negative")
    return value


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _write_text(text, path):
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _load_warp(path):
    try:
        return WarpFunction.from_json(Path(path).read_text())
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read warp {path}: {exc}", EXIT_INPUT) from None


def _feature_pairs(args):
    """(unaligned, reference) feature pairs implied by the provided inputs."""
    try:
        refs = {k: read_embeddings(p) for k, p in
                (("audio", args.ref_audio_emb), ("video", args.ref_video_emb)) if p}
        srcs = {k: read_embeddings(p) for k, p in
                (("audio", args.src_audio_emb), ("video", args.src_video_emb)) if p}
        if not refs and not srcs:
            if not (args.ref_audio and args.src_audio):
                raise CliError("no reference or unaligned inputs given", EXIT_INPUT)
            cfg = MfccConfig.at_hop(args.mfcc_hop)
            ref = mfcc(read_wav(args.ref_audio), cfg)
            src = mfcc(read_wav(args.src_audio), cfg)
            return [(src, ref)], ["audio-audio (mfcc)"]
    except (OSError, WavFormatError, EmbeddingFormatError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    if not refs:
        raise CliError("missing reference input (--ref-audio-emb / --ref-video-emb)", EXIT_INPUT)
    if not srcs:
        raise CliError("missing unaligned input (--src-audio-emb / --src-video-emb)", EXIT_INPUT)
    pairs, names = [], []
    for sk, s in srcs.items():
        for rk, r in refs.items():
            pairs.append((s, r))
            names.append(f"{sk}-{rk}")
    return pairs, names


def _cost_from_args(args):
    pairs, names = _feature_pairs(args)
    log.info("modality pairs: %s", ", ".join(names))
    try:
        return build_cost(pairs, args.metric, args.band), names
    except BandError as exc:
        raise CliError(str(exc), EXIT_ALIGN) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def cmd_align(args):
    cost, names = _cost_from_args(args)
    smoothing = None if args.no_smooth else SmoothingConfig(lambda_max=args.lam)
    try:
        result = align_cost(cost, args.delay_bias, smoothing, args.delay_axis)
    except (BandError, AlignmentError) as exc:
        raise CliError(str(exc), EXIT_ALIGN) from None

    warp_json = result.warp.to_json()
    if args.out_path:
        Path(args.out_path).write_text(result.path.to_json() + "\n")
    if args.out_wav:
        if not args.src_audio:
            raise CliError("--out-wav needs --src-audio (the WAV to warp)", EXIT_INPUT)
        try:
            src = read_wav(args.src_audio)
        except (OSError, WavFormatError) as exc:
            raise CliError(str(exc), EXIT_INPUT) from None
        try:
            write_wav(synthesize(src, result.warp), args.out_wav)
        except (SynthesisError, ValueError) as exc:
            raise CliError(f"synthesis failed: {exc}", EXIT_SYNTH) from None
    if args.out_warp:
        Path(args.out_warp).write_text(warp_json + "\n")
        summary = {
            "pairs": names,
            "shape": list(cost.shape),
            "total_cost": result.path.total_cost,
            "delay_bias": args.delay_bias,
            "warp": args.out_warp,
        }
        print(json.dumps(summary))
    else:
        print(warp_json)
    return 0


def cmd_synth(args):
    warp = _load_warp(args.warp)
    try:
        src = read_wav(args.src_audio)
    except (OSError, WavFormatError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    try:
        write_wav(synthesize(src, warp), args.out)
    except (SynthesisError, ValueError) as exc:
        raise CliError(f"synthesis failed: {exc}", EXIT_SYNTH) from None
    return 0


def cmd_eval(args):
    est, gt = _load_warp(args.estimated), _load_warp(args.ground_truth)
    try:
        report = asynchrony_error(est, gt, args.lead_max, args.lag_max)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    _write_text(report.to_json(), args.out)
    if args.out:
        print(report.to_json())
    return 0


def cmd_gt(args):
    try:
        ref, src = read_wav(args.ref_wav), read_wav(args.unaligned_wav)
        warp = ground_truth_warp(ref, src, MfccConfig.at_hop(args.hop))
    except (OSError, ValueError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    _write_text(warp.to_json(), args.out)
    return 0


def _parse_spec(text):
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        return DegradeSpec.from_json(text)
    except (ValueError, TypeError, KeyError) as exc:
        raise CliError(f"bad degradation spec: {exc}", EXIT_INPUT) from None


def cmd_degrade(args):
    spec = _parse_spec(args.spec)
    try:
        if is_avem(args.input):
            seq = read_embeddings(args.input)
            if spec.kind == "occlusion":
                out = occlude_embeddings(seq, spec.duration, spec.seed)
            elif spec.kind == "warp":
                out = apply_warp_embeddings(seq, spec.warp)
            else:
                raise CliError(f"{spec.kind} applies to audio, not embeddings", EXIT_INPUT)
            write_embeddings(out, args.output)
            return 0

        clip = read_wav(args.input)
        if spec.kind == "noise":
            out = mix_noise(clip, noise_clip(spec, len(clip), clip.sample_rate), spec.snr_db)
        elif spec.kind == "silence":
            out = random_silence(clip, spec.duration, spec.seed)
        elif spec.kind == "warp":
            try:
                out = apply_warp_audio(clip, spec.warp)
            except SynthesisError as exc:
                raise CliError(f"synthesis failed: {exc}", EXIT_SYNTH) from None
        else:
            raise CliError("occlusion applies to video embeddings (AVEM input)", EXIT_INPUT)
    except (OSError, WavFormatError, EmbeddingFormatError, ValueError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    write_wav(out, args.output)
    return 0


def cmd_dump_cost(args):
    cost, _ = _cost_from_args(args)
    try:
        values, path = accumulated_for_dump(cost, args.delay_bias, args.delay_axis, args.cumulative)
    except (BandError, AlignmentError) as exc:
        raise CliError(str(exc), EXIT_ALIGN) from None
    dump_pgm(values, args.out, None if args.no_path else path.pairs)
    return 0


def _add_inputs(p):
    g = p.add_argument_group("inputs")
    g.add_argument("--ref-audio", help="reference WAV (MFCC mode, or just for reference)")
    g.add_argument("--ref-audio-emb", help="reference audio embeddings (AVEM)")
    g.add_argument("--ref-video-emb", help="reference video embeddings (AVEM)")
    g.add_argument("--src-audio", help="unaligned WAV (MFCC mode and synthesis source)")
    g.add_argument("--src-audio-emb", help="unaligned audio embeddings (AVEM)")
    g.add_argument("--src-video-emb", help="unaligned video embeddings (AVEM)")
    a = p.add_argument_group("alignment")
    a.add_argument("--metric", choices=("euclidean", "neg_cosine", "neg_dot"), default="euclidean")
    a.add_argument("--delay-bias", action="store_true", help="prefer audio trailing the picture")
    a.add_argument("--delay-axis", choices=("reference", "unaligned"), default="reference",
                   help="frames blended by --delay-bias")
    a.add_argument("--band", type=_band, default="auto",
                   help="band radius in frames, 'auto' (default) or 'full'")
    a.add_argument("--mfcc-hop", type=_positive, default=0.010,
                   help="MFCC hop in seconds for WAV-only alignment")
    a.add_argument("--seed", type=int, default=0, help="accepted for run reproducibility records")


def build_parser():
    parser = argparse.ArgumentParser(prog="avalign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align unaligned audio to a reference and optionally resynthesize")
    _add_inputs(p)
    p.add_argument("--lambda", dest="lam", type=_positive, default=SmoothingConfig.lambda_max,
                   help="maximum smoothing deviation in seconds")
    p.add_argument("--no-smooth", action="store_true")
    p.add_argument("--out-warp", help="warp JSON (default: stdout)")
    p.add_argument("--out-path", help="raw path JSON")
    p.add_argument("--out-wav", help="aligned audio (needs --src-audio)")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("synth", help="warp a WAV with an existing warp JSON")
    p.add_argument("--src-audio", required=True)
    p.add_argument("--warp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="asynchrony error of an estimated warp against ground truth")
    p.add_argument("estimated")
    p.add_argument("ground_truth")
    p.add_argument("--lead-max", type=_positive, default=LEAD_MAX)
    p.add_argument("--lag-max", type=_positive, default=LAG_MAX)
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gt", help="MFCC ground-truth warp between two recordings")
    p.add_argument("ref_wav")
    p.add_argument("unaligned_wav")
    p.add_argument("--hop", type=_positive, default=0.010, help="MFCC hop (0.04 for video rate)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gt)

    p = sub.add_parser("degrade", help="apply a JSON degradation spec to a WAV or AVEM file")
    p.add_argument("--spec", required=True, help="JSON text or path to a JSON file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("dump-cost", help="write the (cumulative) cost matrix as a PGM image")
    _add_inputs(p)
    p.add_argument("--out", required=True)
    p.add_argument("--raw", dest="cumulative", action="store_false",
                   help="dump matching costs instead of cumulative costs")
    p.add_argument("--no-path", action="store_true")
    p.set_defaults(func=cmd_dump_cost)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"avalign {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
