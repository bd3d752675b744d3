"""
Command-line surface of the WaveGuard tool.

Results go to stdout (JSON by default, or a grid table with ``--format table``);
logs go to stderr. Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from core.audio import load_wav, save_wav
from core.config import Config
from core.logger import setup_logger
from core.presets import PresetError, Presets, load_presets
from transcription.base import (
    HttpSpec,
    SubprocessSpec,
    TranscriberSpec,
    create_transcriber,
    parse_transcriber_spec,
)
from transforms import IdentityConfig, LpcConfig, TransformConfig, apply, parse_transform
from utils.report_summary import (
    ReportWriter,
    render_detection_table,
    render_mean_cer_table,
    render_robustness_table,
    render_sweep_table,
    render_timing_table,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class CliUsageError(Exception):
    """Invalid command line."""


class WaveguardArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so ``run`` owns the exit code."""

    def error(self, message):
        raise CliUsageError(message)


def _add_transform_options(parser: argparse.ArgumentParser, required: bool = False):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--preset', help='Transform preset name (e.g. mel80, lpc20, quant6)')
    group.add_argument('--transform', metavar='JSON', help='Transform config as JSON, e.g. \'{"type": "quantize", "bits": 6}\'')


def _add_transcriber_options(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--asr-spec', metavar='FILE', help='Transcriber spec JSON file (subprocess, http or mock)')
    group.add_argument('--asr-cmd', metavar='TEMPLATE', help='Subprocess command template with {input}')
    group.add_argument('--asr-url', metavar='URL', help='HTTP transcription endpoint')


def _add_threshold_options(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--threshold', type=float, help='Explicit detection threshold in [0, 1]')
    group.add_argument('--threshold-preset', metavar='ASR',
                       help='Use the preset threshold for this transcriber (deepspeech, lingvo)')


def build_parser() -> argparse.ArgumentParser:
    common = WaveguardArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Seed for every random choice (default: WAVEGUARD_SEED or 0)')
    common.add_argument('--format', choices=['json', 'table'], default='json', help='Output format')
    common.add_argument('--no-timings', action='store_true', help='Omit wall-clock timings from JSON output')
    common.add_argument('--report-dir', help='Also save JSON and table reports in this directory')
    common.add_argument('--presets', help='Presets YAML (default: bundled config/presets.yaml)')
    common.add_argument('--log-level', help='Logging level (default: LOG_LEVEL or INFO)')
    common.add_argument('--logs-dir', help='Log directory (default: LOGS_STORAGE_PATH or ./logs)')

    parser = WaveguardArgumentParser(
        prog='waveguard-tool',
        description="WaveGuard adversarial audio detection tool",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s transform --preset mel80 --in a.wav --out b.wav
  %(prog)s detect --preset quant6 --asr-cmd "deepspeech --audio {input}" --in a.wav --threshold-preset deepspeech
  %(prog)s evaluate --preset lpc20 --asr-spec mock.json --manifest eval.jsonl --calibration-manifest calib.jsonl
  %(prog)s calibrate --preset filter --asr-url http://localhost:8080/asr --manifest calib.jsonl
  %(prog)s bench                                   # every preset on a synthetic 5 s clip
  %(prog)s attack-sweep --preset quant6 --epsilons 0 250 500 1000
  %(prog)s sweep --family quantize --values 2 4 6 8 --asr-spec mock.json --manifest eval.jsonl
        """
    )
    subparsers = parser.add_subparsers(dest='command', parser_class=WaveguardArgumentParser)

    transform_parser = subparsers.add_parser('transform', parents=[common], help='Apply a transform to a WAV file')
    _add_transform_options(transform_parser, required=True)
    transform_parser.add_argument('--in', dest='input', required=True, help='Input WAV')
    transform_parser.add_argument('--out', dest='output', required=True, help='Output WAV')

    detect_parser = subparsers.add_parser('detect', parents=[common], help='Classify one clip')
    _add_transform_options(detect_parser, required=True)
    _add_transcriber_options(detect_parser)
    _add_threshold_options(detect_parser)
    detect_parser.add_argument('--in', dest='input', required=True, help='Input WAV')

    evaluate_parser = subparsers.add_parser('evaluate', parents=[common], help='Evaluate on a manifest')
    _add_transform_options(evaluate_parser, required=True)
    _add_transcriber_options(evaluate_parser)
    _add_threshold_options(evaluate_parser)
    evaluate_parser.add_argument('--manifest', required=True, help='Evaluation manifest (JSONL)')
    evaluate_parser.add_argument('--calibration-manifest', help='Separate manifest to calibrate the threshold on')
    evaluate_parser.add_argument('--jobs', type=int, help='Parallel rows (default: WAVEGUARD_JOBS or 1)')

    calibrate_parser = subparsers.add_parser('calibrate', parents=[common], help='Find the best threshold')
    _add_transform_options(calibrate_parser, required=True)
    _add_transcriber_options(calibrate_parser)
    calibrate_parser.add_argument('--manifest', required=True, help='Calibration manifest (JSONL)')
    calibrate_parser.add_argument('--jobs', type=int, help='Parallel rows (default: WAVEGUARD_JOBS or 1)')

    bench_parser = subparsers.add_parser('bench', parents=[common], help='Time transforms (all presets by default)')
    _add_transform_options(bench_parser)
    source = bench_parser.add_mutually_exclusive_group()
    source.add_argument('--manifest', help='Time on every clip of a manifest')
    source.add_argument('--in', dest='inputs', nargs='+', help='Time on these WAV files')
    bench_parser.add_argument('--synthetic-seconds', type=float, default=5.0,
                              help='Length of the synthetic clip used without --manifest/--in')

    attack_parser = subparsers.add_parser('attack-sweep', parents=[common],
                                          help='Adaptive attack against a toy model across epsilons')
    _add_transform_options(attack_parser)
    attack_parser.add_argument('--epsilons', type=float, nargs='+', required=True, help='L-inf bounds (integer units)')
    attack_parser.add_argument('--target', default='abc', help='Target transcript (toy alphabet)')
    attack_parser.add_argument('--alphabet', default='abcde', help='Toy model alphabet')
    attack_parser.add_argument('--fixtures', type=int, default=10, help='Number of synthetic clips')
    attack_parser.add_argument('--max-iters', type=int, default=500, help='Attack iterations')
    attack_parser.add_argument('--alpha', type=float, default=10.0, help='Step size (integer units)')
    attack_parser.add_argument('--threshold', type=float, default=0.5, help='Fixed threshold for accuracy')
    attack_parser.add_argument('--jobs', type=int, help='Parallel attacks (default: WAVEGUARD_JOBS or 1)')

    sweep_parser = subparsers.add_parser('sweep', parents=[common], help='Detector AUC across hyper-parameter values')
    _add_transcriber_options(sweep_parser)
    sweep_parser.add_argument('--family', required=True,
                              choices=['quantize', 'resample', 'shelf_filter', 'mel_invert', 'lpc'])
    sweep_parser.add_argument('--values', type=float, nargs='+', required=True, help='Parameter values')
    sweep_parser.add_argument('--manifest', required=True, help='Evaluation manifest (JSONL)')
    sweep_parser.add_argument('--calibration-manifest', help='Separate manifest to calibrate on')
    sweep_parser.add_argument('--jobs', type=int, help='Parallel rows (default: WAVEGUARD_JOBS or 1)')

    return parser


def resolve_transform(args, presets: Presets, seed: Optional[int]) -> TransformConfig:
    """Transform from --preset or --transform; the run seed (--seed over WAVEGUARD_SEED) drives the LPC excitation."""
    preset = getattr(args, 'preset', None)
    raw = getattr(args, 'transform', None)
    if preset:
        try:
            g = presets.transform(preset)
        except PresetError as e:
            raise CliUsageError(str(e)) from e
    elif raw:
        try:
            g = parse_transform(raw)
        except ValueError as e:
            raise CliUsageError(f"invalid --transform: {e}") from e
    else:
        g = IdentityConfig()
    if isinstance(g, LpcConfig) and seed is not None:
        g = g.model_copy(update={"excitation_seed": seed})
    return g


def resolve_transcriber(args, config: Config) -> TranscriberSpec:
    """--asr-spec, --asr-cmd, --asr-url, then WAVEGUARD_ASR_CMD / WAVEGUARD_ASR_URL."""
    if args.asr_spec:
        return parse_transcriber_spec(Path(args.asr_spec).read_text())
    command = args.asr_cmd or (None if args.asr_url else config.asr_cmd)
    if command:
        return SubprocessSpec(command=command, timeout_ms=config.asr_timeout_ms)
    url = args.asr_url or config.asr_url
    if url:
        return HttpSpec(
            url=url,
            timeout_ms=config.asr_timeout_ms,
            retry_max_attempts=config.asr_retry_max_attempts,
            retry_backoff_factor=config.asr_retry_backoff_factor,
        )
    raise CliUsageError("no transcriber configured: pass --asr-spec, --asr-cmd or --asr-url, "
                        "or set WAVEGUARD_ASR_CMD")


def resolve_threshold(args, presets: Presets, g: TransformConfig):
    """(threshold, source) from --threshold or --threshold-preset; (None, None) if neither."""
    if args.threshold is not None:
        if not 0.0 <= args.threshold <= 1.0:
            raise CliUsageError(f"--threshold must be in [0, 1], got {args.threshold}")
        return args.threshold, "explicit"
    if args.threshold_preset:
        name = args.preset or presets.name_of(g)
        if name is None:
            raise CliUsageError("--threshold-preset needs a transform preset (use --preset)")
        try:
            return presets.threshold(args.threshold_preset, name), "preset"
        except PresetError as e:
            raise CliUsageError(str(e)) from e
    return None, None


def _emit(args, payload: Dict[str, Any], table: Optional[str], name: str):
    if args.format == 'table' and table is not None:
        print(table)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    if args.report_dir:
        writer = ReportWriter(args.report_dir)
        writer.save_json(name, payload)
        if table is not None:
            writer.save_table(name, table)


def cmd_transform(args, config: Config, presets: Presets, logger) -> int:
    g = resolve_transform(args, presets, config.seed)
    x = load_wav(args.input)
    y = apply(g, x)
    save_wav(y, args.output)
    logger.info("✅ Transform applied", transform=g.label, input=args.input, output=args.output,
                samples=len(y), sample_rate=y.sample_rate)
    return EXIT_OK


def cmd_detect(args, config: Config, presets: Presets, logger) -> int:
    from detector.detector import Detector

    g = resolve_transform(args, presets, config.seed)
    threshold, source = resolve_threshold(args, presets, g)
    if threshold is None:
        threshold, source = 0.5, "default"
    spec = resolve_transcriber(args, config)
    x = load_wav(args.input)
    with create_transcriber(spec) as transcriber:
        result = Detector(g, transcriber, threshold).detect(x, example_id=Path(args.input).name)
    payload = result.to_dict(include_timings=not args.no_timings)
    payload["threshold_source"] = source
    payload["transform"] = g.to_json_dict()
    _emit(args, payload, None, "detect")
    return EXIT_OK


def cmd_evaluate(args, config: Config, presets: Presets, logger) -> int:
    from detector.evaluation import Evaluator

    g = resolve_transform(args, presets, config.seed)
    threshold, source = resolve_threshold(args, presets, g)
    spec = resolve_transcriber(args, config)
    with create_transcriber(spec) as transcriber:
        report = Evaluator(g, transcriber, jobs=args.jobs or config.jobs).evaluate(
            args.manifest, args.calibration_manifest, threshold, source or "explicit"
        )
    table = render_detection_table([report]) + "\n" + render_mean_cer_table(report)
    _emit(args, report.to_dict(include_timings=not args.no_timings), table, "evaluation")
    return EXIT_OK


def cmd_calibrate(args, config: Config, presets: Presets, logger) -> int:
    from detector.evaluation import Evaluator

    g = resolve_transform(args, presets, config.seed)
    spec = resolve_transcriber(args, config)
    with create_transcriber(spec) as transcriber:
        threshold, accuracy, failures = Evaluator(g, transcriber, jobs=args.jobs or config.jobs).calibrate(
            args.manifest
        )
    payload = {
        "transform": g.to_json_dict(),
        "threshold": threshold,
        "accuracy": accuracy,
        "failures": [f.to_dict() for f in failures],
    }
    _emit(args, payload, None, "calibration")
    return EXIT_OK


def cmd_bench(args, config: Config, presets: Presets, logger) -> int:
    from attack.fixtures import speech_like
    from detector.timing import bench_presets, clips_from_manifest

    if args.manifest:
        clips = clips_from_manifest(args.manifest)
    elif args.inputs:
        clips = [load_wav(path) for path in args.inputs]
    else:
        clips = [speech_like(args.synthetic_seconds, 16000, seed=config.seed)]

    if args.preset or args.transform:
        g = resolve_transform(args, presets, config.seed)
        transforms = {args.preset or g.type: g}
    else:
        transforms = dict(presets.transforms)
    results = bench_presets(clips, transforms)
    payload = {"results": [r.to_dict() for r in results]}
    _emit(args, payload, render_timing_table(results), "timing")
    return EXIT_OK


def cmd_attack_sweep(args, config: Config, presets: Presets, logger) -> int:
    from attack.adaptive import AttackConfig
    from attack.fixtures import attack_fixtures
    from attack.sweep import robustness_sweep
    from attack.toy_model import ToyAcousticModel

    seed = config.seed
    g = resolve_transform(args, presets, seed)
    model = ToyAcousticModel.random(alphabet=args.alphabet, seed=seed)
    fixtures = attack_fixtures(args.fixtures, seed=seed)
    base = AttackConfig(target=args.target, alpha=args.alpha, max_iters=args.max_iters)
    report = robustness_sweep(g, args.epsilons, fixtures, model, args.target, base_config=base,
                              threshold=args.threshold, jobs=args.jobs or config.jobs)
    _emit(args, report.to_dict(), render_robustness_table(report), "robustness")
    return EXIT_OK


def cmd_sweep(args, config: Config, presets: Presets, logger) -> int:
    from detector.sweep import sweep_hyperparameter

    spec = resolve_transcriber(args, config)
    integer_params = {"quantize", "resample", "mel_invert", "lpc"}
    values: List[float] = [int(v) if args.family in integer_params else v for v in args.values]
    base = {}
    if args.family == "lpc":
        base["excitation_seed"] = config.seed
    with create_transcriber(spec) as transcriber:
        points = sweep_hyperparameter(args.family, values, args.manifest, transcriber,
                                      args.calibration_manifest, base=base, jobs=args.jobs or config.jobs)
    payload = {"family": args.family, "points": [p.to_dict() for p in points]}
    _emit(args, payload, render_sweep_table(points), "sweep")
    return EXIT_OK


COMMANDS = {
    'transform': cmd_transform,
    'detect': cmd_detect,
    'evaluate': cmd_evaluate,
    'calibrate': cmd_calibrate,
    'bench': cmd_bench,
    'attack-sweep': cmd_attack_sweep,
    'sweep': cmd_sweep,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise CliUsageError("a command is required")
    except CliUsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        overrides = {}
        if args.seed is not None:
            overrides['seed'] = args.seed
        if args.log_level:
            overrides['log_level'] = args.log_level
        if args.logs_dir:
            overrides['logs_storage_path'] = args.logs_dir
        if args.presets:
            overrides['presets_path'] = args.presets
        config = Config(**overrides)
        config.validate_config()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logger = setup_logger(args.command, 'cli', config.log_level, config.json_console, config.logs_storage_path)
    logger.info("Starting WaveGuard tool", command=args.command)

    try:
        presets = load_presets(config.presets_path)
        return COMMANDS[args.command](args, config, presets, logger)
    except CliUsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"❌ {args.command} failed", error=str(e), error_type=type(e).__name__)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
