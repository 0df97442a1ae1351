"""Command-line front end: configure and run experiment suites, persist
transcripts, and emit reports.

A suite config is a JSON document::

    {
      "runs": [
        {
          "name": "gm-malleability-cca2",
          "experiment": "CCA2",
          "scheme": {"id": "gm", "prime_bits": 16, "message_bits": 8},
          "adversary": "gm-malleability",
          "trials_per_arm": 1000,
          "seed": 42,
          "delay": {"base": 3, "per_byte": 1},
          "negligible_threshold": 0.05
        }
      ]
    }

The seed is mandatory: reproducibility is not optional here. Scheme
blocks compose a base scheme ("gm" or "cs") with an optional "leak"
profile and an optional "fixed_time" flag; fixed-time targets are
auto-calibrated from a worst-case sample derived from the run seed.

Exit codes: 0 = all runs executed (attack success is not a failure),
1 = config error, 2 = runtime failure in at least one run.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .adversaries import ADVERSARY_FACTORIES, adversary_by_id
from .errors import ConfigError
from .games import (
    ExperimentKind,
    ExperimentRecord,
    derive_trial_seed,
    negligible_check,
    run_experiment,
)
from .numtheory import CostLedger
from .schemes import CsScheme, GmScheme, LeakProfile, Scheme, leaky_wrap
from .timing import (
    DelayModel,
    FixedTimeConfig,
    calibrate_worst_case,
    certified_encrypt_budget,
    wrap_fixed_time,
)

SCHEME_IDS = ("gm", "cs")
TOY_SECURITY_BITS = 64
DEFAULT_TRIALS_PER_ARM = 1000
DEFAULT_THRESHOLD = 0.05
CALIBRATION_SAMPLES = 512


@dataclass(frozen=True)
class RunConfig:
    name: str
    experiment: ExperimentKind
    scheme_spec: dict
    adversary_id: str
    trials_per_arm: int
    seed: int
    delay: DelayModel
    negligible_threshold: float


@dataclass(frozen=True)
class SuiteConfig:
    runs: tuple[RunConfig, ...]


def _parse_delay(block: dict) -> DelayModel:
    known = {"base", "per_byte", "jitter_seed", "jitter_max"}
    unknown = set(block) - known
    if unknown:
        raise ConfigError(f"unknown delay fields: {sorted(unknown)}")
    return DelayModel(
        base=int(block.get("base", 0)),
        per_byte=int(block.get("per_byte", 0)),
        jitter_seed=block.get("jitter_seed"),
        jitter_max=int(block.get("jitter_max", 0)),
    )


def _parse_run(block: dict, index: int) -> RunConfig:
    if not isinstance(block, dict):
        raise ConfigError(f"run #{index} must be an object")
    name = block.get("name")
    if not name:
        raise ConfigError(f"run #{index} is missing a name")
    if "seed" not in block:
        raise ConfigError(f"run {name!r} is missing the mandatory seed")
    scheme_spec = block.get("scheme")
    if not isinstance(scheme_spec, dict) or "id" not in scheme_spec:
        raise ConfigError(f"run {name!r} needs a scheme object with an id")
    if scheme_spec["id"] not in SCHEME_IDS:
        raise ConfigError(
            f"run {name!r}: unknown scheme id {scheme_spec['id']!r}; "
            f"known: {', '.join(SCHEME_IDS)}"
        )
    adversary_id = block.get("adversary")
    if adversary_id not in ADVERSARY_FACTORIES:
        raise ConfigError(
            f"run {name!r}: unknown adversary {adversary_id!r}; "
            f"known: {', '.join(sorted(ADVERSARY_FACTORIES))}"
        )
    try:
        experiment = ExperimentKind(block.get("experiment"))
    except ValueError:
        raise ConfigError(
            f"run {name!r}: unknown experiment {block.get('experiment')!r}; "
            f"known: {', '.join(k.value for k in ExperimentKind)}"
        ) from None
    trials = int(block.get("trials_per_arm", DEFAULT_TRIALS_PER_ARM))
    if trials < 1:
        raise ConfigError(f"run {name!r}: trials_per_arm must be >= 1")
    return RunConfig(
        name=name,
        experiment=experiment,
        scheme_spec=scheme_spec,
        adversary_id=adversary_id,
        trials_per_arm=trials,
        seed=int(block["seed"]),
        delay=_parse_delay(block.get("delay", {})),
        negligible_threshold=float(
            block.get("negligible_threshold", DEFAULT_THRESHOLD)
        ),
    )


def parse_config(text: str) -> SuiteConfig:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(document, dict) or "runs" not in document:
        raise ConfigError("config must be an object with a 'runs' list")
    runs = [_parse_run(block, i) for i, block in enumerate(document["runs"])]
    names = [run.name for run in runs]
    duplicates = {name for name in names if names.count(name) > 1}
    if duplicates:
        raise ConfigError(f"duplicate run names: {sorted(duplicates)}")
    return SuiteConfig(runs=tuple(runs))


def build_scheme(spec: dict, seed: int) -> Scheme:
    """Compose base scheme + optional leak profile + optional fixed-time
    wrapper from a config scheme block."""
    import random

    scheme_id = spec["id"]
    if scheme_id == "gm":
        scheme: Scheme = GmScheme(
            prime_bits=int(spec.get("prime_bits", 16)),
            message_bits=int(spec.get("message_bits", 8)),
        )
    elif scheme_id == "cs":
        scheme = CsScheme(
            group_bits=int(spec.get("group_bits", 32)),
            hash_id=spec.get("hash", "sha256"),
            setup_seed=seed,
        )
    else:
        raise ConfigError(f"unknown scheme id {scheme_id!r}")
    leak_block = spec.get("leak")
    if leak_block:
        scheme = leaky_wrap(
            scheme,
            LeakProfile(
                enc_leak=int(leak_block.get("enc_leak", 0)),
                dec_early_abort=bool(leak_block.get("dec_early_abort", False)),
            ),
        )
    if spec.get("fixed_time"):
        samples = int(spec.get("calibration_samples", CALIBRATION_SAMPLES))
        rng = random.Random(derive_trial_seed(seed, 2, 0))
        keypair = scheme.keygen(rng)
        messages = [scheme.sample_message(keypair.pk, rng) for _ in range(samples)]
        ciphertexts = []
        for message in messages[: max(samples // 4, 1)]:
            ledger = CostLedger()
            ciphertext = scheme.encrypt(keypair.pk, message, rng, ledger)
            ciphertexts.append(ciphertext)
            ciphertexts.append(scheme.mutate_ciphertext(keypair.pk, ciphertext, rng))
        calibration = calibrate_worst_case(scheme, keypair, messages, ciphertexts, rng)
        cfg = FixedTimeConfig(
            t_ft_encrypt=certified_encrypt_budget(
                scheme, keypair.pk, calibration, messages
            ),
            t_ft_decrypt=calibration.config.t_ft_decrypt,
        )
        scheme = wrap_fixed_time(scheme, cfg)
    return scheme


@dataclass
class RunResult:
    config: RunConfig
    scheme_label: str = ""
    record: ExperimentRecord | None = None
    error: str | None = None
    toy_parameters: bool = False


@dataclass
class SuiteReport:
    results: list[RunResult] = field(default_factory=list)

    @property
    def any_failed(self) -> bool:
        return any(result.error is not None for result in self.results)

    @property
    def toy_parameters(self) -> bool:
        return any(result.toy_parameters for result in self.results)


def _execute_run(run: RunConfig) -> RunResult:
    result = RunResult(config=run)
    try:
        scheme = build_scheme(run.scheme_spec, run.seed)
        result.scheme_label = scheme.name
        result.toy_parameters = scheme.security_bits < TOY_SECURITY_BITS
        factory = adversary_by_id(run.adversary_id)
        result.record = run_experiment(
            run.experiment,
            scheme,
            factory,
            trials_per_arm=run.trials_per_arm,
            master_seed=run.seed,
            delay_model=run.delay,
            threshold=run.negligible_threshold,
        )
    except Exception as exc:  # recorded, suite continues
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def run_suite(cfg: SuiteConfig, out_dir: str | Path | None = None,
              threads: int = 1) -> SuiteReport:
    """Execute every run; failures are recorded, not fatal to the suite."""
    if threads > 1 and cfg.runs:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_execute_run, cfg.runs))
    else:
        results = [_execute_run(run) for run in cfg.runs]
    report = SuiteReport(results=results)
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        for result in results:
            if result.record is None:
                continue
            transcript_file = out_path / f"{result.config.name}.transcript.json"
            transcript_file.write_text(
                json.dumps(result.record.to_dict(include_transcripts=True),
                           sort_keys=True, indent=1)
            )
    return report


def _report_rows(report: SuiteReport) -> list[dict]:
    rows = []
    for result in report.results:
        row = {
            "run": result.config.name,
            "scheme": result.scheme_label,
            "experiment": result.config.experiment.value,
            "adversary": result.config.adversary_id,
            "trials_per_arm": result.config.trials_per_arm,
            "status": "error" if result.error else "ok",
        }
        if result.record is not None:
            estimate = result.record.estimate
            row.update(
                advantage=estimate.advantage,
                p_exp0=estimate.p_exp0,
                p_exp1=estimate.p_exp1,
                ci95_halfwidth=estimate.ci95_halfwidth,
                negligible_threshold=estimate.negligible_threshold,
                verdict=negligible_check(estimate),
                win_rate=result.record.win_rate,
                fault_count=result.record.fault_count,
            )
        else:
            row.update(
                advantage=None, p_exp0=None, p_exp1=None, ci95_halfwidth=None,
                negligible_threshold=None, verdict=None, win_rate=None,
                fault_count=None,
            )
        if result.error:
            row["error"] = result.error
        rows.append(row)
    return rows


_CSV_COLUMNS = (
    "run", "scheme", "experiment", "adversary", "trials_per_arm", "advantage",
    "p_exp0", "p_exp1", "ci95_halfwidth", "negligible_threshold", "verdict",
    "win_rate", "fault_count", "status",
)

TOY_WARNING = (
    "WARNING: toy parameters (sub-64-bit keys); results demonstrate game "
    "mechanics, not real-world cryptographic strength"
)


def emit_report(report: SuiteReport, format: str = "text") -> str:
    rows = _report_rows(report)
    if format == "json":
        return json.dumps(
            {"toy_parameters": report.toy_parameters, "runs": rows},
            sort_keys=True, indent=1,
        )
    if format == "csv":
        import csv

        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=_CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
        return buffer.getvalue()
    if format == "text":
        headers = ("run", "scheme", "experiment", "adversary", "advantage",
                   "verdict", "status")
        table = [headers]
        for row in rows:
            advantage = row["advantage"]
            table.append((
                row["run"], row["scheme"], row["experiment"], row["adversary"],
                "-" if advantage is None else f"{advantage:.4f}",
                row["verdict"] or "-", row["status"],
            ))
        widths = [max(len(line[i]) for line in table) for i in range(len(headers))]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip()
            for line in table
        ]
        if report.toy_parameters:
            lines.append(TOY_WARNING)
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {format!r}")


def _cmd_run(args) -> int:
    try:
        cfg = parse_config(Path(args.config).read_text())
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    report = run_suite(cfg, out_dir=args.out_dir, threads=args.threads)
    document = emit_report(report, format=args.format)
    if args.out_dir:
        extension = {"json": "json", "csv": "csv", "text": "txt"}[args.format]
        (Path(args.out_dir) / f"report.{extension}").write_text(document)
    print(document, end="")
    return 2 if report.any_failed else 0


def _cmd_list_schemes(_args) -> int:
    print("gm   Goldwasser-Micali (prime_bits, message_bits)")
    print("cs   Cramer-Shoup (group_bits, hash)")
    print("modifiers: leak {enc_leak, dec_early_abort}, fixed_time (auto-calibrated)")
    return 0


def _cmd_list_adversaries(_args) -> int:
    for adversary_id in sorted(ADVERSARY_FACTORIES):
        print(adversary_id)
    return 0


def _cmd_calibrate(args) -> int:
    try:
        block = json.loads(Path(args.scheme_config).read_text())
        if "scheme" not in block or "seed" not in block:
            raise ConfigError("calibrate config needs 'scheme' and 'seed'")
    except (OSError, ConfigError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    import random

    seed = int(block["seed"])
    samples = int(block.get("samples", CALIBRATION_SAMPLES))
    scheme = build_scheme(block["scheme"], seed)
    rng = random.Random(derive_trial_seed(seed, 3, 0))
    keypair = scheme.keygen(rng)
    messages = [scheme.sample_message(keypair.pk, rng) for _ in range(samples)]
    ciphertexts = []
    for message in messages[: max(samples // 4, 1)]:
        ledger = CostLedger()
        ciphertext = scheme.encrypt(keypair.pk, message, rng, ledger)
        ciphertexts.append(ciphertext)
        ciphertexts.append(scheme.mutate_ciphertext(keypair.pk, ciphertext, rng))
    calibration = calibrate_worst_case(scheme, keypair, messages, ciphertexts, rng)
    print(json.dumps(calibration.to_dict(), sort_keys=True, indent=1))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ccagames",
        description="Indistinguishability games with a deterministic timing channel.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="execute a suite config")
    run_parser.add_argument("config", help="path to the suite JSON config")
    run_parser.add_argument("--format", choices=("json", "csv", "text"),
                            default="text")
    run_parser.add_argument("--out-dir", default=None,
                            help="directory for transcripts and the report")
    run_parser.add_argument("--threads", type=int, default=1)
    run_parser.set_defaults(handler=_cmd_run)

    list_schemes = subparsers.add_parser("list-schemes", help="known scheme ids")
    list_schemes.set_defaults(handler=_cmd_list_schemes)

    list_adversaries = subparsers.add_parser(
        "list-adversaries", help="known adversary ids"
    )
    list_adversaries.set_defaults(handler=_cmd_list_adversaries)

    calibrate = subparsers.add_parser(
        "calibrate", help="worst-case fixed-time targets for a scheme config"
    )
    calibrate.add_argument("scheme_config", help="path to a scheme JSON config")
    calibrate.set_defaults(handler=_cmd_calibrate)

    args = parser.parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
