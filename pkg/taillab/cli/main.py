from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

import taillab
from taillab.cli.config import ExperimentConfig, check_required, load_config, resolve_stages
from taillab.cli.pipeline import run_pipeline_stream
from taillab.cli.selfcheck import run_selfcheck
from taillab.core.env_loader import get_env_str, load_env
from taillab.core.errors import TaillabError
from taillab.core.logs import set_level

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent

EXIT_OK = 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taillab",
        description="逆幂势一维波动方程的晚期尾部：频域构造、逆 Laplace 重建与时域验证。",
    )
    parser.add_argument("--version", action="version", version=f"taillab {taillab.__version__}")
    parser.add_argument("--log-level", default=None, help="日志级别，覆盖 TAILLAB_LOG_LEVEL")
    parser.add_argument("--threads", type=int, default=None, help="线程池上限，覆盖 TAILLAB_THREADS")
    parser.add_argument("--env-file", default=str(PROJECT_ROOT / ".env"), help="读取的 .env 文件")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="按配置文件执行全部请求的阶段")
    run.add_argument("config", help="INI 配置文件路径")
    run.add_argument("--quiet", action="store_true", help="只输出摘要")

    sub.add_parser("selfcheck", help="运行快速自检（精确解对照）")

    spectral = sub.add_parser("spectral", help="只执行谱假设检查")
    spectral.add_argument("config", help="INI 配置文件路径")

    decay = sub.add_parser("decay", help="执行时域模拟与衰减拟合（含所需的谱检查）")
    decay.add_argument("config", help="INI 配置文件路径")
    decay.add_argument("--quiet", action="store_true", help="只输出摘要")
    return parser


def _with_stages(config: ExperimentConfig, stages: str) -> ExperimentConfig:
    resolved, requested = resolve_stages(stages)
    check_required(resolved, config.numeric)
    return replace(config, stages=resolved, requested=requested)


def _run(config: ExperimentConfig, *, quiet: bool, out: TextIO) -> int:
    exit_code = EXIT_OK
    for event in run_pipeline_stream(config):
        if event.get("type") == "status" and not quiet:
            entry = event["entry"]
            print(f"[{entry['status']}] {entry['step']}: {entry['detail']}", file=out)
        elif event.get("type") == "result":
            print(event["summary"], end="", file=out)
            print(f"输出目录：{config.output_dir}", file=out)
        elif event.get("type") == "error":
            print(f"错误：{event['message']}", file=sys.stderr)
            print(f"输出目录：{config.output_dir}（run_record.txt、summary.txt 已写入）", file=out)
            exit_code = int(event.get("exit_code") or 1)
    return exit_code


def _selfcheck(out: TextIO) -> int:
    report = run_selfcheck()
    print(report.describe(), file=out)
    return EXIT_OK if report.ok else 1


def main(argv: Optional[Sequence[str]] = None, *, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    load_env(args.env_file)
    # the root logger was configured at import time, before .env was read
    set_level(args.log_level or get_env_str("TAILLAB_LOG_LEVEL", "INFO"))
    if args.threads is not None:
        os.environ["TAILLAB_THREADS"] = str(args.threads)

    try:
        if args.command == "selfcheck":
            return _selfcheck(out)
        config = load_config(args.config)
        if args.command == "spectral":
            return _run(_with_stages(config, "spectral"), quiet=False, out=out)
        if args.command == "decay":
            return _run(_with_stages(config, "decay"), quiet=args.quiet, out=out)
        return _run(config, quiet=args.quiet, out=out)
    except TaillabError as exc:
        print(f"错误：{exc.describe()}", file=sys.stderr)
        return exc.exit_code


def run_cli(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
