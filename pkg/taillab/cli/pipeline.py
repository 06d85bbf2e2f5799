from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, Generator, List, NamedTuple, Optional, Tuple

import numpy as np

import taillab
from taillab.cli.config import ExperimentConfig
from taillab.core.csvio import write_csv, write_key_values
from taillab.core.errors import ConfigError, SpectralAssumptionError, TaillabError
from taillab.core.grids import uniform_grid
from taillab.core.logs import get_logger
from taillab.frequency import SpectralVerdict, check_spectral_assumptions
from taillab.ilt import reconstruct_time_solution
from taillab.potentials import Family, expected_exponents
from taillab.series import dual_samples, h_limits, reconstruct_s_report
from taillab.timedomain import DecayReport, SimulationConfig, SimulationResult, decay_fit, leapfrog_solve

logger = get_logger(__name__)

STAGE_LABELS = {
    "spectral": "谱假设检查",
    "series": "对偶级数",
    "ilt": "逆 Laplace 重建",
    "simulate": "时域模拟",
    "decay": "衰减拟合",
}
ASSUMPTION_TEXT = "要求算子 A = −d²/dx² + V 没有束缚态，且 0 既不是本征值也不是共振（W(0) ≠ 0）"


def status_log_entry(step: str, status: str, detail: str) -> Dict[str, str]:
    return {"step": step, "status": status, "detail": detail}


@dataclass
class RunState:
    config: ExperimentConfig
    verdict: Optional[SpectralVerdict] = None
    simulation: Optional[SimulationResult] = None
    decay: List[DecayReport] = field(default_factory=list)
    artifacts: List[Path] = field(default_factory=list)
    findings: List[str] = field(default_factory=list)

    def path(self, name: str) -> Path:
        return self.config.output_dir / name

    def csv(self, name: str, header: List[str], columns: List[np.ndarray]) -> None:
        self.artifacts.append(write_csv(self.path(name), header, columns))

    def key_values(self, name: str, values: Dict[str, object]) -> None:
        self.artifacts.append(write_key_values(self.path(name), values))


StageOutcome = Tuple[str, str]


def _recorder_header(recorders: Tuple[float, ...]) -> List[str]:
    return ["t"] + [f"psi@{x:g}" for x in recorders]


def _stage_spectral(state: RunState) -> StageOutcome:
    verdict = check_spectral_assumptions(state.config.potential)
    state.verdict = verdict
    eps = np.array([e for e, _ in verdict.scan])
    w = np.array([w for _, w in verdict.scan])
    state.csv("spectral_scan.csv", ["eps", "w_real", "w_imag"], [eps, w.real, w.imag])
    state.findings.append(f"谱检查：{verdict.describe()}")
    if not verdict.ok:
        raise SpectralAssumptionError(
            f"谱假设不成立：{verdict.describe()}。{ASSUMPTION_TEXT}",
            verdict=verdict,
            hint="换用排斥势或减小 well_depth",
        )
    return "success", verdict.describe()


def _stage_series(state: RunState) -> StageOutcome:
    spec = state.config.potential
    numeric = state.config.numeric
    if spec.family is not Family.PURE:
        return "skipped", f"对偶级数只支持纯幂尾，当前势族 {spec.family.value}"
    eps, x = float(numeric.series_eps), float(numeric.series_x)
    try:
        report = reconstruct_s_report(spec, eps, x)
        samples = dual_samples(spec, eps, numeric.dual_q)
    except ValueError as exc:
        raise ConfigError(f"series 阶段参数无效：{exc}") from exc
    h1, h2 = h_limits(spec, x)
    q = np.array([s.q for s in samples])
    big_h = np.array([s.H_value for s in samples])
    s_hat = np.array([s.s_hat_value for s in samples])
    state.csv(
        "series_dual.csv",
        ["q", "H_real", "H_imag", "s_hat_real", "s_hat_imag"],
        [q.real, big_h.real, big_h.imag, s_hat.real, s_hat.imag],
    )
    state.key_values(
        "series.txt",
        {
            "eps": eps,
            "x": x,
            "s_real": float(report.value.real),
            "s_imag": float(report.value.imag),
            "terms": report.terms,
            "tail_bound": float(report.tail_bound),
            "h1_limit": h1,
            "h2_limit": h2,
        },
    )
    state.findings.append(f"s(x={x:g}; ε={eps:g}) ≈ {report.value.real:.10g}（J={report.terms}，尾部界 {report.tail_bound:.1e}）")
    return "success", f"J={report.terms}，尾部界 {report.tail_bound:.1e}"


def _stage_ilt(state: RunState) -> StageOutcome:
    config = state.config
    numeric = config.numeric
    psi0_profile, psi1_profile = config.initial_data.pair()
    reach = max(config.initial_data.support, max(abs(x) for x in numeric.recorders)) + 1.0
    half = numeric.ilt_h * math.ceil(reach / numeric.ilt_h)
    grid = uniform_grid(-half, half, numeric.ilt_h)
    psi0, psi1 = psi0_profile.sample(grid), psi1_profile.sample(grid)
    ts = np.asarray(numeric.ilt_times, dtype=float)
    columns = [ts]
    for x0 in numeric.recorders:
        columns.append(
            reconstruct_time_solution(
                config.potential, psi0, psi1, x0, ts, t_switch=numeric.ilt_t_switch, verdict=state.verdict
            )
        )
    state.csv("ilt.csv", _recorder_header(numeric.recorders), columns)
    return "success", f"{ts.size} 个时刻 × {len(numeric.recorders)} 个记录点"


def _stage_simulate(state: RunState) -> StageOutcome:
    config = state.config
    numeric = config.numeric
    psi0, psi1 = config.initial_data.pair()
    support = config.initial_data.support
    sim_config = SimulationConfig(
        half_width=numeric.domain_half_width(support),
        h=numeric.h,
        k=numeric.k,
        final_time=float(numeric.final_time),
        recorders=numeric.recorders,
        record_every=numeric.record_every,
        energy_every=numeric.energy_every,
    )
    result = leapfrog_solve(config.potential, psi0, psi1, sim_config, support=support)
    state.simulation = result
    state.csv("trace.csv", _recorder_header(result.recorders), [result.times, *result.traces])
    state.csv("energy.csv", ["t", "energy"], [result.energy_times, result.energy])
    drift = result.energy_drift()
    state.findings.append(f"时域模拟：L={sim_config.half_width:g}，{sim_config.steps} 步，能量漂移 {drift:.2e}")
    return "success", f"{sim_config.steps} 步，能量漂移 {drift:.2e}"


def _stage_decay(state: RunState) -> StageOutcome:
    config = state.config
    numeric = config.numeric
    result = state.simulation
    if result is None:
        raise ConfigError("decay 阶段需要先运行 simulate")
    sine, cosine = expected_exponents(config.potential)
    expected = sine if config.initial_data.which == "psi1" else cosine
    # t = 0 has no logarithm
    times = result.times[1:]
    for i, x0 in enumerate(result.recorders):
        report = decay_fit(
            times, result.trace(x0)[1:], numeric.fit_window, amplitude_window=numeric.amplitude_window, x0=x0
        )
        state.decay.append(report)
        state.csv(f"local_exponent_{i}.csv", ["t", "p"], [report.local_times, report.local_exponent])
        verdict = "符合" if abs(report.exponent - expected) <= numeric.exponent_tolerance else "不符合"
        state.findings.append(
            f"x0={x0:g}：拟合指数 {report.exponent:.4f} ± {report.stderr:.1e}"
            f"（窗口 [{report.window[0]:g}, {report.window[1]:g}]），"
            f"exponent ≈ {expected:g} 预测{verdict}（容差 {numeric.exponent_tolerance:g}），振幅 {report.amplitude:.6g}"
        )
    rows = [r.as_dict() for r in state.decay]
    header = list(rows[0])
    state.csv("decay.csv", header + ["expected"], [np.array([row[k] for row in rows]) for k in header] + [np.full(len(rows), expected)])
    worst = max(abs(r.exponent - expected) for r in state.decay)
    return "success", f"预测指数 {expected:g}，最大偏差 {worst:.3f}"


STAGE_RUNNERS: Dict[str, Callable[[RunState], StageOutcome]] = {
    "spectral": _stage_spectral,
    "series": _stage_series,
    "ilt": _stage_ilt,
    "simulate": _stage_simulate,
    "decay": _stage_decay,
}


def _summary_text(state: RunState, status_log: List[Dict[str, str]]) -> str:
    config = state.config
    spec = config.potential
    initial = config.initial_data
    lines = [
        f"taillab {taillab.__version__} 运行摘要",
        f"配置：{config.source}",
        f"势：{spec.family.value}，m={spec.m}，v+={spec.v_plus:g}，v-={spec.v_minus:g}，well_depth={spec.well_depth:g}",
        f"初值：{initial.kind}（{initial.which}），center={initial.center:g}，width={initial.width:g}",
        "",
        "阶段：",
    ]
    lines += [f"  {e['step']}: {e['status']}（{e['detail']}）" for e in status_log if e["status"] != "running"]
    if state.findings:
        lines += ["", "结果："] + [f"  {line}" for line in state.findings]
    return "\n".join(lines) + "\n"


def _run_record(state: RunState, started_at: str, exit_code: int, status_log: List[Dict[str, str]]) -> Dict[str, object]:
    record: Dict[str, object] = {
        "version": taillab.__version__,
        "started_at": started_at,
        "finished_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "exit_code": exit_code,
    }
    record.update(state.config.flat())
    for entry in status_log:
        if entry["status"] != "running":
            record[f"stage.{entry['step']}"] = f"{entry['status']}: {entry['detail']}"
    return record


def run_pipeline_stream(config: ExperimentConfig) -> Generator[Dict[str, object], None, None]:
    """Run the configured stages in order, yielding status entries, then one result or error event.

    A failing stage stops the run; the remaining stages are marked skipped.
    summary.txt and run_record.txt are written either way.
    """
    status_log: List[Dict[str, str]] = []
    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    state = RunState(config)

    def _emit(step: str, status: str, detail: str) -> Dict[str, str]:
        entry = status_log_entry(step, status, detail)
        status_log.append(entry)
        return entry

    config.output_dir.mkdir(parents=True, exist_ok=True)
    added = [s for s in config.stages if s not in config.requested]
    detail = f"阶段：{' → '.join(config.stages)}"
    if added:
        detail += f"（依赖补入：{', '.join(added)}）"
    yield {"type": "status", "entry": _emit("prepare", "success", detail)}

    error = ""
    exit_code = 0
    remaining = list(config.stages)
    try:
        while remaining:
            stage = remaining[0]
            yield {"type": "status", "entry": _emit(stage, "running", f"{STAGE_LABELS[stage]}...")}
            logger.info("阶段 %s 开始", stage)
            status, stage_detail = STAGE_RUNNERS[stage](state)
            remaining.pop(0)
            yield {"type": "status", "entry": _emit(stage, status, stage_detail)}
    except TaillabError as exc:
        error, exit_code = exc.describe(), exc.exit_code
    except Exception as exc:  # pylint: disable=broad-except
        logger.exception("阶段 %s 异常", remaining[0])
        error, exit_code = f"{type(exc).__name__}: {exc}", 1

    if error:
        yield {"type": "status", "entry": _emit(remaining[0], "error", error)}
        for stage in remaining[1:]:
            yield {"type": "status", "entry": _emit(stage, "skipped", "前序阶段失败")}

    summary = _summary_text(state, status_log)
    state.artifacts.append(write_key_values(state.path("run_record.txt"), _run_record(state, started_at, exit_code, status_log)))
    summary_path = state.path("summary.txt")
    summary_path.write_text(summary, encoding="utf-8")
    state.artifacts.append(summary_path)

    if error:
        yield {"type": "error", "message": error, "exit_code": exit_code, "status_log": status_log}
        return
    yield {
        "type": "result",
        "summary": summary,
        "artifacts": [str(p) for p in state.artifacts],
        "decay": [r.as_dict() for r in state.decay],
        "status_log": status_log,
    }


class PipelineOutcome(NamedTuple):
    error: str
    exit_code: int
    summary: str
    artifacts: List[str]
    status_log: List[Dict[str, str]]


def consume_pipeline_stream(config: ExperimentConfig) -> PipelineOutcome:
    error = ""
    exit_code = 0
    summary = ""
    artifacts: List[str] = []
    status_log: List[Dict[str, str]] = []

    for event in run_pipeline_stream(config):
        if event.get("type") == "status" and event.get("entry"):
            status_log.append(event["entry"])
        if event.get("type") == "result":
            summary = str(event.get("summary") or "")
            artifacts = list(event.get("artifacts") or [])
        if event.get("type") == "error":
            error = str(event.get("message") or "")
            exit_code = int(event.get("exit_code") or 1)
    if not summary:
        path = config.output_dir / "summary.txt"
        summary = path.read_text(encoding="utf-8") if path.exists() else ""
    return PipelineOutcome(error, exit_code, summary, artifacts, status_log)