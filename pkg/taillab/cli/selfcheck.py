"""Fast exact-answer checks: free space, elementary transform pairs, the first series term."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from taillab.core.logs import get_logger
from taillab.core.workers import map_ordered
from taillab.frequency import wronskian_value
from taillab.ilt import bromwich
from taillab.potentials import free_spec
from taillab.series import first_term, nm0_coefficients, ray_grid
from taillab.timedomain import Bump, SimulationConfig, Zero, decay_fit, duhamel_solve, leapfrog_solve

logger = get_logger(__name__)

CheckOutcome = Tuple[bool, str]


class Check(NamedTuple):
    name: str
    invariant: str
    run: Callable[[], CheckOutcome]


@dataclass(frozen=True)
class CheckResult:
    name: str
    invariant: str
    ok: bool
    detail: str
    seconds: float


@dataclass(frozen=True)
class SelfcheckReport:
    checks: Tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def describe(self) -> str:
        lines = []
        for c in self.checks:
            mark = "通过" if c.ok else "失败"
            line = f"[{mark}] {c.name}：{c.detail}（{c.seconds:.2f}s）"
            if not c.ok:
                line += f"\n        违反：{c.invariant}"
            lines.append(line)
        lines.append(f"共 {len(self.checks)} 项，失败 {len(self.failures)} 项")
        return "\n".join(lines)


def _free_dalembert() -> CheckOutcome:
    bump = Bump(0.0, 2.0)
    config = SimulationConfig(half_width=5.0, h=0.01, k=0.005, final_time=2.0, recorders=(0.0, 3.0))
    result = leapfrog_solve(free_spec(3), bump, Zero(), config)
    err = max(abs(result.value_at(x, 2.0) - 0.5 * (bump(x - 2.0) + bump(x + 2.0))) for x in config.recorders)
    return err <= 1e-3, f"最大误差 {err:.2e}"


def _free_duhamel() -> CheckOutcome:
    result = duhamel_solve(free_spec(3), Bump(0.0, 1.0), Zero(), 2.0, h=0.05, support=1.0)
    return result.iterations == 1, f"{result.iterations} 次迭代"


def _transform_pair(
    sampler: Callable[[complex], complex], exact: Callable[[float], float], t: float, rtol: float
) -> CheckOutcome:
    value = float(bromwich(sampler, t))
    target = exact(t)
    err = abs(value - target) / abs(target)
    return err <= rtol, f"t={t:g}：{value:.10g} vs {target:.10g}，相对误差 {err:.1e}"


def _inverse_sqrt_pair() -> CheckOutcome:
    return _transform_pair(
        lambda e: math.sqrt(math.pi) / np.sqrt(complex(e) + 1.0),
        lambda t: math.exp(-t) / math.sqrt(t),
        5.0,
        1e-4,
    )


def _double_pole_pair() -> CheckOutcome:
    return _transform_pair(lambda e: 1.0 / (complex(e) + 1.0) ** 2, lambda t: t * math.exp(-t), 2.0, 1e-6)


def _simple_pole_pair() -> CheckOutcome:
    return _transform_pair(lambda e: 1.0 / (complex(e) + 1.0), lambda t: math.exp(-t), 2.0, 1e-6)


def _ramp_pair() -> CheckOutcome:
    return _transform_pair(lambda e: 1.0 / complex(e) ** 2, lambda t: t, 3.0, 1e-6)


def _free_wronskian() -> CheckOutcome:
    spec = free_spec(3)
    worst = 0.0
    for eps in (0.5, 2.0, 1.0 + 1.0j):
        worst = max(worst, abs(wronskian_value(spec, eps) - 2.0 * eps) / abs(2.0 * eps))
    return worst <= 1e-8, f"最大相对偏差 {worst:.1e}"


def _first_series_term() -> CheckOutcome:
    rho = ray_grid(10.0)
    worst = 0.0
    for m in (3, 4, 5):
        f = first_term(m, 0.0, rho)
        exact = rho ** (m - 1) / math.factorial(m - 1)
        worst = max(worst, float(np.max(np.abs(f.values - exact) / np.maximum(exact, 1e-300))))
    return worst <= 1e-12, f"最大相对偏差 {worst:.1e}"


def _exact_power_law() -> CheckOutcome:
    t = np.linspace(1.0, 1000.0, 4000)
    report = decay_fit(t, 7.0 * t**-3.0)
    ok = abs(report.exponent - 3.0) <= 1e-6 and abs(report.amplitude - 7.0) <= 1e-6
    return ok, f"指数 {report.exponent:.8f}，振幅 {report.amplitude:.8f}"


def _gamma_coefficient() -> CheckOutcome:
    c = nm0_coefficients(0, 1)
    ok = abs(c[0] + np.euler_gamma) <= 1e-12 and abs(c[1] + 1.0) <= 1e-12
    return ok, f"c0={c[0]:.12f}，c1={c[1]:.12f}"


CHECKS: Tuple[Check, ...] = (
    Check("free_dalembert", "V ≡ 0 时 leapfrog 给出 d'Alembert 解（误差 ≤ 1e-3）", _free_dalembert),
    Check("free_duhamel", "V ≡ 0 时 Duhamel 迭代一步收敛", _free_duhamel),
    Check("free_wronskian", "V ≡ 0 时 W(ε) = 2ε（相对 1e-8）", _free_wronskian),
    Check("ilt_inverse_sqrt", "ℒ⁻¹[Γ(1/2)(ε+1)^(-1/2)] = t^(-1/2) e^(-t)（相对 1e-4）", _inverse_sqrt_pair),
    Check("ilt_double_pole", "ℒ⁻¹[(ε+1)^(-2)] = t e^(-t)（相对 1e-6）", _double_pole_pair),
    Check("ilt_simple_pole", "ℒ⁻¹[(ε+1)^(-1)] = e^(-t)（相对 1e-6）", _simple_pole_pair),
    Check("ilt_ramp", "ℒ⁻¹[ε^(-2)] = t（相对 1e-6）", _ramp_pair),
    Check("series_first_term", "F_{m-1}(τ) = τ^(m-1)/(m-1)!", _first_series_term),
    Check("decay_exact_power", "7 t^(-3) 拟合得指数 3、振幅 7", _exact_power_law),
    Check("nm0_gamma", "n=0, l=1 系数为 (−γ, −1)", _gamma_coefficient),
)


def _run_one(check: Check) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = check.run()
    except Exception as exc:  # pylint: disable=broad-except
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    logger.debug("自检 %s：%s（%.2fs）", check.name, "通过" if ok else "失败", seconds)
    return CheckResult(check.name, check.invariant, bool(ok), detail, seconds)


def run_selfcheck(checks: Optional[Tuple[Check, ...]] = None, *, max_workers: Optional[int] = None) -> SelfcheckReport:
    results = map_ordered(_run_one, list(checks or CHECKS), max_workers=max_workers)
    report = SelfcheckReport(tuple(results))
    logger.info("自检完成：%d/%d 通过", len(results) - len(report.failures), len(results))
    return report
