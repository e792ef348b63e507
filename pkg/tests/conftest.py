import os

import pytest
from hypothesis import HealthCheck, settings

from wolfsim.analysis import IndicatorParams
from wolfsim.params import SimGridConfig
from wolfsim.simulator import PhysicalConfig, ScenarioConfig

settings.register_profile(
    "wolfsim", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "wolfsim"))


def short_config(
    lengths=(0.197, 0.178),
    excitation="pluck",
    suppressors=(),
    total_time=0.02,
    wolf_note=1,
    **physical,
) -> ScenarioConfig:
    """Scenario with the reference instrument but a short duration."""
    grid = SimGridConfig(total_time=total_time)
    return ScenarioConfig(
        physical=PhysicalConfig(grid=grid, **physical),
        note_lengths=lengths,
        excitation=excitation,
        suppressors=suppressors,
        indicators=IndicatorParams(t_star=total_time / 2, wolf_note=wolf_note),
    )


@pytest.fixture
def make_config():
    return short_config


# acceptance criteria report: criterion -> list of (part, ok, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, part: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{p}: {'ok' if ok else 'FAILED'} ({d})" for p, ok, d in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {detail}")
