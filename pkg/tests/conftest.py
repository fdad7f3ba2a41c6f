import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from compatqa.synth import SynthSpec, generate_synthetic_corpus  # noqa: E402

ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}  # id -> (PASS|FAIL|SKIP, detail)


@pytest.fixture(scope="session")
def synth_small():
    return generate_synthetic_corpus(SynthSpec(seed=3, n_questions=120, n_train_answers=800))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k[0]), k)):
        status, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"criterion {name}: {status}  {detail}")
