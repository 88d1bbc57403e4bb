import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

BASE_SNR = 21.647577724217363  # snr_for_ber(0.01)
SNR_13DB = 10 ** 1.3


@pytest.fixture
def base_snr():
    return BASE_SNR


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results, key=lambda n: int(n[2:])):
        ok, detail = results[name]
        terminalreporter.write_line(f"{name} {'PASS' if ok else 'FAIL'}: {detail}")
