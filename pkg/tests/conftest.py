import sys

import pytest

from distprop.fitting import GroupSummary

# Group summaries as printed in the worked examples (exposed first).
BIRTHWEIGHT = (GroupSummary(483, 3266.965, 437.7330), GroupSummary(975, 3452.728, 436.4585))
INV_BMI_PARITY = (GroupSummary(891, 0.04439543, 0.005884324),
                  GroupSummary(890, 0.04295239, 0.006217391))
INV_BMI_EMPLOY = (GroupSummary(851, 0.04385758, 0.005646543),
                  GroupSummary(709, 0.04338577, 0.006462314))
BMI_PARITY = (GroupSummary(890, 23.84148, 4.012678), GroupSummary(891, 22.96176, 3.388547))
APGAR = (GroupSummary(628, 0.4331210, 0.9108517), GroupSummary(1277, 0.4628034, 0.9282585))

SN_ALPHA_BW = 0.8668926
SN_ALPHA_BMI = 4.119313
GAMMA_ALPHA_APGAR = 0.2371702


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def birthweight():
    return BIRTHWEIGHT


@pytest.fixture
def inv_bmi_employ():
    return INV_BMI_EMPLOY


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
