import json
from pathlib import Path

import pytest

from emlens.config import FIG1C, FIG2, build_config

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


def frozen_complex(pair):
    return complex(float(pair[0]), float(pair[1]))


@pytest.fixture(scope="session")
def fig2():
    return build_config(**FIG2)


@pytest.fixture(scope="session")
def fig1c():
    return build_config(**FIG1C)


@pytest.fixture(scope="session")
def frozen():
    return FROZEN
