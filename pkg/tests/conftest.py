import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from profiler.dataset import NullMode, Table


@pytest.fixture
def t1() -> Table:
    """Reference toy table: A=[1,1,2,2], B=[a,a,b,b], C=[x,y,x,x]."""
    return Table.from_rows(
        "t1",
        ["A", "B", "C"],
        [
            ["1", "a", "x"],
            ["1", "a", "y"],
            ["2", "b", "x"],
            ["2", "b", "x"],
        ],
    )


@pytest.fixture
def t1_distinct() -> Table:
    return Table.from_rows(
        "t1",
        ["A", "B", "C"],
        [
            ["1", "a", "x"],
            ["1", "a", "y"],
            ["2", "b", "x"],
            ["2", "b", "x"],
        ],
        null_mode=NullMode.NULL_DISTINCT,
    )
