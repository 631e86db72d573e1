import pytest

from greedypaths import ExplicitField


@pytest.fixture
def worked_field():
    """The explicit d=2 field behind the worked n=3 example (best value 9 along
    (0,0)->(1,0)->(2,0)); everything unlisted weighs 0."""
    values = {
        (0, 0): 1.0,
        (1, 0): 5.0,
        (2, 0): 3.0,
        (1, 1): -4.0,
        (1, -1): 2.0,
        (-1, 0): -2.0,
        (0, 1): 0.0,
        (0, -1): -1.0,
    }
    return ExplicitField(values, dimension=2, default=0.0)
