import json
from fractions import Fraction

import pytest

from branchgas import BranchingLaw, regular


@pytest.fixture(scope="session")
def mixed_law():
    return BranchingLaw.from_pairs([(2, Fraction(1, 2)), (3, Fraction(1, 2))])


@pytest.fixture(scope="session")
def law_2_5():
    return BranchingLaw.from_pairs([(2, Fraction(2, 3)), (5, Fraction(1, 3))])


@pytest.fixture(scope="session")
def acceptance_laws(mixed_law, law_2_5):
    return (regular(2), regular(3), regular(5), mixed_law, law_2_5)


@pytest.fixture()
def law_file(tmp_path):
    def write(name, pairs):
        path = tmp_path / name
        path.write_text(json.dumps({"law": [{"q": q, "p": p} for q, p in pairs]}))
        return str(path)

    return write
