import random
from pathlib import Path

import pytest
from hypothesis import settings

from khops.diagram import braid_closure, parse_pd

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

TREFOIL_PD = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"


def load_fixture(name):
    out = {}
    for line in (FIXTURES / name).read_text().splitlines():
        if line.strip():
            d = parse_pd(line)
            out[d.name] = d
    return out


def random_braids(count=50, max_crossings=8, seed=20240611):
    """Seeded random braid-closure diagrams with at most ``max_crossings``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        strands = rng.randint(2, 4)
        length = rng.randint(2, max_crossings)
        word = [rng.choice([1, -1]) * rng.randint(1, strands - 1) for _ in range(length)]
        d = braid_closure(strands, word, name=f"braid{len(out)}:{strands}:{word}")
        if d.n_crossings and d.n_crossings <= max_crossings:
            out.append(d)
    return out


@pytest.fixture(autouse=True)
def _cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("KHOPS_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def rolfsen():
    return load_fixture("rolfsen_le8.pd")


@pytest.fixture(scope="session")
def targets():
    return load_fixture("targets.pd")
