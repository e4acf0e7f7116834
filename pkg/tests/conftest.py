import shutil
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
FIXTURES = HERE / "fixtures"
for p in (HERE, FIXTURES):
    if str(p) not in sys.path:
        sys.path.insert(0, str(p))


def copy_synth(dest: Path) -> Path:
    """Copy the three-project synthetic fixture into ``dest``; returns its config path."""
    shutil.copytree(FIXTURES / "synth", dest, ignore=shutil.ignore_patterns("out"))
    return dest / "synth.toml"


def copy_minirepo(dest: Path) -> Path:
    dest.mkdir(parents=True, exist_ok=True)
    for name in ("minirepo.toml", "minirepo.jsonl", "minirepo-releases.json"):
        shutil.copy(FIXTURES / name, dest / name)
    return dest / "minirepo.toml"


@pytest.fixture
def synth_config(tmp_path) -> Path:
    return copy_synth(tmp_path / "synth")


@pytest.fixture
def minirepo_config(tmp_path) -> Path:
    return copy_minirepo(tmp_path / "mini")


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for an acceptance criterion, bypassing output capture."""
    def say(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return say
