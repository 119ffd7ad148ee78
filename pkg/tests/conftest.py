import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def tmp_dataset(tmp_path):
    def _write(stream, name="data.bin"):
        from skewsim.datagen import save_tuples
        path = tmp_path / name
        save_tuples(stream, path)
        return str(path)
    return _write
