import numpy as np
import pytest

from taillab.core.csvio import SCHEMA_LINE, read_csv, write_csv, write_key_values
from taillab.core.env_loader import get_env_flag, get_env_float, get_env_int, get_env_str, load_env
from taillab.core.errors import ConfigError, NumericFailure, SpectralAssumptionError, TaillabError
from taillab.core.grids import GridFunction, extend_uniform, grid_step, nearest_index, stencil_derivative, uniform_grid
from taillab.core.logs import get_logger
from taillab.core.workers import map_ordered, resolve_worker_count


def test_error_exit_codes():
    assert ConfigError("x").exit_code == 2
    assert SpectralAssumptionError("x").exit_code == 3
    assert NumericFailure("x").exit_code == 4
    assert isinstance(ConfigError("x"), ValueError)
    assert isinstance(NumericFailure("x"), TaillabError)
    assert NumericFailure("发散", hint="增大 ν").describe() == "发散（建议：增大 ν）"
    assert ConfigError("缺键").describe() == "缺键"


def test_load_env_keeps_existing(tmp_path, monkeypatch):
    env = tmp_path / ".env"
    env.write_text("# comment\nTAILLAB_A=1\nTAILLAB_B = 'two'\nnot a pair\nexport TAILLAB_C=\"x y\"\n", encoding="utf-8")
    monkeypatch.setenv("TAILLAB_A", "kept")
    monkeypatch.setenv("TAILLAB_B", "")
    monkeypatch.delenv("TAILLAB_B")
    monkeypatch.setenv("TAILLAB_C", "")
    monkeypatch.delenv("TAILLAB_C")
    assert load_env(env) == {"TAILLAB_B": "two", "TAILLAB_C": "x y"}
    assert get_env_str("TAILLAB_A") == "kept"
    assert get_env_str("TAILLAB_B") == "two"
    assert load_env(tmp_path / "missing.env") == {}


def test_typed_env_readers(monkeypatch):
    monkeypatch.setenv("TAILLAB_X", "12")
    monkeypatch.setenv("TAILLAB_Y", "1e-8")
    monkeypatch.setenv("TAILLAB_Z", "yes")
    monkeypatch.setenv("TAILLAB_BAD", "abc")
    assert get_env_int("TAILLAB_X", 0) == 12
    assert get_env_float("TAILLAB_Y", 0.0) == 1e-8
    assert get_env_flag("TAILLAB_Z") is True
    assert get_env_int("TAILLAB_BAD", 5) == 5
    assert get_env_float("TAILLAB_BAD", 0.5) == 0.5
    assert get_env_str("TAILLAB_UNSET_KEY", "d") == "d"


def test_worker_count(monkeypatch):
    monkeypatch.setenv("TAILLAB_THREADS", "2")
    assert resolve_worker_count(10) == 2
    assert resolve_worker_count(1) == 1
    assert resolve_worker_count(0) == 1
    assert resolve_worker_count(10, configured=3) == 3
    monkeypatch.setenv("TAILLAB_THREADS", "0")
    assert 1 <= resolve_worker_count(4) <= 4


def test_map_ordered_keeps_input_order():
    def work(i):
        return i * i

    assert map_ordered(work, range(20), max_workers=4) == [i * i for i in range(20)]
    assert map_ordered(work, [], max_workers=4) == []
    assert map_ordered(work, [3], max_workers=4) == [9]


def test_map_ordered_propagates_errors():
    def work(i):
        if i == 3:
            raise NumericFailure("坏点")
        return i

    with pytest.raises(NumericFailure):
        map_ordered(work, range(6), max_workers=3)


def test_csv_schema_and_determinism(tmp_path):
    t = np.linspace(0.0, 1.0, 5)
    first = write_csv(tmp_path / "a.csv", ["t", "psi"], [t, np.sin(t)])
    second = write_csv(tmp_path / "b.csv", ["t", "psi"], [t, np.sin(t)])
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text(encoding="utf-8").splitlines()[0] == SCHEMA_LINE
    header, data = read_csv(first)
    assert header == ["t", "psi"]
    assert np.array_equal(data[:, 1], np.sin(t))


def test_csv_validation(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "c.csv", ["t"], [np.zeros(2), np.zeros(2)])
    with pytest.raises(ValueError):
        write_csv(tmp_path / "c.csv", ["t", "psi"], [np.zeros(2), np.zeros(3)])
    bad = tmp_path / "bad.csv"
    bad.write_text("t,psi\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_csv(bad)
    header, data = read_csv(write_csv(tmp_path / "empty.csv", ["t"], [np.empty(0)]))
    assert header == ["t"] and data.size == 0


def test_key_values(tmp_path):
    path = write_key_values(tmp_path / "run" / "record.txt", {"version": "0.1.0", "tol": 0.1, "n": 3})
    assert path.read_text(encoding="utf-8") == "version=0.1.0\ntol=0.10000000000000001\nn=3\n"


def test_uniform_grid_helpers():
    grid = uniform_grid(-1.0, 1.0, 0.25)
    assert grid.size == 9 and grid_step(grid) == pytest.approx(0.25)
    assert nearest_index(grid, 0.0) == 4
    with pytest.raises(ValueError):
        nearest_index(grid, 0.1, tol=0.05)
    with pytest.raises(ValueError):
        uniform_grid(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        grid_step(np.array([0.0, 1.0, 3.0]))
    wide, offset = extend_uniform(grid, -2.0, 1.5)
    assert offset == 4
    assert np.array_equal(wide[offset : offset + grid.size], grid)
    assert wide[0] == pytest.approx(-2.0) and wide[-1] == pytest.approx(1.5)


def test_stencil_derivative_is_sixth_order():
    grid = uniform_grid(0.0, 2.0, 0.01)
    d = stencil_derivative(np.sin(grid), 0.01)
    assert np.max(np.abs(d[3:-3] - np.cos(grid[3:-3]))) <= 1e-11


def test_grid_function_moments():
    grid = uniform_grid(-1.0, 1.0, 0.01)
    f = GridFunction(grid, np.ones_like(grid))
    assert f.moment(0) == pytest.approx(2.0, rel=1e-10)
    assert f.moment(1) > f.moment(0)
    assert f.support == pytest.approx((-1.0, 1.0))
    with pytest.raises(ValueError):
        f.moment(99)
    with pytest.raises(ValueError):
        GridFunction(grid, np.full(grid.shape, np.nan))


def test_logger_namespace():
    assert get_logger("x").name == "taillab.x"
    assert get_logger("taillab.series").name == "taillab.series"
