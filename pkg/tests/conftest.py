import numpy as np
import pytest

from roadsight.mesh import SceneMesh
from roadsight.trajectory import Trajectory

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}: {name}")


def wall_mesh(x: float, y0: float, y1: float, z0: float, z1: float) -> SceneMesh:
    """Vertical rectangular wall at fixed x, split into two triangles."""
    verts = np.array([[x, y0, z0], [x, y1, z0], [x, y1, z1], [x, y0, z1]])
    return SceneMesh(verts, np.array([[0, 1, 2], [0, 2, 3]]))


def straight_traj(length: float = 200.0, step: float = 5.0) -> Trajectory:
    s = np.arange(0.0, length + step / 2, step)
    xyz = np.column_stack([s, np.zeros_like(s), np.zeros_like(s)])
    return Trajectory(s, xyz, kappa=np.zeros_like(s), grade=np.zeros_like(s))


@pytest.fixture
def empty_mesh_index():
    from roadsight.bvh import build_index
    from roadsight.mesh import empty_mesh
    return build_index(empty_mesh())
