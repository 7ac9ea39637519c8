import numpy as np
import pytest

from roadsight.cloud import ScanCloud
from roadsight.errors import FormatError
from roadsight.io import (load_cloud, load_mesh, load_ply, load_trajectory_csv,
                          load_xyz_csv, save_obj_mesh, save_ply_mesh,
                          save_plot_data, save_profile_csv, save_trajectory_csv,
                          save_xyz_csv)
from roadsight.mesh import SceneMesh
from roadsight.sight import VisibilityProfile
from roadsight.synth import gen_straight
from tests.conftest import straight_traj


@pytest.fixture
def small_mesh() -> SceneMesh:
    verts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1.0, 0], [1.0, 1.0, 0.5]])
    return SceneMesh(verts, np.array([[0, 1, 2], [1, 3, 2]]))


class TestPly:
    def test_ascii_roundtrip(self, small_mesh, tmp_path):
        path = tmp_path / "mesh.ply"
        save_ply_mesh(small_mesh, path)
        verts, faces = load_ply(path)
        np.testing.assert_array_equal(verts, small_mesh.vertices)
        np.testing.assert_array_equal(faces, small_mesh.triangles)

    def test_binary_roundtrip(self, small_mesh, tmp_path):
        path = tmp_path / "mesh.ply"
        save_ply_mesh(small_mesh, path, binary=True)
        verts, faces = load_ply(path)
        np.testing.assert_array_equal(verts, small_mesh.vertices)
        np.testing.assert_array_equal(faces, small_mesh.triangles)

    def test_truncated_header_cites_offset(self, tmp_path):
        path = tmp_path / "broken.ply"
        path.write_bytes(b"ply\nformat ascii 1.0\nelement vertex 3\n")
        with pytest.raises(FormatError) as err:
            load_ply(path)
        assert "byte offset" in str(err.value)

    def test_truncated_binary_data(self, small_mesh, tmp_path):
        path = tmp_path / "mesh.ply"
        save_ply_mesh(small_mesh, path, binary=True)
        blob = path.read_bytes()
        path.write_bytes(blob[:len(blob) - 40])
        with pytest.raises(FormatError) as err:
            load_ply(path)
        assert "truncated" in str(err.value)

    def test_not_a_ply(self, tmp_path):
        path = tmp_path / "nope.ply"
        path.write_bytes(b"OFF\n0 0 0\n")
        with pytest.raises(FormatError):
            load_ply(path)

    def test_float32_vertices_with_extra_props(self, tmp_path):
        path = tmp_path / "cloud.ply"
        header = ("ply\nformat ascii 1.0\nelement vertex 2\n"
                  "property float x\nproperty float y\nproperty float z\n"
                  "property float intensity\nend_header\n")
        path.write_text(header + "1 2 3 9\n4 5 6 8\n")
        verts, faces = load_ply(path)
        np.testing.assert_allclose(verts, [[1, 2, 3], [4, 5, 6]])
        assert faces is None

    def test_mesh_requires_faces(self, tmp_path):
        path = tmp_path / "cloud.ply"
        header = ("ply\nformat ascii 1.0\nelement vertex 1\n"
                  "property float x\nproperty float y\nproperty float z\n"
                  "end_header\n1 2 3\n")
        path.write_text(header)
        with pytest.raises(FormatError):
            load_mesh(path)


class TestObj:
    def test_roundtrip(self, small_mesh, tmp_path):
        path = tmp_path / "mesh.obj"
        save_obj_mesh(small_mesh, path)
        again = load_mesh(path)
        np.testing.assert_array_equal(again.vertices, small_mesh.vertices)
        np.testing.assert_array_equal(again.triangles, small_mesh.triangles)


class TestXyzCsv:
    def test_roundtrip_with_profiles(self, tmp_path):
        cloud = gen_straight(5.0, 2.0, 1.0, kind="cloud").cloud
        path = tmp_path / "cloud.csv"
        save_xyz_csv(cloud, path)
        again = load_xyz_csv(path)
        np.testing.assert_allclose(again.xyz, cloud.xyz, atol=1e-6)
        np.testing.assert_array_equal(again.profile_id, cloud.profile_id)

    def test_bad_row_cites_line(self, tmp_path):
        path = tmp_path / "cloud.csv"
        path.write_text("x,y,z\n1,2,3\n4,oops,6\n")
        with pytest.raises(FormatError) as err:
            load_xyz_csv(path)
        assert "line 3" in str(err.value)

    def test_ply_dispatch(self, tmp_path):
        path = tmp_path / "pts.ply"
        header = ("ply\nformat ascii 1.0\nelement vertex 2\n"
                  "property double x\nproperty double y\nproperty double z\n"
                  "end_header\n0 0 0\n1 1 1\n")
        path.write_text(header)
        cloud = load_cloud(path)
        assert isinstance(cloud, ScanCloud) and len(cloud) == 2


class TestTrajectoryCsv:
    def test_roundtrip(self, tmp_path):
        traj = straight_traj(100.0, 5.0)
        path = tmp_path / "traj.csv"
        save_trajectory_csv(traj, path)
        again = load_trajectory_csv(path)
        np.testing.assert_allclose(again.s, traj.s, atol=1e-6)
        np.testing.assert_allclose(again.xyz, traj.xyz, atol=1e-6)
        np.testing.assert_allclose(again.kappa, traj.kappa, atol=1e-9)
        np.testing.assert_allclose(again.grade, traj.grade, atol=1e-9)

    def test_header_contract(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("s,x,y,heading_deg\n0,0,0,0\n")
        with pytest.raises(FormatError) as err:
            load_trajectory_csv(path)
        assert "line 1" in str(err.value)

    def test_bad_value_cites_line(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("s,x,y,z,heading_deg\n0,0,0,0,0\n1,x,0,0,0\n")
        with pytest.raises(FormatError) as err:
            load_trajectory_csv(path)
        assert "line 3" in str(err.value)

    def test_too_few_rows(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("s,x,y,z,heading_deg\n0,0,0,0,0\n")
        with pytest.raises(FormatError):
            load_trajectory_csv(path)


class TestProfileOutputs:
    def _profile(self) -> VisibilityProfile:
        return VisibilityProfile(
            s=np.array([0.0, 5.0, 10.0]),
            available=np.array([400.0, 112.0, 90.5]),
            required=np.array([91.0, 110.965, 95.25]),
            fixed_distances=(50.0,),
            fixed_visible=np.array([[True], [True], [False]]),
        )

    def test_csv_three_fraction_digits(self, tmp_path):
        path = tmp_path / "profile.csv"
        save_profile_csv(self._profile(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "s,available_m,required_m,deficit,vis_at_50"
        assert lines[1] == "0.000,400.000,91.000,false,true"
        assert lines[2] == "5.000,112.000,110.965,false,true"
        assert lines[3] == "10.000,90.500,95.250,true,false"

    def test_empty_profile_writes_header_only(self, tmp_path):
        profile = VisibilityProfile(s=np.array([]))
        path = tmp_path / "profile.csv"
        save_profile_csv(profile, path)
        lines = path.read_text().splitlines()
        assert lines == ["s,available_m,required_m,deficit"]

    def test_plot_data_blocks(self, tmp_path):
        path = tmp_path / "plot.dat"
        save_plot_data(self._profile(), path)
        text = path.read_text()
        assert "# curve: available" in text
        assert "# curve: required" in text
        blocks = text.split("\n\n\n")
        assert len(blocks) == 2
        first_rows = blocks[0].splitlines()[1:]
        assert first_rows[0] == "0.000 400.000"
        assert all(len(r.split()) == 2 for r in first_rows)


def test_profile_csv_infeasible_station_has_empty_cells(tmp_path):
    profile = VisibilityProfile(
        s=np.array([0.0, 5.0]),
        available=np.array([120.0, 120.0]),
        required=np.array([100.0, np.nan]),
        infeasible=np.array([False, True]),
    )
    path = tmp_path / "profile.csv"
    save_profile_csv(profile, path)
    lines = path.read_text().splitlines()
    assert lines[1] == "0.000,120.000,100.000,false"
    assert lines[2] == "5.000,120.000,,"
