"""Tests for the component library: bundled reference data and disk format."""

import json

import numpy as np
import pytest

from ipaudit.components import (
    Anchor,
    Component,
    load_component,
    load_library,
    reference_library,
    write_library,
)
from ipaudit.spectra import LossSpectrum, canonical_grid

# Published point values the bundled library must reproduce bit-exactly:
# (component, direction, wavelength_nm, loss_db)
POINT_VALUES = [
    ("cwdm1", "com->1550", 680.0, 10.0),
    ("cwdm2", "com->1550", 679.0, 10.7),
    ("cwdm3", "com->1550", 662.0, 9.7),
    ("dwdm", "com->1550", 665.0, 10.3),
    ("isolator-dual", "backward", 784.0, 44.5),
    ("circulator-4port", "port3->port1", 419.0, 31.1),
    ("voa-em", "0V", 761.0, 10.7),
    ("voa-eo", "0V", 557.0, 21.8),
]


def flat_component(comp_id="flat", kind="custom", db=10.0, floor=120.0, **kwargs):
    grid = canonical_grid()
    loss = LossSpectrum(grid, np.full(grid.size, db), np.zeros(grid.size, bool), floor_db=floor)
    return Component(id=comp_id, kind=kind, losses={"forward": loss},
                     provenance="synthetic", **kwargs)


class TestReferenceLibrary:
    def test_every_point_value_is_hit_exactly(self):
        lib = reference_library()
        for comp_id, direction, wl, db in POINT_VALUES:
            curve = lib[comp_id].losses[direction]
            idx = int(np.flatnonzero(curve.wavelengths_nm == wl)[0])
            assert curve.loss_db[idx] == db
            assert float(curve.loss_db.min()) == db
            assert curve.wavelengths_nm[np.argmin(curve.loss_db)] == wl

    def test_anchors_carry_the_point_values(self):
        lib = reference_library()
        for comp_id, direction, wl, db in POINT_VALUES:
            matches = [
                a for a in lib[comp_id].anchors
                if a.direction == direction and a.wavelength_nm == wl
            ]
            assert len(matches) == 1
            assert matches[0].loss_db == db
            assert matches[0].is_minimum

    def test_curves_are_synthetic_and_on_canonical_grid(self):
        grid = canonical_grid()
        for comp in reference_library().values():
            assert comp.provenance == "synthetic"
            for loss in comp.losses.values():
                assert np.array_equal(loss.wavelengths_nm, grid)

    def test_isolator_sits_mostly_at_the_floor(self):
        curve = reference_library()["isolator-dual"].losses["backward"]
        assert curve.floored.mean() > 0.8
        window = ~curve.floored
        wls = curve.wavelengths_nm[window]
        assert wls.min() > 760.0 and wls.max() <= 800.0

    def test_circulator_adjacent_ports_fully_floored(self):
        curve = reference_library()["circulator-4port"].losses["port2->port1"]
        assert curve.floored.all()
        assert np.all(curve.loss_db == curve.floor_db)

    def test_circulator_reverse_path_opens_in_the_blue(self):
        curve = reference_library()["circulator-4port"].losses["port3->port1"]
        blue = curve.wavelengths_nm <= 500.0
        assert not curve.floored[blue].any()
        assert np.all(curve.loss_db[blue] < 50.0)

    def test_scattering_attenuators_are_nearly_flat(self):
        curve = reference_library()["foa-scat-20db"].losses["forward"]
        assert curve.loss_db.min() >= 25.0 - 1e-9
        assert curve.loss_db.max() <= 27.0 + 1e-9

    def test_rebuild_is_deterministic(self):
        a = reference_library()
        b = reference_library()
        for comp_id in a:
            for direction in a[comp_id].losses:
                assert np.array_equal(
                    a[comp_id].losses[direction].loss_db,
                    b[comp_id].losses[direction].loss_db,
                )


class TestComponentType:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            flat_component(kind="teleporter")

    def test_rejects_unknown_provenance(self):
        grid = canonical_grid()
        loss = LossSpectrum(grid, np.zeros(grid.size), np.zeros(grid.size, bool))
        with pytest.raises(ValueError, match="provenance"):
            Component(id="x", kind="custom", losses={"forward": loss}, provenance="guess")

    def test_rejects_off_grid_spectra(self):
        loss = LossSpectrum([400.0, 401.0], [1.0, 2.0], [False, False])
        with pytest.raises(ValueError, match="canonical"):
            Component(id="x", kind="custom", losses={"forward": loss}, provenance="synthetic")

    def test_rejects_empty_losses(self):
        with pytest.raises(ValueError, match="no direction"):
            Component(id="x", kind="custom", losses={}, provenance="synthetic")

    def test_anchor_must_reference_a_direction(self):
        with pytest.raises(ValueError, match="unknown direction"):
            flat_component(anchors=(Anchor("backward", 500.0, 1.0),))


class TestLibraryRoundTrip:
    def test_reference_library_round_trips_bit_exactly(self, tmp_path):
        lib = reference_library()
        write_library(lib, tmp_path)
        back = load_library(tmp_path)
        assert sorted(back) == sorted(lib)
        for comp_id, comp in lib.items():
            other = back[comp_id]
            assert other.kind == comp.kind
            assert other.provenance == comp.provenance
            assert other.anchors == comp.anchors
            assert sorted(other.losses) == sorted(comp.losses)
            for direction, loss in comp.losses.items():
                got = other.losses[direction]
                assert np.array_equal(got.wavelengths_nm, loss.wavelengths_nm)
                assert np.array_equal(got.loss_db, loss.loss_db)
                assert np.array_equal(got.floored, loss.floored)
                assert got.floor_db == loss.floor_db

    def test_point_values_survive_the_disk_format(self, tmp_path):
        write_library(reference_library(), tmp_path)
        back = load_library(tmp_path)
        for comp_id, direction, wl, db in POINT_VALUES:
            curve = back[comp_id].losses[direction]
            idx = int(np.flatnonzero(curve.wavelengths_nm == wl)[0])
            assert curve.loss_db[idx] == db
            anchors = [
                a for a in back[comp_id].anchors
                if a.direction == direction and a.wavelength_nm == wl
            ]
            assert anchors[0].loss_db == db

    def test_direction_labels_with_arrows_round_trip(self, tmp_path):
        write_library(reference_library(), tmp_path)
        meta = json.loads((tmp_path / "cwdm1" / "metadata.json").read_text())
        assert "com->1550" in meta["directions"]
        assert "->" not in meta["directions"]["com->1550"]

    def test_missing_metadata_is_an_error(self, tmp_path):
        (tmp_path / "broken").mkdir()
        with pytest.raises(ValueError, match="metadata"):
            load_component(tmp_path / "broken")

    def test_missing_library_directory(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            load_library(tmp_path / "nowhere")

    def test_empty_library_directory(self, tmp_path):
        with pytest.raises(ValueError, match="no components"):
            load_library(tmp_path)

    def test_write_is_deterministic(self, tmp_path):
        lib = reference_library()
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        write_library(lib, a_dir)
        write_library(lib, b_dir)
        a_files = sorted(p.relative_to(a_dir) for p in a_dir.rglob("*") if p.is_file())
        b_files = sorted(p.relative_to(b_dir) for p in b_dir.rglob("*") if p.is_file())
        assert a_files == b_files
        for rel in a_files:
            assert (a_dir / rel).read_bytes() == (b_dir / rel).read_bytes()
