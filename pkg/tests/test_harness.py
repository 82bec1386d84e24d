"""Monte Carlo harness tests: determinism, CSV, resume, required Eb/N0."""

import dataclasses

import numpy as np
import pytest

from mimo_ofdm import harness
from mimo_ofdm.config import SystemConfig, validate
from mimo_ofdm.harness import (BerRecord, InsufficientData, SchemaMismatch,
                               point_rng, preset_config, read_ber_csv,
                               read_required_csv, required_ebn0,
                               required_ebn0_table, run_point, run_sweep,
                               sweep_points, write_ber_csv,
                               write_required_csv)


def tiny_config(**kw):
    base = dict(scheme="vblast", bits_per_symbol=4, n_subcarriers=64,
                min_error_events=20, max_frames=30,
                ebn0_grid_db=(6.0, 10.0), seed=1234)
    base.update(kw)
    return validate(SystemConfig(**base))


def test_run_point_zero_errors_at_high_snr():
    cfg = tiny_config(max_frames=10)
    recs = run_point(cfg, 30.0, point_rng(cfg, 0), frames_per_batch=5)
    assert len(recs) == cfg.n_iterations
    assert all(r.bit_errors == 0 for r in recs)
    assert all(r.bits_simulated == 10 * cfg.info_frame_len for r in recs)


def test_run_point_deterministic():
    cfg = tiny_config(max_frames=12)
    a = run_point(cfg, 6.0, point_rng(cfg, 3), frames_per_batch=4)
    b = run_point(cfg, 6.0, point_rng(cfg, 3), frames_per_batch=4)
    for ra, rb in zip(a, b):
        assert dataclasses.replace(ra, wall_time_s=0) == \
            dataclasses.replace(rb, wall_time_s=0)


def test_run_point_stops_on_error_budget():
    cfg = tiny_config(min_error_events=5, max_frames=1000)
    recs = run_point(cfg, 0.0, point_rng(cfg, 1), frames_per_batch=2)
    # low SNR: the very first batches blow past the error budget
    assert recs[-1].bit_errors >= 5
    assert recs[-1].frames < 1000


def test_sweep_points_stable_order():
    cfg = tiny_config()
    pts = sweep_points(cfg, schemes=["vblast", "golden"],
                       offsets=[(0.0, 0.0), (0.01, 0.0)])
    assert [p.index for p in pts] == list(range(8))
    assert pts[0].scheme == "vblast" and pts[-1].scheme == "golden"


def test_run_sweep_writes_csv_and_resumes(tmp_path):
    out = tmp_path / "ber.csv"
    cfg = tiny_config(max_frames=6, min_error_events=3)
    records, computed = run_sweep(cfg, out)
    assert computed == 2
    assert len(records) == 2 * cfg.n_iterations

    # resume with nothing missing recomputes nothing
    records2, computed2 = run_sweep(cfg, out)
    assert computed2 == 0
    assert records2 == records

    # drop the last row: only that point is recomputed, values identical
    lines = out.read_text().strip().splitlines()
    out.write_text("\n".join(lines[:-1]) + "\n")
    records3, computed3 = run_sweep(cfg, out)
    assert computed3 == 1
    assert [dataclasses.replace(r, wall_time_s=0) for r in records3] == \
        [dataclasses.replace(r, wall_time_s=0) for r in records]


def test_ber_csv_round_trip(tmp_path):
    path = tmp_path / "r.csv"
    recs = [BerRecord("golden", 0.01, 0.0, 8.0, 1, 1000, 17, 5, 42, 0.5),
            BerRecord("golden", 0.01, 0.0, 8.0, 2, 1000, 3, 5, 42, 0.5)]
    write_ber_csv(path, recs)
    assert read_ber_csv(path) == recs


def test_csv_schema_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# schema: something-else/9\nscheme\n")
    with pytest.raises(SchemaMismatch):
        read_ber_csv(path)


def rec(ebn0, errors, bits=10_000, iteration=3, cfo=0.01, sfo=0.0):
    return BerRecord("golden", cfo, sfo, ebn0, iteration, bits, errors,
                     10, 1, 0.0)


def test_required_ebn0_log_linear_midpoint():
    records = [rec(10.0, 100), rec(12.0, 1)]   # 1e-2 and 1e-4
    out = required_ebn0(records, 1e-3)
    assert out.required_ebn0_db == pytest.approx(11.0)
    assert not out.floor
    assert out.axis == "cfo_rel" and out.offset == 0.01


def test_required_ebn0_floor_marker():
    records = [rec(10.0, 400), rec(12.0, 300), rec(14.0, 250)]
    out = required_ebn0(records, 1e-3)
    assert out.floor and out.required_ebn0_db is None


def test_required_ebn0_uses_final_iteration():
    records = [rec(10.0, 100, iteration=1), rec(12.0, 80, iteration=1),
               rec(10.0, 100, iteration=3), rec(12.0, 1, iteration=3)]
    out = required_ebn0(records, 1e-3)
    assert out.required_ebn0_db == pytest.approx(11.0)


def test_required_ebn0_monotone_synthetic_curve():
    bers = [3e-2, 8e-3, 2e-3, 4e-4, 6e-5]
    records = [rec(e, int(b * 1e6), bits=10**6)
               for e, b in zip((8, 10, 12, 14, 16), bers)]
    out = required_ebn0(records, 1e-3)
    assert 12.0 < out.required_ebn0_db < 14.0


def test_required_ebn0_insufficient_data():
    with pytest.raises(InsufficientData):
        required_ebn0([rec(10.0, 100)], 1e-3)
    with pytest.raises(InsufficientData):
        required_ebn0([rec(10.0, 1), rec(12.0, 0)], 1e-3)  # already below


def test_required_ebn0_sfo_axis():
    records = [rec(10.0, 100, cfo=0.0, sfo=0.05), rec(12.0, 1, cfo=0.0, sfo=0.05)]
    out = required_ebn0(records, 1e-3)
    assert out.axis == "sfo_rel" and out.offset == 0.05


def test_required_table_and_csv(tmp_path):
    records = ([rec(10.0, 100), rec(12.0, 1)]
               + [rec(10.0, 300, cfo=0.02), rec(12.0, 200, cfo=0.02)])
    table = required_ebn0_table(records, 1e-3)
    assert len(table) == 2
    path = tmp_path / "req.csv"
    write_required_csv(path, table)
    assert read_required_csv(path) == table


def test_presets():
    desk = preset_config("desk")
    assert desk.n_subcarriers == 64 and desk.ici_window is None
    paper = preset_config("paper")
    assert paper.n_subcarriers == 2048 and paper.ici_window == 32
    with pytest.raises(ValueError):
        preset_config("napkin")


def test_run_sweep_worker_pool_matches_serial(tmp_path):
    cfg = tiny_config(max_frames=4, min_error_events=2)
    serial, _ = run_sweep(cfg, tmp_path / "serial.csv",
                          offsets=[(0.0, 0.0), (0.01, 0.0)], workers=1)
    pooled, _ = run_sweep(cfg, tmp_path / "pooled.csv",
                          offsets=[(0.0, 0.0), (0.01, 0.0)], workers=2,
                          resume=False)
    strip = lambda recs: [dataclasses.replace(r, wall_time_s=0) for r in recs]
    assert strip(pooled) == strip(serial)


def test_interleaver_fixed_per_seed():
    cfg = tiny_config(seed=77)
    a = harness.make_interleaver(cfg)
    b = harness.make_interleaver(cfg)
    assert np.array_equal(a, b)
    c = harness.make_interleaver(tiny_config(seed=78))
    assert not np.array_equal(a, c)
