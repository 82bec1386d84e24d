"""Monte Carlo orchestration: BER sweeps, stopping rules, CSV, required Eb/N0.

A sweep walks (scheme x impairment x Eb/N0) points.  Every point owns an RNG
stream derived from the master seed and its position in the grid, so records
are bit-for-bit reproducible regardless of execution order or worker count,
and a partially written CSV can be resumed: complete points are kept,
missing ones recomputed.

BER is counted on information bits after the decoder, per receiver
iteration.  A point stops after ``min_error_events`` final-iteration bit
errors or ``max_frames`` frames, whichever comes first.
"""

from __future__ import annotations

import csv
import dataclasses
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import channel, coding, mapping, receiver, stbc
from .config import (SystemConfig, bits_for_eta, derived_noise_variance,
                     validate)

BER_SCHEMA = "mimo-ofdm-ber/1"
REQ_SCHEMA = "mimo-ofdm-reqebn0/1"

_INTERLEAVER_KEY = 0
_POINT_KEY = 1


class SchemaMismatch(ValueError):
    pass


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    cfo_rel: float
    sfo_rel: float
    ebn0_db: float
    iteration: int
    bits_simulated: int
    bit_errors: int
    frames: int
    seed: int
    wall_time_s: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated


@dataclass(frozen=True)
class RequiredEbn0Record:
    scheme: str
    axis: str             # "cfo_rel" or "sfo_rel"
    offset: float
    target_ber: float
    required_ebn0_db: float | None   # None marks a BER floor
    floor: bool


# ---------------------------------------------------------------------------
# per-point simulation

def make_interleaver(config: SystemConfig) -> np.ndarray:
    """The frame interleaver, drawn once per master seed."""
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed,
                               spawn_key=(_INTERLEAVER_KEY,)))
    return coding.random_permutation(config.coded_frame_len, rng)


def point_rng(config: SystemConfig, point_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed,
                               spawn_key=(_POINT_KEY, point_index)))


class _RunContext:
    """Heavy per-config precomputes shared across the Eb/N0 grid."""

    def __init__(self, config: SystemConfig):
        self.config = config
        self.code = coding.ConvCode()
        self.const = mapping.make_constellation(config.bits_per_symbol)
        self.disp = stbc.dispersion_matrix(config.scheme)
        self.interleaver = make_interleaver(config)
        self.kernel = channel.kernel_matrix(
            config.n_subcarriers, config.cfo_rel, config.sfo_rel,
            config.ici_window)
        self.phi_nn = channel.kernel_diagonal(
            config.n_subcarriers, config.cfo_rel, config.sfo_rel)
        if config.ici_window is not None and (config.cfo_rel or config.sfo_rel):
            kept = channel.truncated_energy_fraction(
                config.n_subcarriers, config.cfo_rel, config.sfo_rel,
                config.ici_window)
            if kept < 0.99:
                warnings.warn(
                    f"ici_window={config.ici_window} keeps only "
                    f"{kept:.1%} of the off-diagonal kernel energy",
                    stacklevel=2)


def run_point(config: SystemConfig, ebn0_db: float,
              rng: np.random.Generator,
              frames_per_batch: int = 32,
              context: _RunContext | None = None) -> list[BerRecord]:
    """Simulate one (config, Eb/N0) point; one record per receiver iteration."""
    ctx = context or _RunContext(config)
    sigma2 = derived_noise_variance(config, ebn0_db)
    n_info = config.info_frame_len
    n_iter = config.n_iterations

    started = time.perf_counter()
    frames = 0
    errors = np.zeros(n_iter, dtype=np.int64)
    while frames < config.max_frames and errors[-1] < config.min_error_events:
        f = min(frames_per_batch, config.max_frames - frames)
        info = rng.integers(0, 2, size=(f, n_info), dtype=np.int64)
        coded = coding.puncture(ctx.code.encode(info), config.code_rate)
        tx_bits = coding.interleave(coded, ctx.interleaver)
        symbols = mapping.map_bits(tx_bits, ctx.const).reshape(
            f, config.n_subcarriers, config.q)
        x = stbc.st_encode(symbols, ctx.disp)
        h = channel.draw_channel(rng, config.n_subcarriers, config.m_r,
                                 config.m_t, batch=f)
        y = channel.apply_channel(x, h, config.cfo_rel, config.sfo_rel,
                                  sigma2, config.ici_window, rng,
                                  kernel=ctx.kernel)
        _, traces = receiver.iterate_receive(
            y, h, ctx.phi_nn, config, ctx.disp, ctx.interleaver, sigma2,
            true_bits=info, code=ctx.code, const=ctx.const)
        for tr in traces:
            errors[tr.iteration - 1] += tr.bit_errors
        frames += f
    wall = time.perf_counter() - started

    return [BerRecord(config.scheme, config.cfo_rel, config.sfo_rel,
                      float(ebn0_db), l + 1, frames * n_info,
                      int(errors[l]), frames, config.seed, wall)
            for l in range(n_iter)]


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepPoint:
    index: int
    scheme: str
    cfo_rel: float
    sfo_rel: float
    ebn0_db: float

    @property
    def key(self):
        return (self.scheme, self.cfo_rel, self.sfo_rel, self.ebn0_db)


def sweep_points(config: SystemConfig, schemes=None, offsets=None,
                 ebn0_grid=None) -> list[SweepPoint]:
    """Enumerate the sweep grid in a stable order (that order seeds RNGs)."""
    schemes = list(schemes) if schemes else [config.scheme]
    offsets = list(offsets) if offsets else [(config.cfo_rel, config.sfo_rel)]
    ebn0_grid = list(ebn0_grid) if ebn0_grid is not None else list(config.ebn0_grid_db)
    points = []
    index = 0
    for scheme in schemes:
        for cfo, sfo in offsets:
            for ebn0 in ebn0_grid:
                points.append(SweepPoint(index, scheme, float(cfo),
                                         float(sfo), float(ebn0)))
                index += 1
    return points


def point_config(base: SystemConfig, point: SweepPoint) -> SystemConfig:
    """Specialize the base config to a sweep point, re-solving B for eta."""
    b = bits_for_eta(point.scheme, base.code_rate, base.eta_target)
    return validate(dataclasses.replace(
        base, scheme=point.scheme, bits_per_symbol=b,
        cfo_rel=point.cfo_rel, sfo_rel=point.sfo_rel))


def _run_curve(args):
    base, curve_points, stop_below_ber, frames_per_batch = args
    records: list[BerRecord] = []
    context = None
    for point in sorted(curve_points, key=lambda p: p.ebn0_db):
        cfg = point_config(base, point)
        if context is None or context.config != cfg:
            context = _RunContext(cfg)
        recs = run_point(cfg, point.ebn0_db, point_rng(base, point.index),
                         frames_per_batch, context)
        records.extend(recs)
        final_ber = recs[-1].ber
        if stop_below_ber is not None and final_ber < stop_below_ber:
            break
    return records


def run_sweep(config: SystemConfig, out_path, schemes=None, offsets=None,
              ebn0_grid=None, workers: int = 1, resume: bool = True,
              stop_below_ber: float | None = None,
              frames_per_batch: int = 32):
    """Run the grid, write the CSV, return (records, points_computed).

    Curves (one scheme plus one offset pair) are the unit of parallelism so
    ``stop_below_ber`` can cut each curve's high-SNR tail independently.
    With ``resume`` any complete point already in the CSV is kept as is.
    """
    points = sweep_points(config, schemes, offsets, ebn0_grid)
    done: dict = {}
    if resume:
        try:
            for rec in read_ber_csv(out_path):
                done.setdefault(_record_key(rec), []).append(rec)
        except FileNotFoundError:
            pass
        # a point is complete when all its iterations made it to disk;
        # complete points outside the requested grid are preserved as is
        done = {k: v for k, v in done.items() if len(v) == config.n_iterations}

    # honor earlier early stops: if a lower grid point of the same curve is
    # already below the stop threshold, its tail stays uncomputed on resume
    stop_at: dict = {}
    if stop_below_ber is not None:
        for key, recs in done.items():
            final = max(r.iteration for r in recs)
            ber = next(r.ber for r in recs if r.iteration == final)
            if ber < stop_below_ber:
                curve_key = key[:3]
                stop_at[curve_key] = min(stop_at.get(curve_key, np.inf),
                                         key[3])

    curves: dict = {}
    skipped: list[BerRecord] = [rec for recs in done.values() for rec in recs]
    for point in points:
        if point.key in done:
            continue
        curve_key = (point.scheme, point.cfo_rel, point.sfo_rel)
        if point.ebn0_db > stop_at.get(curve_key, np.inf):
            continue
        curves.setdefault(curve_key, []).append(point)

    tasks = [(config, curve, stop_below_ber, frames_per_batch)
             for curve in curves.values()]
    fresh: list[BerRecord] = []
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_run_curve, tasks):
                fresh.extend(result)
    else:
        for task in tasks:
            fresh.extend(_run_curve(task))

    records = skipped + fresh
    records.sort(key=lambda r: (r.scheme, r.cfo_rel, r.sfo_rel, r.ebn0_db,
                                r.iteration))
    write_ber_csv(out_path, records)
    computed_points = len({_record_key(r) for r in fresh})
    return records, computed_points


def _record_key(rec: BerRecord):
    return (rec.scheme, rec.cfo_rel, rec.sfo_rel, rec.ebn0_db)


# ---------------------------------------------------------------------------
# required Eb/N0 at a target BER

def _curve_ber(records: list[BerRecord]):
    """Final-iteration (ebn0, ber) pairs; zero-error points get 1/(2 bits)."""
    final = max(r.iteration for r in records)
    rows = sorted((r for r in records if r.iteration == final),
                  key=lambda r: r.ebn0_db)
    ebn0 = np.array([r.ebn0_db for r in rows])
    ber = np.array([max(r.bit_errors, 0.5) / r.bits_simulated for r in rows])
    return ebn0, ber


def required_ebn0(records: list[BerRecord], target_ber: float) -> RequiredEbn0Record:
    """Log-linear interpolation of the final-iteration curve at the target.

    Records must belong to a single (scheme, cfo, sfo) curve.  Returns a
    FLOOR record when no grid point gets below the target; raises
    :class:`InsufficientData` when fewer than two points exist or the
    whole curve is already below the target.
    """
    if not records:
        raise InsufficientData("no records")
    keys = {_record_key(r)[:3] for r in records}
    if len(keys) != 1:
        raise InsufficientData(f"records mix several curves: {sorted(keys)}")
    scheme, cfo, sfo = next(iter(keys))
    axis, offset = (("sfo_rel", sfo) if sfo and not cfo else ("cfo_rel", cfo))

    ebn0, ber = _curve_ber(records)
    if ebn0.size < 2:
        raise InsufficientData("need at least two grid points")
    below = ber < target_ber
    if not below.any():
        return RequiredEbn0Record(scheme, axis, offset, target_ber, None, True)
    first = int(np.argmax(below))
    if first == 0:
        raise InsufficientData(
            "target already reached at the lowest grid point")
    e1, e2 = ebn0[first - 1], ebn0[first]
    b1, b2 = np.log10(ber[first - 1]), np.log10(ber[first])
    req = e1 + (e2 - e1) * (np.log10(target_ber) - b1) / (b2 - b1)
    return RequiredEbn0Record(scheme, axis, offset, target_ber, float(req),
                              False)


def required_ebn0_table(records: list[BerRecord],
                        target_ber: float) -> list[RequiredEbn0Record]:
    """One required-Eb/N0 record per (scheme, offset) curve in the input."""
    curves: dict = {}
    for rec in records:
        curves.setdefault(_record_key(rec)[:3], []).append(rec)
    out = []
    for key in sorted(curves):
        try:
            out.append(required_ebn0(curves[key], target_ber))
        except InsufficientData:
            continue
    return out


# ---------------------------------------------------------------------------
# CSV persistence

_BER_FIELDS = [f.name for f in dataclasses.fields(BerRecord)]
_REQ_FIELDS = [f.name for f in dataclasses.fields(RequiredEbn0Record)]


def write_ber_csv(path, records: list[BerRecord]):
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {BER_SCHEMA}\n")
        writer = csv.DictWriter(fh, fieldnames=_BER_FIELDS)
        writer.writeheader()
        for rec in records:
            writer.writerow(dataclasses.asdict(rec))


def read_ber_csv(path) -> list[BerRecord]:
    with open(path, newline="") as fh:
        _check_schema(fh.readline(), BER_SCHEMA, path)
        records = []
        for row in csv.DictReader(fh):
            records.append(BerRecord(
                row["scheme"], float(row["cfo_rel"]), float(row["sfo_rel"]),
                float(row["ebn0_db"]), int(row["iteration"]),
                int(row["bits_simulated"]), int(row["bit_errors"]),
                int(row["frames"]), int(row["seed"]),
                float(row["wall_time_s"])))
    return records


def write_required_csv(path, records: list[RequiredEbn0Record]):
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {REQ_SCHEMA}\n")
        writer = csv.DictWriter(fh, fieldnames=_REQ_FIELDS)
        writer.writeheader()
        for rec in records:
            row = dataclasses.asdict(rec)
            if row["required_ebn0_db"] is None:
                row["required_ebn0_db"] = ""
            writer.writerow(row)


def read_required_csv(path) -> list[RequiredEbn0Record]:
    with open(path, newline="") as fh:
        _check_schema(fh.readline(), REQ_SCHEMA, path)
        records = []
        for row in csv.DictReader(fh):
            req = row["required_ebn0_db"]
            records.append(RequiredEbn0Record(
                row["scheme"], row["axis"], float(row["offset"]),
                float(row["target_ber"]),
                float(req) if req else None,
                row["floor"] == "True"))
    return records


def _check_schema(line: str, schema: str, path):
    if line.strip() != f"# schema: {schema}":
        raise SchemaMismatch(
            f"{path}: expected '# schema: {schema}', got {line.strip()!r}")


# ---------------------------------------------------------------------------
# presets

def preset_config(name: str) -> SystemConfig:
    """Desk scale for tests and quick looks, paper scale for reproduction."""
    if name == "desk":
        return validate(SystemConfig(
            n_subcarriers=64, min_error_events=100, max_frames=2000,
            ebn0_grid_db=tuple(float(v) for v in range(0, 26, 2))))
    if name == "paper":
        return validate(SystemConfig(
            n_subcarriers=2048, ici_window=32, min_error_events=200,
            max_frames=50_000,
            ebn0_grid_db=tuple(float(v) for v in range(0, 32, 2))))
    raise ValueError(f"unknown preset {name!r} (expected 'desk' or 'paper')")
