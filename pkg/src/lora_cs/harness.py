"""Monte-Carlo experiment driver.

Every experiment is a grid of independent cells.  Each trial gets its own
generator derived from the master seed and a hash of the cell coordinates,
so results do not depend on cell order or on the number of workers.
"""
from __future__ import annotations

import csv
import gzip
import hashlib
import io
import json
import logging
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .channel import apply_awgn, quantize
from .cs import CHUNK, DEFAULT_SEED, RatioPolicy, build_measurement, compress, select_ratio, sparsity_count, domain_coefficients
from .joint import PROFILES, SCHEMES, estimate_snr, fuse
from .phy import ChirpParams, make_chirp
from .recovery import Demodulation, demodulate_compressed, measurement_system, refit_profile

log = logging.getLogger(__name__)

KINDS = ("ser-grid", "prr", "joint", "sparsity", "baseline-lossless", "bandwidth")


class ConfigError(ValueError):
    pass


def parse_ratio(value: Any) -> Fraction | str:
    """M/N as an exact fraction ("1/16", 0.0625), or a policy name."""
    if isinstance(value, str) and value.strip().lower() in ("table", "formula"):
        return value.strip().lower()
    try:
        frac = Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value).limit_denominator(1 << 12)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad ratio {value!r}") from exc
    m = frac * CHUNK
    if m.denominator != 1 or not 1 <= m <= CHUNK or int(m) & (int(m) - 1):
        raise ConfigError(f"ratio {value} does not give a power-of-two M per 128-sample chunk")
    return frac


def parse_snr(value: Any) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad SNR {value!r}") from exc


def ratio_label(r: Fraction | str) -> str:
    return r if isinstance(r, str) else f"{r.numerator}/{r.denominator}"


@dataclass
class ExperimentConfig:
    kind: str = "ser-grid"
    sf: list[int] = field(default_factory=lambda: [7, 8, 9, 10])
    snr: list[float] = field(default_factory=lambda: [-6.0, 0.0, 6.0])
    ratio: list[Any] = field(default_factory=lambda: ["table"])
    trials: int | None = None
    packet_len: int = 8
    sync: bool = True
    gateways: int = 4
    gateway_offsets_db: list[float] = field(default_factory=lambda: [0.0, -3.0, -6.0, -9.0])
    schemes: list[str] = field(default_factory=lambda: list(SCHEMES))
    snr_mode: str = "oracle"
    normalize: bool = True
    fusion_profile: str = "refit"
    solver: str = "omp"
    eps: Any = "auto"
    k_max: int = 4
    try_down: bool = True
    cross_check: bool = False
    master_seed: int = 2020
    phi_seed: int = DEFAULT_SEED
    workers: int = 1
    timing: bool = False
    out: str | None = None
    trace: str | None = None
    channels: int = 64
    bits: int = 24
    sample_rate: float = 125_000.0
    alpha: list[float] = field(default_factory=lambda: [0.0, 0.875])

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        self.sf = [int(s) for s in _as_list(self.sf)]
        if any(not 7 <= s <= 10 for s in self.sf):
            raise ConfigError("sf values must be in [7, 10]")
        self.snr = [parse_snr(s) for s in _as_list(self.snr)]
        self.ratio = [parse_ratio(r) for r in _as_list(self.ratio)]
        self.alpha = [float(a) for a in _as_list(self.alpha)]
        self.gateway_offsets_db = [float(o) for o in _as_list(self.gateway_offsets_db)]
        if self.trials is None:
            self.trials = 500 if self.kind == "prr" else 2000
        if self.kind in ("ser-grid", "prr", "joint") and self.trials < 100:
            raise ConfigError("SER/PRR cells need at least 100 trials")
        if self.trials < 1 or self.packet_len < 1 or self.k_max < 1 or self.workers < 1:
            raise ConfigError("trials, packet_len, k_max and workers must be positive")
        if self.kind == "joint":
            if self.gateways < 1:
                raise ConfigError("need at least one gateway")
            if len(self.gateway_offsets_db) < self.gateways:
                raise ConfigError("gateway_offsets_db needs one entry per gateway")
            if any(s not in SCHEMES for s in self.schemes):
                raise ConfigError(f"schemes must be drawn from {SCHEMES}")
            if any(isinstance(r, str) for r in self.ratio):
                raise ConfigError("joint experiments need explicit M/N ratios")
        if self.kind in ("ser-grid", "prr") and not self.sync and "table" in self.ratio:
            raise ConfigError("the reliable-ratio table covers synchronized symbols only; use 'formula'")
        if self.fusion_profile not in PROFILES:
            raise ConfigError(f"fusion_profile must be one of {PROFILES}")
        if self.snr_mode not in ("oracle", "estimate"):
            raise ConfigError("snr_mode must be 'oracle' or 'estimate'")
        if self.solver not in ("omp", "fista"):
            raise ConfigError("solver must be 'omp' or 'fista'")
        if self.eps != "auto":
            try:
                self.eps = float(self.eps)
            except (TypeError, ValueError) as exc:
                raise ConfigError("eps must be 'auto' or a number") from exc

    def canonical(self) -> dict[str, Any]:
        d = asdict(self)
        for k in ("out", "trace", "workers", "timing"):
            d.pop(k)
        d["ratio"] = [ratio_label(r) for r in self.ratio]
        d["snr"] = [repr(s) for s in self.snr]
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @property
    def eps_value(self) -> float | None:
        return None if self.eps == "auto" else float(self.eps)


def _as_list(v: Any) -> list[Any]:
    if isinstance(v, (list, tuple)):
        return list(v)
    if isinstance(v, str) and "," in v:
        return [p.strip() for p in v.split(",") if p.strip()]
    return [v]


# --------------------------------------------------------------------------
# seeding


def _cell_key(*coords: Any) -> int:
    return zlib.crc32("|".join(repr(c) for c in coords).encode())


def trial_rng(master_seed: int, cell_key: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(cell_key, trial))
    return np.random.default_rng(ss)


# --------------------------------------------------------------------------
# single-trial building blocks


def cell_measurement(sf: int, snr_db: float, ratio: Fraction | str, sync: bool, phi_seed: int):
    """Resolve the per-chunk M for a cell; returns (MeasurementMatrix, m_total, alpha)."""
    n = 1 << sf
    if isinstance(ratio, str):
        m_total, _ = select_ratio(sf, snr_db, sync, RatioPolicy(mode=ratio, sync=sync))
    else:
        m_total = int(ratio * n)
    chunk_m = m_total // (n // CHUNK)
    phi = build_measurement(phi_seed, chunk_m)
    return phi, m_total, 1.0 - m_total / n


def draw_block(params: ChirpParams, rng: np.random.Generator, sync: bool) -> tuple[np.ndarray, int, int, int]:
    """Clean block plus (value of the leading symbol, value of the trailing symbol, offset)."""
    n = params.n
    a = int(rng.integers(n))
    if sync:
        return make_chirp(params, a), a, a, 0
    b = int(rng.integers(n))
    tau = int(rng.integers(n))
    stream = np.concatenate([make_chirp(params, a), make_chirp(params, b)])
    return stream[tau:tau + n], a, b, tau


def block_decision(value: int, tau: int, n: int) -> int:
    """Map a decoded tone back to a symbol value given the block offset.

    Both parts of a block cut at offset tau are de-chirped to their symbol
    value plus tau (mod n).
    """
    return (value - tau) % n


@dataclass
class _Decoder:
    eps: float | None
    k_max: int
    solver: str
    try_down: bool

    def __call__(self, y) -> Demodulation:
        return demodulate_compressed(y, None, self.eps, self.k_max, self.solver, self.try_down)  # type: ignore[arg-type]


def _decoder(cfg: ExperimentConfig) -> _Decoder:
    return _Decoder(cfg.eps_value, cfg.k_max, cfg.solver, cfg.try_down)


# --------------------------------------------------------------------------
# SER / PRR


def _ser_cell(cfg: ExperimentConfig, sf: int, snr: float, ratio: Fraction | str) -> tuple[dict[str, Any], list[list[Any]]]:
    t0 = time.perf_counter()
    params = ChirpParams(sf)
    n = params.n
    phi, m_total, alpha = cell_measurement(sf, snr, ratio, cfg.sync, cfg.phi_seed)
    decode = _decoder(cfg)
    key = _cell_key("ser", sf, snr, ratio_label(ratio), cfg.sync)
    errors = errors_major = agree = 0
    other = None
    if cfg.cross_check:
        alt = "fista" if cfg.solver == "omp" else "omp"
        other = _Decoder(cfg.eps_value, cfg.k_max, alt, cfg.try_down)
    trace = []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.master_seed, key, t)
        clean, a, b, tau = draw_block(params, rng, cfg.sync)
        x = apply_awgn(clean, snr, rng)
        y = compress(x, phi)
        d = decode(y)
        lam = block_decision(d.value, tau, n)
        major = a if tau <= n // 2 else b
        errors += lam not in (a, b)
        errors_major += lam != major
        if other is not None:
            agree += other(y).value == d.value
        if cfg.trace:
            trace.append([sf, m_total, snr, major, lam, f"{d.profile.r_min:.6g}", d.direction,
                          cfg.solver, d.solution.iterations])
    row = _metric_row(cfg, sf=sf, snr_db=snr, ratio=ratio, m_total=m_total, alpha=alpha, G=1, scheme="",
                      trials=cfg.trials, errors=errors, ser=errors / cfg.trials, prr="")
    if other is not None:
        row["solver_agreement"] = _fmt(agree / cfg.trials)
    if not cfg.sync:
        row["ser_majority"] = _fmt(errors_major / cfg.trials)
    row["_wall"] = time.perf_counter() - t0
    return row, trace


def _prr_cell(cfg: ExperimentConfig, sf: int, snr: float, ratio: Fraction | str) -> tuple[dict[str, Any], list[list[Any]]]:
    t0 = time.perf_counter()
    params = ChirpParams(sf)
    phi, m_total, alpha = cell_measurement(sf, snr, ratio, True, cfg.phi_seed)
    decode = _decoder(cfg)
    key = _cell_key("prr", sf, snr, ratio_label(ratio))
    sym_errors = good_packets = 0
    for t in range(cfg.trials):
        rng = trial_rng(cfg.master_seed, key, t)
        values = rng.integers(params.n, size=cfg.packet_len)
        ok = True
        for v in values:
            x = apply_awgn(make_chirp(params, int(v)), snr, rng)
            if decode(compress(x, phi)).value != v:
                sym_errors += 1
                ok = False
        good_packets += ok
    nsym = cfg.trials * cfg.packet_len
    row = _metric_row(cfg, sf=sf, snr_db=snr, ratio=ratio, m_total=m_total, alpha=alpha, G=1, scheme="",
                      trials=cfg.trials, errors=sym_errors, ser=sym_errors / nsym, prr=good_packets / cfg.trials)
    row["_wall"] = time.perf_counter() - t0
    return row, []


def _metric_row(cfg: ExperimentConfig, *, sf, snr_db, ratio, m_total, alpha, G, scheme, trials, errors, ser, prr):
    return {
        "sf": sf, "snr_db": _fmt(snr_db), "ratio": ratio_label(ratio), "m_total": m_total,
        "alpha": _fmt(alpha), "G": G, "scheme": scheme, "sync": int(cfg.sync), "trials": trials,
        "errors": errors, "ser": _fmt(ser), "prr": _fmt(prr) if prr != "" else "",
    }


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return str(v)


def _grid(cfg: ExperimentConfig) -> list[tuple[int, float, Any]]:
    return [(sf, snr, r) for sf in cfg.sf for snr in cfg.snr for r in cfg.ratio]


def _run_cells(cfg: ExperimentConfig, fn: Callable, cells: Sequence[tuple]) -> list[tuple[dict, list]]:
    if cfg.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(fn, [cfg] * len(cells), *zip(*cells)))
    return [fn(cfg, *c) for c in cells]


def run_ser_grid(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    results = _run_cells(cfg, _ser_cell, _grid(cfg))
    _write_trace(cfg, ["sf", "m", "snr", "lambda_true", "lambda_hat", "min_residual", "direction", "solver",
                       "iterations"], [r for _, tr in results for r in tr])
    return _finish(cfg, [row for row, _ in results])


def run_prr(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    results = _run_cells(cfg, _prr_cell, _grid(cfg))
    return _finish(cfg, [row for row, _ in results])


# --------------------------------------------------------------------------
# joint decoding


def _joint_cell(cfg: ExperimentConfig, sf: int, snr: float, ratio: Fraction) -> tuple[list[dict[str, Any]], list]:
    t0 = time.perf_counter()
    params = ChirpParams(sf)
    n = params.n
    phi, m_total, alpha = cell_measurement(sf, snr, ratio, True, cfg.phi_seed)
    decode = _decoder(cfg)
    G = cfg.gateways
    gw_snr = [snr + off for off in cfg.gateway_offsets_db[:G]]
    oracle_gamma = [10.0 ** (s / 10.0) for s in gw_snr]
    key = _cell_key("joint", sf, snr, ratio_label(ratio), G, tuple(gw_snr))
    single_ok = np.zeros(G, dtype=np.int64)
    single_sym_err = np.zeros(G, dtype=np.int64)
    joint_ok = {s: 0 for s in cfg.schemes}
    joint_sym_err = {s: 0 for s in cfg.schemes}
    trace = []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.master_seed, key, t)
        values = rng.integers(n, size=cfg.packet_len)
        pkt_single = np.ones(G, dtype=bool)
        pkt_joint = {s: True for s in cfg.schemes}
        for v in values:
            clean = make_chirp(params, int(v))
            profiles, norms, gammas, singles = [], [], [], []
            for g in range(G):
                y = compress(apply_awgn(clean, gw_snr[g], rng), phi)
                d = decode(y)
                if cfg.fusion_profile == "refit":
                    theta = measurement_system(sf, y.chunk_m, y.seed, "up").theta
                    profiles.append(refit_profile(y, theta))
                else:
                    profiles.append(d.profile)
                norms.append(float(np.linalg.norm(y.y)))
                singles.append(d.value)
                gammas.append(oracle_gamma[g] if cfg.snr_mode == "oracle" else estimate_snr(y, d.profile))
            wrong = np.asarray(singles) != v
            single_sym_err += wrong
            pkt_single &= ~wrong
            for s in cfg.schemes:
                lam, _ = fuse(profiles, norms, gammas, s, cfg.normalize)
                joint_sym_err[s] += lam != v
                pkt_joint[s] &= lam == v
                if cfg.trace:
                    trace.append([t, G, s, ";".join(_fmt(x) for x in gw_snr), ";".join(map(str, singles)), lam, int(v)])
        single_ok += pkt_single
        for s in cfg.schemes:
            joint_ok[s] += pkt_joint[s]
    nsym = cfg.trials * cfg.packet_len
    single_prr = single_ok / cfg.trials
    single_ser = single_sym_err / nsym
    best, mean = float(single_prr.max()), float(single_prr.mean())
    rows = []
    for s in cfg.schemes:
        jp = joint_ok[s] / cfg.trials
        row = _metric_row(cfg, sf=sf, snr_db=snr, ratio=ratio, m_total=m_total, alpha=alpha, G=G, scheme=s,
                          trials=cfg.trials, errors=joint_sym_err[s], ser=joint_sym_err[s] / nsym, prr=jp)
        row.update({
            "gateway_snr_db": ";".join(_fmt(x) for x in gw_snr),
            "single_prr": ";".join(_fmt(float(p)) for p in single_prr),
            "single_ser": ";".join(_fmt(float(p)) for p in single_ser),
            "best_single_prr": _fmt(best),
            "best_single_ser": _fmt(float(single_ser.min())),
            "factor_best": _fmt(jp / best) if best > 0 else "inf",
            "factor_mean": _fmt(jp / mean) if mean > 0 else "inf",
            "_wall": time.perf_counter() - t0,
        })
        rows.append(row)
    return rows, trace


def run_joint(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    results = _run_cells(cfg, _joint_cell, _grid(cfg))
    _write_trace(cfg, ["trial", "G", "scheme", "gateway_snr_db", "single_lambda_hat", "joint_lambda_hat",
                       "lambda_true"], [r for _, tr in results for r in tr])
    return _finish(cfg, [row for rows, _ in results for row in rows])


# --------------------------------------------------------------------------
# sparsity, lossless baseline, bandwidth


def _sparsity_cell(cfg: ExperimentConfig, sf: int, snr: float, _ratio: Any) -> tuple[list[dict[str, Any]], list]:
    params = ChirpParams(sf)
    key = _cell_key("sparsity", sf, snr, cfg.sync)
    rows = []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.master_seed, key, t)
        clean, a, b, tau = draw_block(params, rng, cfg.sync)
        x = apply_awgn(clean, snr, rng)
        counts = {dom: sparsity_count(domain_coefficients(x, dom, params)) for dom in ("chirp", "dft", "dct")}
        rows.append({"sf": sf, "snr_db": _fmt(snr), "sync": int(cfg.sync), "trial": t, "offset": tau,
                     "count_chirp": counts["chirp"], "count_dft": counts["dft"], "count_dct": counts["dct"]})
    return rows, []


def sorted_magnitudes(x: np.ndarray, params: ChirpParams) -> dict[str, np.ndarray]:
    """Normalized coefficient magnitudes in each domain, largest first."""
    out = {}
    for dom in ("chirp", "dft", "dct"):
        mag = np.abs(domain_coefficients(x, dom, params))
        out[dom] = np.sort(mag)[::-1] / mag.max()
    return out


def run_sparsity(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    cells = [(sf, snr, None) for sf in cfg.sf for snr in cfg.snr]
    results = _run_cells(cfg, _sparsity_cell, cells)
    rows = [row for rs, _ in results for row in rs]
    if cfg.trace:
        # sorted-magnitude curves of the first symbol of each cell
        curve_rows = []
        for sf, snr, _ in cells:
            params = ChirpParams(sf)
            rng = trial_rng(cfg.master_seed, _cell_key("sparsity", sf, snr, cfg.sync), 0)
            clean, *_ = draw_block(params, rng, cfg.sync)
            mags = sorted_magnitudes(apply_awgn(clean, snr, rng), params)
            for rank in range(params.n):
                curve_rows.append([sf, _fmt(snr), rank] + [f"{mags[d][rank]:.6g}" for d in ("chirp", "dft", "dct")])
        _write_trace(cfg, ["sf", "snr_db", "rank", "chirp", "dft", "dct"], curve_rows)
    return _finish(cfg, rows)


def pack_iq12(codes: np.ndarray) -> bytes:
    """Pack (len, 2) signed 12-bit codes into 3 bytes per complex sample."""
    u = (codes.astype(np.int32) & 0xFFF).astype(np.uint32)
    word = (u[:, 0] << 12) | u[:, 1]
    out = np.empty((word.shape[0], 3), dtype=np.uint8)
    out[:, 0] = (word >> 16) & 0xFF
    out[:, 1] = (word >> 8) & 0xFF
    out[:, 2] = word & 0xFF
    return out.tobytes()


def lossless_ratio(x: np.ndarray, bits: int = 12) -> tuple[float, int, int]:
    """1 - gzip(packed)/packed for ``x`` quantized to ``bits`` per I and Q."""
    raw = pack_iq12(quantize(x, bits))
    comp = gzip.compress(raw, compresslevel=9, mtime=0)
    return 1.0 - len(comp) / len(raw), len(raw), len(comp)


def run_baseline_lossless(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    rows = []
    for sf in cfg.sf:
        params = ChirpParams(sf)
        for snr in cfg.snr:
            rng = trial_rng(cfg.master_seed, _cell_key("lossless", sf, snr), 0)
            n_sym = max(cfg.trials, 1) * cfg.packet_len
            values = rng.integers(params.n, size=n_sym)
            stream = np.concatenate([make_chirp(params, int(v)) for v in values])
            x = apply_awgn(stream, snr, rng)
            ratio, raw, comp = lossless_ratio(x)
            rows.append({"sf": sf, "snr_db": _fmt(snr), "samples": x.size, "raw_bytes": raw,
                         "compressed_bytes": comp, "ratio": _fmt(ratio),
                         "cs_advantage_at_0.875": _fmt(0.875 / ratio) if ratio > 0 else "inf"})
    return _finish(cfg, rows)


def bandwidth_report(channels: int, bits_per_sample: int, sample_rate: float, alpha: float) -> dict[str, float]:
    """Fronthaul bit rates: raw = channels*bits*rate, compressed = raw*(1-alpha)."""
    raw = channels * bits_per_sample * sample_rate
    return {"channels": channels, "bits_per_sample": bits_per_sample, "sample_rate": sample_rate,
            "alpha": alpha, "raw_bps": raw, "compressed_bps": raw * (1.0 - alpha)}


def run_bandwidth(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    rows = []
    for a in cfg.alpha:
        rep = bandwidth_report(cfg.channels, cfg.bits, cfg.sample_rate, a)
        rows.append({k: _fmt(float(v)) if isinstance(v, float) else v for k, v in rep.items()})
    return _finish(cfg, rows)


RUNNERS: dict[str, Callable[[ExperimentConfig], list[dict[str, Any]]]] = {
    "ser-grid": run_ser_grid,
    "prr": run_prr,
    "joint": run_joint,
    "sparsity": run_sparsity,
    "baseline-lossless": run_baseline_lossless,
    "bandwidth": run_bandwidth,
}


def run(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    return RUNNERS[cfg.kind](cfg)


# --------------------------------------------------------------------------
# output


def _finish(cfg: ExperimentConfig, rows: list[dict[str, Any]]) -> list[dict[str, Any]]:
    # wall time breaks byte-identical reruns, so it is opt-in
    walls = [float(r.pop("_wall", 0.0)) for r in rows]
    if cfg.timing:
        for r, w in zip(rows, walls):
            r["wall_time"] = f"{w:.3f}"
    log.info("%s: %d rows, %.2f s of cell time", cfg.kind, len(rows), sum(walls))
    if cfg.out:
        write_csv(cfg.out, rows, cfg)
    return rows


def render_csv(rows: Iterable[dict[str, Any]], cfg: ExperimentConfig) -> str:
    rows = list(rows)
    buf = io.StringIO()
    buf.write(f"# lora-cs {cfg.kind}\n")
    buf.write(f"# master_seed={cfg.master_seed} phi_seed={cfg.phi_seed} config_sha256={cfg.digest()}\n")
    buf.write(f"# config={json.dumps(cfg.canonical(), sort_keys=True)}\n")
    if rows:
        header: list[str] = []
        for r in rows:
            header.extend(k for k in r if k not in header)
        w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n", restval="")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def write_csv(path: str | Path, rows: list[dict[str, Any]], cfg: ExperimentConfig) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(render_csv(rows, cfg))


def _write_trace(cfg: ExperimentConfig, header: list[str], rows: list[list[Any]]) -> None:
    if not cfg.trace:
        return
    with open(cfg.trace, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))
