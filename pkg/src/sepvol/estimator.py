"""Streaming cumulative QMC estimation with checkpoints and deterministic parallel merge.

The point stream is cut into fixed sub-blocks whose boundaries depend only on
(points, checkpoint_every), never on the worker count.  Each sub-block is
reduced with exact summation (math.fsum); sub-block partials are merged into
the global accumulator in ascending block order through compensated adds.
Workers own whole sub-blocks, so runs with 1, 2, or 8 workers produce
bit-identical rows.
"""

from __future__ import annotations

import hashlib
import math
import multiprocessing as mp
import os
from dataclasses import dataclass, field

import numpy as np

from . import param, qmc, quantum

BLOCK = 4096
CHECKPOINT_FORMAT = "sepvol-checkpoint-1"
DEFAULT_SEED = 21


class EmptyAccumulatorError(ValueError):
    """Checkpoint requested before any sample was accumulated."""


class ConfigMismatchError(ValueError):
    """Resume file was written by a run with an incompatible configuration."""


def form_label(form) -> str:
    if isinstance(form, quantum.FactorSplit):
        dims = "x".join(str(d) for d in form.dims)
        t = ",".join(str(i) for i in sorted(form.transposed))
        return f"factors{dims}t{t}"
    return f"block{int(form)}"


@dataclass
class RunConfig:
    m: int
    points: int
    checkpoint_every: int
    seed: int
    skip: int = qmc.DEFAULT_SKIP
    workers: int = 1
    euler_order: str = param.EULER_COORD_ORDER
    forms: tuple = ()

    def __post_init__(self):
        if self.m not in (4, 6, 8, 9):
            raise ValueError(f"unsupported dimension m={self.m}")
        if not self.points >= self.checkpoint_every >= 1:
            raise ValueError("need points >= checkpoint_every >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.forms:
            self.forms = tuple(quantum.forms_for(self.m))

    def canonical(self) -> str:
        # workers excluded: the merge order makes results worker-independent
        forms = ";".join(form_label(f) for f in self.forms)
        return (f"m={self.m} points={self.points} checkpoint_every={self.checkpoint_every} "
                f"seed={self.seed} skip={self.skip} euler_order={self.euler_order} forms={forms}")

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


class _CompSum:
    """Neumaier compensated accumulator; (value, carry) survive checkpointing exactly."""

    __slots__ = ("s", "c")

    def __init__(self, s: float = 0.0, c: float = 0.0):
        self.s = s
        self.c = c

    def add(self, x: float):
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


@dataclass
class _BlockPartial:
    start: int
    n: int
    degenerate: int
    wD: float
    wH: float
    w: float
    sep: tuple
    cnt: tuple
    neg: tuple
    ln: tuple


@dataclass
class CheckpointRow:
    n: int
    est_D: float
    est_H: float
    est_DH: float
    est_V: float
    est_V_sep: tuple
    est_P: tuple
    mean_neg: float
    mean_logneg: float
    degenerate: int


class SampleAccumulator:
    """Running sums for all reported columns; mergeable in fixed order."""

    def __init__(self, n_forms: int):
        self.n_forms = n_forms
        self.n = 0
        self.degenerate = 0
        self.sum_wD = _CompSum()
        self.sum_wH = _CompSum()
        self.sum_w = _CompSum()
        self.sum_w_sep = [_CompSum() for _ in range(n_forms)]
        self.count_sep = [0] * n_forms
        self.sum_w_neg = [_CompSum() for _ in range(n_forms)]
        self.sum_w_logneg = [_CompSum() for _ in range(n_forms)]

    def accumulate(self, sample: param.WeightedSample, forms):
        """Add one decoded sample (reference path; the runner uses block partials)."""
        if len(forms) != self.n_forms:
            raise ValueError("form count does not match accumulator")
        self.n += 1
        if sample.degenerate:
            self.degenerate += 1
            return
        self.sum_wD.add(sample.w_D)
        self.sum_wH.add(sample.w_H)
        self.sum_w.add(sample.w)
        for i, f in enumerate(forms):
            neg = quantum.negativity(sample.rho, f)
            if neg <= 0.0:
                self.count_sep[i] += 1
                self.sum_w_sep[i].add(sample.w)
            else:
                self.sum_w_neg[i].add(sample.w * neg)
                self.sum_w_logneg[i].add(sample.w * math.log1p(2.0 * neg))

    def merge_block(self, p: _BlockPartial):
        self.n += p.n
        self.degenerate += p.degenerate
        self.sum_wD.add(p.wD)
        self.sum_wH.add(p.wH)
        self.sum_w.add(p.w)
        for i in range(self.n_forms):
            self.sum_w_sep[i].add(p.sep[i])
            self.count_sep[i] += p.cnt[i]
            self.sum_w_neg[i].add(p.neg[i])
            self.sum_w_logneg[i].add(p.ln[i])

    def merge_from(self, other: "SampleAccumulator"):
        """Fold another accumulator's totals into this one."""
        if other.n_forms != self.n_forms:
            raise ValueError("form count does not match accumulator")
        self.n += other.n
        self.degenerate += other.degenerate
        self.sum_wD.add(other.sum_wD.value)
        self.sum_wH.add(other.sum_wH.value)
        self.sum_w.add(other.sum_w.value)
        for i in range(self.n_forms):
            self.sum_w_sep[i].add(other.sum_w_sep[i].value)
            self.count_sep[i] += other.count_sep[i]
            self.sum_w_neg[i].add(other.sum_w_neg[i].value)
            self.sum_w_logneg[i].add(other.sum_w_logneg[i].value)

    def checkpoint(self) -> CheckpointRow:
        if self.n < 1:
            raise EmptyAccumulatorError("no samples accumulated")
        n = float(self.n)
        est_D = self.sum_wD.value / n
        est_H = self.sum_wH.value / n
        est_V = self.sum_w.value / n
        sw = self.sum_w.value
        est_V_sep = tuple(s.value / n for s in self.sum_w_sep)
        est_P = tuple(v / est_V if est_V else 0.0 for v in est_V_sep)
        nf = self.n_forms
        mean_neg = sum(s.value for s in self.sum_w_neg) / (nf * sw) if sw else 0.0
        mean_ln = sum(s.value for s in self.sum_w_logneg) / (nf * sw) if sw else 0.0
        return CheckpointRow(self.n, est_D, est_H, est_D * est_H, est_V,
                             est_V_sep, est_P, mean_neg, mean_ln, self.degenerate)


def _block_ranges(points: int, checkpoint_every: int) -> list[tuple[int, int]]:
    # boundaries at every BLOCK and checkpoint multiple, so checkpoints land
    # exactly between blocks for any worker count
    out = []
    s = 0
    while s < points:
        e = min((s // BLOCK + 1) * BLOCK,
                (s // checkpoint_every + 1) * checkpoint_every, points)
        out.append((s, e - s))
        s = e
    return out


def _compute_block(cfg: RunConfig, start: int, count: int) -> _BlockPartial:
    spec = qmc.ScrambleSpec(cfg.seed, cfg.skip)
    pts = qmc.points(spec, cfg.m * cfg.m - 1, start, count)
    dec = param.decode_batch(pts, cfg.m, euler_order=cfg.euler_order)
    ok = ~dec.degenerate
    w = dec.w[ok]
    sep, cnt, negs, lns = [], [], [], []
    rho = dec.rho[ok]
    for f in cfg.forms:
        ev = np.linalg.eigvalsh(quantum.partial_transpose(rho, f))
        ppt = ev[:, 0] >= -quantum.PPT_EPS
        neg = np.where(ev < -quantum.PPT_EPS, -ev, 0.0).sum(axis=1)
        sep.append(math.fsum((w * ppt).tolist()))
        cnt.append(int(ppt.sum()))
        negs.append(math.fsum((w * neg).tolist()))
        lns.append(math.fsum((w * np.log1p(2.0 * neg)).tolist()))
    return _BlockPartial(
        start, count, int(dec.degenerate.sum()),
        math.fsum(dec.w_D[ok].tolist()), math.fsum(dec.w_H[ok].tolist()),
        math.fsum(w.tolist()), tuple(sep), tuple(cnt), tuple(negs), tuple(lns))


def _worker(args) -> list[_BlockPartial]:
    cfg, blocks = args
    return [_compute_block(cfg, s, c) for s, c in blocks]


def save_checkpoint(path: str, cfg: RunConfig, acc: SampleAccumulator):
    """Flat self-describing text record; floats stored exactly as hex."""
    lines = [f"format {CHECKPOINT_FORMAT}",
             f"config_hash {cfg.config_hash()}",
             f"canonical {cfg.canonical()}",
             f"n {acc.n}",
             f"degenerate {acc.degenerate}",
             f"n_forms {acc.n_forms}"]
    for name in ("sum_wD", "sum_wH", "sum_w"):
        cs = getattr(acc, name)
        lines.append(f"{name} {cs.s.hex()} {cs.c.hex()}")
    for i in range(acc.n_forms):
        lines.append(f"form{i}_sum_w_sep {acc.sum_w_sep[i].s.hex()} {acc.sum_w_sep[i].c.hex()}")
        lines.append(f"form{i}_count_sep {acc.count_sep[i]}")
        lines.append(f"form{i}_sum_w_neg {acc.sum_w_neg[i].s.hex()} {acc.sum_w_neg[i].c.hex()}")
        lines.append(f"form{i}_sum_w_logneg {acc.sum_w_logneg[i].s.hex()} {acc.sum_w_logneg[i].c.hex()}")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_checkpoint(path: str, cfg: RunConfig) -> SampleAccumulator:
    fields = {}
    with open(path) as fh:
        for line in fh:
            key, _, rest = line.rstrip("\n").partition(" ")
            fields[key] = rest
    if fields.get("format") != CHECKPOINT_FORMAT:
        raise ConfigMismatchError(f"unrecognized checkpoint format in {path}")
    if fields["config_hash"] != cfg.config_hash():
        raise ConfigMismatchError(
            f"checkpoint config does not match: file has '{fields.get('canonical')}', "
            f"run wants '{cfg.canonical()}'")
    acc = SampleAccumulator(int(fields["n_forms"]))
    acc.n = int(fields["n"])
    acc.degenerate = int(fields["degenerate"])

    def _cs(key):
        s, c = fields[key].split()
        return _CompSum(float.fromhex(s), float.fromhex(c))

    acc.sum_wD = _cs("sum_wD")
    acc.sum_wH = _cs("sum_wH")
    acc.sum_w = _cs("sum_w")
    for i in range(acc.n_forms):
        acc.sum_w_sep[i] = _cs(f"form{i}_sum_w_sep")
        acc.count_sep[i] = int(fields[f"form{i}_count_sep"])
        acc.sum_w_neg[i] = _cs(f"form{i}_sum_w_neg")
        acc.sum_w_logneg[i] = _cs(f"form{i}_sum_w_logneg")
    return acc


def run(cfg: RunConfig, checkpoint_path: str | None = None, on_row=None):
    """Execute the configured run; returns (rows emitted by this call, final accumulator).

    With a checkpoint_path, state is persisted at every checkpoint row and an
    existing compatible file resumes the run at its last row.
    """
    acc = SampleAccumulator(len(cfg.forms))
    all_blocks = _block_ranges(cfg.points, cfg.checkpoint_every)
    if checkpoint_path and os.path.exists(checkpoint_path):
        acc = load_checkpoint(checkpoint_path, cfg)
        if acc.n != cfg.points and acc.n not in {s for s, _ in all_blocks}:
            raise ConfigMismatchError("checkpoint does not sit on a block boundary")
    blocks = [(s, c) for s, c in all_blocks if s >= acc.n]
    rows = []

    def merge(p: _BlockPartial):
        acc.merge_block(p)
        if acc.n % cfg.checkpoint_every == 0 or acc.n == cfg.points:
            if acc.n % cfg.checkpoint_every == 0:
                row = acc.checkpoint()
                rows.append(row)
                if on_row:
                    on_row(row)
            if checkpoint_path:
                save_checkpoint(checkpoint_path, cfg, acc)

    if cfg.workers == 1 or len(blocks) <= 1:
        for s, c in blocks:
            merge(_compute_block(cfg, s, c))
    else:
        chunks = [(cfg, blocks[bs:bs + bn])
                  for bs, bn in qmc.partition(len(blocks), cfg.workers) if bn]
        ctx = mp.get_context("fork")
        with ctx.Pool(min(cfg.workers, len(chunks))) as pool:
            for partials in pool.imap(_worker, chunks):
                for p in partials:
                    merge(p)
    return rows, acc
