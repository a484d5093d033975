"""Experiment runner and command-line interface.

Each experiment writes one directory: ``config.json`` (resolved settings),
``trials.csv`` (raw rows), ``summary.json`` (aggregates), and SVG plots that
are pure renderings of the CSV.  All randomness flows from one root seed
through a documented derivation: the state generator for state ``i`` uses
``derive_seed(root, exp_index, i, 0)``, its reconstruction uses
``derive_seed(root, exp_index, i, 1, ...)`` as the restart root, and
:func:`twobasis.reconstruct.multi_restart` derives per-trial seeds from
that.  Re-running with the same root seed reproduces every file byte for
byte.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bases import (
    QUBIT_LOCAL,
    QUDIT,
    AngleSet,
    MeasurementBasis,
    computational_basis,
    explicit_angles,
    gen_geometric,
    gen_sqrt_prime,
    load_angles,
    plain_hadamard_basis,
    qubit_local_basis,
    qudit_fourier_basis,
    save_angles,
    verified,
)
from .measure import (
    NoiseModel,
    ProbDist,
    apply_noise,
    load_dist,
    prob_computational,
    prob_in_basis,
    prob_plain_hadamard,
    prob_qubit_second,
    prob_qudit_second,
    sample_shots,
    save_dist,
)
from .reconstruct import (
    ReconstructionConfig,
    compute_band_stats,
    derive_seed,
    multi_restart,
    save_result,
)
from .state import (
    PrecisionSpec,
    from_polar,
    ghz_like,
    load_state,
    quantize,
    random_state,
    save_state,
    w_like,
)
from .state import fidelity as state_fidelity
from .uniqueness import (
    exhaustive_match,
    ghz_twin,
    phase_grid_membership,
    save_witness_report,
    witness_report,
)

EXPERIMENT_INDEX = {
    "ensemble": 0,
    "noise_sweep": 1,
    "precision_sweep": 2,
    "wlike_scale": 3,
    "uniqueness_audit": 4,
    "ghz_demo": 5,
}

#: Cumulative probability-distance bands reported in the noise studies.
NOISE_BANDS = (("eps<8e-06", 0.0, 0.8e-5), ("eps<4e-05", 0.0, 4e-5), ("eps<1e-04", 0.0, 1e-4))


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    parameters: dict
    output_dir: str

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind,
                "parameters": self.parameters, "output_dir": self.output_dir}


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))


def _prepare_outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "config.json", cfg.to_dict())
    return out


def _local_angles(n: int) -> AngleSet:
    aset = verified(gen_sqrt_prime(n, mode=QUBIT_LOCAL))
    if not aset.check:
        raise RuntimeError(f"local angle set failed its constraint check: "
                           f"{aset.check.witness.describe()}")
    return aset


def _scheme_bases(d: int, mode: str, alpha: AngleSet) -> list[MeasurementBasis]:
    n = d.bit_length() - 1
    bases = [computational_basis(d), qubit_local_basis(alpha)]
    if mode == "three_basis":
        bases.append(plain_hadamard_basis(n))
    return bases


def _target_distributions(psi, bases, spec: PrecisionSpec,
                          noise: NoiseModel) -> list[ProbDist]:
    """Exact target-side distributions (basis angles at x decimals), then noise."""
    out = []
    for basis in bases:
        if basis.angles is not None:
            basis = MeasurementBasis(kind=basis.kind, dim=basis.dim,
                                     angles=basis.angles.rounded(spec.x))
        out.append(apply_noise(prob_in_basis(psi, basis), noise))
    return out


def _pow2_check(d: int) -> int:
    if d < 4 or d & (d - 1):
        raise ValueError(f"local-basis experiments need a power-of-two dimension >= 4, got {d}")
    return d.bit_length() - 1


# ---------------------------------------------------------------- ensemble

def run_ensemble(cfg: ExperimentConfig) -> dict:
    """Random quantized states at one dimension, reconstructed with restarts."""
    p = cfg.parameters
    d = int(p["dimension"])
    n = _pow2_check(d)
    states = int(p["states"])
    restarts = int(p["restarts"])
    iterations = int(p["iterations"])
    root = int(p["seed"])
    workers = int(p.get("workers", 1))
    spec = PrecisionSpec()
    exp = EXPERIMENT_INDEX["ensemble"]
    out = _prepare_outdir(cfg)
    alpha = _local_angles(n)
    bases = _scheme_bases(d, "two_basis", alpha)

    rows = []
    per_state = []
    for sid in range(states):
        psi = random_state(d, derive_seed(root, exp, sid, 0), spec)
        targets = _target_distributions(psi, bases, spec, NoiseModel())
        rcfg = ReconstructionConfig(iterations=iterations, restarts=restarts,
                                    precision=spec, seed=derive_seed(root, exp, sid, 1))
        _, results, stats = multi_restart(targets, bases, rcfg, true_state=psi,
                                          workers=workers)
        for t, res in enumerate(results):
            rows.append((sid, t, res.epsilon, res.fidelity))
        per_state.append(stats)
    _write_csv(out / "trials.csv", ["state_id", "trial", "epsilon", "fidelity"], rows)

    eps = np.array([r[2] for r in rows])
    fid = np.array([r[3] for r in rows])
    thr_mask = eps < 8e-5
    summary = {
        "trials": len(rows),
        "epsilon_mean_per_trial": float(eps.mean()),
        "epsilon_std_per_trial": float(eps.std()),
        "epsilon_mean_per_state": [float(np.mean(eps[i * restarts:(i + 1) * restarts]))
                                   for i in range(states)],
        "epsilon_std_per_state": [float(np.std(eps[i * restarts:(i + 1) * restarts]))
                                  for i in range(states)],
        "threshold_8e-05": {
            "count": int(thr_mask.sum()),
            "min_fidelity": float(fid[thr_mask].min()) if thr_mask.any() else None,
        },
        "bands": _band_summary(eps, fid),
        "per_state_bands": [{k: _band_dict(v) for k, v in s.bands.items()} for s in per_state],
    }
    _write_json(out / "summary.json", summary)
    plot_ensemble(out)
    return summary


def _band_dict(b) -> dict:
    return {"lo": b.lo, "hi": b.hi, "count": b.count,
            "fidelity_mean": b.fidelity_mean, "fidelity_std": b.fidelity_std}


def _band_summary(eps, fid) -> dict:
    stats = compute_band_stats(eps, fid)
    return {k: _band_dict(v) for k, v in stats.items()}


# ---------------------------------------------------------------- noise sweep

def run_noise_sweep(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    d = int(p["dimension"])
    n = _pow2_check(d)
    kind = p["noise_kind"]
    levels = [float(x) for x in p["levels"]]
    if any(not 0.0 <= x <= 1.0 for x in levels):
        raise ValueError("noise levels must lie in [0, 1]")
    states = int(p["states"])
    restarts = int(p["restarts"])
    iterations = int(p["iterations"])
    basis_mode = p.get("bases", "two_basis")
    root = int(p["seed"])
    workers = int(p.get("workers", 1))
    spec = PrecisionSpec()
    exp = EXPERIMENT_INDEX["noise_sweep"]
    out = _prepare_outdir(cfg)
    alpha = _local_angles(n)
    bases = _scheme_bases(d, basis_mode, alpha)

    rows = []
    level_summaries = []
    for li, level in enumerate(levels):
        noise = NoiseModel(kind=kind, p=level) if level > 0 else NoiseModel()
        eps_all, fid_all, best_fids = [], [], []
        for sid in range(states):
            psi = random_state(d, derive_seed(root, exp, sid, 0), spec)
            targets = _target_distributions(psi, bases, spec, noise)
            rcfg = ReconstructionConfig(iterations=iterations, restarts=restarts,
                                        precision=spec, bases=basis_mode,
                                        seed=derive_seed(root, exp, sid, 1, li))
            best, results, _ = multi_restart(targets, bases, rcfg, true_state=psi,
                                             workers=workers)
            best_fids.append(best.fidelity)
            for t, res in enumerate(results):
                rows.append((level, sid, t, res.epsilon, res.fidelity))
                eps_all.append(res.epsilon)
                fid_all.append(res.fidelity)
        bands = compute_band_stats(eps_all, fid_all, NOISE_BANDS)
        level_summaries.append({
            "level": level,
            "bands": {k: _band_dict(v) for k, v in bands.items()},
            "best_fidelity_mean": float(np.mean(best_fids)),
        })
    _write_csv(out / "trials.csv", ["noise", "state_id", "trial", "epsilon", "fidelity"], rows)
    summary = {"noise_kind": kind, "bases": basis_mode, "levels": level_summaries}
    _write_json(out / "summary.json", summary)
    plot_noise_sweep(out)
    return summary


# ---------------------------------------------------------------- precision sweep

def run_precision_sweep(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    d = int(p.get("dimension", 8))
    n = _pow2_check(d)
    xp_values = [int(v) for v in p.get("xp_values", range(6, 16))]
    c2p_values = [int(v) for v in p.get("c2p_values", range(3, 9))]
    states = int(p["states"])
    restarts = int(p["restarts"])
    iterations = int(p["iterations"])
    root = int(p["seed"])
    workers = int(p.get("workers", 1))
    exp = EXPERIMENT_INDEX["precision_sweep"]
    out = _prepare_outdir(cfg)
    alpha = _local_angles(n)
    bases = _scheme_bases(d, "two_basis", alpha)

    if any(not 6 <= v <= 15 for v in xp_values) or any(not 3 <= v <= 8 for v in c2p_values):
        raise ValueError("xp must lie in [6, 15] and c2p in [3, 8]")

    rows = []
    axes = [("xp", xp_values), ("c2p", c2p_values)]
    for ai, (axis, values) in enumerate(axes):
        for vi, value in enumerate(values):
            if axis == "xp":
                spec = PrecisionSpec(xp=value)
            else:
                spec = PrecisionSpec(c2p=value, c3p=value)
            for sid in range(states):
                psi = random_state(d, derive_seed(root, exp, sid, 0), spec)
                targets = _target_distributions(psi, bases, spec, NoiseModel())
                rcfg = ReconstructionConfig(iterations=iterations, restarts=restarts,
                                            precision=spec,
                                            seed=derive_seed(root, exp, sid, 1, ai, vi))
                best, _, _ = multi_restart(targets, bases, rcfg, true_state=psi,
                                           workers=workers)
                rows.append((axis, value, sid, best.epsilon, best.fidelity))
    _write_csv(out / "trials.csv", ["axis", "value", "state_id", "epsilon", "fidelity"], rows)

    summary = {}
    for axis, values in axes:
        pts = []
        for value in values:
            sel = [(e, f) for a, v, _, e, f in rows if a == axis and v == value]
            pts.append({"value": value,
                        "epsilon_mean": float(np.mean([e for e, _ in sel])),
                        "infidelity_mean": float(np.mean([abs(1.0 - f) for _, f in sel]))})
        summary[axis] = pts
    _write_json(out / "summary.json", summary)
    plot_precision_sweep(out)
    return summary


# ---------------------------------------------------------------- W-like scaling

def run_wlike_scale(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    qubit_counts = [int(q) for q in p["qubits"]]
    if any(q > 24 for q in qubit_counts):
        raise ValueError("closed-form sparse path is capped at 24 qubits")
    iterations = int(p["iterations"])
    root = int(p["seed"])
    spec = PrecisionSpec()
    exp = EXPERIMENT_INDEX["wlike_scale"]
    out = _prepare_outdir(cfg)

    rows = []
    finals = []
    for qi, n in enumerate(qubit_counts):
        rng = np.random.default_rng(derive_seed(root, exp, qi, 0))
        psi = quantize(w_like(n, np.full(n, 1.0), rng.uniform(0.0, 2 * np.pi, n)), spec)
        alpha = _local_angles(n)
        bases = _scheme_bases(1 << n, "two_basis", alpha)
        targets = _target_distributions(psi, bases, spec, NoiseModel())
        rcfg = ReconstructionConfig(iterations=iterations, restarts=1, precision=spec,
                                    seed=derive_seed(root, exp, qi, 1))
        best, _, _ = multi_restart(targets, bases, rcfg, true_state=psi)
        for (it, eps), (_, fid) in zip(best.trace, best.fidelity_trace):
            rows.append((n, it, eps, fid))
        finals.append({"qubits": n, "epsilon": best.epsilon, "fidelity": best.fidelity})
    _write_csv(out / "trials.csv", ["qubits", "iteration", "epsilon", "fidelity"], rows)
    summary = {"runs": finals}
    _write_json(out / "summary.json", summary)
    plot_wlike(out)
    return summary


# ---------------------------------------------------------------- uniqueness audit

def run_uniqueness_audit(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    d = int(p.get("dimension", 3))
    if d > 4:
        raise ValueError("audit is desk-scale: dimension at most 4")
    grid = int(p.get("grid", 360))
    targets = int(p.get("targets", 100))
    tol = float(p.get("tol", 1e-8))
    root = int(p["seed"])
    exp = EXPERIMENT_INDEX["uniqueness_audit"]
    out = _prepare_outdir(cfg)

    valid_set = verified(gen_geometric(d, 1.0, mode=QUDIT))
    if not valid_set.check:
        raise RuntimeError("geometric angle set unexpectedly failed its check")
    invalid_set = verified(explicit_angles(np.arange(d, dtype=float), mode=QUDIT))
    if invalid_set.check:
        raise RuntimeError("arithmetic angle set unexpectedly passed its check")

    rng = np.random.default_rng(derive_seed(root, exp, 0, 0))
    rows = []
    unique_ok = True
    for tid in range(targets):
        r = rng.uniform(0.2, 1.0, d)
        r /= np.linalg.norm(r)
        steps = rng.integers(0, grid, d)
        phi = 2 * np.pi * steps / grid
        psi = from_polar(r, phi)
        matches = exhaustive_match(prob_computational(psi),
                                   prob_qudit_second(psi, valid_set), valid_set, grid, tol)
        rows.append(("valid", tid, len(matches)))
        unique_ok &= len(matches) == 1

    multi_found = 0
    for tid in range(max(10, targets // 10)):
        r = np.full(d, 1.0 / np.sqrt(d))
        steps = rng.integers(0, grid, d)
        phi = 2 * np.pi * steps / grid
        psi = from_polar(r, phi)
        matches = exhaustive_match(prob_computational(psi),
                                   prob_qudit_second(psi, invalid_set), invalid_set, grid, tol)
        rows.append(("invalid", tid, len(matches)))
        multi_found = max(multi_found, len(matches))
    _write_csv(out / "trials.csv", ["angle_set", "target", "matches"], rows)

    controls = {"unique_under_valid_angles": bool(unique_ok),
                "ambiguous_under_invalid_angles": bool(multi_found >= 2)}
    summary = {"dimension": d, "grid": grid, "tol": tol, "controls": controls,
               "max_matches_invalid": multi_found}
    _write_json(out / "summary.json", summary)
    save_witness_report(witness_report(invalid_set, [], tol, grid), out / "witness.json")
    if not all(controls.values()):
        raise RuntimeError(f"uniqueness controls failed: {controls}")
    return summary


# ---------------------------------------------------------------- GHZ demo

def run_ghz_demo(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    n = int(p.get("qubits", 3))
    phase = float(p.get("phi", 0.7))
    out = _prepare_outdir(cfg)
    spec = PrecisionSpec()

    psi = ghz_like(n, 1.0, 1.0, phase)
    alpha = _local_angles(n)
    twin = ghz_twin(psi, alpha)

    p_psi, p_twin = prob_computational(psi), prob_computational(twin)
    q_psi = prob_qubit_second(psi, alpha)
    q_twin = prob_qubit_second(twin, alpha)
    dp = float(np.max(np.abs(p_psi.values - p_twin.values)))
    dq = float(np.max(np.abs(q_psi.values - q_twin.values)))
    fid = state_fidelity(psi, twin)
    twin_phase = float(twin.phi[-1])
    on_grid = phase_grid_membership(twin_phase, spec.c2, spec.n2)
    quantized_original = quantize(psi, spec)
    original_on_grid = phase_grid_membership(float(quantized_original.phi[-1]),
                                             spec.c2, spec.n2)

    controls = {"distributions_match": dp < 1e-12 and dq < 1e-12,
                "twin_differs": fid < 0.999,
                "twin_off_decimal_grid": not on_grid,
                "quantized_original_on_grid": bool(original_on_grid)}
    summary = {"qubits": n, "phi": phase, "twin_phi": twin_phase,
               "max_delta_p": dp, "max_delta_q": dq, "fidelity": fid,
               "controls": controls}
    _write_json(out / "summary.json", summary)
    report = witness_report(alpha, [psi, twin], 1e-12, 0)
    save_witness_report(report, out / "witness.json")
    if not all(controls.values()):
        raise RuntimeError(f"twin controls failed: {controls}")
    return summary


# ---------------------------------------------------------------- plotting

def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "twobasis"
    import matplotlib.pyplot as plt

    return plt


def _read_rows(path: Path) -> list[dict]:
    with path.open() as fh:
        return list(csv.DictReader(fh))


def _savefig(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_ensemble(outdir: Path) -> None:
    plt = _plt()
    rows = _read_rows(outdir / "trials.csv")
    sid = np.array([int(r["state_id"]) for r in rows])
    eps = np.array([float(r["epsilon"]) for r in rows])
    fid = np.array([float(r["fidelity"]) for r in rows])

    fig, ax = plt.subplots(figsize=(7, 4))
    hi = fid > 0.99
    ax.semilogy(sid[~hi], np.maximum(eps[~hi], 1e-16), ".", color="tab:blue",
                label="fidelity <= 0.99", markersize=3)
    ax.semilogy(sid[hi], np.maximum(eps[hi], 1e-16), ".", color="tab:orange",
                label="fidelity > 0.99", markersize=3)
    ax.axhline(8e-5, color="red", lw=1, label="eps = 8e-5")
    ax.set_xlabel("state index")
    ax.set_ylabel("probability distance")
    ax.legend(loc="upper right", fontsize=8)
    _savefig(fig, outdir / "eps_scatter.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    for label, lo, hiband, color in (("eps<1e-05", 0.0, 1e-5, "tab:red"),
                                     ("1e-02<eps<1e-01", 1e-2, 1e-1, "tab:blue")):
        xs, ys = [], []
        for s in np.unique(sid):
            mask = (sid == s) & (eps > lo) & (eps < hiband)
            if mask.any():
                xs.append(s)
                ys.append(fid[mask].mean())
        ax.plot(xs, ys, "o", color=color, label=label, markersize=4)
    ax.set_xlabel("state index")
    ax.set_ylabel("mean fidelity")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right", fontsize=8)
    _savefig(fig, outdir / "fidelity_bands.svg")
    plt.close(fig)


def plot_noise_sweep(outdir: Path) -> None:
    plt = _plt()
    rows = _read_rows(outdir / "trials.csv")
    noise = np.array([float(r["noise"]) for r in rows])
    eps = np.array([float(r["epsilon"]) for r in rows])
    fid = np.array([float(r["fidelity"]) for r in rows])
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, _, hi in NOISE_BANDS:
        xs, ys = [], []
        for level in np.unique(noise):
            mask = (noise == level) & (eps < hi)
            if mask.any():
                xs.append(level)
                ys.append(fid[mask].mean())
        ax.plot(xs, ys, "o-", label=label, markersize=4)
    ax.set_xlabel("noise rate")
    ax.set_ylabel("mean fidelity in band")
    ax.legend(fontsize=8)
    _savefig(fig, outdir / "fidelity_vs_noise.svg")
    plt.close(fig)


def plot_precision_sweep(outdir: Path) -> None:
    plt = _plt()
    rows = _read_rows(outdir / "trials.csv")
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, axis in zip(axes, ("xp", "c2p")):
        sel = [r for r in rows if r["axis"] == axis]
        values = sorted({int(r["value"]) for r in sel})
        eps = [np.mean([float(r["epsilon"]) for r in sel if int(r["value"]) == v])
               for v in values]
        inf = [np.mean([abs(1.0 - float(r["fidelity"])) for r in sel if int(r["value"]) == v])
               for v in values]
        ax.semilogy(values, np.maximum(eps, 1e-18), "o-", color="tab:blue", label="eps")
        ax.semilogy(values, np.maximum(inf, 1e-18), "s-", color="tab:red", label="|1 - fidelity|")
        ax.set_xlabel(axis)
        ax.legend(fontsize=8)
    _savefig(fig, outdir / "precision_sweep.svg")
    plt.close(fig)


def plot_wlike(outdir: Path) -> None:
    plt = _plt()
    rows = _read_rows(outdir / "trials.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    for n in sorted({int(r["qubits"]) for r in rows}):
        its = [int(r["iteration"]) for r in rows if int(r["qubits"]) == n]
        inf = [max(1.0 - float(r["fidelity"]), 1e-16) for r in rows if int(r["qubits"]) == n]
        ax.semilogy(its, inf, label=f"{n} qubits")
    ax.axhline(1e-4, color="orange", lw=1, label="fidelity 99.99%")
    ax.set_xlabel("iteration")
    ax.set_ylabel("1 - fidelity")
    ax.legend(fontsize=8)
    _savefig(fig, outdir / "wlike_trace.svg")
    plt.close(fig)


# ---------------------------------------------------------------- CLI

def _parse_noise(text: str | None) -> NoiseModel:
    if not text:
        return NoiseModel()
    kind, _, rate = text.partition(":")
    return NoiseModel(kind=kind, p=float(rate))


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--out", type=str, required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--full-scale", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twobasis",
                                     description="Two-basis tomography experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen-state", help="generate a random quantized state")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--c1", type=int, default=3)
    sp.add_argument("--c2", type=int, default=3)
    sp.add_argument("--out", type=str, required=True)

    sp = sub.add_parser("check-basis", help="generate and check an angle set")
    sp.add_argument("--mode", choices=[QUDIT, QUBIT_LOCAL], default=QUDIT)
    sp.add_argument("--generator", choices=["geometric", "sqrt_prime"], default="sqrt_prime")
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--z0", type=float, default=1.0)
    sp.add_argument("--margin", type=float, default=1e-6)
    sp.add_argument("--out", type=str, required=True)

    sp = sub.add_parser("measure", help="measure a state file in one basis")
    sp.add_argument("--state", type=str, required=True)
    sp.add_argument("--basis", choices=["computational", "second", "hadamard"],
                    default="second")
    sp.add_argument("--angles", type=str)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--noise", type=str)
    sp.add_argument("--out", type=str, required=True)

    sp = sub.add_parser("reconstruct", help="reconstruct from distribution files")
    sp.add_argument("--p", dest="p_file", type=str, required=True)
    sp.add_argument("--q", dest="q_file", type=str, required=True)
    sp.add_argument("--t", dest="t_file", type=str)
    sp.add_argument("--angles", type=str, required=True)
    sp.add_argument("--iterations", type=int, default=3000)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--dense", action="store_true")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", type=str, required=True)

    sp = sub.add_parser("ensemble", help="random-state ensemble study")
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--states", type=int, default=10)
    sp.add_argument("--restarts", type=int, default=200)
    sp.add_argument("--iterations", type=int, default=3000)
    sp.add_argument("--config", type=str)
    _add_common(sp)

    sp = sub.add_parser("noise-sweep", help="fidelity under noise levels")
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--kind", choices=["depolarizing", "measurement_bitflip"],
                    default="depolarizing")
    sp.add_argument("--levels", type=str, default="0,0.005,0.01,0.02")
    sp.add_argument("--states", type=int, default=6)
    sp.add_argument("--restarts", type=int, default=80)
    sp.add_argument("--iterations", type=int, default=3000)
    sp.add_argument("--bases", choices=["two_basis", "three_basis"], default="two_basis")
    sp.add_argument("--config", type=str)
    _add_common(sp)

    sp = sub.add_parser("precision-sweep", help="decimals-vs-quality study")
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--states", type=int, default=4)
    sp.add_argument("--restarts", type=int, default=40)
    sp.add_argument("--iterations", type=int, default=2500)
    sp.add_argument("--config", type=str)
    _add_common(sp)

    sp = sub.add_parser("wlike", help="sparse W-like scaling study")
    sp.add_argument("--qubits", type=str, default="10,20")
    sp.add_argument("--iterations", type=int, default=40000)
    sp.add_argument("--config", type=str)
    _add_common(sp)

    sp = sub.add_parser("uniqueness-audit", help="desk-scale exhaustive uniqueness audit")
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--grid", type=int, default=360)
    sp.add_argument("--targets", type=int, default=100)
    sp.add_argument("--config", type=str)
    _add_common(sp)

    sp = sub.add_parser("ghz-demo", help="two-component twin demonstration")
    sp.add_argument("--qubits", type=int, default=3)
    sp.add_argument("--phi", type=float, default=0.7)
    sp.add_argument("--config", type=str)
    _add_common(sp)
    return parser


def _experiment_config(args, kind: str, parameters: dict) -> ExperimentConfig:
    if getattr(args, "config", None):
        payload = json.loads(Path(args.config).read_text())
        parameters.update(payload.get("parameters", {}))
        name = payload.get("name", kind)
    else:
        name = kind
    return ExperimentConfig(name=name, kind=kind, parameters=parameters,
                            output_dir=args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command

    if cmd == "gen-state":
        spec = PrecisionSpec(c1=args.c1, c2=args.c2, c3=args.c2)
        save_state(random_state(args.dim, args.seed, spec), args.out)
        return 0

    if cmd == "check-basis":
        gen = (gen_geometric(args.count, args.z0, mode=args.mode)
               if args.generator == "geometric"
               else gen_sqrt_prime(args.count, mode=args.mode))
        checked = verified(gen, args.margin)
        save_angles(checked, args.out)
        print(f"check-basis: {checked.check_status}"
              + ("" if checked.check else f" ({checked.check.witness.describe()})"))
        return 0 if checked.check else 1

    if cmd == "measure":
        psi = load_state(args.state)
        if args.basis == "computational":
            dist = prob_computational(psi)
        elif args.basis == "hadamard":
            dist = prob_plain_hadamard(psi)
        else:
            if not args.angles:
                raise SystemExit("--angles is required for the second basis")
            aset = load_angles(args.angles)
            if aset.mode == QUDIT:
                dist = prob_qudit_second(psi, aset)
            else:
                dist = prob_qubit_second(psi, aset)
        noise = _parse_noise(args.noise)
        dist = apply_noise(dist, noise)
        if args.shots:
            dist = sample_shots(dist, args.shots, args.seed)
        save_dist(dist, args.out, noise=noise)
        return 0

    if cmd == "reconstruct":
        p_dist = load_dist(args.p_file)
        q_dist = load_dist(args.q_file)
        aset = load_angles(args.angles)
        d = p_dist.dim
        bases = [computational_basis(d)]
        targets = [p_dist]
        bases.append(qudit_fourier_basis(aset) if aset.mode == QUDIT
                     else qubit_local_basis(aset))
        targets.append(q_dist)
        mode = "two_basis"
        if args.t_file:
            targets.append(load_dist(args.t_file))
            bases.append(plain_hadamard_basis(d.bit_length() - 1))
            mode = "three_basis"
        rcfg = ReconstructionConfig(iterations=args.iterations, restarts=args.restarts,
                                    sparse_mode=not args.dense, bases=mode, seed=args.seed)
        best, _, _ = multi_restart(targets, bases, rcfg, workers=args.workers)
        save_result(best, rcfg, args.out)
        print(f"reconstruct: epsilon = {best.epsilon:.6g}")
        return 0

    full = getattr(args, "full_scale", False)
    if cmd == "ensemble":
        params = {"dimension": args.dim,
                  "states": 40 if full else args.states,
                  "restarts": 2500 if full else args.restarts,
                  "iterations": args.iterations, "seed": args.seed,
                  "workers": args.workers}
        run_ensemble(_experiment_config(args, "ensemble", params))
        return 0
    if cmd == "noise-sweep":
        params = {"dimension": args.dim, "noise_kind": args.kind,
                  "levels": [float(x) for x in args.levels.split(",")],
                  "states": 40 if full else args.states,
                  "restarts": 2500 if full else args.restarts,
                  "iterations": args.iterations, "bases": args.bases,
                  "seed": args.seed, "workers": args.workers}
        run_noise_sweep(_experiment_config(args, "noise_sweep", params))
        return 0
    if cmd == "precision-sweep":
        params = {"dimension": args.dim,
                  "states": 40 if full else args.states,
                  "restarts": 2500 if full else args.restarts,
                  "iterations": args.iterations, "seed": args.seed,
                  "workers": args.workers}
        run_precision_sweep(_experiment_config(args, "precision_sweep", params))
        return 0
    if cmd == "wlike":
        params = {"qubits": [int(q) for q in args.qubits.split(",")],
                  "iterations": args.iterations, "seed": args.seed}
        run_wlike_scale(_experiment_config(args, "wlike_scale", params))
        return 0
    if cmd == "uniqueness-audit":
        params = {"dimension": args.dim, "grid": args.grid, "targets": args.targets,
                  "seed": args.seed}
        try:
            run_uniqueness_audit(_experiment_config(args, "uniqueness_audit", params))
        except RuntimeError as exc:
            print(f"uniqueness-audit: {exc}", file=sys.stderr)
            return 1
        return 0
    if cmd == "ghz-demo":
        params = {"qubits": args.qubits, "phi": args.phi, "seed": args.seed}
        try:
            run_ghz_demo(_experiment_config(args, "ghz_demo", params))
        except RuntimeError as exc:
            print(f"ghz-demo: {exc}", file=sys.stderr)
            return 1
        return 0
    raise SystemExit(f"unknown command {cmd!r}")


if __name__ == "__main__":
    raise SystemExit(main())
