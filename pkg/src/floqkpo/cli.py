"""Command-line surface tying the toolkit together.

Subcommands: instances, prescribe, design, control, classical, quantum,
scaling, pipeline, bench.  All commands are deterministic under fixed
seeds; every output file gets a sibling ``<name>.manifest.json`` recording
the command, package version, seeds, SHA-256 hashes of the inputs, wall
time and output paths.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 resource
limit.  The FLOQKPO_OUTDIR environment variable supplies a default output
directory for relative paths; ``--config file.json`` preloads any flag
defaults (keys mirror the command tree).

Dimensionless outputs (units of chi) carry a ``"units": "chi"`` marker;
SI-unit outputs appear only in the control and scaling commands.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import __version__, design
from .classical import ClassicalConfig, integrate_static, paired_run, success_probability
from .control import emit_signal_report, frame_from_params
from .errors import InvalidInput, NumericalFailure, ResourceLimit
from .prescription import AnnealerParams, Tolerances, design_problem, prescribe, t_ramp
from .problems import CouplingMatrix, brute_force_ground_states, generate
from .quantum import (
    QuantumConfig,
    all_configuration_probabilities,
    half_line_projectors,
    position_momentum_density,
    run_dynamical_quantum,
    run_static_quantum,
    strobe_times,
    success_probability_quantum,
    DYNAMICAL_N_LIMIT,
)
from .scaling import HardwareLimits, chi_max
from .scaling import sweep as scaling_sweep

OUTDIR_ENV = "FLOQKPO_OUTDIR"
GHZ = 2 * np.pi * 1e9
MHZ = 2 * np.pi * 1e6


# ---------------------------------------------------------------------------
# plumbing


def _resolve(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        os.makedirs(outdir, exist_ok=True)
        return os.path.join(outdir, path)
    return path


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write(path: str, text: str) -> str:
    path = _resolve(path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _manifest(command: str, seeds, inputs: list[str], outputs: list[str], t0: float) -> None:
    data = {
        "command": command,
        "version": __version__,
        "seeds": seeds,
        "input_hashes": {p: _sha256(p) for p in inputs},
        "wall_seconds": round(time.time() - t0, 6),
        "outputs": outputs,
    }
    base = outputs[0]
    _write(base + ".manifest.json", json.dumps(data, indent=2, sort_keys=True) + "\n")


def _load_instance(path: str) -> CouplingMatrix:
    with open(path) as fh:
        return CouplingMatrix.from_json(fh.read())


def _load_params(path: str) -> AnnealerParams:
    with open(path) as fh:
        return AnnealerParams.from_json(fh.read())


def _load_design(path: str) -> tuple[design.ModulationMatrix, dict]:
    with open(path) as fh:
        data = json.load(fh)
    n = int(data["instance"]["n"])
    f = np.asarray(data["F"], dtype=float).reshape(n, n - 1)
    return design.ModulationMatrix(n=n, f=f), data


def _design_json(c: CouplingMatrix, params: AnnealerParams, sol: design.DesignSolution, seed=None) -> str:
    return json.dumps(
        {
            "instance": json.loads(c.to_json(seed=seed)),
            "eta": params.eta,
            "lambda_c": params.lambda_c_tilde,
            "F": [float(v) for v in sol.f.f.ravel()],
            "error": sol.error,
            "method": sol.method_tag,
            "units": "chi",
        },
        sort_keys=True,
    )


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _parse_ints(text: str) -> list[int]:
    """Comma list, or geometric 'start:ratio:stop' (e.g. 4:2:4096)."""
    if ":" in text:
        start, ratio, stop = text.split(":")
        out, v = [], int(start)
        while v <= int(stop):
            out.append(v)
            v = int(round(v * float(ratio)))
        return out
    if ".." in text:
        lo, hi = (int(v) for v in text.split(".."))
        out, v = [], lo
        while v <= hi:
            out.append(v)
            v *= 2
        return out
    return [int(v) for v in text.split(",") if v.strip()]


def _parse_grid(text: str, scale: float) -> list[float]:
    """Comma list, 'lo:hi' (10-point log grid) or single value, times scale."""
    if ":" in text:
        lo, hi = (float(v) for v in text.split(":"))
        return list(np.geomspace(lo, hi, 10) * scale)
    return [v * scale for v in _parse_floats(text)]


# ---------------------------------------------------------------------------
# command tree


@click.group()
@click.option("--threads", type=int, default=os.cpu_count(), show_default="cpu count", help="Worker pool size for instance-parallel commands.")
@click.option("--deterministic", is_flag=True, help="Force ordered reductions in parallel sections.")
@click.option("--config", type=click.Path(exists=True), default=None, help="JSON file of flag defaults mirroring the command tree.")
@click.pass_context
def cli(ctx, threads, deterministic, config):
    """Floquet-KPO annealer design and verification toolkit."""
    if config:
        with open(config) as fh:
            ctx.default_map = json.load(fh)
    ctx.obj = {"threads": max(1, threads or 1), "deterministic": deterministic}


@cli.group()
def instances():
    """Problem instance generation."""


@instances.command("gen")
@click.option("--class", "class_tag", required=True, type=click.Choice(["sk7", "dense", "cubic"]))
@click.option("--n", required=True, type=int)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", required=True)
def instances_gen(class_tag, n, seed, out):
    """Generate a coupling-matrix instance and write it as JSON."""
    t0 = time.time()
    c = generate(class_tag, n, seed)
    path = _write(out, c.to_json(seed=seed) + "\n")
    _manifest(f"instances gen --class {class_tag} --n {n} --seed {seed}", seed, [], [path], t0)


@cli.command("prescribe")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--class", "class_tag", default=None, help="Override the instance's class tag.")
@click.option("--a", "--A", "a_factor", default=100.0, type=float, show_default=True)
@click.option("--r-max", default=5.0, type=float, show_default=True)
@click.option("--lambda-c-override", default=None, type=float)
@click.option("--eta-override", default=None, type=float)
@click.option("--out", required=True)
def prescribe_cmd(instance_path, class_tag, a_factor, r_max, lambda_c_override, eta_override, out):
    """Compute annealer parameters (units of chi) for an instance."""
    t0 = time.time()
    c = _load_instance(instance_path)
    params = prescribe(
        c,
        class_tag or c.class_tag,
        Tolerances(a_factor=a_factor),
        r_max_tilde=r_max,
        lambda_c_override=lambda_c_override,
        eta_override=eta_override,
    )
    path = _write(out, params.to_json() + "\n")
    _manifest(f"prescribe --instance {instance_path} --A {a_factor}", None, [instance_path], [path], t0)


@cli.group("design")
def design_group():
    """Floquet design solving and error sweeps."""


@design_group.command("solve")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--params", "params_path", default=None, type=click.Path(exists=True), help="Annealer params JSON; prescribed with defaults when omitted.")
@click.option("--mode", default="auto", type=click.Choice(["auto", "FirstOrder", "SecondOrder", "FullOrder"]), show_default=True)
@click.option("--a", "--A", "a_factor", default=100.0, type=float, show_default=True)
@click.option("--out", required=True)
def design_solve(instance_path, params_path, mode, a_factor, out):
    """Solve the Floquet design equation for an instance."""
    t0 = time.time()
    c = _load_instance(instance_path)
    params = _load_params(params_path) if params_path else prescribe(c, c.class_tag, Tolerances(a_factor=a_factor))
    sol = design.solve_design(design_problem(c, params), design.SolveOptions(mode=mode))
    path = _write(out, _design_json(c, params, sol) + "\n")
    inputs = [instance_path] + ([params_path] if params_path else [])
    _manifest(f"design solve --instance {instance_path} --mode {mode}", None, inputs, [path], t0)


@design_group.command("error-sweep")
@click.option("--class", "class_tag", default="sk7", type=click.Choice(["sk7", "dense", "cubic"]), show_default=True)
@click.option("--n", "n_spec", default="4..32", show_default=True, help="Comma list, 'a..b' (doubling) or 'start:ratio:stop'.")
@click.option("--eta-grid", default="0.025,0.05,0.1,0.2", show_default=True)
@click.option("--instances", "n_instances", default=10, type=int, show_default=True)
@click.option("--mode", default="auto", show_default=True)
@click.option("--out", required=True)
@click.pass_context
def design_error_sweep(ctx, class_tag, n_spec, eta_grid, n_instances, mode, out):
    """Mean design error over an (eta, N) grid, one CSV row per point."""
    t0 = time.time()
    n_grid = _parse_ints(n_spec)
    etas = _parse_floats(eta_grid)

    def point(n, eta):
        errors = []
        for seed in range(n_instances):
            c = generate(class_tag, n, seed)
            prob = design.DesignProblem(c=c, lambda_c=1.0, j=design.NativeCouplingMatrix.uniform(n, 1.0 / eta))
            sol = design.solve_design(prob, design.SolveOptions(mode=mode))
            errors.append(sol.error)
        return n, eta, float(np.mean(errors))

    tasks = [(n, eta) for n in n_grid for eta in etas]
    workers = 1 if ctx.obj["deterministic"] else ctx.obj["threads"]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda args: point(*args), tasks))
    lines = ["n,eta,mean_error"] + [f"{n},{eta},{err:.8e}" for n, eta, err in sorted(rows)]
    path = _write(out, "\n".join(lines) + "\n")
    _manifest(f"design error-sweep --class {class_tag}", list(range(n_instances)), [], [path], t0)


@cli.group("control")
def control_group():
    """Physical control-signal synthesis."""


@control_group.command("emit")
@click.option("--params", "params_path", required=True, type=click.Path(exists=True))
@click.option("--design", "design_path", required=True, type=click.Path(exists=True))
@click.option("--omega-bus-ghz", default=10.0, type=float, show_default=True)
@click.option("--gmax-mhz", default=20.0, type=float, show_default=True)
@click.option("--dmax-ghz", default=5.0, type=float, show_default=True)
@click.option("--out", required=True)
def control_emit(params_path, design_path, omega_bus_ghz, gmax_mhz, dmax_ghz, out):
    """Emit omega_i(t)/x_i(t) traces (SI units) plus a PSD companion CSV."""
    t0 = time.time()
    params = _load_params(params_path)
    f, _ = _load_design(design_path)
    point = chi_max(params.n, params.class_tag, HardwareLimits(g_max=gmax_mhz * MHZ, delta_max=dmax_ghz * GHZ))
    frame = frame_from_params(params, omega_bus=omega_bus_ghz * GHZ, chi=point.chi_max)
    report = emit_signal_report(params, frame, f)
    path = _write(out, report.traces_csv())
    psd_path = _write(out.rsplit(".", 1)[0] + ".psd.csv", report.psd_csv())
    _manifest(f"control emit --params {params_path}", None, [params_path, design_path], [path, psd_path], t0)


@cli.group("classical")
def classical_group():
    """Classical mean-field simulations."""


@classical_group.command("run")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--params", "params_path", default=None, type=click.Path(exists=True))
@click.option("--design", "design_path", default=None, type=click.Path(exists=True), help="Enables the paired static/dynamical run.")
@click.option("--ntraj", default=100, type=int, show_default=True)
@click.option("--a", "--A", "a_factor", default=200.0, type=float, show_default=True)
@click.option("--kappa", default=0.0, type=float, show_default=True)
@click.option("--t-ramp", "t_ramp_opt", default=None, type=float, help="Ramp time in 1/chi; default min(1/kappa, 100).")
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", required=True)
@click.option("--traces-csv", default=None, help="Also export Re alpha_i(t) of the static run.")
def classical_run(instance_path, params_path, design_path, ntraj, a_factor, kappa, t_ramp_opt, seed, out, traces_csv):
    """Ensemble success probabilities, static and (optionally) dynamical."""
    t0 = time.time()
    c = _load_instance(instance_path)
    params = _load_params(params_path) if params_path else prescribe(c, c.class_tag, Tolerances(a_factor=a_factor))
    ground = brute_force_ground_states(c)
    cfg = ClassicalConfig(
        n_traj=ntraj,
        t_ramp_tilde=t_ramp_opt if t_ramp_opt is not None else t_ramp(kappa),
        kappa_tilde=kappa,
        seed=seed,
    )
    result = {"units": "chi", "metadata": {"n": c.n, "class": c.class_tag, "ntraj": ntraj, "kappa": kappa, "seed": seed}}
    if design_path:
        f, _ = _load_design(design_path)
        paired = paired_run(c, params, f, cfg, ground)
        static, static_traj = paired.static, paired.static_traj
        result["p_dyn"] = paired.dynamical.p.tolist()
        result["sem_dyn"] = paired.dynamical.sem.tolist()
    else:
        static_traj = integrate_static(cfg, params, c)
        static = success_probability(static_traj, ground)
    result["times"] = static.times.tolist()
    result["p_static"] = static.p.tolist()
    result["sem_static"] = static.sem.tolist()
    path = _write(out, json.dumps(result, sort_keys=True) + "\n")
    outputs = [path]
    if traces_csv:
        header = "t," + ",".join(f"re_alpha_{i}" for i in range(c.n))
        lines = [header]
        for k, t in enumerate(static_traj.times):
            lines.append(",".join([f"{t:.6e}"] + [f"{v:.6e}" for v in static_traj.amplitudes[k, 0].real]))
        outputs.append(_write(traces_csv, "\n".join(lines) + "\n"))
    inputs = [instance_path] + [p for p in (params_path, design_path) if p]
    _manifest(f"classical run --instance {instance_path} --ntraj {ntraj}", seed, inputs, outputs, t0)


def _degenerate_pair_sums(probs: dict[tuple, float]) -> dict[str, float]:
    """Sum each configuration with its global flip (degenerate pair)."""
    out: dict[str, float] = {}
    for spins, p in probs.items():
        canonical = spins if spins[0] > 0 else tuple(-s for s in spins)
        key = "".join("+" if s > 0 else "-" for s in canonical)
        out[key] = out.get(key, 0.0) + p
    return out


@cli.group("quantum")
def quantum_group():
    """Truncated-Fock quantum simulations."""


@quantum_group.command("run")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--params", "params_path", default=None, type=click.Path(exists=True))
@click.option("--design", "design_path", default=None, type=click.Path(exists=True))
@click.option("--kappa", default=0.0, type=float, show_default=True)
@click.option("--a", "--A", "a_factor", default=100.0, type=float, show_default=True)
@click.option("--ntraj", default=1, type=int, show_default=True)
@click.option("--m", default=12, type=int, show_default=True)
@click.option("--t-ramp", "t_ramp_opt", default=None, type=float)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--system", default="auto", type=click.Choice(["auto", "static", "dynamical", "both"]), show_default=True, help="auto = static plus dynamical when N allows it.")
@click.option("--density", is_flag=True, help="Emit final position/momentum density grids (N = 2).")
@click.option("--out", required=True)
def quantum_run(instance_path, params_path, design_path, kappa, a_factor, ntraj, m, t_ramp_opt, seed, system, density, out):
    """Quantum success and configuration probabilities over time."""
    t0 = time.time()
    c = _load_instance(instance_path)
    params = _load_params(params_path) if params_path else prescribe(c, c.class_tag, Tolerances(a_factor=a_factor))
    ground = brute_force_ground_states(c)
    cfg = QuantumConfig(
        t_ramp_tilde=t_ramp_opt if t_ramp_opt is not None else t_ramp(kappa),
        kappa_tilde=kappa,
        n_traj=ntraj if kappa > 0 else 1,
        m=m,
        seed=seed,
        a_factor=a_factor,
        n_records=41,
    )
    times = strobe_times(params, cfg.t_final, cfg.n_records)
    projectors = half_line_projectors(m)
    result = {
        "units": "chi",
        "metadata": {"n": c.n, "class": c.class_tag, "kappa": kappa, "m": m, "seed": seed, "ntraj": cfg.n_traj},
        "times": times.tolist(),
    }
    want_dyn = system in ("dynamical", "both") or (system == "auto" and design_path and c.n <= DYNAMICAL_N_LIMIT)
    want_static = system in ("auto", "static", "both")
    final_state = None
    if want_static:
        traj = run_static_quantum(cfg, params, c, record_times=times)
        series = success_probability_quantum(traj, ground, projectors)
        result["p_static"] = series.p.tolist()
        result["sem_static"] = series.sem.tolist()
        probs = _degenerate_pair_sums(all_configuration_probabilities(traj.states[-1, 0], c.n, m, projectors))
        result["p_sigma_static_final"] = probs
        final_state = traj.states[-1, 0]
    if want_dyn:
        if not design_path:
            raise InvalidInput("dynamical quantum run needs --design")
        f, _ = _load_design(design_path)
        traj = run_dynamical_quantum(cfg, params, f, record_times=times)
        series = success_probability_quantum(traj, ground, projectors)
        result["p_dyn"] = series.p.tolist()
        result["sem_dyn"] = series.sem.tolist()
    if density:
        if c.n != 2 or final_state is None:
            raise InvalidInput("--density needs a static run at N = 2")
        grid = np.linspace(-4.0, 4.0, 81)
        px, pp = position_momentum_density(final_state, grid, m)
        result["density"] = {"grid": grid.tolist(), "x": px.tolist(), "p": pp.tolist()}
    path = _write(out, json.dumps(result, sort_keys=True) + "\n")
    inputs = [instance_path] + [p for p in (params_path, design_path) if p]
    _manifest(f"quantum run --instance {instance_path} --kappa {kappa}", seed, inputs, [path], t0)


@cli.group("scaling")
def scaling_group():
    """Hardware-scaling analysis (SI units)."""


@scaling_group.command("sweep")
@click.option("--class", "class_tag", default="sk7", type=click.Choice(["sk7", "dense", "cubic"]), show_default=True)
@click.option("--n", "n_spec", default="4:2:4096", show_default=True, help="Geometric grid 'start:ratio:stop' or comma list.")
@click.option("--gmax-mhz", default="20", show_default=True, help="Single value, comma list or 'lo:hi' log grid.")
@click.option("--dmax-ghz", default="5", show_default=True)
@click.option("--out", required=True)
def scaling_sweep_cmd(class_tag, n_spec, gmax_mhz, dmax_ghz, out):
    """chi_max / T_cav table over (N, hardware-limit) grids."""
    t0 = time.time()
    n_grid = _parse_ints(n_spec)
    g_vals = _parse_grid(gmax_mhz, MHZ)
    d_vals = _parse_grid(dmax_ghz, GHZ)
    if len(g_vals) > 1 and len(d_vals) > 1:
        raise InvalidInput("sweep over g_max or Delta_max, not both")
    if len(d_vals) > 1:
        text = scaling_sweep(n_grid, class_tag, delta_grid=d_vals, g_max=g_vals[0])
    else:
        text = scaling_sweep(n_grid, class_tag, g_grid=g_vals, delta_max=d_vals[0])
    path = _write(out, text)
    _manifest(f"scaling sweep --class {class_tag}", None, [], [path], t0)


@cli.group("pipeline")
def pipeline_group():
    """End-to-end orchestration."""


@pipeline_group.command("run")
@click.option("--class", "class_tag", required=True, type=click.Choice(["sk7", "dense", "cubic"]))
@click.option("--n", required=True, type=int)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--mode", default="classical", type=click.Choice(["classical", "quantum"]), show_default=True)
@click.option("--kappa", default=0.0, type=float, show_default=True)
@click.option("--ntraj", default=100, type=int, show_default=True)
@click.option("--t-ramp", "t_ramp_opt", default=None, type=float, help="Ramp time in 1/chi; default min(1/kappa, 100).")
@click.option("--m", default=12, type=int, show_default=True, help="Fock truncation (quantum mode).")
@click.option("--outdir", default=".", show_default=True)
@click.pass_context
def pipeline_run(ctx, class_tag, n, seed, mode, kappa, ntraj, t_ramp_opt, m, outdir):
    """instance -> prescribe -> design -> simulate -> report in one go."""
    t0 = time.time()
    os.makedirs(_resolve(outdir), exist_ok=True)

    def stage(name, fn):
        try:
            return fn()
        except (InvalidInput, NumericalFailure, ResourceLimit) as exc:
            raise type(exc)(f"stage {name}: {exc}") from exc

    a_factor = 200.0 if mode == "classical" else 100.0
    c = stage("instance", lambda: generate(class_tag, n, seed))
    instance_path = _write(os.path.join(outdir, "instance.json"), c.to_json(seed=seed) + "\n")
    params = stage("prescribe", lambda: prescribe(c, class_tag, Tolerances(a_factor=a_factor)))
    params_path = _write(os.path.join(outdir, "params.json"), params.to_json() + "\n")
    sol = stage("design", lambda: design.solve_design(design_problem(c, params)))
    design_path = _write(os.path.join(outdir, "design.json"), _design_json(c, params, sol, seed=seed) + "\n")
    result_path = os.path.join(outdir, "result.json")
    if mode == "classical":
        stage(
            "simulate",
            lambda: ctx.invoke(
                classical_run,
                instance_path=instance_path,
                params_path=params_path,
                design_path=design_path,
                ntraj=ntraj,
                a_factor=a_factor,
                kappa=kappa,
                t_ramp_opt=t_ramp_opt,
                seed=seed,
                out=result_path,
                traces_csv=None,
            ),
        )
    else:
        stage(
            "simulate",
            lambda: ctx.invoke(
                quantum_run,
                instance_path=instance_path,
                params_path=params_path,
                design_path=design_path,
                kappa=kappa,
                a_factor=a_factor,
                ntraj=ntraj,
                m=m,
                t_ramp_opt=t_ramp_opt,
                seed=seed,
                system="auto",
                density=False,
                out=result_path,
            ),
        )
    outputs = [_resolve(p) for p in (os.path.join(outdir, "pipeline.json"),)]
    summary = {
        "mode": mode,
        "stages": {
            "instance": instance_path,
            "params": params_path,
            "design": design_path,
            "result": _resolve(result_path),
        },
    }
    _write(os.path.join(outdir, "pipeline.json"), json.dumps(summary, sort_keys=True) + "\n")
    _manifest(
        f"pipeline run --class {class_tag} --n {n} --seed {seed} --mode {mode}",
        seed,
        [],
        outputs + list(summary["stages"].values()),
        t0,
    )


@cli.group("bench")
def bench_group():
    """Timing benchmarks."""


@bench_group.command("design")
@click.option("--n", "n_spec", default="250,500,1000", show_default=True)
@click.option("--instances", "n_instances", default=10, type=int, show_default=True)
@click.option("--out", required=True)
def bench_design(n_spec, n_instances, out):
    """Wall-clock of the second-order design solve per instance (one core)."""
    t0 = time.time()
    from .problems import gen_sk7

    rows = ["n,seed,seconds"]
    for n in _parse_ints(n_spec):
        eta = design.eta_prescription(n, "sk7")
        for seed in range(n_instances):
            c = gen_sk7(n, seed)
            prob = design.DesignProblem(c=c, lambda_c=1.0, j=design.NativeCouplingMatrix.uniform(n, 1.0 / eta))
            t_solve = time.time()
            design.solve_design(prob, design.SolveOptions(mode="SecondOrder", compute_error=False))
            rows.append(f"{n},{seed},{time.time() - t_solve:.4f}")
    path = _write(out, "\n".join(rows) + "\n")
    _manifest("bench design", list(range(n_instances)), [], [path], t0)


def main():
    try:
        cli.main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        sys.exit(130)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(3)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(4)


if __name__ == "__main__":
    main()
