"""Command-line entry point: ``schoolsim {school,run,sweep,metrics,replay}``.

Exit codes: 0 success, 1 validation/config error, 2 numerical divergence.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from .config import config_label, dumps_config, fixture_params, load_config
from .core import DivergenceError, Pattern, SimParams, SwarmState, ValidationError
from .io import (
    RunManifest, read_survival, read_trajectory, write_metrics, write_school,
    write_survival, write_sweep, write_trajectory,
)
from .metrics import count_subgroups, school_diameter, velocity_std
from .montecarlo import run_trial, sweep_school_size
from .noise import NoiseSource, entropy_seed
from .school import generate_school

log = logging.getLogger("schoolsim")

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED = 0, 1, 2


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=Path, help="key = value parameter file")
    parser.add_argument("--seed", type=int, help="unsigned 64-bit seed (default: system entropy)")
    parser.add_argument("--out-dir", type=Path, help="output directory")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schoolsim", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("school", help="generate and save a settled school")
    _common(p)
    p.add_argument("--pattern", default=None, help="I|II|III|IV|custom fixture to start from")
    p.add_argument("--out", type=Path, help="school CSV (default OUT_DIR/school.csv)")

    p = sub.add_parser("run", help="one school + predation trial")
    _common(p)
    p.add_argument("--pattern", default=None, help="I|II|III|IV|custom")
    p.add_argument("--record-every", type=int, default=10)

    p = sub.add_parser("sweep", help="school-size sweep of eaten probability")
    _common(p)
    p.add_argument("--strategy", default=None,
                   help="center, nearest, or both (comma list); default from config")
    p.add_argument("--n-list", default="1,5,10,20,40,60,80,100,120,140,160,180,200")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out", type=Path, help="sweep CSV (default OUT_DIR/sweep.csv)")

    p = sub.add_parser("metrics", help="per-frame statistics of a saved trajectory")
    _common(p)
    p.add_argument("--trajectory", type=Path, required=True)
    p.add_argument("--survival", type=Path, help="survival CSV (default: next to the trajectory)")
    p.add_argument("--link-dist", type=float, help="subgroup link distance (default from config)")
    p.add_argument("--out", type=Path, help="metrics CSV (default OUT_DIR/metrics.csv)")

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quiet", action="store_true")
    return ap


def _resolve_params(config: Optional[Path], pattern: Optional[str], default_fixture: Optional[str]):
    """Params plus the overlay label they came from."""
    base, label = SimParams(), None
    if pattern and pattern.lower() != "custom":
        label = Pattern.parse(pattern).roman
        base = fixture_params(label)
    elif pattern is None and default_fixture and config is None:
        label = default_fixture
        base = fixture_params(label)
    if config is None:
        return base, label
    params = load_config(config, base=base)
    return params, config_label(config) or label


def _out_path(explicit: Optional[Path], out_dir: Optional[Path], name: str) -> Path:
    if explicit is not None:
        return explicit
    return (out_dir or Path(".")) / name


def _seed(args) -> int:
    if args.seed is None:
        seed = entropy_seed()
        log.warning("no --seed given; using %d", seed)
        return seed
    return args.seed


def cmd_school(args, params: SimParams, seed: int) -> List[Path]:
    state = generate_school(params, NoiseSource(seed))
    out = _out_path(args.out, args.out_dir, "school.csv")
    return [write_school(state, out)]


def cmd_run(args, params: SimParams, seed: int) -> List[Path]:
    out_dir = args.out_dir or Path(".")
    rec = run_trial(params, seed, record_every=args.record_every, keep_frames=True)
    log.info("N=%d eaten=%d", rec.n_initial, rec.n_eaten)
    return [write_trajectory(rec, out_dir / "trajectory.csv"), write_survival(rec, out_dir / "survival.csv")]


def _strategies(text: Optional[str], params: SimParams):
    if text is None:
        return [params.strategy]
    if text.strip().lower() == "both":
        return ["center", "nearest"]
    return [s for s in text.split(",") if s.strip()]


def cmd_sweep(args, params: SimParams, seed: int) -> List[Path]:
    n_values = [int(x) for x in args.n_list.split(",") if x.strip()]
    table = sweep_school_size(params, n_values, args.trials, seed, jobs=args.jobs,
                              strategies=_strategies(args.strategy, params))
    return [write_sweep(table, _out_path(args.out, args.out_dir, "sweep.csv"))]


def metrics_rows(frames, survived: Optional[np.ndarray], link_dist: float):
    """(step, diameter, velocity_std, n_groups, n_survived, p_eaten, t_bar_alive) per frame.

    ``t_bar_alive`` at step ``s`` is the mean living time with the horizon cut
    at ``s``; at the final step it equals the run's average living time.
    """
    n0 = len(frames[0].positions)
    rows = []
    for fr in frames:
        state = SwarmState(fr.positions, fr.velocities, fr.alive)
        alive = state.n_alive
        if survived is not None:
            s = survived[: fr.step + 1]
            drops = -np.diff(s)
            steps = np.arange(1, len(s))
            n_surv = int(s[-1])
            eaten_total = int(drops.sum())
            t_bar = float(fr.step) if eaten_total == 0 else (
                float((drops * steps).sum() + n_surv * fr.step) / n0)
        else:
            n_surv, t_bar = alive, float("nan")
        rows.append((
            fr.step,
            school_diameter(state) if alive else 0.0,
            velocity_std(state) if alive else 0.0,
            count_subgroups(state, link_dist),
            n_surv,
            (n0 - n_surv) / n0,
            t_bar,
        ))
    return rows


def cmd_metrics(args, params: SimParams, seed) -> List[Path]:
    frames = read_trajectory(args.trajectory)
    surv_path = args.survival or args.trajectory.with_name("survival.csv")
    survived = read_survival(surv_path) if surv_path.exists() else None
    link = args.link_dist if args.link_dist is not None else params.resolved_link_dist()
    rows = metrics_rows(frames, survived, link)
    return [write_metrics(rows, _out_path(args.out, args.out_dir, "metrics.csv"))]


COMMANDS = {"school": cmd_school, "run": cmd_run, "sweep": cmd_sweep, "metrics": cmd_metrics}
DEFAULT_FIXTURE = {"sweep": "sweep-default"}


def _options(args) -> dict:
    skip = {"command", "config", "seed", "out_dir", "jobs", "quiet", "pattern", "out"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


def execute(command: str, args, params: SimParams, seed, label) -> RunManifest:
    start = time.perf_counter()
    outputs = COMMANDS[command](args, params, seed)
    manifest = RunManifest(
        subcommand=command, params=params.to_dict(), seed=seed, preset=label,
        options=_options(args), outputs=[p.name for p in outputs],
        duration_s=time.perf_counter() - start,
    )
    first = outputs[0]
    if command == "run":
        manifest.write(first.parent / "manifest.json")
        (first.parent / "config.cfg").write_text(dumps_config(params), encoding="utf-8")
    else:
        manifest.write(first.with_name(first.name + ".manifest.json"))
    return manifest


def _replay(args) -> RunManifest:
    man = RunManifest.read(args.manifest)
    params = man.sim_params()
    ns = argparse.Namespace(**man.options)
    ns.out_dir, ns.jobs = args.out_dir, args.jobs
    ns.out = None
    return execute(man.subcommand, ns, params, man.seed, man.preset)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            _replay(args)
            return EXIT_OK
        params, label = _resolve_params(args.config, getattr(args, "pattern", None),
                                        DEFAULT_FIXTURE.get(args.command))
        seed = None if args.command == "metrics" else _seed(args)
        execute(args.command, args, params, seed, label)
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except DivergenceError as exc:
        log.error("divergence: %s", exc)
        return EXIT_DIVERGED
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
