"""Experiment configs, instance generators, and the end-to-end driver.

A config is a plain JSON-serializable mapping that pins every number an
experiment needs: topology, objective and set coefficients, penalty
policy, integrator settings, and explicit initial states. The two
bundled generators draw coefficient families whose ranges guarantee a
common interior point around the origin, so generated instances are
always well posed. Everything downstream of a config is deterministic.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import dynamics
from .diagnostics import fit_exponential_rate, summary_dict, write_trajectory_csv
from .errors import ConfigError, DiagnosticError
from .network import NetworkGraph, build_topology
from .objectives import L1PlusLinear, QuadPlusL1
from .oracle import solve_centralized
from .penalty import make_problem, penalized_value
from .sets import Ball, Box

TOPOLOGIES = ("star", "cycle", "erdos_renyi", "explicit")
OBJECTIVE_FAMILIES = ("l1_linear", "quad_l1")
SET_FAMILIES = ("ball", "box")
REFERENCE_MODES = ("oracle", "none")

GENERATOR_RETRIES = 100


@dataclass
class ExperimentConfig:
    name: str
    topology: str
    n: int
    m: int
    objective_family: str
    objective_params: dict
    set_family: str
    set_params: dict
    init: dict
    penalty: Union[str, float] = "auto"
    gamma: float = 1.05
    integrator: dict = field(default_factory=dict)
    seed: Optional[int] = None
    reference: str = "oracle"
    out_dir: Optional[str] = None
    topology_p: Optional[float] = None
    topology_seed: Optional[int] = None
    edges: Optional[list] = None
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        missing = {"name", "topology", "n", "m", "objective_family",
                   "objective_params", "set_family", "set_params",
                   "init"} - set(d)
        if missing:
            raise ConfigError(f"missing config fields: {sorted(missing)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(d, dict):
            raise ConfigError("config root must be a JSON object")
        return cls.from_dict(d)

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def validate(self):
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"topology must be one of {TOPOLOGIES}")
        if self.topology == "explicit" and not self.edges:
            raise ConfigError("explicit topology needs an 'edges' list")
        if self.objective_family not in OBJECTIVE_FAMILIES:
            raise ConfigError(f"objective_family must be one of {OBJECTIVE_FAMILIES}")
        if self.set_family not in SET_FAMILIES:
            raise ConfigError(f"set_family must be one of {SET_FAMILIES}")
        if self.reference not in REFERENCE_MODES:
            raise ConfigError(f"reference must be one of {REFERENCE_MODES}")
        if int(self.n) < 2 or int(self.m) < 1:
            raise ConfigError("need n >= 2 agents and m >= 1 dimensions")
        if self.penalty != "auto":
            if not isinstance(self.penalty, (int, float)) or self.penalty < 0:
                raise ConfigError("penalty must be 'auto' or a nonnegative number")
        mode = self.init.get("mode")
        if mode == "explicit":
            if "states" not in self.init:
                raise ConfigError("explicit init needs a 'states' array")
        elif mode == "random_feasible":
            if "seed" not in self.init:
                raise ConfigError("random_feasible init needs a 'seed'")
        else:
            raise ConfigError("init mode must be 'explicit' or 'random_feasible'")
        self.integrator_config()
        return self

    def integrator_config(self):
        try:
            cfg = dynamics.IntegratorConfig(**self.integrator)
        except TypeError as exc:
            raise ConfigError(f"bad integrator settings: {exc}")
        return cfg.validate()


def _objectives_from(cfg):
    p = cfg.objective_params
    if cfg.objective_family == "l1_linear":
        anchor = np.asarray(p["anchor"], dtype=float)
        slope = np.asarray(p["slope"], dtype=float)
        return tuple(L1PlusLinear(anchor[i], slope[i]) for i in range(cfg.n))
    P = np.asarray(p["P"], dtype=float)
    q = np.asarray(p["q"], dtype=float)
    r = np.asarray(p["r"], dtype=float)
    return tuple(QuadPlusL1(P[i], q[i], float(r[i])) for i in range(cfg.n))


def _sets_from(cfg):
    p = cfg.set_params
    if cfg.set_family == "ball":
        centers = np.asarray(p["centers"], dtype=float)
        radii = np.asarray(p["radii"], dtype=float)
        return tuple(Ball(centers[i], float(radii[i])) for i in range(cfg.n))
    lower = np.asarray(p["lower"], dtype=float)
    upper = np.asarray(p["upper"], dtype=float)
    return tuple(Box(lower[i], upper[i]) for i in range(cfg.n))


def build(cfg):
    """Materialize (problem, x0, integrator config) from a config."""
    cfg.validate()
    if cfg.topology == "explicit":
        graph = NetworkGraph.from_edges(cfg.n, [tuple(e) for e in cfg.edges])
    else:
        graph = build_topology(cfg.topology, cfg.n, p=cfg.topology_p,
                               seed=cfg.topology_seed)
    objectives = _objectives_from(cfg)
    sets = _sets_from(cfg)
    problem = make_problem(objectives, sets, graph, penalty=cfg.penalty,
                           gamma=cfg.gamma)
    if cfg.init["mode"] == "explicit":
        x0 = np.asarray(cfg.init["states"], dtype=float)
        if x0.shape != (cfg.n, cfg.m):
            raise ConfigError(
                f"init states must have shape ({cfg.n}, {cfg.m}), got {x0.shape}"
            )
    else:
        rng = np.random.default_rng(int(cfg.init["seed"]))
        x0 = np.stack([s.sample(rng) for s in sets])
    return problem, x0, cfg.integrator_config()


def _common_interior_ok(sets):
    m = sets[0].dim
    return all(s.interior_margin(np.zeros(m)) > 0.0 for s in sets)


def generate_example1(seed):
    """Four agents on a star: per-agent anchored l1 plus a linear term,
    ball constraints wide enough that all contain the origin strictly."""
    n, m = 4, 4
    rng = np.random.default_rng(seed)
    for _ in range(GENERATOR_RETRIES):
        anchor = rng.uniform(-1.0, 1.0, (n, m))
        slope = rng.uniform(-1.0, 1.0, (n, m))
        centers = rng.uniform(-0.5, 0.5, (n, m))
        radii = rng.uniform(2.0, 3.0, n)
        sets = [Ball(centers[i], float(radii[i])) for i in range(n)]
        if _common_interior_ok(sets):
            break
    else:
        raise ConfigError("could not draw sets with a common interior")
    x0 = np.stack([s.sample(rng) for s in sets])
    return ExperimentConfig(
        name="example1",
        topology="star",
        n=n,
        m=m,
        objective_family="l1_linear",
        objective_params={"anchor": anchor.tolist(), "slope": slope.tolist()},
        set_family="ball",
        set_params={"centers": centers.tolist(), "radii": radii.tolist()},
        init={"mode": "explicit", "states": x0.tolist()},
        penalty="auto",
        gamma=1.05,
        integrator={"alpha": 1e-3, "max_steps": 200_000, "record_every": 50},
        seed=int(seed),
        reference="oracle",
        provenance={
            "anchor": "uniform[-1,1]^4",
            "slope": "uniform[-1,1]^4",
            "centers": "uniform[-0.5,0.5]^4",
            "radii": "uniform[2,3]",
            "init": "uniform in each ball",
        },
    )


def generate_example2(seed):
    """Thirty agents on a cycle: strongly convex quadratic plus weighted
    l1, box constraints straddling the origin."""
    n, m = 30, 10
    rng = np.random.default_rng(seed)
    for _ in range(GENERATOR_RETRIES):
        A = rng.uniform(-1.0, 1.0, (n, m, m))
        # A'A + I: positive definite with unit strong-convexity floor
        P = np.einsum("nki,nkj->nij", A, A) + np.eye(m)
        q = rng.uniform(-1.0, 1.0, (n, m))
        r = rng.uniform(0.0, 1.0, n)
        lower = rng.uniform(-2.0, -1.0, (n, m))
        upper = rng.uniform(1.0, 2.0, (n, m))
        sets = [Box(lower[i], upper[i]) for i in range(n)]
        if _common_interior_ok(sets):
            break
    else:
        raise ConfigError("could not draw sets with a common interior")
    x0 = rng.uniform(lower, upper)
    return ExperimentConfig(
        name="example2",
        topology="cycle",
        n=n,
        m=m,
        objective_family="quad_l1",
        objective_params={"P": P.tolist(), "q": q.tolist(), "r": r.tolist()},
        set_family="box",
        set_params={"lower": lower.tolist(), "upper": upper.tolist()},
        init={"mode": "explicit", "states": x0.tolist()},
        penalty="auto",
        gamma=1.05,
        # record every step: the rate-fit window must sit inside the
        # decay, which is only hundreds of steps long here
        integrator={"alpha": 1e-3, "max_steps": 20_000, "record_every": 1},
        seed=int(seed),
        reference="oracle",
        provenance={
            "P": "A'A + I, A uniform[-1,1]^(10x10)",
            "q": "uniform[-1,1]^10",
            "r": "uniform[0,1]",
            "lower": "uniform[-2,-1]^10",
            "upper": "uniform[1,2]^10",
            "init": "uniform in each box",
        },
    )


def generate_example(example, seed):
    if int(example) == 1:
        return generate_example1(seed)
    if int(example) == 2:
        return generate_example2(seed)
    raise ConfigError("example must be 1 or 2")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    record: object
    fit: object
    oracle: object
    summary: dict
    out_dir: Optional[str]
    paths: dict

    @property
    def converged(self):
        return self.record.status == dynamics.STATUS_STALLED


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(cfg, out_dir=None, backend=None, write=True):
    """Run one experiment end to end and emit its artifacts.

    Solves the centralized reference first (when requested), integrates
    the distributed flow, fits the rate, and writes trajectory.csv,
    summary.json, oracle.json, and a config.json echo to the output
    directory. With write=False nothing touches the filesystem.
    """
    problem, x0, icfg = build(cfg)
    oracle_sol = None
    reference = None
    if cfg.reference == "oracle":
        oracle_sol = solve_centralized(problem.objectives, problem.sets,
                                       backend=backend)
        reference = oracle_sol.x_star
    record = dynamics.run(problem, x0, icfg, seed=cfg.seed,
                          reference=reference, backend=backend)
    fit = None
    if record.V_values is not None:
        try:
            fit = fit_exponential_rate(record)
        except DiagnosticError:
            fit = None

    extras = {
        "example": cfg.name,
        "topology": cfg.topology,
        "n": cfg.n,
        "m": cfg.m,
        "gamma": problem.gamma,
        "equivalence_certified": problem.equivalence_certified,
        "scheme": icfg.scheme,
        "record_every": icfg.record_every,
        "max_steps": icfg.max_steps,
        "status": record.status,
        "total_steps": int(record.steps[-1]),
        "final_L": float(record.L_values[-1]),
        "generator": cfg.provenance,
    }
    if oracle_sol is not None:
        final = record.states[-1]
        gap = abs(penalized_value(problem, final) - oracle_sol.f_star)
        extras["f_star"] = oracle_sol.f_star
        extras["oracle_method"] = oracle_sol.method
        extras["per_agent_max_distance"] = float(
            max(np.linalg.norm(final[i] - oracle_sol.x_star)
                for i in range(cfg.n))
        )
        extras["relative_objective_gap"] = float(
            gap / (1.0 + abs(oracle_sol.f_star))
        )
    summary = summary_dict(record, fit, extras)

    paths = {}
    out = out_dir or cfg.out_dir
    if write:
        if out is None:
            raise ConfigError("no output directory given")
        os.makedirs(out, exist_ok=True)
        paths = {
            "trajectory": os.path.join(out, "trajectory.csv"),
            "summary": os.path.join(out, "summary.json"),
            "config": os.path.join(out, "config.json"),
        }
        write_trajectory_csv(record, paths["trajectory"])
        _write_json(summary, paths["summary"])
        # echo the config with the output location nulled: artifacts must
        # not depend on where they are written
        cfg_echo = cfg.to_dict()
        cfg_echo["out_dir"] = None
        _write_json(cfg_echo, paths["config"])
        if oracle_sol is not None:
            paths["oracle"] = os.path.join(out, "oracle.json")
            _write_json(oracle_sol.to_dict(), paths["oracle"])
    return ExperimentResult(
        config=cfg,
        record=record,
        fit=fit,
        oracle=oracle_sol,
        summary=summary,
        out_dir=out,
        paths=paths,
    )


def _sweep_one(args):
    cfg_dict, out_dir, backend = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    result = run_experiment(cfg, out_dir=out_dir, backend=backend)
    return out_dir, result.summary


def sweep(example, seeds, out_root, jobs=1, backend=None):
    """Run one experiment per seed, each into its own subdirectory."""
    tasks = []
    for s in seeds:
        cfg = generate_example(example, int(s))
        tasks.append((cfg.to_dict(), os.path.join(out_root, f"seed_{int(s)}"),
                      backend))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_one, tasks))
    return [_sweep_one(t) for t in tasks]
