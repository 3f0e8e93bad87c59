"""Experiment configuration: TOML parsing, validation, and serialization.

One TOML file describes one experiment: the base measure, the motif, the
kernel or coupling, model parameters (theta, B), solver and sampler knobs,
and a mandatory top-level seed (no entropy defaults anywhere).
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

import numpy as np

from . import kernels, measures
from .meanfield import MultistartSpec


def load_config(path) -> dict:
    with open(path, "rb") as fh:
        cfg = tomllib.load(fh)
    validate_config(cfg)
    return cfg


def parse_config(text: str) -> dict:
    cfg = tomllib.loads(text)
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict):
    if "seed" not in cfg:
        raise ValueError("config must declare an explicit top-level seed")
    if not isinstance(cfg["seed"], int):
        raise ValueError("seed must be an integer")


def dump_config(cfg: dict) -> str:
    """Serialize a config dict back to TOML (scalars, arrays, sub-tables)."""
    lines = []
    _dump_table(cfg, [], lines)
    return "\n".join(lines) + "\n"


def _dump_table(table: dict, prefix: list, lines: list):
    scalars = {k: v for k, v in table.items() if not isinstance(v, dict)}
    subs = {k: v for k, v in table.items() if isinstance(v, dict)}
    if prefix and (scalars or not subs):
        lines.append(f"[{'.'.join(prefix)}]")
    for k, v in scalars.items():
        lines.append(f"{k} = {_fmt(v)}")
    if scalars and subs:
        lines.append("")
    for k, v in subs.items():
        _dump_table(v, prefix + [k], lines)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        out = repr(float(v))
        return out if any(c in out for c in ".einf") else out + ".0"
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)} to TOML")


# -- section builders ---------------------------------------------------------


def measure_from_config(section: dict) -> measures.BaseMeasure:
    """Build the base measure from its config table.

    Supported kinds: ``ising_pm1``, ``bernoulli`` (p), ``three_point`` (w),
    ``atoms`` (points, weights), ``quadrature`` (density, a, b, nodes).
    """
    if "atoms" in section:  # literal [[points], [weights]] pair
        pts, wts = section["atoms"]
        return measures.BaseMeasure(pts, wts)
    kind = section.get("kind", "ising_pm1")
    if kind == "ising_pm1":
        return measures.ising_pm1()
    if kind == "bernoulli":
        return measures.bernoulli(float(section["p"]))
    if kind == "three_point":
        return measures.three_point(float(section["w"]))
    if kind == "atoms":
        return measures.BaseMeasure(section["points"], section["weights"])
    if kind == "quadrature":
        return measures.quadrature_measure(
            section["density"],
            float(section["a"]),
            float(section["b"]),
            int(section.get("nodes", 64)),
        )
    raise ValueError(f"unknown measure kind {kind!r}")


def motif_from_config(section: dict) -> kernels.MotifGraph:
    if "preset" in section:
        return kernels.motif_preset(section["preset"], section.get("v"))
    return kernels.MotifGraph(section["v"], [tuple(e) for e in section["edges"]])


def kernel_from_config(section: dict):
    """Build a StepKernel or CouplingMatrix from its config table."""
    if "preset" in section:
        name = section["preset"]
        if name == "er_quenched":
            return kernels.er_quenched(
                int(section["n"]), float(section["p"]), int(section["seed"])
            )
        kw = {k: v for k, v in section.items() if k != "preset"}
        return kernels.kernel_preset(name, **kw)
    if "values" in section:
        return kernels.StepKernel(section["masses"], section["values"])
    if "entries" in section:
        return kernels.CouplingMatrix(section["entries"])
    raise ValueError("kernel section needs a preset, masses/values, or entries")


@dataclass
class SamplerParams:
    n: int = 200
    sweeps: int = 500
    burn_in: int = 100
    thin: int = 1
    scan: str = "random"
    stats: tuple = ("mag", "abs_mag", "ham")


def sampler_from_config(section: dict) -> SamplerParams:
    out = SamplerParams()
    for key in ("n", "sweeps", "burn_in", "thin"):
        if key in section:
            setattr(out, key, int(section[key]))
    if "scan" in section:
        out.scan = section["scan"]
    if "stats" in section:
        out.stats = tuple(section["stats"])
    return out


def solver_from_config(section: dict, seed: int) -> MultistartSpec:
    spec = MultistartSpec(seed=seed)
    for key in ("n_random", "constant_grid", "max_iter"):
        if key in section:
            setattr(spec, key, int(section[key]))
    for key in ("damping", "tol", "value_tol", "dedup_sup", "residual_tol"):
        if key in section:
            setattr(spec, key, float(section[key]))
    if "seed" in section:
        spec.seed = int(section["seed"])
    return spec
