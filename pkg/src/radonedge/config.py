"""Plain-text experiment configs.

One ``key = value`` pair per line; ``#`` starts a comment. Phantom balls are
given by repeated ``ball = cx cy cz radius density`` lines. Numeric values
may be constant expressions (``0.7*pi``, ``-sqrt(2)/2``); vector values are
whitespace-separated, so each component must be written without spaces.

Grid keys
    ``n_theta``, ``n_gamma``, ``eps`` (required); ``rho``, ``p_min``, ``p_max``.
Probe keys
    ``theta0 = x y z`` or ``theta0_angles = theta gamma`` with optional
    ``theta0_flip = true``; ``x0 = x y z`` or ``x0_ball = k`` (1-based, the
    boundary point of ball k with inward normal theta0); ``h_min``,
    ``h_max``, ``h_step``.
Remote check
    ``remote_eps = e1 e2 ...``; ``remote_drop = k`` (1-based ball removed,
    defaults to ``x0_ball``).
Outputs
    ``profile_csv``, ``report``, ``sinogram``, ``svg``, ``remote_csv``,
    ``kernel_csv``; relative paths resolve against the output directory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError
from .expr import evaluate_number
from .phantom import Ball, Phantom, boundary_point
from .sphere_grid import SphereGrid, direction

__all__ = ["ExperimentConfig", "parse_config", "load_config", "bundled_config"]

_SCALAR = {"n_theta", "n_gamma", "eps", "rho", "p_min", "p_max", "h_min", "h_max", "h_step",
           "x0_ball", "remote_drop"}
_VECTOR = {"theta0": 3, "theta0_angles": 2, "x0": 3, "ball": 5, "remote_eps": None}
_FLAG = {"theta0_flip"}
_PATH = {"profile_csv", "report", "sinogram", "svg", "remote_csv", "kernel_csv"}
_INTEGER = {"n_theta", "n_gamma", "x0_ball", "remote_drop"}
_DEFAULT_OUTPUTS = {
    "profile_csv": "profile.csv",
    "report": "genericity.txt",
    "sinogram": "sinogram.rsg",
    "svg": "profile.svg",
    "remote_csv": "remote.csv",
    "kernel_csv": "kernel.csv",
}


@dataclass
class ExperimentConfig:
    phantom: Phantom
    grid: SphereGrid
    x0: np.ndarray | None = None
    theta0: np.ndarray | None = None
    probe_ball: int | None = None  # 0-based
    h_values: np.ndarray = field(default_factory=lambda: np.arange(-20, 21) * 0.25)
    remote_eps: tuple[float, ...] = ()
    remote_drop: int | None = None  # 0-based
    outputs: dict[str, str] = field(default_factory=lambda: dict(_DEFAULT_OUTPUTS))
    source: str = "<string>"

    def require_probe(self) -> tuple[np.ndarray, np.ndarray]:
        if self.theta0 is None:
            raise ConfigError(f"{self.source}: missing key 'theta0' (or 'theta0_angles')", key="theta0")
        if self.x0 is None:
            raise ConfigError(f"{self.source}: missing key 'x0' (or 'x0_ball')", key="x0")
        return self.x0, self.theta0

    def output_path(self, name: str, out_dir) -> Path:
        p = Path(self.outputs[name])
        return p if p.is_absolute() else Path(out_dir) / p

    def remote_phantom(self) -> Phantom | None:
        """Phantom without the probed ball; ``None`` if nothing remains."""
        drop = self.remote_drop if self.remote_drop is not None else self.probe_ball
        if drop is None:
            raise ConfigError(f"{self.source}: missing key 'remote_drop' (or 'x0_ball')", key="remote_drop")
        if len(self.phantom) == 1:
            return None
        return self.phantom.without(drop)

    def remote_grids(self) -> list[SphereGrid]:
        """Grids with the angular step tied to ``eps``: ``n -> round(n eps_ref / eps)``."""
        if not self.remote_eps:
            raise ConfigError(f"{self.source}: missing key 'remote_eps'", key="remote_eps")
        g = self.grid
        out = []
        for eps in self.remote_eps:
            scale = g.eps / eps
            out.append(SphereGrid(max(2, round(g.n_theta * scale)), max(2, round(g.n_gamma * scale)),
                                  eps, g.rho, g.p_min, g.p_max))
        return out


def _number(text: str, key: str, line: int) -> float:
    try:
        return evaluate_number(text)
    except InputError as exc:
        raise ConfigError(f"{key}: {exc}", line=line, key=key) from None


def _integer(text: str, key: str, line: int) -> int:
    v = _number(text, key, line)
    if v != int(v):
        raise ConfigError(f"{key} must be an integer, got {text}", line=line, key=key)
    return int(v)


def _flag(text: str, key: str, line: int) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key} must be true or false, got {text!r}", line=line, key=key)


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse and validate config text; every failure is a :class:`ConfigError`."""
    values: dict[str, tuple[object, int]] = {}
    balls: list[tuple[tuple[float, ...], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not value:
            raise ConfigError(f"{key}: empty value", line=lineno, key=key)
        if key in _SCALAR:
            parsed = _integer(value, key, lineno) if key in _INTEGER else _number(value, key, lineno)
        elif key in _VECTOR:
            parts = value.split()
            n = _VECTOR[key]
            if n is not None and len(parts) != n:
                raise ConfigError(f"{key} needs {n} values, got {len(parts)}", line=lineno, key=key)
            parsed = tuple(_number(p, key, lineno) for p in parts)
        elif key in _FLAG:
            parsed = _flag(value, key, lineno)
        elif key in _PATH:
            parsed = value
        else:
            raise ConfigError(f"unknown key {key!r}", line=lineno, key=key)
        if key == "ball":
            balls.append((parsed, lineno))
            continue
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {values[key][1]})", line=lineno, key=key)
        values[key] = (parsed, lineno)

    def get(key, default=None):
        return values[key][0] if key in values else default

    def line_of(key):
        return values[key][1] if key in values else None

    for key in ("n_theta", "n_gamma", "eps"):
        if key not in values:
            raise ConfigError(f"{source}: missing key {key!r}", key=key)
    if not balls:
        raise ConfigError(f"{source}: missing key 'ball' (at least one ball is required)", key="ball")

    ball_objs = []
    for row, lineno in balls:
        try:
            ball_objs.append(Ball(row[:3], row[3], row[4]))
        except (InputError, ValueError) as exc:
            raise ConfigError(f"ball: {exc}", line=lineno, key="ball") from None
    phantom = Phantom(tuple(ball_objs))

    try:
        grid = SphereGrid(get("n_theta"), get("n_gamma"), get("eps"), get("rho", 0.0),
                          get("p_min", -10.0), get("p_max", 10.0))
    except InputError as exc:
        msg = str(exc)
        key = next((k for k in ("n_theta", "n_gamma", "eps", "rho") if msg.startswith(k)), "p_min")
        raise ConfigError(msg, line=line_of(key), key=key) from None

    theta0 = None
    if "theta0" in values and "theta0_angles" in values:
        raise ConfigError("give either theta0 or theta0_angles, not both", line=line_of("theta0_angles"),
                          key="theta0_angles")
    if "theta0" in values:
        v = np.array(get("theta0"), dtype=float)
        norm = float(np.linalg.norm(v))
        if not norm > 0:
            raise ConfigError("theta0 must be nonzero", line=line_of("theta0"), key="theta0")
        theta0 = v / norm
    elif "theta0_angles" in values:
        theta0 = direction(*get("theta0_angles"))
    if theta0 is not None and get("theta0_flip", False):
        theta0 = -theta0

    x0 = None
    probe_ball = None
    if "x0" in values and "x0_ball" in values:
        raise ConfigError("give either x0 or x0_ball, not both", line=line_of("x0_ball"), key="x0_ball")
    if "x0" in values:
        x0 = np.array(get("x0"), dtype=float)
    elif "x0_ball" in values:
        k = get("x0_ball")
        if not 1 <= k <= len(phantom):
            raise ConfigError(f"x0_ball must lie in 1..{len(phantom)}", line=line_of("x0_ball"), key="x0_ball")
        if theta0 is None:
            raise ConfigError("x0_ball needs theta0 or theta0_angles", line=line_of("x0_ball"), key="x0_ball")
        probe_ball = k - 1
        x0 = boundary_point(phantom.balls[probe_ball], theta0)

    h_min, h_max, h_step = get("h_min", -5.0), get("h_max", 5.0), get("h_step", 0.25)
    if not h_step > 0:
        raise ConfigError("h_step must be positive", line=line_of("h_step"), key="h_step")
    if h_max < h_min:
        raise ConfigError("h_max must be at least h_min", line=line_of("h_max"), key="h_max")
    n_h = int(math.floor((h_max - h_min) / h_step + 1e-9)) + 1
    h_values = h_min + h_step * np.arange(n_h)

    remote_eps = tuple(get("remote_eps", ()))
    if any(not e > 0 for e in remote_eps):
        raise ConfigError("remote_eps values must be positive", line=line_of("remote_eps"), key="remote_eps")
    remote_drop = get("remote_drop")
    if remote_drop is not None:
        if not 1 <= remote_drop <= len(phantom):
            raise ConfigError(f"remote_drop must lie in 1..{len(phantom)}", line=line_of("remote_drop"),
                              key="remote_drop")
        remote_drop -= 1

    outputs = dict(_DEFAULT_OUTPUTS)
    outputs.update({k: get(k) for k in _PATH if k in values})
    return ExperimentConfig(phantom, grid, x0, theta0, probe_ball, h_values, remote_eps, remote_drop,
                            outputs, source)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package (``fig1``, ``fig2a``, ``fig2b``, ``remote``)."""
    p = Path(__file__).parent / "configs" / (name if name.endswith(".cfg") else name + ".cfg")
    if not p.exists():
        raise ConfigError(f"no bundled config named {name!r}")
    return p

