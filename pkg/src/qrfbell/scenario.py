"""Scenario files, end-to-end runs and report files.

A scenario is a flat ``key = value`` document with dotted keys::

    # singlet seen from the laboratory, C moving perpendicular to B
    masses.C = 1000
    geometry.mode = noncollinear
    geometry.xi = 90deg
    packet.eta.center = 0.5
    packet.eta.width = 0.1
    packet.phi.beta = 0.4, 0.7
    packet.phi.width = 20
    spin = singlet
    settings = optimal-singlet
    settings.mode = both

Lists are comma separated, complex numbers use Python syntax (``0.5-0.5j``),
``#`` starts a comment.
"""

from __future__ import annotations

import csv
import io
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .bell import (
    TSIRELSON,
    BellSettings,
    ChshResult,
    chsh,
    correlation_tensor_frame_a,
    effective_tensor,
    horodecki_bound,
    mean_wigner_cosine,
    optimal_settings,
)
from .errors import ConvergenceError, DomainError, ParseError
from .qrf import oracle_discrepancy, transform_to_lab_collinear, transform_to_lab_noncollinear
from .spin import UNIT_TOL
from .state import (
    SINGLET,
    EDGE_WIDTHS,
    Masses,
    assemble_frame_a_state,
    build_grid,
    direction_at_angle,
    gaussian_packet,
    superpose,
)

CSV_COLUMNS = (
    "frame", "mode", "E11", "E12", "E21", "E22", "S",
    "chsh_max_horodecki", "mean_cos_omega", "grid_points",
)
SWEEP_COLUMNS = ("value", "abs_S_A", "abs_S_C_naive", "abs_S_C_coherent", "mean_cos_omega")
CONVERGENCE_TOL = 1e-6
MIN_GRID_POINTS = 16
AUTO_RANGE_WIDTHS = 10.0

SPIN_PRESETS = {
    "singlet": SINGLET,
    "up-up": np.array([[1, 0], [0, 0]], dtype=complex),
    "up-down": np.array([[0, 1], [0, 0]], dtype=complex),
}


@dataclass(frozen=True)
class PacketSpec:
    centers: tuple
    widths: tuple
    amplitudes: tuple

    def build(self, grid):
        packets = [gaussian_packet(grid, c, w) for c, w in zip(self.centers, self.widths)]
        return superpose(packets, self.amplitudes)

    def support(self):
        lo = min(c - AUTO_RANGE_WIDTHS * w for c, w in zip(self.centers, self.widths))
        hi = max(c + AUTO_RANGE_WIDTHS * w for c, w in zip(self.centers, self.widths))
        return lo, hi

    def clipped_by(self, lo, hi):
        return any(c - EDGE_WIDTHS * w < lo or c + EDGE_WIDTHS * w > hi for c, w in zip(self.centers, self.widths))


@dataclass(frozen=True)
class Scenario:
    masses: Masses
    xi: float
    geometry: str
    eta: PacketSpec
    phi: PacketSpec
    spin: np.ndarray
    settings: BellSettings | None
    settings_preset: str | None
    modes: tuple
    frames: tuple
    grid_points: int
    grid_B: tuple | None
    grid_C: tuple | None
    seed: int
    oracle: bool = False
    grid_check: bool = False
    name: str = ""
    source: str = field(default="", repr=False)
    entries: dict = field(default_factory=dict, repr=False)


# parsing -------------------------------------------------------------------

KNOWN_KEYS = {
    "name", "seed", "frame",
    "masses.A", "masses.B", "masses.C",
    "geometry.mode", "geometry.xi",
    "spin", "spin.c",
    "settings", "settings.mode", "settings.x1", "settings.x2", "settings.y1", "settings.y2",
    "grid.points", "grid.B.min", "grid.B.max", "grid.C.min", "grid.C.max",
    "oracle", "grid_check",
}
for _p in ("eta", "phi"):
    KNOWN_KEYS |= {f"packet.{_p}.{k}" for k in ("center", "beta", "width", "amplitude")}


def _tokenise(text):
    entries, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ParseError("unknown key", key=key, line=lineno)
        if key in entries:
            raise ParseError("duplicate key", key=key, line=lineno)
        if not value:
            raise ParseError("empty value", key=key, line=lineno)
        entries[key] = value
        lines[key] = lineno
    return entries, lines


class _Reader:
    def __init__(self, entries, lines):
        self.entries = entries
        self.lines = lines

    def error(self, key, message):
        return ParseError(message, key=key, line=self.lines.get(key))

    def has(self, key):
        return key in self.entries

    def raw(self, key, default=None, required=False):
        if key not in self.entries:
            if required:
                raise ParseError("missing required key", key=key)
            return default
        return self.entries[key]

    def number(self, key, default=None, required=False, positive=False):
        raw = self.raw(key, default=None, required=required)
        if raw is None:
            return default
        try:
            value = float(raw)
        except ValueError:
            raise self.error(key, f"not a number: {raw!r}") from None
        if not np.isfinite(value) or (positive and value <= 0):
            raise self.error(key, f"must be {'positive and ' if positive else ''}finite, got {raw!r}")
        return value

    def numbers(self, key, kind=float, required=False):
        raw = self.raw(key, required=required)
        if raw is None:
            return None
        try:
            return tuple(kind(tok.strip().replace(" ", "")) for tok in raw.split(","))
        except ValueError:
            raise self.error(key, f"could not parse list {raw!r}") from None

    def angle(self, key, default=None):
        raw = self.raw(key)
        if raw is None:
            return default
        text = raw.lower().replace(" ", "")
        try:
            if text.endswith("deg"):
                return float(np.deg2rad(float(text[:-3])))
            return float(text)
        except ValueError:
            raise self.error(key, f"not an angle: {raw!r}") from None

    def choice(self, key, options, default=None):
        raw = self.raw(key, default=default)
        if raw not in options:
            raise self.error(key, f"must be one of {sorted(options)}, got {raw!r}")
        return raw

    def flag(self, key, default=False):
        raw = self.raw(key)
        if raw is None:
            return default
        if raw.lower() in ("true", "yes", "1"):
            return True
        if raw.lower() in ("false", "no", "0"):
            return False
        raise self.error(key, f"not a boolean: {raw!r}")


def _packet(reader, label, mass):
    prefix = f"packet.{label}"
    centers = reader.numbers(f"{prefix}.center")
    betas = reader.numbers(f"{prefix}.beta")
    if (centers is None) == (betas is None):
        raise ParseError(f"give exactly one of {prefix}.center or {prefix}.beta", key=f"{prefix}.center")
    if betas is not None:
        if any(abs(b) >= 1 for b in betas):
            raise reader.error(f"{prefix}.beta", "speeds must satisfy |beta| < 1")
        centers = tuple(mass * b / np.sqrt(1 - b * b) for b in betas)
    widths = reader.numbers(f"{prefix}.width", required=True)
    if len(widths) == 1:
        widths = widths * len(centers)
    if len(widths) != len(centers) or any(not w > 0 for w in widths):
        raise reader.error(f"{prefix}.width", "need one positive width per peak")
    amps = reader.numbers(f"{prefix}.amplitude", kind=complex) or (1.0,) * len(centers)
    if len(amps) != len(centers):
        raise reader.error(f"{prefix}.amplitude", "need one amplitude per peak")
    return PacketSpec(tuple(float(c) for c in centers), tuple(widths), tuple(amps))


def _vector(reader, key):
    vals = reader.numbers(key, required=True)
    if len(vals) != 3:
        raise reader.error(key, "setting must have three components")
    norm = float(np.linalg.norm(vals))
    if abs(norm - 1.0) > UNIT_TOL:
        raise reader.error(key, f"setting is not a unit vector (norm {norm!r})")
    return np.array(vals)


def parse_scenario(text):
    """Parse and validate a scenario document; raises :class:`ParseError`."""
    entries, lines = _tokenise(text)
    r = _Reader(entries, lines)
    masses = Masses(
        r.number("masses.A", 1.0, positive=True),
        r.number("masses.B", 1.0, positive=True),
        r.number("masses.C", 1000.0, positive=True),
    )
    geometry = r.choice("geometry.mode", {"collinear", "noncollinear"}, "collinear")
    xi = r.angle("geometry.xi")
    if geometry == "noncollinear":
        if xi is None:
            raise ParseError("missing required key", key="geometry.xi")
        if abs(np.sin(xi)) < 1e-15:
            warnings.warn("geometry.xi makes the motion collinear; running the collinear transformation", stacklevel=2)
    else:
        xi = 0.0 if xi is None else xi
        if abs(np.sin(xi)) > 1e-15:
            raise r.error("geometry.xi", "collinear geometry needs xi = 0 or pi")

    eta = _packet(r, "eta", masses.m_B)
    phi = _packet(r, "phi", masses.m_C)

    if r.has("spin") == r.has("spin.c"):
        raise ParseError("give exactly one of spin (preset) or spin.c", key="spin")
    if r.has("spin"):
        spin = SPIN_PRESETS.get(r.raw("spin"))
        if spin is None:
            raise r.error("spin", f"unknown preset; choose from {sorted(SPIN_PRESETS)}")
    else:
        vals = r.numbers("spin.c", kind=complex)
        if len(vals) != 4:
            raise r.error("spin.c", "need four coefficients c(++), c(+-), c(-+), c(--)")
        spin = np.array(vals, dtype=complex).reshape(2, 2)
        total = float(np.sum(np.abs(spin) ** 2))
        if abs(total - 1.0) > 1e-10:
            raise r.error("spin.c", f"coefficients are not normalised (sum |c|^2 = {total!r})")

    default_modes = "both" if geometry == "noncollinear" else "naive"
    mode_key = r.choice("settings.mode", {"naive", "coherent", "both"}, default_modes)
    modes = ("naive", "coherent") if mode_key == "both" else (mode_key,)

    preset = r.raw("settings", required=True)
    settings = None
    if preset == "optimal-singlet":
        settings = BellSettings.optimal_singlet()
    elif preset == "explicit":
        settings = BellSettings(*(_vector(r, f"settings.{k}") for k in ("x1", "x2", "y1", "y2")))
    elif preset != "optimal":
        raise r.error("settings", "must be optimal-singlet, optimal or explicit")
    if preset != "explicit":
        for k in ("x1", "x2", "y1", "y2"):
            if r.has(f"settings.{k}"):
                raise r.error(f"settings.{k}", "explicit vectors need settings = explicit")

    frame = r.choice("frame", {"A", "C", "both"}, "both")
    frames = ("A", "C") if frame == "both" else (frame,)

    points = r.number("grid.points", 256.0)
    if points != int(points) or points < MIN_GRID_POINTS:
        raise r.error("grid.points", f"need an integer >= {MIN_GRID_POINTS}")

    def _range(label):
        lo, hi = r.number(f"grid.{label}.min"), r.number(f"grid.{label}.max")
        if (lo is None) != (hi is None):
            raise ParseError("give both min and max", key=f"grid.{label}.min")
        if lo is not None and not lo < hi:
            raise r.error(f"grid.{label}.max", "need min < max")
        return None if lo is None else (lo, hi)

    seed = r.number("seed", 0.0)
    if seed != int(seed):
        raise r.error("seed", "must be an integer")

    return Scenario(
        masses=masses, xi=float(xi), geometry=geometry, eta=eta, phi=phi, spin=spin,
        settings=settings, settings_preset=preset, modes=modes, frames=frames,
        grid_points=int(points), grid_B=_range("B"), grid_C=_range("C"), seed=int(seed),
        oracle=r.flag("oracle"), grid_check=r.flag("grid_check"), name=r.raw("name", ""),
        source=text, entries=dict(entries),
    )


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def override(scenario, key, value):
    """Scenario with one key replaced (as text) and re-validated."""
    if key not in KNOWN_KEYS:
        raise ParseError("unknown key", key=key)
    entries = dict(scenario.entries)
    entries[key] = str(value)
    if key.endswith(".beta"):
        entries.pop(key[: -len("beta")] + "center", None)
    elif key.endswith(".center"):
        entries.pop(key[: -len("center")] + "beta", None)
    text = "\n".join(f"{k} = {v}" for k, v in entries.items())
    new = parse_scenario(text)
    return replace(new, oracle=scenario.oracle, grid_check=scenario.grid_check)


# running -------------------------------------------------------------------


@dataclass
class ResultRow:
    result: ChshResult
    horodecki: float
    mean_cos_omega: float
    grid_points: int
    refined_S: float | None = None

    @property
    def delta_S(self):
        return None if self.refined_S is None else abs(self.refined_S - self.result.S)


@dataclass
class Report:
    scenario: Scenario
    rows: list
    tensor: np.ndarray
    settings: BellSettings
    wigner_stats: dict | None
    oracle_gap: float | None
    seed: int
    version: str = __version__
    sweep_key: str | None = None
    sweep: list = field(default_factory=list)

    @property
    def converged(self):
        deltas = [r.delta_S for r in self.rows if r.delta_S is not None]
        return None if not deltas else max(deltas) <= CONVERGENCE_TOL

    def row(self, frame, mode="naive"):
        for r in self.rows:
            if r.result.frame == frame and r.result.mode == mode:
                return r
        raise KeyError((frame, mode))


def _grid_for(spec, mass, direction, explicit, points, label):
    if explicit is None:
        lo, hi = spec.support()
    else:
        lo, hi = explicit
        if spec.clipped_by(lo, hi):
            slo, shi = spec.support()
            raise ConvergenceError(
                f"grid {label} range [{lo:g}, {hi:g}] clips the packet support; "
                f"suggested range [{slo:.6g}, {shi:.6g}]"
            )
    return build_grid(mass, direction, lo, hi, points)


def build_state(scenario, points=None):
    points = points or scenario.grid_points
    m = scenario.masses
    grid_B = _grid_for(scenario.eta, m.m_B, np.array([1.0, 0.0, 0.0]), scenario.grid_B, points, "B")
    u = direction_at_angle(scenario.xi)
    if abs(u[1]) < 1e-15:
        u = np.array([np.sign(u[0]), 0.0, 0.0])
    grid_C = _grid_for(scenario.phi, m.m_C, u, scenario.grid_C, points, "C")
    return assemble_frame_a_state(scenario.spin, scenario.eta.build(grid_B), scenario.phi.build(grid_C), m)


def _lab_state(scenario, state):
    if scenario.geometry == "collinear" or abs(state.grid_C.direction[1]) == 0.0:
        return transform_to_lab_collinear(state)
    method = "oracle" if scenario.oracle else "closed"
    return transform_to_lab_noncollinear(state, method=method, check_oracle=True)


def _evaluate(scenario, settings, points):
    state = build_state(scenario, points)
    out = {}
    if "A" in scenario.frames:
        t = effective_tensor(state, "naive")
        out["A", "naive"] = (chsh(state, settings.with_mode("naive")), horodecki_bound(t), 1.0)
    lab = None
    if "C" in scenario.frames:
        lab = _lab_state(scenario, state)
        mean_cos = mean_wigner_cosine(lab)
        for mode in scenario.modes:
            t = effective_tensor(lab, mode)
            out["C", mode] = (chsh(lab, settings.with_mode(mode)), horodecki_bound(t), mean_cos)
    return state, lab, out


def _wigner_stats(lab):
    prob = np.sum(np.abs(lab.psi) ** 2, axis=(0, 1)) * lab.weights
    support = prob > 1e-12 * prob.max()
    cos_w = lab.wigner_cos[support]
    return {
        "min": float(cos_w.min()),
        "mean": float(np.sum(prob * lab.wigner_cos) / prob.sum()),
        "max": float(cos_w.max()),
    }


def run_scenario(scenario: Scenario) -> Report:
    """Build the state, transform it, evaluate CHSH in each requested frame/mode."""
    state = build_state(scenario)
    tensor = correlation_tensor_frame_a(state).entries
    if scenario.settings is not None:
        settings = scenario.settings
    else:
        settings, _ = optimal_settings(tensor, seed=scenario.seed)
    _, lab, values = _evaluate(scenario, settings, scenario.grid_points)
    refined = {}
    if scenario.grid_check:
        _, _, fine = _evaluate(scenario, settings, 2 * scenario.grid_points)
        refined = {k: v[0].S for k, v in fine.items()}
    rows = []
    for key, (res, bound, mean_cos) in values.items():
        if abs(res.S) > TSIRELSON + 1e-9:
            raise DomainError(f"CHSH value {res.S!r} exceeds the Tsirelson bound")
        rows.append(ResultRow(res, bound, mean_cos, scenario.grid_points, refined.get(key)))
    stats = gap = None
    if lab is not None and lab.kind == "noncollinear":
        stats = _wigner_stats(lab)
        gap = oracle_discrepancy(state)
    return Report(scenario, rows, tensor, settings, stats, gap, scenario.seed)


def run_sweep(scenario, key, values, workers=None):
    """Run the scenario once per value of ``key``; results keep the input order."""
    points = [override(scenario, key, repr(float(v))) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(run_scenario, points))
    return list(zip((float(v) for v in values), reports))


def parse_sweep(spec):
    """``key=start:stop:steps`` -> ``(key, values)``."""
    try:
        key, rng = spec.split("=", 1)
        start, stop, steps = rng.split(":")
        values = np.linspace(float(start), float(stop), int(steps))
    except ValueError:
        raise ParseError(f"sweep must look like key=start:stop:steps, got {spec!r}") from None
    if int(steps) < 1:
        raise ParseError("sweep needs at least one step", key=key.strip())
    key = key.strip()
    if key not in KNOWN_KEYS:
        raise ParseError("unknown key", key=key)
    return key, values


# output --------------------------------------------------------------------


def _g(x):
    return "" if x is None else format(float(x), ".17g")


def results_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        r = row.result
        writer.writerow([
            r.frame, r.mode, _g(r.E11), _g(r.E12), _g(r.E21), _g(r.E22), _g(r.S),
            _g(row.horodecki), _g(row.mean_cos_omega), row.grid_points,
        ])
    return buf.getvalue()


def sweep_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((report.sweep_key,) + SWEEP_COLUMNS[1:])
    for value, sub in report.sweep:
        cells = {}
        mean_cos = None
        for row in sub.rows:
            cells[row.result.frame, row.result.mode] = abs(row.result.S)
            if row.result.frame == "C":
                mean_cos = row.mean_cos_omega
        writer.writerow([
            _g(value), _g(cells.get(("A", "naive"))), _g(cells.get(("C", "naive"))),
            _g(cells.get(("C", "coherent"))), _g(mean_cos),
        ])
    return buf.getvalue()


def summary_text(report):
    s = report.scenario
    lines = [
        f"qrfbell {report.version}  scenario {s.name or '(unnamed)'}  seed {report.seed}",
        f"masses A={s.masses.m_A:g} B={s.masses.m_B:g} C={s.masses.m_C:g}  "
        f"geometry {s.geometry} xi={np.rad2deg(s.xi):g} deg  grid {s.grid_points} points",
        "",
        f"{'frame':<6}{'mode':<10}{'E11':>12}{'E12':>12}{'E21':>12}{'E22':>12}{'S':>14}{'max|S|':>12}{'<cos W>':>12}",
    ]
    for row in report.rows:
        r = row.result
        lines.append(
            f"{r.frame:<6}{r.mode:<10}{r.E11:>12.8f}{r.E12:>12.8f}{r.E21:>12.8f}{r.E22:>12.8f}"
            f"{r.S:>14.10f}{row.horodecki:>12.8f}{row.mean_cos_omega:>12.8f}"
        )
    lines += ["", "correlation tensor (frame A):"]
    lines += ["  " + "  ".join(f"{v:+.10f}" for v in r) for r in report.tensor]
    if report.wigner_stats:
        w = report.wigner_stats
        lines += ["", f"Wigner cos W over supported pairs: min {w['min']:.10f} mean {w['mean']:.10f} max {w['max']:.10f}"]
        lines.append(f"closed form vs matrix oracle: max |d cos W| = {report.oracle_gap:.3e}")
    if report.converged is not None:
        lines.append("")
        for row in report.rows:
            lines.append(
                f"grid check {row.result.frame}/{row.result.mode}: S({row.grid_points}) = {row.result.S:.12f}, "
                f"S({2 * row.grid_points}) = {row.refined_S:.12f}, |dS| = {row.delta_S:.3e}"
            )
        lines.append("converged" if report.converged else f"NON-CONVERGED (|dS| > {CONVERGENCE_TOL:g})")
    if report.sweep:
        lines += ["", f"sweep over {report.sweep_key}: {len(report.sweep)} points (see sweep.csv)"]
    lines += ["", "scenario:", *("  " + ln for ln in s.source.strip().splitlines())]
    return "\n".join(lines) + "\n"


def emit_report(report, path):
    """Write ``summary.txt``, ``results.csv`` and, for sweeps, ``sweep.csv`` into ``path``.

    Returns the list of written file paths.
    """
    os.makedirs(path, exist_ok=True)
    files = [("summary.txt", summary_text(report)), ("results.csv", results_csv(report))]
    if report.sweep:
        files.append(("sweep.csv", sweep_csv(report)))
    written = []
    for name, content in files:
        target = os.path.join(path, name)
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        written.append(target)
    return written
