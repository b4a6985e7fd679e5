"""Scenario files: validation, loading, and orchestration of runs.

A scenario is a single JSON document (strictly validated against the shipped
schema) that fixes the detector, the time grid, the waveform or stationary
prior, the hypothesis priors and the Monte Carlo controls.  Runs produce a
structured output document; everything in it except ``provenance.timestamp``
is a pure function of the scenario, so re-running with the same seed
reproduces the canonical payload byte for byte.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from ._rng import check_seed
from ._version import __version__
from .bounds import (
    bounds_report,
    gamma_f_stochastic,
    helstrom_bayes_bound,
    log_fidelity_optomech,
    neyman_pearson_bound,
)
from .errors import NumericsError, ValidationError
from .optomech import OptomechDetector
from .receivers import (
    KENNEDY_ROUTE_TOL,
    bayes_threshold,
    chernoff_exponent_stochastic,
    homodyne_error_probs,
    homodyne_snr,
    kennedy_p01_deterministic,
    kennedy_p01_stochastic,
    simulate_homodyne_mc,
    simulate_kennedy_mc,
)
from .spectral import (
    BANDWIDTH_EDGE_FRACTION,
    BANDWIDTH_RATIO,
    TimeGrid,
    TimeSeries,
    bandwidth_overrides,
    forward_transform,
)
from .waveform import (
    FlatBandPrior,
    GaussianPulse,
    LorentzianPrior,
    SampledWaveform,
    Sinusoid,
    render,
)

SCHEMA_VERSION = 1
RECEIVER_NAMES = ("homodyne", "kennedy", "dolinar")
MODES = ("analytic", "mc", "both")
SWEEP_COLUMNS = (
    "value",
    "fidelity",
    "gamma_f",
    "gamma_hom",
    "gamma_ken",
    "bayes_bound",
    "np_p01_at_p10_0.01",
)


# ---------------------------------------------------------------------------
# schema plumbing
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    text = resources.files("qdetlim.schema").joinpath(name).read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def _validator(name: str) -> jsonschema.Draft202012Validator:
    schema = _schema(name)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def _check_against(name: str, doc, what: str) -> None:
    errors = list(_validator(name).iter_errors(doc))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        where = best.json_path if best.json_path != "$" else "document root"
        more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
        raise ValidationError(f"invalid {what}: {where}: {best.message}{more}")


def validate_scenario_dict(doc) -> None:
    """Strict structural validation of a scenario document."""
    _check_against("scenario.schema.json", doc, "scenario")


def validate_run_output(doc) -> None:
    """Validate a run output document against the shipped schema."""
    _check_against("run_output.schema.json", doc, "run output")
    validate_scenario_dict(doc["scenario_echo"])


# ---------------------------------------------------------------------------
# scenario objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tolerances:
    bandwidth_edge_fraction: float = BANDWIDTH_EDGE_FRACTION
    bandwidth_ratio: float = BANDWIDTH_RATIO
    kennedy_route_tol: float = KENNEDY_ROUTE_TOL

    def to_dict(self) -> dict:
        return {
            "bandwidth_edge_fraction": self.bandwidth_edge_fraction,
            "bandwidth_ratio": self.bandwidth_ratio,
            "kennedy_route_tol": self.kennedy_route_tol,
        }


@dataclass(frozen=True)
class Scenario:
    """A fully validated scenario, ready to run."""

    detector: OptomechDetector
    grid: TimeGrid
    waveform: object
    p0: float
    qnc: bool
    seed: int
    trials: int
    tolerances: Tolerances

    @property
    def stochastic(self) -> bool:
        return isinstance(self.waveform, (LorentzianPrior, FlatBandPrior))


def _detector_from(doc: dict) -> OptomechDetector:
    mf = doc["mean_field"]
    mean_field = complex(mf[0], mf[1]) if isinstance(mf, list) else complex(mf)
    return OptomechDetector(
        gamma=float(doc["gamma"]),
        omega0=float(doc["omega0"]),
        cav_length=float(doc["cav_length"]),
        mean_field=mean_field,
        mass=float(doc["mass"]),
        omega_m=float(doc["omega_m"]),
        gamma_m=float(doc["gamma_m"]),
        hbar=float(doc.get("hbar", 1.0)),
        s_eta_excess=float(doc.get("s_eta_excess", 1.0)),
    )


def _waveform_from(doc: dict, grid: TimeGrid):
    kind = doc["kind"]
    if kind == "sinusoid":
        return Sinusoid(float(doc["amplitude"]), float(doc["omega"]), float(doc.get("phase", 0.0)))
    if kind == "gaussian_pulse":
        return GaussianPulse(float(doc["area"]), float(doc["center"]), float(doc["width"]))
    if kind == "sampled":
        values = np.asarray(doc["values"], dtype=float)
        if values.shape != (grid.n,):
            raise ValidationError(
                f"sampled waveform has {values.size} samples but the grid has {grid.n}"
            )
        return SampledWaveform(TimeSeries(grid, values))
    if kind == "lorentzian":
        prior = LorentzianPrior(float(doc["s0"]), float(doc["omega_c"]))
    elif kind == "flat_band":
        prior = FlatBandPrior(float(doc["s0"]), float(doc["omega_lo"]), float(doc["omega_hi"]))
    else:  # unreachable behind the schema
        raise ValidationError(f"unknown waveform kind {kind!r}")
    prior.check_grid(grid)
    return prior


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a :class:`Scenario` from a parsed JSON document."""
    validate_scenario_dict(doc)
    detector = _detector_from(doc["detector"])
    g = doc["grid"]
    grid = TimeGrid(float(g["t_i"]), float(g["t_f"]), int(g["n"]))
    waveform = _waveform_from(doc["waveform"], grid)
    p0 = float(doc.get("priors", {}).get("p0", 0.5))
    tol_doc = doc.get("tolerances", {})
    tolerances = Tolerances(
        bandwidth_edge_fraction=float(
            tol_doc.get("bandwidth_edge_fraction", BANDWIDTH_EDGE_FRACTION)
        ),
        bandwidth_ratio=float(tol_doc.get("bandwidth_ratio", BANDWIDTH_RATIO)),
        kennedy_route_tol=float(tol_doc.get("kennedy_route_tol", KENNEDY_ROUTE_TOL)),
    )
    return Scenario(
        detector=detector,
        grid=grid,
        waveform=waveform,
        p0=p0,
        qnc=bool(doc.get("qnc", True)),
        seed=check_seed(doc.get("seed", 0)),
        trials=int(doc.get("trials", 10000)),
        tolerances=tolerances,
    )


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def _waveform_echo(waveform) -> dict:
    if isinstance(waveform, Sinusoid):
        return {
            "kind": "sinusoid",
            "amplitude": float(waveform.amplitude),
            "omega": float(waveform.omega),
            "phase": float(waveform.phase),
        }
    if isinstance(waveform, GaussianPulse):
        return {
            "kind": "gaussian_pulse",
            "area": float(waveform.area),
            "center": float(waveform.center),
            "width": float(waveform.width),
        }
    if isinstance(waveform, SampledWaveform):
        return {"kind": "sampled", "values": [float(v) for v in np.asarray(waveform.ts.values)]}
    if isinstance(waveform, LorentzianPrior):
        return {"kind": "lorentzian", "s0": float(waveform.s0), "omega_c": float(waveform.omega_c)}
    if isinstance(waveform, FlatBandPrior):
        return {
            "kind": "flat_band",
            "s0": float(waveform.s0),
            "omega_lo": float(waveform.omega_lo),
            "omega_hi": float(waveform.omega_hi),
        }
    raise ValidationError(f"cannot serialize waveform of type {type(waveform).__name__}")


def scenario_echo(sc: Scenario) -> dict:
    """The scenario as a normalized document with every default materialized."""
    det = sc.detector
    return {
        "schema_version": SCHEMA_VERSION,
        "detector": {
            "gamma": float(det.gamma),
            "omega0": float(det.omega0),
            "cav_length": float(det.cav_length),
            "mean_field": [float(det.mean_field.real), float(det.mean_field.imag)],
            "mass": float(det.mass),
            "omega_m": float(det.omega_m),
            "gamma_m": float(det.gamma_m),
            "hbar": float(det.hbar),
            "s_eta_excess": float(det.s_eta_excess),
        },
        "grid": {"t_i": float(sc.grid.t_i), "t_f": float(sc.grid.t_f), "n": int(sc.grid.n)},
        "waveform": _waveform_echo(sc.waveform),
        "priors": {"p0": float(sc.p0)},
        "qnc": bool(sc.qnc),
        "seed": int(sc.seed),
        "trials": int(sc.trials),
        "tolerances": sc.tolerances.to_dict(),
    }


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def _overrides(sc: Scenario):
    return bandwidth_overrides(
        edge_fraction=sc.tolerances.bandwidth_edge_fraction,
        warn_ratio=sc.tolerances.bandwidth_ratio,
    )


def _log_fidelity(sc: Scenario, strict: bool) -> float:
    det = sc.detector
    if sc.stochastic:
        return gamma_f_stochastic(
            det.position_psd, sc.waveform.psd, sc.grid, det.hbar, strict=strict
        ).log_fidelity
    spec = forward_transform(render(sc.waveform, sc.grid))
    return log_fidelity_optomech(det, spec, strict=strict)


def _provenance(seed: int) -> dict:
    return {
        "tool_version": __version__,
        "seed": int(seed),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def run_bounds(sc: Scenario, *, strict: bool = False) -> dict:
    """Fidelity, Bayes bound, trade-off curve and exponent for a scenario."""
    with _overrides(sc):
        report = bounds_report(_log_fidelity(sc, strict), sc.grid.duration, sc.p0)
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario_echo": scenario_echo(sc),
        "bounds": report.to_dict(),
        "receivers": [],
        "provenance": _provenance(sc.seed),
    }


def _entry(name, p10, p01, p0, exponent, mc=None) -> dict:
    if p10 is None or p01 is None:
        p_e = None
    else:
        p_e = p0 * p10 + (1.0 - p0) * p01
    return {
        "name": name,
        "p10": p10,
        "p01": p01,
        "p0": p0,
        "p_e": p_e,
        "exponent": exponent,
        "mc": mc,
        "mc_vs_analytic_se": None,
    }


def _delta_se(hat: float, analytic, se: float):
    if analytic is None:
        return None
    if se > 0.0:
        return (hat - analytic) / se
    return 0.0 if hat == analytic else None


def _receiver_entries(sc: Scenario, which, mode, strict: bool) -> list[dict]:
    det, grid, p0 = sc.detector, sc.grid, sc.p0
    duration = grid.duration
    entries: list[dict] = []

    fidelity = math.exp(_log_fidelity(sc, strict))
    gamma_f = -math.log(fidelity) / duration if fidelity > 0 else math.inf

    lam = bayes_threshold(p0) if "homodyne" in which else None
    x_ts = None if sc.stochastic else render(sc.waveform, grid)
    x_spec = None if x_ts is None else forward_transform(x_ts)

    for name in RECEIVER_NAMES:
        if name not in which:
            continue
        analytic_probs = {"p10": None, "p01": None}
        if name == "homodyne":
            if sc.stochastic:
                exponent = chernoff_exponent_stochastic(
                    det, sc.waveform, grid, qnc=sc.qnc, strict=strict
                ).gamma
                analytic = _entry(name, None, None, p0, exponent)
            else:
                sigma2 = homodyne_snr(det, x_spec, qnc=sc.qnc, strict=strict)
                p10, p01 = homodyne_error_probs(math.sqrt(sigma2), lam)
                exponent = sigma2 / duration
                analytic = _entry(name, p10, p01, p0, exponent)
                analytic_probs = {"p10": p10, "p01": p01}
        elif name == "kennedy":
            if sc.stochastic:
                ks = kennedy_p01_stochastic(det, sc.waveform, grid, qnc=sc.qnc, strict=strict)
                analytic = _entry(name, 0.0, ks.p01, p0, ks.gamma_f)
                analytic_probs = {"p10": 0.0, "p01": ks.p01}
            else:
                kd = kennedy_p01_deterministic(
                    det,
                    x_ts,
                    qnc=sc.qnc,
                    route_tol=sc.tolerances.kennedy_route_tol,
                    strict=strict,
                )
                analytic = _entry(name, 0.0, kd.p01, p0, kd.energy_freq / duration)
                analytic_probs = {"p10": 0.0, "p01": kd.p01}
        else:  # dolinar
            analytic = _entry(name, None, None, p0, gamma_f)
            analytic["p_e"] = helstrom_bayes_bound(fidelity, p0)

        if mode in ("analytic", "both"):
            entries.append(analytic)

        if mode in ("mc", "both") and name != "dolinar":
            if name == "homodyne":
                result = simulate_homodyne_mc(
                    det, sc.waveform, grid, sc.trials, lam, sc.seed, p0=p0, qnc=sc.qnc
                )
            else:
                result = simulate_kennedy_mc(
                    det, sc.waveform, grid, sc.trials, sc.seed, p0=p0, qnc=sc.qnc
                )
            mc_entry = result.to_dict()
            mc_entry["mc_vs_analytic_se"] = None
            if mode == "both":
                mc_entry["mc_vs_analytic_se"] = {
                    "p10": _delta_se(result.mc.p10_hat, analytic_probs["p10"], result.mc.p10_se),
                    "p01": _delta_se(result.mc.p01_hat, analytic_probs["p01"], result.mc.p01_se),
                }
            entries.append(mc_entry)
    return entries


def run_receivers(sc: Scenario, which=RECEIVER_NAMES, mode: str = "analytic", *, strict: bool = False) -> dict:
    """Receiver performance (analytic, Monte Carlo, or both) for a scenario."""
    which = tuple(which)
    for name in which:
        if name not in RECEIVER_NAMES:
            raise ValidationError(f"unknown receiver {name!r}; choose from {RECEIVER_NAMES}")
    if not which:
        raise ValidationError("no receivers requested")
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; choose from {MODES}")
    if not sc.qnc and ({"homodyne", "kennedy"} & set(which)):
        raise ValidationError(
            "homodyne and Kennedy receivers model the backaction-cancelled output; "
            "this scenario has qnc off, so only bounds (and the Dolinar value) apply"
        )
    with _overrides(sc):
        report = bounds_report(_log_fidelity(sc, strict), sc.grid.duration, sc.p0)
        receivers = _receiver_entries(sc, which, mode, strict)
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario_echo": scenario_echo(sc),
        "bounds": report.to_dict(),
        "receivers": receivers,
        "provenance": _provenance(sc.seed),
    }


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def _set_path(doc: dict, path: str, value: float) -> None:
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        if not (isinstance(node, dict) and part in node):
            raise ValidationError(f"unknown parameter path {path!r}")
        node = node[part]
    leaf = parts[-1]
    if not (isinstance(node, dict) and leaf in node):
        raise ValidationError(f"unknown parameter path {path!r}")
    current = node[leaf]
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise ValidationError(f"parameter path {path!r} does not point at a scalar number")
    if isinstance(current, int):
        if float(value) != int(value):
            raise ValidationError(f"parameter {path!r} is an integer; got {value}")
        node[leaf] = int(value)
    else:
        node[leaf] = float(value)


def run_sweep(sc: Scenario, param_path: str, values, *, strict: bool = False) -> list[dict]:
    """One bounds-plus-exponents row per parameter value.

    The parameter path (for example ``detector.s_eta_excess`` or
    ``waveform.amplitude``) must name an existing scalar field; each modified
    scenario is re-validated from scratch.  Receiver exponent columns are
    left empty when the scenario has backaction cancellation off.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("sweep requires at least one value")
    base = scenario_echo(sc)
    rows = []
    for value in values:
        doc = copy.deepcopy(base)
        _set_path(doc, param_path, value)
        sc_i = scenario_from_dict(doc)
        with _overrides(sc_i):
            log_f = _log_fidelity(sc_i, strict)
            fidelity = math.exp(log_f)
            gamma_f = -log_f / sc_i.grid.duration
            if sc_i.qnc:
                det = sc_i.detector
                if sc_i.stochastic:
                    gamma_hom = chernoff_exponent_stochastic(
                        det, sc_i.waveform, sc_i.grid, strict=strict
                    ).gamma
                    gamma_ken = kennedy_p01_stochastic(
                        det, sc_i.waveform, sc_i.grid, strict=strict
                    ).gamma_f
                else:
                    spec = forward_transform(render(sc_i.waveform, sc_i.grid))
                    sigma2 = homodyne_snr(det, spec, strict=strict)
                    gamma_hom = sigma2 / sc_i.grid.duration
                    gamma_ken = gamma_f
            else:
                gamma_hom = gamma_ken = None
        rows.append(
            {
                "value": value,
                "fidelity": fidelity,
                "gamma_f": gamma_f,
                "gamma_hom": gamma_hom,
                "gamma_ken": gamma_ken,
                "bayes_bound": helstrom_bayes_bound(fidelity, sc_i.p0),
                "np_p01_at_p10_0.01": neyman_pearson_bound(fidelity, 0.01),
            }
        )
    return rows


def sweep_csv(rows: list[dict]) -> str:
    """RFC-4180 CSV text for sweep rows (header row mandatory)."""
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(
            ["" if row[col] is None else repr(float(row[col])) for col in SWEEP_COLUMNS]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def canonical_payload_bytes(doc: dict) -> bytes:
    """Deterministic bytes of a run output, minus the wall-clock timestamp.

    This is the object of the byte-for-byte reproducibility promise: the
    timestamp is provenance only, everything else is a pure function of the
    scenario (seed included).
    """
    payload = copy.deepcopy(doc)
    payload.get("provenance", {}).pop("timestamp", None)
    try:
        return json.dumps(
            payload, sort_keys=True, separators=(",", ":"), allow_nan=False
        ).encode("utf-8")
    except ValueError as exc:
        raise NumericsError(f"non-finite value in output payload: {exc}") from exc


def dumps_output(doc: dict) -> str:
    """Human-readable JSON text of a run output document."""
    try:
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    except ValueError as exc:
        raise NumericsError(f"non-finite value in output payload: {exc}") from exc
