"""Bundled case studies: embedded parameters, checks, and report emission.

The parameters live in ``data/case_studies.json`` (versioned, inspectable)
rather than as source constants. ``run_case`` evaluates each scenario,
compares computed values against the published reference numbers at the
tolerances recorded in the data file, writes plot-ready outputs, and
returns one pass/fail line per check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .fileio import write_projection, write_rates, write_scenario_table, _fmt
from .fitting import PolyFit
from .forecast import Projection, compare_scenarios, project, project_normalized
from .models import Model, ModelKind, Params, features, rate_at
from .rates import RateMethod, RateSeries

CASE_NAMES = ("uk-gdpcap", "world-pop", "japan-gdp")


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    passed: bool
    computed: Optional[float]
    expected_text: str
    detail: str

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        computed = "n/a" if self.computed is None else _fmt(self.computed)
        return f"{verdict}  {self.check_id}: computed {computed}, expected {self.expected_text} ({self.detail})"


@dataclass(frozen=True)
class CaseResult:
    name: str
    title: str
    checks: tuple[CheckResult, ...]
    footnotes: tuple[str, ...]
    files: tuple[str, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def load_catalog() -> dict:
    text = resources.files("growthcast").joinpath("data/case_studies.json").read_text("utf-8")
    return json.loads(text)


def _scenario_model(spec: dict, unit: str) -> Model:
    params = Params(
        a=spec.get("a"), b=spec.get("b"), r=spec.get("r"), C=spec.get("C")
    )
    return Model(
        kind=ModelKind(spec["kind"]), params=params, t_ref=spec.get("t_ref", 0.0), unit=unit
    )


def _scenario_poly(spec: dict) -> PolyFit:
    p = spec["poly"]
    return PolyFit(
        coefficients=np.array(p["coefficients"], dtype=float),
        degree=int(p["degree"]),
        rms_residual=0.0,
        t_min=float(p["t_min"]),
        t_max=float(p["t_max"]),
    )


def _run_check(check: dict, models: dict[str, Model], projections: dict[str, Projection]) -> CheckResult:
    kind = check["type"]
    scenario = check["scenario"]

    if kind == "value":
        proj = projections[scenario]
        from .models import trajectory_at

        computed = float(trajectory_at(proj.model, check["t"]))
    elif kind == "integration_consistency":
        # dual route: closed-form trajectory of the linear rate law vs
        # exact-antiderivative integration of the same law as a polynomial
        from .forecast import integrate_rate_function
        from .models import normalize, trajectory_at

        m = models[scenario]
        t0, t1 = float(check["t0"]), float(check["t1"])
        grid = np.linspace(t0, t1, 179)
        closed = trajectory_at(normalize(m, t0, 1.0), grid)
        poly = PolyFit(
            coefficients=np.array([m.params.a, m.params.b]),
            degree=1, rms_residual=0.0, t_min=t0 - 1.0, t_max=t1 + 1.0,
        )
        numeric = integrate_rate_function(poly, (t0, 1.0), grid)
        computed = float(np.max(np.abs(numeric.values / closed - 1.0)))
    elif kind == "rate":
        computed = float(rate_at(models[scenario], check["t"]))
    elif kind == "feature_s":
        proj = projections.get(scenario)
        feat = proj.features if proj is not None else features(models[scenario])
        computed = feat.s_star
    elif kind == "feature_t_range":
        proj = projections.get(scenario)
        feat = proj.features if proj is not None else features(models[scenario])
        computed = feat.t_star
    elif kind == "stationary_t":
        m = models[scenario]
        computed = m.t_ref - m.params.a / m.params.b
    else:
        raise ConfigError(f"unknown check type {kind!r} in case data")

    if kind == "feature_t_range":
        lo, hi = check["range"]
        passed = computed is not None and lo <= computed <= hi
        return CheckResult(
            check_id=check["id"],
            passed=passed,
            computed=computed,
            expected_text=f"in [{_fmt(lo)}, {_fmt(hi)}]",
            detail="interval check",
        )

    expected = float(check["expected"])
    if "rel_tol" in check:
        tol = float(check["rel_tol"])
        passed = computed is not None and abs(computed - expected) <= tol * abs(expected)
        diff = float("nan") if computed is None else abs(computed - expected) / abs(expected)
        detail = f"rel diff {diff:.3%} vs tol {tol:.1%}"
    else:
        tol = float(check["abs_tol"])
        passed = computed is not None and abs(computed - expected) <= tol
        diff = float("nan") if computed is None else abs(computed - expected)
        detail = f"abs diff {diff:.3g} vs tol {tol:.3g}"
    return CheckResult(
        check_id=check["id"],
        passed=passed,
        computed=computed,
        expected_text=_fmt(expected),
        detail=detail,
    )


def _feature_summary_lines(
    models: dict[str, Model], projections: dict[str, Projection]
) -> list[str]:
    from .errors import DomainError

    lines = []
    for name, m in models.items():
        if name in projections:
            feat = projections[name].features
        else:
            try:
                feat = features(m)
            except DomainError:
                # maximum value needs an anchor; the zero-crossing time does not
                if m.kind is ModelKind.LINEAR_T and m.params.b < 0:
                    t_star = m.t_ref - m.params.a / m.params.b
                    lines.append(
                        f"feature  {name}: rate zero-crossing at t = {_fmt(t_star)} "
                        "(maximum value requires an anchor)\n"
                    )
                continue
        bits = [feat.kind.value]
        if feat.t_star is not None:
            bits.append(f"t_star = {_fmt(feat.t_star)}")
        if feat.s_star is not None:
            bits.append(f"s_star = {_fmt(feat.s_star)}")
        if feat.note:
            bits.append(f"({feat.note})")
        lines.append(f"feature  {name}: {', '.join(bits)}\n")
    return lines


def run_case(name: str, out_dir: Path) -> CaseResult:
    catalog = load_catalog()
    if name not in catalog["cases"]:
        raise ConfigError(
            f"unknown case {name!r}; valid names: {', '.join(sorted(catalog['cases']))}"
        )
    case = catalog["cases"][name]
    unit = case.get("unit", "")
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[str] = []

    models: dict[str, Model] = {}
    polys: dict[str, PolyFit] = {}
    projections: dict[str, Projection] = {}
    for spec in case["scenarios"]:
        if "poly" in spec:
            polys[spec["name"]] = _scenario_poly(spec)
            continue
        m = _scenario_model(spec, unit)
        models[spec["name"]] = m
        grid_spec = case.get("grid")
        if grid_spec is None:
            continue
        grid = np.arange(
            grid_spec["start"], grid_spec["stop"] + grid_spec["step"] / 2, grid_spec["step"]
        )
        if "anchor" in spec:
            t0, s0 = spec["anchor"]
            proj = project(m, (t0, s0), grid, label=spec["name"])
        elif m.is_normalized:
            proj = project_normalized(m, grid, label=spec["name"])
        else:
            continue
        projections[spec["name"]] = proj
        path = out_dir / f"{name}_{spec['name']}.csv"
        write_projection(path, proj)
        files.append(str(path))

    if len(projections) >= 2 and case.get("report_years"):
        table = compare_scenarios(list(projections.values()), case["report_years"])
        path = out_dir / f"{name}_scenarios.csv"
        write_scenario_table(path, table)
        files.append(str(path))

    # rate-law tables for cases that ship rate models but no data grid
    if name == "uk-gdpcap":
        t = np.arange(1830.0, 2009.0)
        line_rates = rate_at(models["line"], t)
        rs = RateSeries(
            times=t,
            rates=line_rates,
            sizes=np.ones_like(t),
            source_label="uk line rate law",
            method=RateMethod.DIRECT,
        )
        path = out_dir / "uk-gdpcap_line_rates.csv"
        write_rates(path, rs, unit="1/year")
        files.append(str(path))
        poly = polys["poly6"]
        rs_poly = RateSeries(
            times=t,
            rates=np.asarray(poly.value_at(t), dtype=float),
            sizes=np.ones_like(t),
            source_label="uk degree-6 rate law",
            method=RateMethod.DIRECT,
        )
        path = out_dir / "uk-gdpcap_poly_rates.csv"
        write_rates(path, rs_poly, unit="1/year")
        files.append(str(path))

    checks = tuple(_run_check(c, models, projections) for c in case["checks"])
    report_path = out_dir / f"{name}_report.txt"
    lines = [f"# case: {name} ({case['title']})\n"]
    if unit:
        lines.append(f"# unit: {unit}\n")
    lines.extend(c.line() + "\n" for c in checks)
    lines.extend(_feature_summary_lines(models, projections))
    for note in case.get("footnotes", ()):
        lines.append(f"note: {note}\n")
    report_path.write_text("".join(lines), encoding="utf-8")
    files.append(str(report_path))

    return CaseResult(
        name=name,
        title=case["title"],
        checks=checks,
        footnotes=tuple(case.get("footnotes", ())),
        files=tuple(files),
    )
