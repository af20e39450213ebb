"""Command line interface: validate / curvature / analyze / oracle.

Exit codes: 0 success (an UNSTABLE verdict is a finding, not an error),
2 validation failure, 3 malformed input.  Machine-readable output is one
canonical JSON document whose fields mirror the report dataclasses; text
output prints the same numbers to 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys

from .curvature import (
    CurvatureConvention,
    is_flat,
    ricci,
    ricci_via_trace,
    sectional_on_frame,
)
from .lie_core import (
    StructureError,
    ValidationFailure,
    load_algebra,
    validate_algebra,
    validate_metric,
)
from .morphism import load_homomorphism, require_valid
from .oracle import (
    SU2Realization,
    SampledField,
    TorusRealization,
    builtin_field,
    energy_density,
    energy_quadrature,
    mean_deriv_norm_squared,
    second_variation_fd,
)
from .variation import smith_index_density, stability_report

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_MALFORMED = 3


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def canonical_json(obj) -> str:
    """Canonical encoding: sorted keys, two-space indent, no NaN."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def _emit(payload: dict, fmt: str, order: list[str] | None = None) -> None:
    if fmt == "json":
        print(canonical_json(payload))
        return
    keys = order if order is not None else sorted(payload)
    for key in keys:
        value = payload[key]
        if isinstance(value, list):
            rendered = "[" + ", ".join(_fmt(v) for v in value) + "]"
        elif isinstance(value, dict):
            rendered = "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in value.items()) + "}"
        else:
            rendered = _fmt(value)
        print(f"{key}: {rendered}")


def _cmd_validate(args) -> int:
    alg, metric = load_algebra(args.input)
    rep_a = validate_algebra(alg)
    rep_m = validate_metric(alg, metric)
    payload = {
        "name": alg.name,
        "dim": alg.dim,
        "algebra": rep_a.to_dict(),
        "metric": rep_m.to_dict(),
        "passed": rep_a.passed and rep_m.passed,
    }
    _emit(payload, args.format, order=["name", "dim", "algebra", "metric", "passed"])
    return EXIT_OK if payload["passed"] else EXIT_VALIDATION


def _cmd_curvature(args) -> int:
    alg, metric = load_algebra(args.input)
    rep_a = validate_algebra(alg)
    rep_m = validate_metric(alg, metric)
    if not (rep_a.passed and rep_m.passed):
        print(
            "validation failed: "
            f"antisymmetry {_fmt(rep_a.antisymmetry_residual)}, "
            f"jacobi {_fmt(rep_a.jacobi_residual)}, "
            f"ad-invariance {_fmt(rep_m.ad_invariance_residual)}, spd {rep_m.spd}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    ric = ricci(alg, metric)
    payload = {
        "name": alg.name,
        "sectional": [
            {"i": i + 1, "j": j + 1, "K": k} for i, j, k in sectional_on_frame(alg, metric)
        ],
        "ricci_operator": [[float(v) for v in row] for row in ric.op],
        "scalar_curvature": ric.scalar,
        "flat": is_flat(alg, metric),
        "ricci_trace_paper": [
            [float(v) for v in row]
            for row in ricci_via_trace(alg, metric, CurvatureConvention.PAPER)
        ],
        "ricci_trace_standard": [
            [float(v) for v in row]
            for row in ricci_via_trace(alg, metric, CurvatureConvention.STANDARD)
        ],
    }
    if args.format == "json":
        print(canonical_json(payload))
    else:
        print(f"name: {alg.name}")
        for entry in payload["sectional"]:
            print(f"K(E_{entry['i']}, E_{entry['j']}): {_fmt(entry['K'])}")
        print("ricci_operator:")
        for row in payload["ricci_operator"]:
            print("  [" + ", ".join(_fmt(v) for v in row) + "]")
        print(f"scalar_curvature: {_fmt(payload['scalar_curvature'])}")
        print(f"flat: {_fmt(payload['flat'])}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    h = load_homomorphism(args.input)
    report = stability_report(h, volume=args.volume)
    payload = report.to_dict()
    if args.format == "json":
        print(canonical_json(payload))
        return EXIT_OK
    order = ["verdict", "ricci_max_eigenvalue", "index_theorem_density", "witness"]
    if args.convention in ("paper", "both"):
        order.append("smith_density_paper")
    if args.convention in ("standard", "both"):
        order.append("smith_density_standard")
    order += ["discrepancy_flag", "volume", "total_index"]
    _emit({k: payload[k] for k in order}, "text", order=order)
    return EXIT_OK


def _parse_field(spec: str, h, realization) -> SampledField:
    if spec.startswith("invariant:"):
        body = spec[len("invariant:") :]
        if body == "auto":
            return SampledField.invariant(h.frame_images()[0])
        try:
            coords = [float(part) for part in body.split(",")]
        except ValueError as exc:
            raise StructureError(f"bad invariant field coordinates {body!r}") from exc
        return SampledField.invariant(coords)
    if spec.startswith("builtin:"):
        return builtin_field(spec[len("builtin:") :], h, realization)
    raise StructureError(f"field spec must start with 'invariant:' or 'builtin:', got {spec!r}")


def _cmd_oracle(args) -> int:
    h = load_homomorphism(args.input)
    require_valid(h)
    if args.realization == "su2":
        realization = SU2Realization(h.domain_algebra, h.domain_metric)
    else:
        realization = TorusRealization(h.domain_algebra, h.domain_metric)
    field = _parse_field(args.field, h, realization)
    e0 = energy_quadrature(h, realization, args.samples, args.seed)
    d1, d2 = second_variation_fd(h, realization, field, args.step, args.samples, args.seed)
    closed_e0 = energy_density(h) * realization.volume
    if field.is_invariant:
        closed_d2 = (
            smith_index_density(h, CurvatureConvention.PAPER, field.constant)
            * realization.volume
        )
    elif is_flat(h.codomain_algebra, h.codomain_metric):
        closed_d2 = mean_deriv_norm_squared(h, realization, field, args.samples, args.seed)
    else:
        closed_d2 = None
    payload = {
        "energy": e0,
        "dE_dt": d1,
        "d2E_dt2": d2,
        "closed_form_energy": closed_e0,
        "closed_form_dE_dt": 0.0,
        "closed_form_d2E_dt2": closed_d2,
        "volume": realization.volume,
        "samples": args.samples,
        "seed": args.seed,
        "step": args.step,
    }
    order = [
        "energy", "closed_form_energy", "dE_dt", "closed_form_dE_dt",
        "d2E_dt2", "closed_form_d2E_dt2", "volume", "samples", "seed", "step",
    ]
    _emit(payload, args.format, order=order)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liestab",
        description=(
            "Curvature and stability analysis of Lie group homomorphisms "
            "under bi-invariant metrics, with an independent quadrature oracle."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="validate an algebra file or registry name")
    p_val.add_argument("input", help="algebra JSON path or registry name (e.g. su2)")
    p_val.add_argument("--format", choices=["text", "json"], default="text")
    p_val.set_defaults(func=_cmd_validate)

    p_cur = sub.add_parser("curvature", help="sectional curvature, Ricci, flatness")
    p_cur.add_argument("input", help="algebra JSON path or registry name")
    p_cur.add_argument("--format", choices=["text", "json"], default="text")
    p_cur.set_defaults(func=_cmd_curvature)

    p_ana = sub.add_parser("analyze", help="stability verdict for a homomorphism file")
    p_ana.add_argument("input", help="homomorphism JSON path")
    p_ana.add_argument("--volume", type=float, default=None,
                       help="domain volume; omitted means densities per unit volume")
    p_ana.add_argument("--convention", choices=["paper", "standard", "both"], default="both",
                       help="which second-variation densities to display (default: both)")
    p_ana.add_argument("--format", choices=["text", "json"], default="text")
    p_ana.set_defaults(func=_cmd_analyze)

    p_ora = sub.add_parser("oracle", help="quadrature energy and finite-difference variations")
    p_ora.add_argument("input", help="homomorphism JSON path")
    p_ora.add_argument("--realization", choices=["su2", "torus"], required=True)
    p_ora.add_argument("--samples", type=int, default=10_000, help="sample count (default 10000)")
    p_ora.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p_ora.add_argument("--step", type=float, default=1e-3,
                       help="finite-difference step (default 1e-3)")
    p_ora.add_argument("--field", default="invariant:auto",
                       help="'invariant:<c1,c2,...>', 'invariant:auto' (= phi E_1), "
                            "or 'builtin:<name>' (default invariant:auto)")
    p_ora.add_argument("--format", choices=["text", "json"], default="text")
    p_ora.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be positive", file=sys.stderr)
        return EXIT_MALFORMED
    if not getattr(args, "step", 1e-3) > 0:
        print("error: --step must be positive", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (StructureError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
