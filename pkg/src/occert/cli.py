"""Batch front-end: sample points on the sphere, certify each, report.

Exit codes: 0 all certified, 2 bad configuration, 3 at least one point
refuted, 4 at least one point unknown or errored (none refuted),
5 report I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

try:
    import jsonschema
except ImportError:                      # pragma: no cover
    jsonschema = None

from . import __version__
from .certify import CertifyOptions, SearchConfig, certify_point
from .curvature import curvature_operator
from .errors import ConfigError, OccertError
from .kernels import BACKEND
from .sphere import FDConfig, MetricField, chart_to_ambient, riemann, sample_points

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REFUTED = 3
EXIT_UNKNOWN = 4
EXIT_IO = 5

_BUILTIN_METRICS = ("round", "flat")


@dataclass(frozen=True)
class RunConfig:
    metric: MetricField
    points: int
    seed: int
    fd: FDConfig
    multistarts: int
    tol: float
    checks: tuple[str, ...]
    out: str | None
    threads: int

    def to_dict(self) -> dict:
        spec = {"family": self.metric.family, "scale": self.metric.scale}
        spec.update(self.metric.params)
        return {
            "metric": spec,
            "points": self.points,
            "seed": self.seed,
            "fd": {"h": self.fd.h, "scheme": self.fd.scheme},
            "multistarts": self.multistarts,
            "tol": self.tol,
            "checks": list(self.checks),
        }


def _load_schema(name: str) -> dict:
    with resources.files("occert.schemas").joinpath(name).open("r") as fh:
        return json.load(fh)


def load_metric_spec(path: str) -> MetricField:
    """Read and validate a metric spec file; unknown keys are rejected."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read spec file: %s" % exc) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("malformed JSON in spec file: %s" % exc) from exc
    return metric_from_dict(raw)


def metric_from_dict(raw: dict) -> MetricField:
    if jsonschema is not None:
        schema = _load_schema("metric_spec.schema.json")
        try:
            jsonschema.validate(raw, schema)
        except jsonschema.ValidationError as exc:
            field = "/".join(str(p) for p in exc.absolute_path) or "family"
            raise ConfigError("invalid metric spec at '%s': %s"
                              % (field, exc.message)) from exc
    params = {k: v for k, v in raw.items() if k not in ("family", "scale")}
    return MetricField(family=raw["family"], params=params,
                       scale=float(raw.get("scale", 1.0)))


def _builtin_metric(name: str) -> MetricField:
    if name == "round":
        return MetricField(family="round")
    if name == "flat":
        return MetricField.flat_toy()
    raise ConfigError("unknown metric family %r (builtins: %s; use --spec for "
                      "parametrized families)" % (name, ", ".join(_BUILTIN_METRICS)))


def parse_config(args: argparse.Namespace) -> RunConfig:
    if args.spec:
        metric = load_metric_spec(args.spec)
    elif args.metric:
        metric = _builtin_metric(args.metric)
    else:
        raise ConfigError("one of --metric or --spec is required")
    if args.points < 1:
        raise ConfigError("--points must be at least 1")
    if args.tol <= 0:
        raise ConfigError("--tol must be positive")
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    if not checks:
        raise ConfigError("--checks must name at least one check")
    bad = set(checks) - {"bhl", "p_sufficient", "p_refute", "lemma_ll_demo"}
    if bad:
        raise ConfigError("unknown checks: %s" % ", ".join(sorted(bad)))
    scheme = "richardson_4th" if args.richardson else "central_2nd"
    try:
        fd = FDConfig(h=args.fd_step, scheme=scheme)
    except OccertError as exc:
        raise ConfigError("invalid --fd-step: %s" % exc) from exc
    threads = _thread_count()
    return RunConfig(metric=metric, points=args.points, seed=args.seed,
                     fd=fd, multistarts=args.multistarts, tol=args.tol,
                     checks=checks, out=args.out, threads=threads)


def _thread_count() -> int:
    env = os.environ.get("OCCERT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("OCCERT_THREADS must be an integer")
    return min(4, os.cpu_count() or 1)


def _jsonify(value):
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):   # before int: bool is an int
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def _certify_one(index: int, point, config: RunConfig) -> dict:
    record: dict = {
        "index": index,
        "chart": point.chart_id,
        "x": _jsonify(point.x),
        "ambient": _jsonify(chart_to_ambient(point)),
    }
    try:
        R = riemann(config.metric, point, config.fd)
        sym_tol = max(1e-9, 100.0 * config.fd.h ** 2)
        search = SearchConfig(multistarts=config.multistarts, tol=config.tol,
                              seed=config.seed)
        cert = certify_point(R, options=CertifyOptions(
            checks=config.checks, multistarts=config.multistarts,
            tol=config.tol, seed=config.seed, sym_tol=sym_tol, search=search))
    except (OccertError, np.linalg.LinAlgError) as exc:
        # per-point isolation: a bad point must not abort the survey
        record.update({"verdict": "error", "error": str(exc), "notes": ""})
        return record

    record["spectrum"] = _jsonify(cert.spectrum)
    record["lambda_min"] = float(cert.spectrum[0])
    record["lambda_max"] = float(cert.spectrum[-1])
    refuted = False
    affirmed = True
    if cert.bhl is not None:
        record["bhl"] = {"passed": cert.bhl.passed, "margin": cert.bhl.margin,
                         "boundary": cert.bhl.boundary}
        refuted = refuted or not cert.bhl.passed
        affirmed = affirmed and cert.bhl.passed
    if cert.p_membership is not None:
        pm = cert.p_membership
        wit = None
        if pm.witness is not None:
            wit = {"J": _jsonify(pm.witness.J), "X": _jsonify(pm.witness.X),
                   "value": float(pm.witness.value)}
        record["p_membership"] = {"status": pm.status, "sup_lower": pm.sup_lower,
                                  "sup_upper": pm.sup_upper,
                                  "threshold": pm.threshold, "witness": wit}
        refuted = refuted or pm.status == "refuted"
        affirmed = affirmed and pm.status == "certified"
    if cert.lemma_ll is not None:
        record["lemma_ll"] = {
            "hypotheses_met": cert.lemma_ll.hypotheses_met,
            "nondegenerate": cert.lemma_ll.nondegenerate,
            "det_value": cert.lemma_ll.det_value,
            "deviation": cert.lemma_ll.deviation,
        }
    record["verdict"] = ("refuted" if refuted
                         else "certified" if affirmed else "unknown")
    record["notes"] = cert.verdict_notes
    record["error"] = None
    return record


def _spectrum_one(index: int, point, config: RunConfig) -> dict:
    record: dict = {
        "index": index,
        "chart": point.chart_id,
        "x": _jsonify(point.x),
        "ambient": _jsonify(chart_to_ambient(point)),
    }
    try:
        R = riemann(config.metric, point, config.fd)
        op = curvature_operator(R, sym_tol=max(1e-9, 100.0 * config.fd.h ** 2))
    except (OccertError, np.linalg.LinAlgError) as exc:
        record.update({"verdict": "error", "error": str(exc), "notes": ""})
        return record
    record["spectrum"] = _jsonify(op.spectrum)
    record["lambda_min"] = float(op.spectrum[0])
    record["lambda_max"] = float(op.spectrum[-1])
    record["verdict"] = "ok"
    record["error"] = None
    return record


def _map_points(fn, points, config: RunConfig) -> list[dict]:
    if config.threads <= 1 or len(points) <= 1:
        return [fn(i, p, config) for i, p in enumerate(points)]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(lambda ip: fn(ip[0], ip[1], config),
                             enumerate(points)))


def run_certify(config: RunConfig) -> tuple[dict, int]:
    """Certification survey; the report and the exit code."""
    points = sample_points(config.points, config.seed)
    records = _map_points(_certify_one, points, config)
    margins = [r["bhl"]["margin"] for r in records if r.get("bhl")]
    counts: dict[str, int] = {}
    for r in records:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    if counts.get("refuted"):
        verdict = "refuted with witness at %d of %d points" % (
            counts["refuted"], len(records))
        code = EXIT_REFUTED
    elif counts.get("unknown") or counts.get("error"):
        verdict = "inconclusive: %d unknown, %d errors" % (
            counts.get("unknown", 0), counts.get("error", 0))
        code = EXIT_UNKNOWN
    else:
        verdict = "hypotheses certified at all sampled points"
        code = EXIT_OK
    report = {
        "schema": "occert-report-v1",
        "command": "certify",
        "config": config.to_dict(),
        "meta": {"version": __version__, "numpy": np.__version__,
                 "backend": BACKEND, "threads": config.threads},
        "points": records,
        "aggregate": {
            "verdict": verdict,
            "min_margin": min(margins) if margins else None,
            "counts": counts,
        },
    }
    return report, code


def run_spectrum(config: RunConfig) -> tuple[dict, int]:
    points = sample_points(config.points, config.seed)
    records = _map_points(_spectrum_one, points, config)
    counts: dict[str, int] = {}
    for r in records:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    code = EXIT_UNKNOWN if counts.get("error") else EXIT_OK
    report = {
        "schema": "occert-report-v1",
        "command": "spectrum",
        "config": config.to_dict(),
        "meta": {"version": __version__, "numpy": np.__version__,
                 "backend": BACKEND, "threads": config.threads},
        "points": records,
        "aggregate": {"verdict": "spectra computed", "min_margin": None,
                      "counts": counts},
    }
    return report, code


def emit_report(report: dict, path: str | None) -> None:
    """Write the JSON document (stable key order, round-trip-exact floats)."""
    if path is None:
        return
    try:
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print("error: cannot write report: %s" % exc, file=sys.stderr)
        raise SystemExit(EXIT_IO)


def load_report(path: str) -> dict:
    """Read a report back, validating it against the shipped schema."""
    with open(path) as fh:
        report = json.load(fh)
    if jsonschema is not None:
        jsonschema.validate(report, _load_schema("report.schema.json"))
    return report


def _print_summary(report: dict) -> None:
    print("occert %s | metric=%s | backend=%s" % (
        report["command"], report["config"]["metric"]["family"],
        report["meta"]["backend"]))
    header = "%5s %-6s %12s %12s %12s %-6s %-10s %-9s" % (
        "point", "chart", "lambda_min", "lambda_max", "margin", "bhl",
        "P-status", "verdict")
    print(header)
    for r in report["points"]:
        if r.get("error"):
            print("%5d %-6s %-60s" % (r["index"], r["chart"],
                                      "ERROR: " + r["error"]))
            continue
        bhl = r.get("bhl")
        pm = r.get("p_membership")
        print("%5d %-6s %12.6f %12.6f %12.6f %-6s %-10s %-9s" % (
            r["index"], r["chart"], r.get("lambda_min", float("nan")),
            r.get("lambda_max", float("nan")),
            bhl["margin"] if bhl else float("nan"),
            ("pass" if bhl["passed"] else "fail") if bhl else "-",
            pm["status"] if pm else "-", r["verdict"]))
    print("aggregate: %s" % report["aggregate"]["verdict"])


def run_selftest() -> int:
    """Quick built-in anchors; prints one line per check."""
    from . import curvature as _c
    from . import hermitian as _h
    from . import sphere as _s
    from .certify import check_bhl

    ok = True

    def check(name: str, passed: bool):
        nonlocal ok
        ok = ok and passed
        print("selftest %-38s %s" % (name, "PASS" if passed else "FAIL"))

    G = _c.kulkarni_nomizu_square()
    op = _c.curvature_operator(G)
    check("operator of constant curvature is Id", np.allclose(op.spectrum, 1.0, atol=1e-12))
    check("spectral pinching on the round anchor", check_bhl(op.spectrum).passed)
    J0 = _h.standard_complex_structure()
    check("Ric* of constant curvature is the metric",
          np.allclose(_c.ricci_star(G, J0), np.eye(6), atol=1e-12))
    val = _h.canonical_projection_scalar(J0, J0)
    orc = _h.canonical_projection_scalar_oracle(J0, J0)
    check("projection scalar equals coframe oracle", abs(val - orc) < 1e-10
          and abs(val - 3j) < 1e-12)
    e = np.eye(7)
    check("octonion table anchor e1 x e2 = e3",
          np.allclose(_s.cross7(e[0], e[1]), e[2]))
    pt = _s.sample_points(1, 0)[0]
    R = _s.riemann(_s.MetricField(family="round"), pt, _s.FDConfig())
    check("round-sphere curvature anchor", float(np.max(np.abs(R - G))) < 1e-4)
    print("selftest result: %s" % ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occert",
        description="Certify curvature-positivity conditions at sampled "
                    "points of the 6-sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--metric", help="builtin metric family (round, flat)")
        p.add_argument("--spec", help="JSON metric spec file")
        p.add_argument("--points", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--fd-step", type=float, default=1e-3, dest="fd_step")
        p.add_argument("--richardson", action="store_true",
                       help="fourth-order finite differences")
        p.add_argument("--multistarts", type=int, default=64)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--checks", default="bhl,p_sufficient",
                       help="comma list from bhl,p_sufficient,p_refute,lemma_ll_demo")
        p.add_argument("--out", help="path for the JSON report")

    common(sub.add_parser("certify", help="run the certification survey"))
    common(sub.add_parser("spectrum", help="curvature-operator spectra only"))
    sub.add_parser("selftest", help="run built-in anchor checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return run_selftest()
    try:
        config = parse_config(args)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    runner = run_certify if args.command == "certify" else run_spectrum
    report, code = runner(config)
    report = _jsonify(report)
    emit_report(report, config.out)
    _print_summary(report)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
