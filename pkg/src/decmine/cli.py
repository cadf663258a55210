"""Command-line front door: discover, mine, explain, gen-p2p, serve.

Machine-readable outputs are canonical JSON/CSV/PNML; human summaries go to
stdout. Exit codes: 0 success, 2 input error, 3 internal error. Identical
inputs and seeds produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from ._json import canonical_dump_bytes, loads
from .config import load_config
from .errors import InputError
from .explain import Background, exact_shap, sampled_shap
from .learners import KINDS, load_model_file, save_model
from .log import CsvMapping, EventLog, export_xes, parse_csv, parse_xes
from .petri import decision_points, export_dot, export_pnml, import_pnml
from .pipeline import json_to_fmap, mine_decision_point
from .plots import (
    decision_plot_data,
    explanation_bundle,
    force_plot_data,
    local_bar_plot_data,
    local_beeswarm_plot_data,
    render_signed_bar_png,
)
from .situation import FeatureSpec, dump_table_csv, dump_table_json
from .synth import generate_synthetic_p2p

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _read_log(path: str, fmt: str, mapping_path: str | None) -> EventLog:
    data = Path(path).read_bytes()
    if fmt == "csv":
        if mapping_path is None:
            raise InputError("--map is required for CSV logs")
        doc = loads(Path(mapping_path).read_bytes())
        return parse_csv(data, CsvMapping(**doc))
    return parse_xes(data)


def _cmd_discover(args) -> int:
    log = _read_log(args.log, args.format, args.map)
    from .discovery import discover_inductive

    net = discover_inductive(log)
    Path(args.out).write_bytes(export_pnml(net))
    if args.dot:
        Path(args.dot).write_text(export_dot(net))
    dps = decision_points(net)
    print(f"discovered net: {len(net.places)} places, {len(net.transitions)} transitions")
    print(f"decision points ({len(dps)}):")
    for dp in dps:
        alts = ", ".join(f"{t}={net.label(t) or 'tau'}" for t in dp.alternatives)
        print(f"  {dp.place}: {alts}")
    for w in log.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _cmd_mine(args) -> int:
    log = _read_log(args.log, args.format, args.map)
    net = import_pnml(Path(args.net).read_bytes())
    spec = FeatureSpec.from_dict(loads(Path(args.features).read_bytes()))
    kinds = tuple(args.kinds) if args.kinds else KINDS
    for kind in kinds:
        if kind not in KINDS:
            raise InputError(f"unknown learner kind {kind!r}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    result = mine_decision_point(log, net, args.dp, spec, kinds, seed=args.seed,
                                 folds=args.folds)
    (out / "table.csv").write_bytes(dump_table_csv(result.table))
    (out / "table.json").write_bytes(dump_table_json(result.table))
    (out / "encoder.json").write_bytes(result.encoder.dump_json())
    for kind, report in result.reports.items():
        (out / f"report_{kind}.json").write_bytes(canonical_dump_bytes(report.to_dict()))
    save_model(result.model, out / "model.bin")
    buf = io.BytesIO()
    np.save(buf, result.background.data)
    (out / "background.npy").write_bytes(buf.getvalue())
    summary = {
        "place": result.decision_point.place,
        "alternatives": list(result.decision_point.alternatives),
        "rows": len(result.table),
        "suggested": result.suggested,
        "degenerate": result.suggested is None,
        "mean_f1": {k: r.mean_f1 for k, r in result.reports.items()},
        "seed": args.seed,
    }
    (out / "summary.json").write_bytes(canonical_dump_bytes(summary))

    print(f"decision point {args.dp}: {len(result.table)} situations")
    for kind, report in result.reports.items():
        flag = " (degenerate)" if report.degenerate else ""
        print(f"  {kind:24s} mean F1 {report.mean_f1:.4f}{flag}")
    if result.suggested is None:
        print("warning: all models degenerate (single observed decision)", file=sys.stderr)
    else:
        print(f"suggested: {result.suggested}")
    return EXIT_OK


def _cmd_explain(args) -> int:
    model_dir = Path(args.model)
    model = load_model_file(model_dir / "model.bin")
    background = Background(np.load(model_dir / "background.npy"))
    doc = loads(Path(args.instance).read_bytes())
    fmap = json_to_fmap(doc.get("features", doc) if isinstance(doc, dict) else doc)
    x = model.encoder.transform(fmap)
    target = args.target
    if target is None:
        mapping = model.predict_mapping(fmap)
        target = model.argmax(mapping)
    if args.method == "exact":
        exp = exact_shap(model, x, target, background, args.grouping)
    else:
        exp = sampled_shap(model, x, target, background,
                           n_permutations=args.permutations, seed=args.seed,
                           grouping=args.grouping)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "explanation.json").write_bytes(exp.dump_json())
    (out / "force.json").write_bytes(canonical_dump_bytes(force_plot_data(exp)))
    (out / "decision.json").write_bytes(canonical_dump_bytes(decision_plot_data(exp)))
    (out / "beeswarm.json").write_bytes(canonical_dump_bytes(local_beeswarm_plot_data(exp)))
    bar = local_bar_plot_data(exp)
    (out / "bar.json").write_bytes(canonical_dump_bytes(bar))
    render_signed_bar_png(bar, str(out / "bar.png"))

    print(f"target: {target}  method: {exp.method}")
    print(f"base {exp.base_value:.4f} -> predicted {exp.predicted_value:.4f}")
    for name, value in exp.attributions[:10]:
        print(f"  {name:40s} {value:+.4f}")
    return EXIT_OK


def _cmd_gen_p2p(args) -> int:
    log = generate_synthetic_p2p(args.seed, args.cases)
    Path(args.out).write_bytes(export_xes(log))
    print(f"wrote {len(log.traces)} cases / {log.event_count} events to {args.out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config)
    if args.threads is not None:
        config.threads = args.threads
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decmine",
        description="Predictive decision mining with Shapley-value explanations.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="cap internal parallelism (currently single-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="discover a Petri net and its decision points")
    p.add_argument("--log", required=True)
    p.add_argument("--format", choices=("xes", "csv"), default="xes")
    p.add_argument("--map", help="JSON column mapping for CSV logs")
    p.add_argument("--out", required=True, help="output PNML path")
    p.add_argument("--dot", help="optional DOT output path")
    p.set_defaults(fn=_cmd_discover)

    p = sub.add_parser("mine", help="build situation table, cross-validate, train best model")
    p.add_argument("--log", required=True)
    p.add_argument("--format", choices=("xes", "csv"), default="xes")
    p.add_argument("--map")
    p.add_argument("--net", required=True, help="PNML path")
    p.add_argument("--dp", required=True, help="decision point place id")
    p.add_argument("--features", required=True, help="feature spec JSON path")
    p.add_argument("--kinds", nargs="*", help=f"subset of: {', '.join(KINDS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_mine)

    p = sub.add_parser("explain", help="explain one instance against a mined model")
    p.add_argument("--model", required=True, help="directory written by 'mine'")
    p.add_argument("--instance", required=True, help="JSON file with a feature mapping")
    p.add_argument("--target", help="target transition id (default: predicted argmax)")
    p.add_argument("--method", choices=("exact", "sampled"), default="exact")
    p.add_argument("--grouping", choices=("columns", "by-source"), default="columns")
    p.add_argument("--permutations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_explain)

    p = sub.add_parser("gen-p2p", help="generate the synthetic purchase-to-pay log")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cases", type=int, required=True)
    p.add_argument("--out", required=True, help="output XES path")
    p.set_defaults(fn=_cmd_gen_p2p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="JSON config path")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
