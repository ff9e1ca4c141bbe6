"""Command-line entry point.

Machine-readable output goes to stdout, logs to stderr. Exit codes: 0 on
success, 1 on usage errors, 2 on data errors. All randomness funnels through
the run seed (config `seed`, overridable with --seed) and is recorded in the
results JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .bench import DataError, ExperimentConfig
from .imageops import load_image, save_png
from .matching import Database, load_database, make_backend, save_database, serialize_payload
from .perturb import PerturbationSpec, apply, generate_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_yaml(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.output is not None:
        cfg.output = args.output
    return cfg


def _print_auc_table(result: dict) -> None:
    rows = []
    for bkey, doc in sorted(result["backends"].items()):
        if "overall" in doc:
            rows.append((bkey, doc["overall"]["auc"]))
        elif "sizes" in doc:
            for size, sized in sorted(doc["sizes"].items(), key=lambda kv: int(kv[0])):
                rows.append((f"{bkey} @db{size}", sized["overall"]["auc"]))
    print(f"{'backend':<32} {'AUC':>8}")
    for name, auc in rows:
        print(f"{name:<32} {auc:>8.4f}")


def cmd_hash(args) -> int:
    encoder = make_backend(f"{args.algo}/{args.bits}")
    for path in args.images:
        payload = encoder.fingerprint(load_image(path), Path(path).name)
        raw = serialize_payload(payload, encoder.backend_id)
        if isinstance(raw, str):
            print(raw)
        else:
            print(json.dumps({"backend": encoder.backend_id, "fingerprint": raw}, sort_keys=True))
    return EXIT_OK


def cmd_perturb(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    img = load_image(args.image)
    image_id = Path(args.image).stem
    if args.family:
        spec = PerturbationSpec(args.family, args.parameter, seed=args.seed or 0, permissive=args.permissive)
        pairs = [(spec, apply(spec, img))]
    else:
        pairs = generate_suite(image_id, img, args.seed or 0)
    manifest = []
    for spec, pimg in pairs:
        name = f"{image_id}__{spec.label}.png"
        save_png(pimg, out / name)
        manifest.append(
            {"file": name, "family": spec.family, "parameter": spec.parameter, "seed": spec.seed}
        )
    (out / f"{image_id}__manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    print(json.dumps({"written": len(manifest), "dir": str(out)}))
    return EXIT_OK


def cmd_build_db(args) -> int:
    root = Path(args.images)
    if not root.is_dir():
        raise DataError(f"images directory not found: {root}")
    ids = sorted(p.name for p in root.iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg"))
    if not ids:
        raise DataError(f"no images in {root}")
    params = {}
    if args.embeddings:
        params["source"] = args.embeddings
    encoder = make_backend(args.backend, **params)
    db = Database.build(encoder, [(i, load_image(root / i)) for i in ids])
    save_database(db, args.out)
    _log(f"built {len(db)} fingerprints in {db.build_seconds:.2f}s")
    print(json.dumps({"backend": db.backend_id, "entries": len(db), "out": args.out}))
    return EXIT_OK


def cmd_match(args) -> int:
    db = load_database(args.database)
    if args.embeddings:
        db.encoder.source = args.embeddings
    code = EXIT_OK
    for path in args.images:
        payload = db.encoder.fingerprint(load_image(path), Path(path).name)
        dists = db.scan(payload)
        if dists.size:
            idx = int(dists.argmin())
            best_id, best_d = db.ids[idx], float(dists[idx])
        else:
            best_id, best_d = None, float("inf")
        matched = best_id if best_d <= args.threshold else None
        print(json.dumps({"query": str(path), "match": matched, "distance": best_d}, sort_keys=True))
    return code


def _run_bench(args, runner, **extra) -> int:
    cfg = _load_config(args)
    result = runner(cfg, **extra)
    out = Path(args.result or (Path(cfg.output) / "results.json"))
    bench.write_result(result, out)
    _log(f"wrote {out}")
    _print_auc_table(result)
    return EXIT_OK


def cmd_bench_synthetic(args) -> int:
    return _run_bench(args, bench.run_synthetic)


def cmd_bench_scaling(args) -> int:
    return _run_bench(args, bench.run_scaling)


def cmd_bench_templates(args) -> int:
    cfg = _load_config(args)
    result = bench.run_templates(cfg, args.images, args.metadata)
    out = Path(args.result or (Path(cfg.output) / "results.json"))
    bench.write_result(result, out)
    _log(f"wrote {out}")
    _print_auc_table(result)
    return EXIT_OK


def cmd_export_plots(args) -> int:
    result = json.loads(Path(args.result).read_text())
    written = bench.export_plots(result, args.out, svg=args.svg)
    print(json.dumps({"written": [str(p) for p in written]}, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        result = json.loads(Path(args.result).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read result file {args.result}: {exc}") from None
    problems = bench.verify_result(result)
    for p in problems:
        print(f"FAIL {p}")
    if problems:
        return EXIT_DATA
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simhaystack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hash", help="fingerprint images with one algorithm")
    p.add_argument("--algo", default="dhash", help="ahash|phash|dhash|whash|crop_resistant|orb")
    p.add_argument("--bits", type=int, default=64)
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("perturb", help="apply the 58-attack suite (or one attack) to an image")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("--family", help="one family instead of the full suite")
    p.add_argument("--parameter", type=float, default=0.0)
    p.add_argument("--permissive", action="store_true", help="allow off-suite parameters")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("build-db", help="fingerprint an image directory into a database file")
    p.add_argument("--backend", required=True, help="e.g. dhash/64, orb/30, <model>/js")
    p.add_argument("--images", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--embeddings", help="EMB1 file for embedding backends")
    p.set_defaults(func=cmd_build_db)

    p = sub.add_parser("match", help="match query images against a database file")
    p.add_argument("--database", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--embeddings", help="EMB1 file for embedding backends")
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_match)

    for name, fn in (
        ("bench-synthetic", cmd_bench_synthetic),
        ("bench-scaling", cmd_bench_scaling),
        ("bench-templates", cmd_bench_templates),
    ):
        p = sub.add_parser(name, help=f"run the {name.split('-', 1)[1]} experiment from a config file")
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--result", default=None, help="results JSON path")
        if name == "bench-templates":
            p.add_argument("--images", required=True)
            p.add_argument("--metadata", required=True, help="CSV with image_file,template_label")
        p.set_defaults(func=fn)

    p = sub.add_parser("export-plots", help="write per-curve CSVs (and optional SVGs) from results JSON")
    p.add_argument("result")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_export_plots)

    p = sub.add_parser("verify", help="re-check schema and ROC invariants of a results JSON")
    p.add_argument("result")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except DataError as exc:
        _log(f"error: {exc}")
        return EXIT_DATA
    except (FileNotFoundError, ValueError, KeyError) as exc:
        _log(f"error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
