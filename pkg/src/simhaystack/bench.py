"""The evaluation engine: split, perturb, match, sweep, score.

Protocol: split the corpus into experimental and control halves, use the
experimental half as the database, perturb sampled images from both halves
(58 attacks each), then query. Perturbed experimental images measure recall,
perturbed control images measure false positives, and sweeping the match
threshold yields ROC curves and AUCs, overall and per attack.

Everything is seeded; two runs with one seed produce identical results JSON
apart from the timing fields (see redact_timings).
"""

from __future__ import annotations

import csv
import json
import multiprocessing
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .imageops import load_image
from .matching import Database, make_backend
from .perturb import PerturbationSpec, STOCHASTIC_FAMILIES, SUITE, apply, derive_seed

__all__ = [
    "ExperimentConfig",
    "RocCurve",
    "split_dataset",
    "recall_fpr",
    "auc_from_points",
    "run_synthetic",
    "run_scaling",
    "run_templates",
    "verify_result",
    "redact_timings",
    "export_plots",
]

RESULT_VERSION = 1


class DataError(RuntimeError):
    """Dataset or results input is unusable; maps to CLI exit code 2."""


# --- configuration -----------------------------------------------------------

@dataclass
class ExperimentConfig:
    dataset: dict = field(default_factory=dict)
    backends: list = field(default_factory=lambda: ["dhash/64"])
    backend_params: dict = field(default_factory=dict)
    sample_count: int = 100
    seed: int = 0
    sweep: dict = field(default_factory=lambda: {"kind": "observed"})
    db_sizes: list = field(default_factory=list)
    output: str = "results"
    database: str = "full"  # 'full' half as database, or 'samples'
    suite: str = "full"  # or 'none' (identity query, baseline runs)
    jobs: int = 0  # 0 = all logical cores
    report_thresholds: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**doc)
        if not cfg.backends:
            raise DataError("config needs at least one backend")
        if cfg.sample_count < 1:
            raise DataError("sample_count must be >= 1")
        if cfg.sweep.get("kind", "observed") not in ("observed", "grid"):
            raise DataError(f"unknown sweep kind {cfg.sweep!r}")
        if cfg.database not in ("full", "samples"):
            raise DataError(f"database must be 'full' or 'samples', got {cfg.database!r}")
        if cfg.suite not in ("full", "none"):
            raise DataError(f"suite must be 'full' or 'none', got {cfg.suite!r}")
        return cfg

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        doc = yaml.safe_load(Path(path).read_text())
        if not isinstance(doc, dict):
            raise DataError(f"config file {path} must hold a mapping")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "backends": list(self.backends),
            "backend_params": self.backend_params,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "sweep": self.sweep,
            "db_sizes": list(self.db_sizes),
            "output": str(self.output),
            "database": self.database,
            "suite": self.suite,
            "jobs": self.jobs,
            "report_thresholds": self.report_thresholds,
        }


# --- corpus ------------------------------------------------------------------

def resolve_corpus(config: ExperimentConfig) -> Path:
    """Directory of images named by the dataset spec; synthetic corpora are
    generated (once) under the output directory, keyed by their parameters."""
    ds = dict(config.dataset)
    if "path" in ds:
        root = Path(ds["path"])
        if not root.is_absolute() and not root.exists():
            env = os.environ.get("SIMHAYSTACK_DATA")
            if env and (Path(env) / root).exists():
                root = Path(env) / root
        if not root.is_dir():
            raise DataError(f"dataset directory not found: {root}")
        return root
    if "synthetic" in ds:
        from .synthcorpus import generate_corpus_dir

        spec = dict(ds["synthetic"])
        count = int(spec.get("count", 500))
        width = int(spec.get("width", 320))
        height = int(spec.get("height", 240))
        seed = int(spec.get("seed", config.seed))
        tag = f"synth-{count}x{width}x{height}-s{seed}"
        root = Path(config.output) / "corpora" / tag
        return generate_corpus_dir(root, count, width, height, seed)
    raise DataError("dataset spec needs 'path' or 'synthetic'")


def corpus_ids(root: Path) -> list[str]:
    ids = sorted(p.name for p in root.iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg"))
    if len(ids) < 2:
        raise DataError(f"dataset at {root} has {len(ids)} images; need at least 2")
    return ids


# --- protocol pieces ---------------------------------------------------------

def split_dataset(ids, seed: int) -> tuple[list[str], list[str]]:
    """Disjoint experimental/control halves, deterministic under the seed.

    The experimental half (the database side) gets the odd element.
    """
    ids = sorted(ids)
    if len(ids) < 2:
        raise DataError("need at least 2 ids to split")
    rng = np.random.default_rng(np.random.PCG64(seed))
    order = rng.permutation(len(ids))
    cut = (len(ids) + 1) // 2
    experimental = sorted(ids[i] for i in order[:cut])
    control = sorted(ids[i] for i in order[cut:])
    return experimental, control


def sample_ids(ids, count: int, seed: int, stream: str) -> list[str]:
    rng = np.random.default_rng(np.random.PCG64(derive_seed(seed, "sample", 0.0, stream)))
    ids = sorted(ids)
    if count >= len(ids):
        return ids
    pick = rng.choice(len(ids), size=count, replace=False)
    return sorted(ids[i] for i in pick)


def recall_fpr(matches: dict, ground_truth: dict) -> tuple[float, float]:
    """Recall and false positive rate under the strict wrong-id rule.

    ground_truth maps query id -> true source id for positives, None for
    negatives. matches maps query id -> matched database id or None. A
    positive matched to the wrong id counts as a miss and as a false
    positive.
    """
    if not ground_truth:
        raise ValueError("ground truth is empty")
    n_pos = sum(1 for v in ground_truth.values() if v is not None)
    n_neg = len(ground_truth) - n_pos
    correct = 0
    false_pos = 0
    for qid, truth in ground_truth.items():
        got = matches.get(qid)
        if truth is None:
            if got is not None:
                false_pos += 1
        elif got is not None:
            if got == truth:
                correct += 1
            else:
                false_pos += 1
    recall = correct / n_pos if n_pos else 0.0
    fpr = false_pos / n_neg if n_neg else 0.0
    return recall, fpr


@dataclass(frozen=True)
class RocCurve:
    thresholds: tuple[float, ...]
    points: tuple[tuple[float, float], ...]  # (fpr, recall) per threshold
    auc: float


def auc_from_points(points) -> float:
    """Trapezoidal area under (FPR, recall) points after closing the curve
    with (0, 0) and (1, 1); points must arrive sorted by threshold."""
    pts = [(float(f), float(r)) for f, r in points]
    if len(pts) < 2:
        raise ValueError("need at least 2 ROC points")
    fprs = [p[0] for p in pts]
    if any(b < a - 1e-12 for a, b in zip(fprs, fprs[1:])):
        raise ValueError("ROC points are not sorted by threshold (FPR decreases)")
    closed = [(0.0, 0.0)] + pts + [(1.0, 1.0)]
    area = 0.0
    for (f0, r0), (f1, r1) in zip(closed, closed[1:]):
        area += (f1 - f0) * (r0 + r1) / 2.0
    return area


@dataclass(frozen=True)
class QueryOutcome:
    """One perturbed query against one database, threshold-independent."""

    query_id: str
    attack: str  # e.g. 'gaussian_noise_0.05', or 'none'
    family: str
    is_positive: bool
    source_id: str | None
    best_id: str | None
    best_distance: float


def sweep_outcomes(outcomes, thresholds=None, sweep=None) -> RocCurve:
    """ROC curve over the outcomes at the given (or derived) thresholds.

    Curves use the classical detection reading: a positive query scores a hit
    when its best-match distance clears the threshold, a negative scores a
    false positive - so a chance backend sweeps out the diagonal (AUC 0.5)
    and a perfect one reaches (0, 1). The stricter wrong-id accounting lives
    in recall_fpr and the fixed-threshold reports.
    """
    outcomes = list(outcomes)
    n_pos = sum(1 for o in outcomes if o.is_positive)
    n_neg = len(outcomes) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("sweep needs both positive and negative queries")
    if thresholds is None:
        observed = sorted({o.best_distance for o in outcomes if np.isfinite(o.best_distance)})
        if not observed:
            observed = [0.0]
        if sweep and sweep.get("kind") == "grid":
            npts = int(sweep.get("points", 200))
            thresholds = list(np.linspace(observed[0], observed[-1], npts))
        else:
            thresholds = observed
        if len(thresholds) < 2:
            thresholds = [thresholds[0], thresholds[0] + 1.0]
    t = np.asarray(sorted(thresholds), dtype=np.float64)
    hit_dists = np.sort([o.best_distance for o in outcomes if o.is_positive and o.best_id is not None])
    fp_dists = np.sort([o.best_distance for o in outcomes if not o.is_positive and o.best_id is not None])
    recalls = np.searchsorted(hit_dists, t, side="right") / n_pos
    fprs = np.searchsorted(fp_dists, t, side="right") / n_neg
    points = tuple((float(f), float(r)) for f, r in zip(fprs, recalls))
    return RocCurve(tuple(float(x) for x in t), points, auc_from_points(points))


# --- query evaluation --------------------------------------------------------

_WORKER_CTX: dict = {}


def _init_worker(ctx):
    _WORKER_CTX.update(ctx)


def _suite_for(config_suite: str, image_id: str, seed: int):
    if config_suite == "none":
        return [PerturbationSpec("none", 0.0)]
    specs = []
    for family, value, _ in SUITE:
        s = derive_seed(seed, family, value, image_id) if family in STOCHASTIC_FAMILIES else None
        specs.append(PerturbationSpec(family, value, s))
    return specs


def _eval_query_image(task):
    """Worker: perturb one sampled image and scan every database with it.

    Returns (query_id, is_positive, [(backend_key, db_key, attack, family,
    best_id, best_distance)...], fingerprint_seconds, match_seconds).
    """
    qid, is_positive = task
    ctx = _WORKER_CTX
    img = load_image(Path(ctx["corpus"]) / qid)
    rows = []
    t_fp = {k: 0.0 for k in ctx["encoders"]}
    t_match = {k: 0.0 for k in ctx["encoders"]}
    for spec in _suite_for(ctx["suite"], qid, ctx["seed"]):
        pimg = apply(spec, img)
        pid = f"{qid}__{spec.label}"
        for bkey, encoder in ctx["encoders"].items():
            t0 = time.perf_counter()
            payload = encoder.fingerprint(pimg, pid)
            t1 = time.perf_counter()
            t_fp[bkey] += t1 - t0
            for dbkey, db in ctx["databases"][bkey].items():
                t2 = time.perf_counter()
                dists = db.scan(payload)
                if dists.size:
                    idx = int(np.argmin(dists))
                    best_id, best_d = db.ids[idx], float(dists[idx])
                else:
                    best_id, best_d = None, float("inf")
                t_match[bkey] += time.perf_counter() - t2
                rows.append((bkey, dbkey, pid, spec.label, spec.family, best_id, best_d))
    return qid, is_positive, rows, t_fp, t_match


def _evaluate_queries(corpus, encoders, databases, tasks, suite, seed, jobs):
    """Run all query evaluations, optionally in parallel; deterministic fold."""
    ctx = {"corpus": str(corpus), "encoders": encoders, "databases": databases, "suite": suite, "seed": seed}
    jobs = jobs or os.cpu_count() or 1
    results = []
    if jobs > 1 and len(tasks) > 1:
        mp = multiprocessing.get_context("fork")
        with mp.Pool(min(jobs, len(tasks)), initializer=_init_worker, initargs=(ctx,)) as pool:
            results = list(pool.imap_unordered(_eval_query_image, tasks, chunksize=4))
    else:
        _init_worker(ctx)
        results = [_eval_query_image(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    fingerprint_s = {k: 0.0 for k in encoders}
    match_s = {k: 0.0 for k in encoders}
    outcomes: dict[str, dict[str, list[QueryOutcome]]] = {
        bkey: {dbkey: [] for dbkey in databases[bkey]} for bkey in encoders
    }
    for qid, is_positive, rows, t_fp, t_match in results:
        for k, v in t_fp.items():
            fingerprint_s[k] += v
        for k, v in t_match.items():
            match_s[k] += v
        for bkey, dbkey, pid, attack, family, best_id, best_d in rows:
            outcomes[bkey][dbkey].append(
                QueryOutcome(pid, attack, family, is_positive, qid if is_positive else None, best_id, best_d)
            )
    return outcomes, fingerprint_s, match_s


def _curve_to_doc(curve: RocCurve) -> dict:
    return {
        "thresholds": list(curve.thresholds),
        "points": [[f, r] for f, r in curve.points],
        "auc": curve.auc,
    }


def _collect_curves(outcomes: list[QueryOutcome], sweep: dict) -> dict:
    """Overall, per-attack and per-family pooled curves for one backend/db."""
    overall = sweep_outcomes(outcomes, sweep=sweep)
    per_attack = {}
    for attack in sorted({o.attack for o in outcomes}):
        sub = [o for o in outcomes if o.attack == attack]
        per_attack[attack] = _curve_to_doc(sweep_outcomes(sub, sweep=sweep))
    per_family = {}
    for family in sorted({o.family for o in outcomes}):
        sub = [o for o in outcomes if o.family == family]
        per_family[family] = _curve_to_doc(sweep_outcomes(sub, sweep=sweep))
    return {"overall": _curve_to_doc(overall), "per_attack": per_attack, "per_family": per_family}


def _threshold_report(outcomes: list[QueryOutcome], thresholds) -> list[dict]:
    report = []
    for eta in thresholds:
        matches = {o.query_id: (o.best_id if o.best_distance <= eta else None) for o in outcomes}
        truth = {o.query_id: o.source_id for o in outcomes}
        r, f = recall_fpr(matches, truth)
        report.append({"threshold": float(eta), "recall": r, "fpr": f})
    return report


def _build_databases(encoders, corpus: Path, db_id_sets: dict[str, list[str]]):
    """db key -> Database per backend; images loaded once per database build."""
    databases = {bkey: {} for bkey in encoders}
    for dbkey, ids in db_id_sets.items():
        records = [(i, load_image(corpus / i)) for i in ids]
        for bkey, encoder in encoders.items():
            databases[bkey][dbkey] = Database.build(encoder, records)
    return databases


def _make_encoders(config: ExperimentConfig) -> dict:
    encoders = {}
    for spec in config.backends:
        params = dict(config.backend_params.get(spec, {}))
        encoders[spec] = make_backend(spec, **params)
    return encoders


def _result_skeleton(config: ExperimentConfig, kind: str) -> dict:
    return {
        "result_version": RESULT_VERSION,
        "kind": kind,
        "created_unix": time.time(),
        "config": config.to_dict(),
        "backends": {},
    }


def run_synthetic(config: ExperimentConfig) -> dict:
    """The core experiment: perturbed-query ROC over one database."""
    corpus = resolve_corpus(config)
    ids = corpus_ids(corpus)
    if config.sample_count > len(ids) // 2:
        raise DataError(f"sample_count {config.sample_count} exceeds half the corpus ({len(ids)} images)")
    experimental, control = split_dataset(ids, config.seed)
    exp_samples = sample_ids(experimental, config.sample_count, config.seed, "experimental")
    ctrl_samples = sample_ids(control, config.sample_count, config.seed, "control")
    db_ids = experimental if config.database == "full" else exp_samples

    encoders = _make_encoders(config)
    databases = _build_databases(encoders, corpus, {"db": db_ids})
    tasks = [(qid, True) for qid in exp_samples] + [(qid, False) for qid in ctrl_samples]
    outcomes, t_fp, t_match = _evaluate_queries(corpus, encoders, databases, tasks, config.suite, config.seed, config.jobs)

    result = _result_skeleton(config, "synthetic")
    result["split"] = {"experimental": experimental, "control": control}
    result["samples"] = {"experimental": exp_samples, "control": ctrl_samples}
    result["database_size"] = len(db_ids)
    for bkey in config.backends:
        rows = outcomes[bkey]["db"]
        doc = _collect_curves(rows, config.sweep)
        doc["timings"] = {
            "db_build_s": databases[bkey]["db"].build_seconds,
            "fingerprint_s": t_fp[bkey],
            "match_s": t_match[bkey],
        }
        if bkey in config.report_thresholds:
            doc["threshold_report"] = _threshold_report(rows, config.report_thresholds[bkey])
        result["backends"][bkey] = doc
    return result


def run_scaling(config: ExperimentConfig) -> dict:
    """Database-size scaling: identical queries, databases padded with
    random experimental images to each requested size."""
    if not config.db_sizes:
        raise DataError("scaling run needs db_sizes")
    corpus = resolve_corpus(config)
    ids = corpus_ids(corpus)
    experimental, control = split_dataset(ids, config.seed)
    biggest = max(config.db_sizes)
    if biggest > len(experimental):
        raise DataError(
            f"largest database size {biggest} exceeds the experimental half ({len(experimental)}); "
            f"need a corpus of at least {2 * biggest} images"
        )
    exp_samples = sample_ids(experimental, config.sample_count, config.seed, "experimental")
    ctrl_samples = sample_ids(control, config.sample_count, config.seed, "control")

    rng = np.random.default_rng(np.random.PCG64(derive_seed(config.seed, "dbpad", 0.0, "scaling")))
    padding_pool = [i for i in experimental if i not in set(exp_samples)]
    padding = [padding_pool[i] for i in rng.permutation(len(padding_pool))]
    db_id_sets = {}
    for size in sorted(config.db_sizes):
        if size < len(exp_samples):
            raise DataError(f"db size {size} smaller than the query sample count {len(exp_samples)}")
        db_id_sets[f"db{size}"] = sorted(exp_samples + padding[: size - len(exp_samples)])

    encoders = _make_encoders(config)
    databases = _build_databases(encoders, corpus, db_id_sets)
    tasks = [(qid, True) for qid in exp_samples] + [(qid, False) for qid in ctrl_samples]
    outcomes, t_fp, t_match = _evaluate_queries(corpus, encoders, databases, tasks, config.suite, config.seed, config.jobs)

    result = _result_skeleton(config, "scaling")
    result["split"] = {"experimental": experimental, "control": control}
    result["samples"] = {"experimental": exp_samples, "control": ctrl_samples}
    for bkey in config.backends:
        sizes_doc = {}
        for size in sorted(config.db_sizes):
            dbkey = f"db{size}"
            doc = _collect_curves(outcomes[bkey][dbkey], config.sweep)
            doc["timings"] = {
                "db_build_s": databases[bkey][dbkey].build_seconds,
                "fingerprint_s": t_fp[bkey],
                "match_s": t_match[bkey],
            }
            sizes_doc[str(size)] = doc
        result["backends"][bkey] = {"sizes": sizes_doc}
    return result


def read_template_metadata(csv_path) -> tuple[dict[str, str], dict[str, str]]:
    """CSV with header image_file,template_label -> (image->label, label->template image)."""
    image_label: dict[str, str] = {}
    template_of: dict[str, str] = {}
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames[:2]] != ["image_file", "template_label"]:
            raise DataError(f"{csv_path}: expected header 'image_file,template_label', got {reader.fieldnames}")
        for row in reader:
            image = row["image_file"].strip()
            label = row["template_label"].strip()
            if not image or not label:
                raise DataError(f"{csv_path}: empty image_file or template_label")
            if image in image_label:
                raise DataError(f"{csv_path}: duplicate image_file {image!r}")
            image_label[image] = label
            template_of.setdefault(label, image)  # first occurrence is the template
    if not image_label:
        raise DataError(f"{csv_path}: no rows")
    return image_label, template_of


def run_templates(config: ExperimentConfig, images_dir, metadata_csv) -> dict:
    """In-the-wild run: database of template images, queries are the variants."""
    corpus = Path(images_dir)
    if not corpus.is_dir():
        raise DataError(f"images directory not found: {corpus}")
    image_label, template_of = read_template_metadata(metadata_csv)

    missing = sorted(i for i in image_label if not (corpus / i).is_file())
    present = {i: l for i, l in image_label.items() if (corpus / i).is_file()}
    usable_labels = sorted({l for l in template_of if template_of[l] in present})

    # split labels into two groups with near-equal image counts, seeded
    rng = np.random.default_rng(np.random.PCG64(derive_seed(config.seed, "templates", 0.0, "labels")))
    label_order = [usable_labels[i] for i in rng.permutation(len(usable_labels))]
    counts = {l: 0 for l in usable_labels}
    for img, lab in present.items():
        if lab in counts:
            counts[lab] += 1
    exp_labels, ctrl_labels, n_exp, n_ctrl = set(), set(), 0, 0
    for lab in label_order:
        if n_exp <= n_ctrl:
            exp_labels.add(lab)
            n_exp += counts[lab]
        else:
            ctrl_labels.add(lab)
            n_ctrl += counts[lab]

    db_ids = sorted(template_of[l] for l in exp_labels)
    positives = sorted(i for i, l in present.items() if l in exp_labels and i not in set(db_ids))
    negatives = sorted(i for i, l in present.items() if l in ctrl_labels and i != template_of[l])
    if config.sample_count and config.sample_count < len(positives):
        positives = sample_ids(positives, config.sample_count, config.seed, "template-pos")
    if config.sample_count and config.sample_count < len(negatives):
        negatives = sample_ids(negatives, config.sample_count, config.seed, "template-neg")

    encoders = _make_encoders(config)
    databases = _build_databases(encoders, corpus, {"db": db_ids})

    # queries are the stored images themselves; no synthetic perturbation
    outcomes = {bkey: [] for bkey in encoders}
    t_fp = {k: 0.0 for k in encoders}
    t_match = {k: 0.0 for k in encoders}
    for qid, is_positive in [(q, True) for q in positives] + [(q, False) for q in negatives]:
        img = load_image(corpus / qid)
        source = template_of[present[qid]] if is_positive else None
        for bkey, encoder in encoders.items():
            t0 = time.perf_counter()
            payload = encoder.fingerprint(img, qid)
            t1 = time.perf_counter()
            t_fp[bkey] += t1 - t0
            db = databases[bkey]["db"]
            dists = db.scan(payload)
            if dists.size:
                idx = int(np.argmin(dists))
                best_id, best_d = db.ids[idx], float(dists[idx])
            else:
                best_id, best_d = None, float("inf")
            t_match[bkey] += time.perf_counter() - t1
            outcomes[bkey].append(QueryOutcome(qid, "wild", "wild", is_positive, source, best_id, best_d))

    result = _result_skeleton(config, "templates")
    result["labels"] = {"experimental": sorted(exp_labels), "control": sorted(ctrl_labels)}
    result["missing_images"] = missing
    result["database_size"] = len(db_ids)
    result["query_counts"] = {"positives": len(positives), "negatives": len(negatives)}
    for bkey in config.backends:
        rows = outcomes[bkey]
        doc = {"overall": _curve_to_doc(sweep_outcomes(rows, sweep=config.sweep))}
        doc["timings"] = {
            "db_build_s": databases[bkey]["db"].build_seconds,
            "fingerprint_s": t_fp[bkey],
            "match_s": t_match[bkey],
        }
        if bkey in config.report_thresholds:
            doc["threshold_report"] = _threshold_report(rows, config.report_thresholds[bkey])
        result["backends"][bkey] = doc
    return result


# --- results I/O -------------------------------------------------------------

def write_result(result: dict, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(result, indent=1, sort_keys=True))


def redact_timings(result: dict) -> dict:
    """Copy of the result with every timing field zeroed, for byte comparison."""

    def scrub(node):
        if isinstance(node, dict):
            out = {}
            for k, v in node.items():
                if k in ("created_unix", "db_build_s", "fingerprint_s", "match_s"):
                    out[k] = 0.0
                else:
                    out[k] = scrub(v)
            return out
        if isinstance(node, list):
            return [scrub(v) for v in node]
        return node

    return scrub(result)


def _iter_curves(result: dict):
    for bkey, doc in result.get("backends", {}).items():
        stack = [(bkey, doc)]
        while stack:
            name, node = stack.pop()
            if not isinstance(node, dict):
                continue
            if "thresholds" in node and "points" in node and "auc" in node:
                yield name, node
                continue
            for k, v in node.items():
                if isinstance(v, dict):
                    stack.append((f"{name}/{k}", v))


def verify_result(result: dict) -> list[str]:
    """Schema and invariant check; returns a list of problems (empty = ok)."""
    problems = []
    if result.get("result_version") != RESULT_VERSION:
        problems.append(f"result_version is {result.get('result_version')!r}, expected {RESULT_VERSION}")
    if result.get("kind") not in ("synthetic", "scaling", "templates"):
        problems.append(f"unknown result kind {result.get('kind')!r}")
    if not result.get("backends"):
        problems.append("no backends in result")
    for name, node in _iter_curves(result):
        t = node["thresholds"]
        pts = node["points"]
        if len(t) != len(pts):
            problems.append(f"{name}: {len(t)} thresholds vs {len(pts)} points")
            continue
        if any(b < a for a, b in zip(t, t[1:])):
            problems.append(f"{name}: thresholds not sorted")
        for coord, label in ((0, "fpr"), (1, "recall")):
            vals = [p[coord] for p in pts]
            if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
                problems.append(f"{name}: {label} not nondecreasing along the sweep")
            if any(v < -1e-12 or v > 1 + 1e-12 for v in vals):
                problems.append(f"{name}: {label} outside [0, 1]")
        if not (0.0 <= node["auc"] <= 1.0):
            problems.append(f"{name}: auc {node['auc']} outside [0, 1]")
        else:
            try:
                expected = auc_from_points([tuple(p) for p in pts])
                if abs(expected - node["auc"]) > 1e-9:
                    problems.append(f"{name}: auc {node['auc']} != recomputed {expected}")
            except ValueError as exc:
                problems.append(f"{name}: {exc}")
    return problems


def export_plots(result: dict, out_dir, svg: bool = False) -> list[Path]:
    """One CSV per curve (threshold, fpr, recall); optional standalone SVGs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, node in sorted(_iter_curves(result)):
        safe = name.replace("/", "__")
        csv_path = out / f"{safe}.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "fpr", "recall"])
            for t, (f, r) in zip(node["thresholds"], node["points"]):
                writer.writerow([t, f, r])
        written.append(csv_path)
        if svg:
            svg_path = out / f"{safe}.svg"
            svg_path.write_text(_roc_svg(name, node))
            written.append(svg_path)
    return written


def _roc_svg(name: str, node: dict) -> str:
    size, margin = 360, 40
    span = size - 2 * margin

    def sx(v):
        return margin + v * span

    def sy(v):
        return size - margin - v * span

    pts = [(0.0, 0.0)] + [tuple(p) for p in node["points"]] + [(1.0, 1.0)]
    path = " ".join(f"{sx(f):.1f},{sy(r):.1f}" for f, r in pts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(0)}" stroke="black"/>\n'
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(0)}" y2="{sy(1)}" stroke="black"/>\n'
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(1)}" stroke="#bbb" stroke-dasharray="4"/>\n'
        f'<polyline points="{path}" fill="none" stroke="#c22" stroke-width="1.5"/>\n'
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="12">FPR</text>\n'
        f'<text x="12" y="{size / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 12 {size / 2})">recall</text>\n'
        f'<text x="{size / 2}" y="16" text-anchor="middle" font-size="12">{name} (AUC {node["auc"]:.4f})</text>\n'
        "</svg>\n"
    )
