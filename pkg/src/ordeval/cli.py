"""Command-line entry point: ``ordeval <command> [options]``.

Commands
--------
analyze   ReliefF ranking, reinforcement profiles, Kano classes and plots
rank      ReliefF ranking only
classify  reinforcement profiles and Kano classes only
simulate  synthetic population CSV plus ground-truth sidecar
render    SVG plots from previously written JSON
verify    simulate, analyze and compare against the ground truth

Exit codes: 0 success, 1 internal error, 2 bad input (CSV or spec),
3 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import re
import sys
from pathlib import Path

from . import __version__
from .dataset import DatasetError, OrdinalDataset, load_csv, to_csv
from .engine import SCHEMA_VERSION, OrdEvalParams, ReinforcementProfile, StepRule, evaluate_all
from .kano import KanoCategory, KanoClassification, classify_all
from .relieff import AttributeScore, ReliefFParams, relieff_scores
from .report import render_profile, render_ranking, render_text_report
from .synth import SpecError, SyntheticPopulationSpec, generate_population, ground_truth

FORMATS = ("json", "csv", "svg", "text")
EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name) or "attribute"


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("ORDEVAL_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"ORDEVAL_SEED must be an integer, got {env!r}") from None


def parse_scale(text: str | None, response: str) -> tuple[dict[str, int], int | None]:
    """``"7"`` sets every column; ``"a=5,b=7,response=7"`` sets named columns."""
    if not text:
        return {}, None
    if re.fullmatch(r"\d+", text.strip()):
        return {"*": int(text)}, int(text)
    scales = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep or not value.strip().isdigit():
            raise InputError(f"bad --scale entry {part!r}; expected name=max")
        scales[name.strip()] = int(value)
    return scales, scales.pop(response, None)


def parse_formats(text: str) -> tuple[str, ...]:
    formats = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise InputError(f"unknown formats {bad}; choose from {list(FORMATS)}")
    return formats


def load_dataset(args) -> OrdinalDataset:
    scales, response_scale = parse_scale(args.scale, args.response)
    try:
        data = Path(args.input).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    try:
        if "*" in scales:
            header = next(csv.reader(io.StringIO(data.decode("utf-8").lstrip("﻿"))))
            scales = {h.strip(): scales["*"] for h in header if h.strip() != args.response}
        return load_csv(data, args.response, scales=scales, response_scale=response_scale)
    except (DatasetError, UnicodeDecodeError, StopIteration) as exc:
        raise InputError(str(exc)) from None


def ordeval_params(args, seed: int) -> OrdEvalParams:
    return OrdEvalParams(
        context_size=args.k,
        bootstrap=args.bootstrap,
        alpha=args.alpha,
        min_support=args.min_support,
        seed=seed,
        step_rule=StepRule(args.step_rule),
        n_jobs=args.jobs,
    )


def relieff_params(args, seed: int) -> ReliefFParams:
    return ReliefFParams(k_neighbors=args.relieff_k, seed=seed, n_jobs=args.jobs)


def manifest(args, command: str, seed: int, dataset: OrdinalDataset | None = None) -> dict:
    """Everything needed to re-run ``command``; no output path, so it is stable."""
    m = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "seed": seed,
        "input": getattr(args, "input", None),
        "response": getattr(args, "response", None),
        "scale": getattr(args, "scale", None),
        "k": getattr(args, "k", None),
        "bootstrap": getattr(args, "bootstrap", None),
        "alpha": getattr(args, "alpha", None),
        "min_support": getattr(args, "min_support", None),
        "step_rule": getattr(args, "step_rule", None),
        "relieff_k": getattr(args, "relieff_k", None),
        "formats": getattr(args, "formats", None),
    }
    if getattr(args, "input", None):
        m["input_sha256"] = hashlib.sha256(Path(args.input).read_bytes()).hexdigest()
    if dataset is not None and dataset.report is not None:
        m["validation"] = dataset.report.to_dict()
    return m


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------

def scores_json(result) -> dict:
    return {"schema_version": SCHEMA_VERSION, **result.to_dict()}


def profiles_json(profiles: list[ReinforcementProfile]) -> dict:
    return {"schema_version": SCHEMA_VERSION, "profiles": [p.to_dict() for p in profiles]}


def classifications_json(classes: list[KanoClassification]) -> dict:
    return {"schema_version": SCHEMA_VERSION, "classifications": [c.to_dict() for c in classes]}


def profiles_csv(profiles: list[ReinforcementProfile]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["attribute", "direction", "value", "probability", "success", "events", "anti",
                "q025", "median", "q975", "significant"])
    for p in profiles:
        for c in p.cells:
            b = c.null_box
            q = ["", "", ""] if b is None else [repr(b.q025), repr(b.median), repr(b.q975)]
            prob = "" if c.probability is None else repr(c.probability)
            w.writerow([p.attribute, c.direction.value, c.value, prob, c.success_count,
                        c.event_count, c.anti_count, *q, str(c.significant).lower()])
    return buf.getvalue()


def write_profile_svgs(out: Path, profiles: list[ReinforcementProfile]) -> None:
    for p in profiles:
        write(out / f"profile_{safe_name(p.attribute)}.svg", render_profile(p))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def apply_manifest(args) -> None:
    """Fill unset options from ``--manifest``; explicit options win."""
    if not getattr(args, "manifest", None):
        return
    try:
        m = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read manifest {args.manifest}: {exc}") from None
    for key in ("input", "response", "scale", "k", "bootstrap", "alpha", "min_support",
                "step_rule", "relieff_k", "formats", "seed"):
        if key in m and getattr(args, key, None) in (None, DEFAULTS.get(key)):
            setattr(args, key, m[key])


def cmd_analyze(args) -> int:
    apply_manifest(args)
    if not args.input or not args.response:
        raise InputError("--input and --response are required")
    seed = resolve_seed(args.seed)
    formats = parse_formats(args.formats)
    dataset = load_dataset(args)
    out = Path(args.out)

    ranking = relieff_scores(dataset, relieff_params(args, seed))
    profiles = evaluate_all(dataset, ordeval_params(args, seed))
    classes = classify_all(profiles)

    if "json" in formats:
        write(out / "scores.json", dump_json(scores_json(ranking)))
        write(out / "profiles.json", dump_json(profiles_json(profiles)))
        write(out / "classifications.json", dump_json(classifications_json(classes)))
    if "csv" in formats:
        write(out / "profiles.csv", profiles_csv(profiles))
        write(out / "dataset.csv", to_csv(dataset))
    if "svg" in formats:
        write_profile_svgs(out, profiles)
        write(out / "ranking.svg", render_ranking(ranking.scores))
    if "text" in formats:
        write(out / "report.txt", render_text_report(profiles, classes, ranking.scores))
    write(out / "manifest.json", dump_json(manifest(args, "analyze", seed, dataset)))
    for c in classes:
        print(f"{c.attribute}: {c.category.value}")
    return EXIT_OK


def cmd_rank(args) -> int:
    seed = resolve_seed(args.seed)
    dataset = load_dataset(args)
    ranking = relieff_scores(dataset, relieff_params(args, seed))
    out = Path(args.out)
    write(out / "scores.json", dump_json(scores_json(ranking)))
    if "svg" in parse_formats(args.formats):
        write(out / "ranking.svg", render_ranking(ranking.scores))
    for s in ranking.ranking():
        print(f"{s.rank:>3}  {s.score:+.4f}  {s.attribute}")
    return EXIT_OK


def cmd_classify(args) -> int:
    seed = resolve_seed(args.seed)
    dataset = load_dataset(args)
    profiles = evaluate_all(dataset, ordeval_params(args, seed))
    classes = classify_all(profiles)
    out = Path(args.out)
    write(out / "profiles.json", dump_json(profiles_json(profiles)))
    write(out / "classifications.json", dump_json(classifications_json(classes)))
    if "svg" in parse_formats(args.formats):
        write_profile_svgs(out, profiles)
    for c in classes:
        print(f"{c.attribute}: {c.category.value}")
    return EXIT_OK


def load_spec(path: str, seed: int | None) -> SyntheticPopulationSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read spec {path}: {exc.strerror}") from None
    try:
        spec = SyntheticPopulationSpec.from_json(text)
    except SpecError as exc:
        raise InputError(f"invalid spec: {exc}") from None
    if seed is not None or os.environ.get("ORDEVAL_SEED", "").strip():
        spec = spec.with_seed(resolve_seed(seed))
    return spec


def cmd_simulate(args) -> int:
    spec = load_spec(args.spec, args.seed)
    try:
        dataset = generate_population(spec)
    except SpecError as exc:
        raise InputError(f"invalid spec: {exc}") from None
    out = Path(args.out)
    write(out / "dataset.csv", to_csv(dataset))
    truth = {
        "schema_version": SCHEMA_VERSION,
        "spec": spec.to_dict(),
        "ground_truth": [g.to_dict() for g in ground_truth(spec)],
    }
    write(out / "ground_truth.json", dump_json(truth))
    print(f"wrote {dataset.n_rows} rows x {dataset.n_attributes} attributes to {out}")
    return EXIT_OK


def cmd_render(args) -> int:
    out = Path(args.out)
    try:
        data = json.loads(Path(args.profiles).read_text(encoding="utf-8"))
        profiles = [ReinforcementProfile.from_dict(p) for p in data["profiles"]]
        scores = None
        if args.scores:
            sdata = json.loads(Path(args.scores).read_text(encoding="utf-8"))
            scores = [AttributeScore(s["attribute"], s["score"], s["rank"]) for s in sdata["scores"]]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read rendering input: {exc}") from None
    write_profile_svgs(out, profiles)
    if scores:
        write(out / "ranking.svg", render_ranking(scores))
    print(f"rendered {len(profiles)} profiles to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = load_spec(args.spec, args.seed)
    try:
        dataset = generate_population(spec)
    except SpecError as exc:
        raise InputError(f"invalid spec: {exc}") from None
    seed = spec.seed
    profiles = evaluate_all(dataset, ordeval_params(args, seed))
    classes = classify_all(profiles)
    rows = []
    for truth, got in zip(ground_truth(spec), classes):
        if truth.dominant is KanoCategory.MIXED:
            match = got.same_category(KanoCategory.MIXED, truth.components)
        else:
            match = got.category is truth.dominant
        rows.append({
            "attribute": truth.attribute,
            "expected": truth.dominant.value,
            "expected_components": [c.value for c in truth.components],
            "got": got.category.value,
            "got_components": [c.value for c in got.components],
            "match": bool(match),
        })
    ok = all(r["match"] for r in rows)
    report = {"schema_version": SCHEMA_VERSION, "seed": seed, "all_match": ok, "attributes": rows}
    write(Path(args.out) / "recovery.json", dump_json(report))
    for r in rows:
        print(f"{'ok ' if r['match'] else 'BAD'} {r['attribute']}: expected {r['expected']}, got {r['got']}")
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

DEFAULTS = {
    "k": None, "bootstrap": 200, "alpha": 0.05, "min_support": 5,
    "step_rule": StepRule.ADJACENT.value, "relieff_k": 10, "formats": "json,svg,text",
    "seed": None, "scale": None, "input": None, "response": None,
}


def _data_options(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", required=required, help="CSV file with a header row")
    p.add_argument("--response", required=required, help="name of the response column")
    p.add_argument("--scale", default=None,
                   help="scale maximum: one integer for all columns, or name=max,... (default: inferred)")


def _eval_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=DEFAULTS["k"], help="context size (default: min(n-1, 30))")
    p.add_argument("--bootstrap", type=int, default=DEFAULTS["bootstrap"], help="permutation replicates")
    p.add_argument("--alpha", type=float, default=DEFAULTS["alpha"], help="significance level")
    p.add_argument("--min-support", type=int, default=DEFAULTS["min_support"],
                   help="events needed before a cell is defined")
    p.add_argument("--step-rule", choices=[s.value for s in StepRule], default=DEFAULTS["step_rule"],
                   help="which attribute changes count as events")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (fallback: $ORDEVAL_SEED, then 0)")
    p.add_argument("--out", default="ordeval_out", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker threads; results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordeval", description="Ordinal attribute evaluation and Kano classification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline")
    _data_options(p, required=False)
    _eval_options(p)
    p.add_argument("--relieff-k", type=int, default=DEFAULTS["relieff_k"], help="ReliefF neighbours per class")
    p.add_argument("--formats", default=DEFAULTS["formats"], help=f"comma list of {','.join(FORMATS)}")
    p.add_argument("--manifest", default=None, help="re-run from a manifest.json")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("rank", help="ReliefF ranking")
    _data_options(p)
    p.add_argument("--relieff-k", type=int, default=DEFAULTS["relieff_k"], help="ReliefF neighbours per class")
    p.add_argument("--formats", default="json,svg")
    _common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("classify", help="reinforcement profiles and Kano classes")
    _data_options(p)
    _eval_options(p)
    p.add_argument("--formats", default="json,svg")
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="generate a synthetic population")
    p.add_argument("--spec", required=True, help="population spec JSON")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="SVG plots from JSON artifacts")
    p.add_argument("--profiles", required=True, help="profiles.json")
    p.add_argument("--scores", default=None, help="scores.json")
    p.add_argument("--out", default="ordeval_out", help="output directory")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="recover the ground truth of a synthetic spec")
    p.add_argument("--spec", required=True, help="population spec JSON")
    _eval_options(p)
    _common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"ordeval: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"ordeval: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
