"""Command line interface: ``build``, ``shuffle``, ``measure`` and ``study``.

Every command writes only inside ``--out``. Exit codes: 0 on success, 1 on
a fatal error (nothing usable to process, unreadable or malformed input),
2 when some books of a batch failed while the others completed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .concentric import MeasureSummary
from .corpus import (
    DEFAULT_CHAPTER_REGEX,
    OrganizedText,
    book_id_from_path,
    load_stopwords,
    shuffle_paragraphs,
)
from .mesonet import MesoNetwork, NetworkFormatError, assemble, candidate_edges, prune_to_average_degree
from .pipeline import STAGES, RunConfig, characterize, log_timings, organize_path, timed
from .signature import rs_csv
from .study import (
    FEATURES,
    FICTION,
    OTHERS,
    REAL,
    RMSE_DEFINITION,
    SHUFFLED,
    FeatureRecord,
    bipartite_project,
    book_tfidf_matrix,
    correlation_report,
    default_fiction_communities,
    detect_communities,
    label_book,
    loo_nearest_centroid_accuracy,
    modularity,
    pca2,
    rmse_separation,
    run_real_vs_shuffled,
)
from .vectorize import similarity_matrix, window_vectors, write_similarity_csv

log = logging.getLogger("textrecur")

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


class CliError(Exception):
    pass


def _header(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n"


def _write(out_dir: Path, name: str, text: str) -> Path:
    path = out_dir / name
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def _config(args) -> RunConfig:
    stopwords = load_stopwords(args.stopwords) if getattr(args, "stopwords", None) else None
    return RunConfig(
        delta=getattr(args, "delta", 1),
        avg_degree=getattr(args, "avg_degree", 4.0),
        depths=tuple(getattr(args, "h", (2,))),
        seed=args.seed,
        chapter_regex=getattr(args, "chapter_regex", DEFAULT_CHAPTER_REGEX),
        stopwords=stopwords,
    )


def _load_organized(path: Path, config: RunConfig) -> OrganizedText:
    if path.name.endswith(".organized.json"):
        return OrganizedText.from_json(path.read_text(encoding="utf-8"))
    return organize_path(path, config)


def _output_stem(path: Path, organized: OrganizedText) -> str:
    stem = book_id_from_path(path)
    if organized.shuffle_seed is not None and not path.name.endswith(".organized.json"):
        stem = f"{stem}-shuffled-{organized.shuffle_seed}"
    return stem


# --- build -----------------------------------------------------------------


def _build_one(task) -> tuple[str, str | None]:
    path, config, shuffle_seed, out_dir, dump_dir = task
    path = Path(path)
    try:
        timings: dict[str, float] = {}
        with timed(timings, "text_processing"):
            organized = _load_organized(path, config)
            if shuffle_seed is not None:
                organized = shuffle_paragraphs(organized, shuffle_seed)
        with timed(timings, "network_modelling"):
            vectors, model = window_vectors(organized, config.delta)
            sim_edges = prune_to_average_degree(
                candidate_edges(vectors, config.delta), len(organized), config.avg_degree
            )
            network = assemble(len(organized), sim_edges, config.delta, config.avg_degree)
        stem = _output_stem(path, organized)
        _write(out_dir, f"{stem}.organized.json", organized.to_json(meta=config.meta()))
        _write(out_dir, f"{stem}.mesonet.tsv", network.to_tsv({"seed": config.seed, "version": __version__}))
        if dump_dir is not None:
            dump_dir.mkdir(parents=True, exist_ok=True)
            write_similarity_csv(similarity_matrix(vectors, len(model.vocabulary)), dump_dir / f"{stem}.similarity.csv")
        log_timings(stem, timings)
        return str(path), None
    except Exception as exc:  # per-book failure, reported and counted
        return str(path), f"{type(exc).__name__}: {exc}"


def cmd_build(args) -> int:
    config = _config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not args.books:
        log.error("empty corpus: no input books")
        return EXIT_FATAL
    dump_dir = _inside(out_dir, args.dump_similarity) if args.dump_similarity else None
    tasks = [(p, config, args.shuffle_seed, out_dir, dump_dir) for p in args.books]
    results = _map(_build_one, tasks, args.jobs)
    failures = [(p, err) for p, err in results if err]
    for p, err in failures:
        log.error("%s: %s", p, err)
    if len(failures) == len(results):
        return EXIT_FATAL
    return EXIT_PARTIAL if failures else EXIT_OK


def _inside(out_dir: Path, rel: str) -> Path:
    path = (out_dir / rel).resolve()
    if out_dir.resolve() not in (path, *path.parents):
        raise CliError(f"{rel}: refusing to write outside {out_dir}")
    return path


def _map(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# --- shuffle ---------------------------------------------------------------


def cmd_shuffle(args) -> int:
    config = _config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.shuffle_seed if args.shuffle_seed is not None else config.seed
    for p in args.inputs:
        path = Path(p)
        if not path.exists():
            raise CliError(f"{path}: no such file")
        organized = shuffle_paragraphs(_load_organized(path, config), seed)
        stem = f"{book_id_from_path(path)}-shuffled-{seed}"
        _write(out_dir, f"{stem}.organized.json", organized.to_json(meta=config.meta()))
    return EXIT_OK


# --- measure ---------------------------------------------------------------


def measures_csv(k_s: dict[int, tuple], summaries: dict[int, MeasureSummary], meta: dict) -> str:
    depths = sorted(k_s)
    buf = io.StringIO()
    buf.write(_header(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node"] + [c for h in depths for c in (f"k_{h}", f"S_{h}")])
    n = len(k_s[depths[0]][0])
    for i in range(n):
        writer.writerow([i] + [repr(float(v)) for h in depths for v in (k_s[h][0][i], k_s[h][1][i])])
    for h in depths:
        s = summaries[h]
        buf.write(f"# summary h={h} mean_k={s.mean_k!r} std_k={s.std_k!r} mean_S={s.mean_S!r}\n")
    return buf.getvalue()


def summary_json(book_id: str, summaries: dict[int, MeasureSummary], rs, meta: dict) -> str:
    any_s = next(iter(summaries.values()))
    payload = {
        "bookId": book_id,
        "meta": {**meta, "std": "population"},
        "measures": {
            str(h): {"mean_k": s.mean_k, "std_k": s.std_k, "mean_S": s.mean_S}
            for h, s in sorted(summaries.items())
        },
        "rs": {"mean": any_s.rs_mean, "std": any_s.rs_std, "empty": any_s.rs_empty, "length": len(rs)},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _measure_one(task):
    path, depths, seed, out_dir = task
    path = Path(path)
    timings: dict[str, float] = {}
    network = MesoNetwork.from_tsv(path.read_text(encoding="utf-8"), str(path))
    stem = path.name[: -len(".mesonet.tsv")] if path.name.endswith(".mesonet.tsv") else book_id_from_path(path)
    with timed(timings, "characterization"):
        rs, summaries, values = characterize(network, depths, stem)
    meta = {"delta": network.delta, "t": f"{network.t:g}", "h": ",".join(map(str, depths))}
    meta.update(seed=seed, version=__version__)
    _write(out_dir, f"{stem}.measures.csv", measures_csv(values, summaries, meta))
    _write(out_dir, f"{stem}.rs.csv", rs_csv(rs, meta))
    _write(out_dir, f"{stem}.summary.json", summary_json(stem, summaries, rs, meta))
    log_timings(stem, timings)
    return stem


def cmd_measure(args) -> int:
    out_dir = Path(args.out)
    for p in args.networks:
        if not Path(p).is_file():
            raise CliError(f"{p}: no such network file")
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(p, tuple(args.h), args.seed, out_dir) for p in args.networks]
    _map(_measure_one, tasks, args.jobs)
    return EXIT_OK


# --- study -----------------------------------------------------------------


def _csv(rows: Sequence[Sequence], header: Sequence[str], meta: dict) -> str:
    buf = io.StringIO()
    buf.write(_header(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _study_rows(records: Sequence[FeatureRecord]):
    return [
        [r.book_id, r.label] + [float(r.features[f]) for f in FEATURES] + [r.h, r.delta, f"{r.t:g}"]
        for r in records
    ]


def _scatter(records: Sequence[FeatureRecord], x: str, y: str):
    return [[float(r.features[x]), float(r.features[y]), r.label] for r in records]


def _read_genres(path: str) -> dict[str, list[str]]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return {str(k): [str(g) for g in v] for k, v in data.items()}


FEATURE_SETS = {
    "mean_k+std_k": ["mean_k", "std_k"],
    "mean_k+mean_S": ["mean_k", "mean_S"],
    "mean_k+std_k+mean_S": ["mean_k", "std_k", "mean_S"],
}
XY = ["x", "y", "label"]


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _rmse_by_set(group_a, group_b) -> dict[str, float]:
    return {name: rmse_separation(group_a, group_b, names) for name, names in FEATURE_SETS.items()}


def _genre_labels(args, book_ids: Sequence[str], seed: int, meta: dict, out_dir: Path) -> dict[str, str]:
    genres = _read_genres(args.genres)
    books = [(b, genres.get(b, [])) for b in book_ids]
    graph = bipartite_project([(b, g) for b, g in books if g])
    partition = detect_communities(graph, seed=seed)
    fiction = set(args.fiction_communities or default_fiction_communities(partition))
    members: dict[int, list[str]] = {}
    for genre, cid in sorted(partition.items()):
        members.setdefault(cid, []).append(genre)
    _write(out_dir, "genres.json", _dump_json({
        "meta": meta,
        "modularity": modularity(graph, partition),
        "fictionCommunities": sorted(fiction),
        "communities": {str(c): {"size": len(g), "genres": g} for c, g in sorted(members.items())},
    }))
    labels = {b: label_book(g, partition, fiction) for b, g in books}
    _write(out_dir, "labels.csv", _csv([[b, labels[b]] for b in book_ids], ["bookId", "label"], meta))
    return labels


def cmd_study(args) -> int:
    if len(args.books) < 2:
        log.error("study needs at least 2 books, got %d", len(args.books))
        return EXIT_FATAL
    for p in args.books:
        if not Path(p).is_file():
            raise CliError(f"{p}: no such book file")
    config = _config(args)
    config = RunConfig(**{**config.__dict__, "depths": tuple(sorted(set(args.h) | {args.corr_h}))})
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = config.meta(h=",".join(map(str, config.depths)))
    pairs = run_real_vs_shuffled(sorted(args.books), config, args.jobs)

    records = [
        FeatureRecord.from_result(result, label, h, config)
        for h in config.depths
        for real, shuffled in pairs
        for result, label in ((real, REAL), (shuffled, SHUFFLED))
    ]
    header = ["bookId", "label", *FEATURES, "h", "delta", "t"]
    _write(out_dir, "study.csv", _csv(_study_rows(records), header, meta))

    h = args.h[0]
    at_h = [r for r in records if r.h == h]
    report: dict = {"definition": RMSE_DEFINITION, "meta": meta, "experiments": {}}
    report["experiments"]["real_vs_shuffled"] = {
        "h": h,
        "rmse": _rmse_by_set([r for r in at_h if r.label == REAL], [r for r in at_h if r.label == SHUFFLED]),
        "loo_nearest_centroid_accuracy": loo_nearest_centroid_accuracy(at_h, FEATURE_SETS["mean_k+std_k+mean_S"]),
    }
    for x, y in (("mean_k", "std_k"), ("mean_k", "mean_S")):
        _write(out_dir, f"scatter_shuffled_{x}_{y}.csv", _csv(_scatter(at_h, x, y), XY, meta))

    corr_records = [r for r in records if r.h == args.corr_h and r.label == REAL]
    try:
        corr = correlation_report(corr_records)
    except ValueError as exc:
        corr = {"error": str(exc)}
    _write(out_dir, "correlations.json", _dump_json(
        {"h": args.corr_h, "n_books": len(corr_records), "meta": meta, "correlations": corr}
    ))
    for x, y in (("rsMean", "mean_k"), ("rsStd", "std_k")):
        _write(out_dir, f"scatter_rs_{x}_{y}_h{args.corr_h}.csv", _csv(_scatter(corr_records, x, y), XY, meta))

    book_ids = [real.book_id for real, _ in pairs]
    labels = dict.fromkeys(book_ids, REAL)
    if args.genres:
        labels = _genre_labels(args, book_ids, config.seed, meta, out_dir)
        genre_records = [replace(r, label=labels[r.book_id]) for r in at_h if r.label == REAL]
        fiction = [r for r in genre_records if r.label == FICTION]
        others = [r for r in genre_records if r.label == OTHERS]
        if fiction and others:
            report["experiments"]["genre"] = {"h": h, "rmse": _rmse_by_set(fiction, others)}
        for x, y in (("mean_k", "std_k"), ("mean_k", "mean_S")):
            _write(out_dir, f"scatter_genre_{x}_{y}.csv", _csv(_scatter(genre_records, x, y), XY, meta))

    if len(pairs) >= 3:
        pca = pca2(book_tfidf_matrix([real.organized for real, _ in pairs]), seed=config.seed)
        rows = [[float(px), float(py), labels[b]] for b, (px, py) in zip(book_ids, pca.points)]
        _write(out_dir, "scatter_tfidf_pca.csv", _csv(rows, XY, meta))
    _write(out_dir, "rmse.json", _dump_json(report))
    totals = {s: sum(r.timings.get(s, 0.0) for pair in pairs for r in pair) for s in STAGES}
    log.info("study timings: %s", " ".join(f"{s}={v:.3f}s" for s, v in totals.items()))
    return EXIT_OK


# --- entry point -----------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="books processed in parallel")


def _text_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chapter-regex", default=DEFAULT_CHAPTER_REGEX)
    p.add_argument("--stopwords", help="stopword list replacing the built-in one")


def _net_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=_positive_int, default=1, help="paragraph window radius")
    p.add_argument("--avg-degree", type=_positive_float, default=4.0, help="similarity average degree T")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return v


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="textrecur", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="books -> organized text + mesoscopic network")
    b.add_argument("books", nargs="*", help="plain-text books or .organized.json files")
    _common(b)
    _text_flags(b)
    _net_flags(b)
    b.add_argument("--shuffle-seed", type=_u64, help="shuffle paragraphs before building")
    b.add_argument(
        "--dump-similarity", metavar="DIR", help="write <book>.similarity.csv into this subdirectory of --out"
    )
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("shuffle", help="paragraph-shuffled variants of books")
    s.add_argument("inputs", nargs="+", help="plain-text books or .organized.json files")
    _common(s)
    _text_flags(s)
    s.add_argument("--shuffle-seed", type=_u64)
    s.set_defaults(func=cmd_shuffle)

    m = sub.add_parser("measure", help="accessibility, symmetry and recurrence signature")
    m.add_argument("networks", nargs="+", help=".mesonet.tsv files")
    _common(m)
    m.add_argument("--h", type=_positive_int, nargs="+", default=[2], help="concentric depths")
    m.set_defaults(func=cmd_measure)

    st = sub.add_parser("study", help="real-vs-shuffled, genre, correlation and PCA experiments")
    st.add_argument("books", nargs="*", help="plain-text books")
    _common(st)
    _text_flags(st)
    _net_flags(st)
    st.add_argument("--h", type=_positive_int, nargs="+", default=[2], help="depth for discrimination features")
    st.add_argument("--corr-h", type=_positive_int, default=3, help="depth for the RS correlation study")
    st.add_argument("--genres", help="JSON file mapping bookId -> list of genres")
    st.add_argument("--fiction-communities", type=int, nargs="+", help="community ids counted as fiction")
    st.set_defaults(func=cmd_study)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (CliError, NetworkFormatError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
