"""
Command line front-end for the leaf map experiments
Every command reads the run configuration, computes, and writes CSV/SVG artifacts
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from leafmap import outputs
from leafmap.config import DEFAULT_CONFIG_PATH, BenzecriConfig, RunConfig, load_config
from leafmap.errors import EmptyInput, LeafMapError, NotLoxodromic, WordBudgetExceeded
from leafmap.foliation import (
    BENZECRI_CHART, benzecri_domains, benzecri_iterate, benzecri_matrix, benzecri_orbit,
    leaf_diagnostics, leaf_distance_matrix, normalized_leaves
)
from leafmap.frenet import build_flag_table, check_general_position
from leafmap.group import (
    COMMUTATOR_CURVE, SurfaceRep, Word, bend, fuchsian_octagon_rep, lift_principal, load_rep,
    save_rep, word_count
)
from leafmap.projlin import affine_chart
from leafmap.regularity import mismatch_scan, modelling_constraint_check
from leafmap.spectra import cone_dimension, cone_projection, cone_sample_from_scan, spectra_scan

WORD_BUDGET = 10 ** 7
DEFAULT_DIRECTION = (1.0, 0.0, 0.0, -1.0)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def check_word_budget(max_len: int):
    count = word_count(max_len)
    if count > WORD_BUDGET:
        raise WordBudgetExceeded(
            f"max_len={max_len} enumerates {count} words, above the budget of {WORD_BUDGET}")


def _load_rep(cfg: RunConfig) -> SurfaceRep:
    path = Path(cfg.rep_path)
    if not path.exists():
        raise FileNotFoundError(f"representation file {path} not found; run build-rep first")
    return load_rep(path, cfg.tolerances)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_build_rep(cfg: RunConfig, kind: str = "fuchsian", eps: float = 0.0,
                  direction=DEFAULT_DIRECTION, out: Optional[str] = None) -> Path:
    tol = cfg.tolerances
    rep4 = lift_principal(fuchsian_octagon_rep(tol), tol)
    if kind == "bent":
        rep4 = bend(rep4, COMMUTATOR_CURVE, direction, eps, tol)
    path = save_rep(rep4, Path(out or cfg.rep_path))
    print(f"Relator residual: {rep4.relator_residual:.3e}")
    print(f"✓ {kind.capitalize()} representation saved to {path}")
    return path


def cmd_leaves(cfg: RunConfig) -> Dict[str, Any]:
    tol = cfg.tolerances
    check_word_budget(cfg.max_word_len)
    rep4 = _load_rep(cfg)
    out = _out_dir(cfg)
    table = build_flag_table(rep4, fuchsian_octagon_rep(tol), cfg.max_word_len, tol,
                             workers=cfg.workers, verbose=True)
    outputs.write_csv(outputs.flag_table_frame(table), out / "flag_table.csv", cfg.config_hash())
    print(f"✓ Flag table with {len(table)} entries saved to {out / 'flag_table.csv'}")

    report = check_general_position(table, cfg.general_position_trials, seed=cfg.seed)
    if report.trials:
        print(f"General position: {report.trials} triples, min plane margin "
              f"{report.min_plane_margin:.3e}, min sum margin {report.min_sum_margin:.3e}")
    if report.failures:
        print(f"⚠️  {len(report.failures)} triple(s) below the general position threshold")

    angles, leaves = normalized_leaves(table, cfg.base_angles, cfg.leaf_count,
                                       cfg.leaf_samples, tol, verbose=True)
    summary = []
    for i, (t, nl) in enumerate(zip(angles, leaves)):
        outputs.write_csv(outputs.leaf_frame(nl), out / f"leaf_{i}.csv", cfg.config_hash())
        outputs.plot_leaf(nl, out / f"leaf_{i}.svg", title=f"leaf at {t.word} ({t.angle:.4f})")
        row = {"index": i, "angle": t.angle, "word": str(t.word)}
        row.update(leaf_diagnostics(nl))
        summary.append(row)

    matrix = leaf_distance_matrix(leaves)
    outputs.write_csv(outputs.distance_matrix_frame([t.angle for t in angles], matrix),
                      out / "leaf_distances.csv", cfg.config_hash())
    outputs.write_csv(outputs.leaf_summary_frame(summary), out / "leaf_summary.csv",
                      cfg.config_hash())
    max_distance = float(matrix.max())
    print(f"Max pairwise Hausdorff distance: {max_distance:.3e}")
    print(f"✓ {len(leaves)} leaves saved to {out}")
    return {"max_distance": max_distance, "summary": summary}


def cmd_spectra(cfg: RunConfig) -> Dict[str, Any]:
    tol = cfg.tolerances
    check_word_budget(cfg.max_word_len)
    rep4 = _load_rep(cfg)
    out = _out_dir(cfg)
    scan = spectra_scan(rep4, cfg.max_word_len, tol, workers=cfg.workers)
    if scan.skipped:
        print(f"⚠️  Skipped {scan.skipped} non-loxodromic word(s)")
    cone = cone_sample_from_scan(scan)

    outputs.write_csv(outputs.spectra_frame(scan.records), out / "spectra.csv", cfg.config_hash())
    outputs.write_csv(outputs.cone_frame(cone), out / "cone.csv", cfg.config_hash())
    outputs.plot_cone(cone_projection(cone), out / "cone.svg")

    try:
        rank: Optional[int] = cone_dimension(cone, cfg.tolerances.rank).rank
    except EmptyInput:
        rank = None
    residual = scan.max_normalized_residual()
    print(f"Words: {len(scan.records)}, max normalized eq1 residual: {residual:.3e}, "
          f"cone rank: {rank if rank is not None else 'n/a'}")
    print(f"✓ Spectra saved to {out / 'spectra.csv'}")
    return {"records": len(scan.records), "skipped": scan.skipped,
            "max_normalized_residual": residual, "cone_rank": rank}


def cmd_model_fit(cfg: RunConfig, word: Optional[str] = None, scan: bool = False) -> Dict[str, Any]:
    tol = cfg.tolerances
    check_word_budget(cfg.max_word_len)
    w = Word.parse(word if word is not None else cfg.model_word)
    if len(w) == 0:
        raise NotLoxodromic("the identity has no fixed points on the boundary")
    rep4 = _load_rep(cfg)
    out = _out_dir(cfg)
    table = build_flag_table(rep4, fuchsian_octagon_rep(tol), cfg.max_word_len, tol,
                             workers=cfg.workers, verbose=True)
    report = modelling_constraint_check(rep4, table, w, cfg.model_window, cfg.densify_steps, tol)
    fits = [report.fit_plus, report.fit_minus]
    for fit in fits:
        print(f"{fit.point_type:>5}: alpha_exact {fit.alpha_exact:.6f}, "
              f"alpha_hat {fit.alpha_hat:.6f}, r2 {fit.r_squared:.6f}")
        if fit.asymmetric:
            print(f"⚠️  Branch slopes {fit.branch_slopes} differ by {fit.asymmetry:.1%}; "
                  "sampling near the fixed point is too sparse")
    outputs.write_csv(outputs.model_fit_frame(str(w), fits), out / "model_fit.csv",
                      cfg.config_hash())
    print(f"✓ Model fit saved to {out / 'model_fit.csv'}")

    result: Dict[str, Any] = {"report": report}
    if scan:
        reports, skipped = mismatch_scan(rep4, cfg.max_word_len, tol)
        if skipped:
            print(f"⚠️  Skipped {skipped} non-loxodromic word(s)")
        outputs.write_csv(outputs.mismatch_frame(reports), out / "model_mismatch.csv",
                          cfg.config_hash())
        worst = max((abs(r.mismatch) for r in reports), default=0.0)
        print(f"Max exponent mismatch over {len(reports)} words: {worst:.3e}")
        print(f"✓ Mismatch scan saved to {out / 'model_mismatch.csv'}")
        result["max_mismatch"] = worst
    return result


def cmd_benzecri_demo(cfg: RunConfig, steps: Optional[int] = None,
                      lam: Optional[float] = None) -> List[float]:
    tol = cfg.tolerances
    params = cfg.benzecri.model_dump()
    if steps is not None:
        params["steps"] = steps
    if lam is not None:
        params["lam"] = lam
    bcfg = BenzecriConfig(**params)
    out = _out_dir(cfg)

    domain, target = benzecri_domains(bcfg)
    A = benzecri_matrix(bcfg.lam)
    distances = benzecri_iterate(domain, A, bcfg.steps, target, BENZECRI_CHART, tol)
    iterates = [affine_chart(p, BENZECRI_CHART, tol) for p in benzecri_orbit(domain, A, bcfg.steps)]
    outputs.write_csv(outputs.benzecri_frame(distances), out / "benzecri.csv", cfg.config_hash())
    outputs.plot_benzecri(iterates, affine_chart(target, BENZECRI_CHART, tol),
                          out / "benzecri.svg", distances)
    print(f"Hausdorff distance after {bcfg.steps} step(s): {distances[-1]:.3e}")
    print(f"✓ Iteration saved to {out / 'benzecri.csv'}")
    return distances


def cmd_evaluate(cfg: RunConfig, suite: str, output: str) -> Dict[str, Any]:
    from evaluation.run_evaluation import Evaluator, load_suite

    evaluator = Evaluator(suite_path=Path(suite), trace_path=Path(cfg.trace_path))
    return evaluator.run_evaluation(load_suite(Path(suite)), Path(output), cfg)


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Leaf map experiments for genus-2 Hitchin representations")
    parser.add_argument("--config", type=str, default=str(DEFAULT_CONFIG_PATH),
                        help="Run configuration JSON (created with defaults if missing)")
    parser.add_argument("--rep", type=str, help="Representation JSON file")
    parser.add_argument("--max-len", dest="max_len", type=int, help="Maximum word length")
    parser.add_argument("--samples", type=int, help="Boundary samples per leaf")
    parser.add_argument("--out", type=str, help="Output directory")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--workers", type=int, help="Worker processes")

    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build-rep", help="Write the lifted Fuchsian or a bent representation")
    build.add_argument("--kind", choices=["fuchsian", "bent"], default="fuchsian")
    build.add_argument("--eps", type=float, default=0.0, help="Bending parameter")
    build.add_argument("--direction", type=float, nargs=4, default=list(DEFAULT_DIRECTION),
                       metavar=("D1", "D2", "D3", "D4"), help="Bending direction, summing to 0")

    commands.add_parser("leaves", help="Normalized leaves and their pairwise Hausdorff distances")
    commands.add_parser("spectra", help="Jordan projections, constraint residuals and cone directions")

    model = commands.add_parser("model-fit", help="Boundary exponents at the fixed points of a word")
    model.add_argument("--word", type=str, help="Word such as a1 or a1b1A1B1")
    model.add_argument("--scan", action="store_true", help="Also scan exact exponent mismatches")

    demo = commands.add_parser("benzecri-demo", help="Half-ellipse iteration converging to the ellipse")
    demo.add_argument("--steps", type=int, help="Number of iterations")
    demo.add_argument("--lam", type=float, help="Log of the top eigenvalue of the iteration matrix")

    evaluate = commands.add_parser("evaluate", help="Run the acceptance suite")
    evaluate.add_argument("--suite", type=str, default="evaluation/datasets/acceptance_suite.json")
    evaluate.add_argument("--output", type=str, default="evaluation/results/acceptance.json")
    evaluate.add_argument("--trace", type=str, help="Trace log JSON (defaults to trace_path in the config)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "rep_path": args.rep,
        "max_word_len": args.max_len,
        "leaf_samples": args.samples,
        "output_dir": args.out,
        "seed": args.seed,
        "workers": args.workers,
        "trace_path": getattr(args, "trace", None),
    }
    try:
        cfg = load_config(Path(args.config), overrides)
        if args.command == "build-rep":
            cmd_build_rep(cfg, args.kind, args.eps, args.direction)
        elif args.command == "leaves":
            cmd_leaves(cfg)
        elif args.command == "spectra":
            cmd_spectra(cfg)
        elif args.command == "model-fit":
            cmd_model_fit(cfg, args.word, args.scan)
        elif args.command == "benzecri-demo":
            cmd_benzecri_demo(cfg, args.steps, args.lam)
        elif args.command == "evaluate":
            results = cmd_evaluate(cfg, args.suite, args.output)
            if not results["summary"]["all_passed"]:
                return EXIT_DOMAIN
    except (ValidationError, WordBudgetExceeded) as e:
        print(f"✗ {args.command}: {e}")
        return EXIT_USAGE
    except (LeafMapError, FileNotFoundError) as e:
        print(f"✗ {args.command}: {e}")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
