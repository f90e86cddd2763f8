"""Command-line interface: oracle, lasso, trendfilter, mlp, simulate."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .engine import (
    LassoBackend,
    MlpBackend,
    TrendFilterBackend,
    draws_matrix,
    run_wbb,
    summarize,
)
from .estimators import standardize_dataset
from .io import read_csv, read_idx, write_csv, write_draws_csv, write_sidecar, write_summary_json
from .lasso import SolverOptions, cross_validate_lambda, default_lambda_grid
from .mlp import SgdSchedule, evaluate_accuracy
from .rng import RngConfig, ones_weight_draw, sample_weights
from .trendfilter import AdmmOptions, simulate_fourier
from .univariate import exact_posterior_mean, soft_threshold_wbb, wbb_mean_oracle, zero_probability


def _parse_grid(text: str) -> np.ndarray:
    """Inclusive lo:hi:step grid (write --grid=-6:6:0.1 for negative lo)."""
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("grid needs step > 0 and hi >= lo")
    count = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(count)


def _parse_simulate(text: str) -> tuple[int, float]:
    try:
        n_text, sd_text = text.split(",")
        return int(n_text), float(sd_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,sd (e.g. 500,2), got {text!r}") from None


def _default_threads() -> int:
    return int(os.environ.get("WBB_THREADS", "1"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wbb",
        description="Posterior sampling by randomly reweighted optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument(
            "--threads", type=int, default=_default_threads(),
            help="parallel draw workers (env WBB_THREADS, default 1)",
        )

    p = sub.add_parser("oracle", help="scalar normal-means comparison table")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--grid", type=_parse_grid, default=_parse_grid("-6:6:0.1"))
    p.add_argument("--draws", type=int, default=10_000)
    add_common(p)

    p = sub.add_parser("lasso", help="posterior draws for lasso regression")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--response", required=True, help="name of the response column")
    p.add_argument("--lambda", dest="lam", default="cv", help="penalty value or 'cv'")
    p.add_argument("--cv-folds", type=int, default=10)
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--prior", choices=["weighted", "fixed"], default="weighted")
    add_common(p)

    p = sub.add_parser("trendfilter", help="posterior bands for trend filtering")
    p.add_argument(
        "--order", type=int, default=3,
        help="polynomial degree of the fit (penalty differences are one order higher)",
    )
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--simulate", type=_parse_simulate, default=None, metavar="N,SD")
    p.add_argument("--data", type=Path, default=None, help="single-column CSV signal")
    add_common(p)

    p = sub.add_parser("mlp", help="accuracy posterior for the two-hidden-layer network")
    p.add_argument("--train-images", type=Path, required=True)
    p.add_argument("--train-labels", type=Path, required=True)
    p.add_argument("--test-images", type=Path, required=True)
    p.add_argument("--test-labels", type=Path, required=True)
    p.add_argument("--subset", type=int, default=500, help="training examples used")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    p.add_argument("--draws", type=int, default=30)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-4)
    add_common(p)

    p = sub.add_parser("simulate", help="write the Fourier test signal")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--sd", type=float, default=2.0)
    add_common(p)

    return parser


def _cmd_oracle(args) -> int:
    rng = RngConfig(args.seed)
    # Draw k lives on stream k; the same weight set serves every grid point.
    w1 = np.empty(args.draws)
    w2 = np.empty(args.draws)
    for k in range(args.draws):
        draw = sample_weights(1, rng.with_stream(k))
        w1[k] = draw.obs_weights[0]
        w2[k] = draw.prior_weight
    thresholds = args.lam * w2 / w1
    grid = args.grid
    mc_mean = np.array(
        [np.mean(np.sign(y) * np.maximum(np.abs(y) - thresholds, 0.0)) for y in grid]
    )
    oracle_mean = np.array([wbb_mean_oracle(y, args.lam) for y in grid])
    posterior_mean = np.array([exact_posterior_mean(y, args.lam) for y in grid])
    zero_prob = np.array([zero_probability(y, args.lam) for y in grid])
    out = args.out / "oracle.csv"
    write_csv(
        out,
        ["y", "wbb_mc_mean", "wbb_oracle_mean", "exact_posterior_mean", "zero_prob"],
        [grid, mc_mean, oracle_mean, posterior_mean, zero_prob],
    )
    write_sidecar(out, {"command": "oracle", "seed": args.seed, "draws": args.draws,
                        "lambda": args.lam, "grid": [float(g) for g in grid[[0, -1]]],
                        "grid_size": len(grid)})
    print(f"wrote {out}")
    return 0


def _cmd_lasso(args) -> int:
    rng = RngConfig(args.seed)
    data = read_csv(args.data, args.response)
    work, _, scale, _ = standardize_dataset(data)
    opts = SolverOptions()
    if args.lam == "cv":
        lam = cross_validate_lambda(work, args.cv_folds, default_lambda_grid(work), rng, opts=opts)
    else:
        lam = float(args.lam)
    backend = LassoBackend(work, lam, opts)
    draws = run_wbb(backend, args.draws, args.prior, args.threads, rng)
    coef = draws_matrix(draws) / scale
    metadata = {
        "command": "lasso", "seed": args.seed, "draws": args.draws, "lambda": lam,
        "lambda_source": "cv" if args.lam == "cv" else "fixed", "prior": args.prior,
        "tolerance": opts.tolerance, "max_sweeps": opts.max_sweeps,
        "standardized": True, "data": str(args.data), "response": args.response,
    }
    write_draws_csv(args.out / "lasso_draws.csv", coef, data.feature_names, metadata)
    write_summary_json(args.out / "lasso_summary.json", summarize(coef, data.feature_names), metadata)
    print(f"wrote {args.out / 'lasso_draws.csv'} and {args.out / 'lasso_summary.json'} (lambda={lam:g})")
    return 0


def _cmd_trendfilter(args) -> int:
    rng = RngConfig(args.seed)
    if (args.simulate is None) == (args.data is None):
        print("trendfilter: pass exactly one of --simulate or --data", file=sys.stderr)
        return 1
    if args.simulate is not None:
        n, sd = args.simulate
        y = simulate_fourier(n, sd, rng)
        source = f"simulate({n},{sd})"
    else:
        import csv as _csv

        with open(args.data, newline="") as fh:
            rows = list(_csv.reader(fh))
        y = np.array([float(r[0]) for r in rows[1:]])
        source = str(args.data)
    diff_order = args.order + 1
    opts = AdmmOptions()
    backend = TrendFilterBackend(y, diff_order, args.lam, opts)
    center = run_wbb(backend, 1, rng=rng, weights_fn=lambda k: ones_weight_draw(y.size, k))
    draws = run_wbb(backend, args.draws, "weighted", args.threads, rng)
    matrix = draws_matrix(draws)
    mean = matrix.mean(axis=0)
    sd_draws = matrix.std(axis=0, ddof=1)
    fit = np.asarray(center[0].parameters)
    out = args.out / "trendfilter.csv"
    write_csv(
        out,
        ["i", "y", "fit", "sd", "lower", "upper"],
        [np.arange(1, y.size + 1), y, fit, sd_draws, mean - 2.0 * sd_draws, mean + 2.0 * sd_draws],
    )
    write_sidecar(out, {
        "command": "trendfilter", "seed": args.seed, "draws": args.draws,
        "lambda": args.lam, "poly_order": args.order, "diff_order": diff_order,
        "tolerance": opts.tolerance, "max_iterations": opts.max_iterations,
        "source": source, "threads_independent": True,
    })
    print(f"wrote {out}")
    return 0


def _cmd_mlp(args) -> int:
    rng = RngConfig(args.seed)
    X_train = read_idx(args.train_images)[: args.subset]
    y_train = read_idx(args.train_labels)[: args.subset]
    X_test = read_idx(args.test_images)
    y_test = read_idx(args.test_labels)
    schedule = SgdSchedule("constant", lr=args.lr, batch_size=args.batch, epochs=args.epochs)
    backend = MlpBackend(X_train, y_train, args.lam, schedule)
    draws = run_wbb(backend, args.draws, "weighted", args.threads, rng)
    good = [r for r in draws if not r.failed]
    accuracy = np.array([evaluate_accuracy(r.parameters, X_test, y_test) for r in good])
    ids = np.array([r.draw_id for r in good])
    metadata = {
        "command": "mlp", "seed": args.seed, "draws": args.draws, "lambda": args.lam,
        "subset": args.subset, "epochs": args.epochs, "batch": args.batch, "lr": args.lr,
        "schedule": schedule.kind,
    }
    out_draws = args.out / "mlp_accuracy_draws.csv"
    write_csv(out_draws, ["draw_id", "accuracy"], [ids, accuracy])
    write_sidecar(out_draws, metadata)
    summary = summarize(accuracy[:, None], ["accuracy"])
    write_summary_json(args.out / "mlp_summary.json", summary, metadata)
    lo, hi = summary.q025[0], summary.q975[0]
    print(f"wrote {out_draws}; accuracy 95% interval [{lo:.3f}, {hi:.3f}]")
    return 0


def _cmd_simulate(args) -> int:
    rng = RngConfig(args.seed)
    y = simulate_fourier(args.n, args.sd, rng)
    out = args.out / "simulate.csv"
    write_csv(out, ["i", "y"], [np.arange(1, args.n + 1), y])
    write_sidecar(out, {"command": "simulate", "seed": args.seed, "n": args.n, "sd": args.sd})
    print(f"wrote {out}")
    return 0


_COMMANDS = {
    "oracle": _cmd_oracle,
    "lasso": _cmd_lasso,
    "trendfilter": _cmd_trendfilter,
    "mlp": _cmd_mlp,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(f"wbb {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
