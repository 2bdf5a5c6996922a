"""Command-line surface: calibrate, rank, simulate, random-baseline,
split-simulate, and serve.

Exit codes: 0 success, 1 usage/configuration error, 2 data error; every
failure prints a one-line diagnostic on stderr. The default output
directory can be set with the VALIRANK_OUT environment variable.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .calibration import (
    CalibrationModel,
    CvScores,
    calibrate_sigma_macro,
    calibrate_sigma_micro,
    default_grid,
)
from .dataio import (
    DatasetBundle,
    format_float,
    load_estimates,
    load_labels,
    load_scores,
    write_curve,
    write_ranking,
    write_report,
)
from .errors import ConfigurationError, DataError, ValirankError
from .evaluation import monte_carlo_random_ener
from .ranking import Strategy, method_config, rank_static
from .simulation import simulate, split_simulate

__all__ = ["cli", "main"]


def _parse_grid(spec: str) -> np.ndarray:
    try:
        low, high, count = spec.split(":")
        return default_grid(float(low), float(high), int(count))
    except ValueError as exc:
        raise ConfigurationError(f"bad grid spec {spec!r}, expected LOW:HIGH:COUNT") from exc


def _out_dir(out: str | None) -> Path:
    path = Path(out or os.environ.get("VALIRANK_OUT", "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_cv(cv_scores: str, train_labels: str, folds: int) -> CvScores:
    return CvScores(load_scores(cv_scores), load_labels(train_labels), folds)


def _build_bundle(scores, gold, estimates, cv_scores, train_labels, train_size, folds):
    matrix = load_scores(scores)
    gold_labels = load_labels(gold) if gold else None
    est = None
    cv = None
    train = None
    if estimates:
        if not train_size:
            raise ConfigurationError("--estimates requires --train-size")
        est = load_estimates(estimates, train_size, matrix.n_docs)
    elif cv_scores and train_labels:
        cv = _load_cv(cv_scores, train_labels, folds)
        train = cv.labels
    return DatasetBundle(matrix, gold_labels, est, cv, train)


def _resolve_model(bundle: DatasetBundle, sigma, averaging, grid) -> CalibrationModel | None:
    if sigma is not None:
        return CalibrationModel(sigma)
    if bundle.cv is not None:
        fit = calibrate_sigma_macro if averaging == "macro" else calibrate_sigma_micro
        return fit(bundle.cv, _parse_grid(grid))
    return None


def _make_config(bundle: DatasetBundle, method, strategy, averaging, beta, sigma, grid):
    model = _resolve_model(bundle, sigma, averaging, grid)
    estimates = None
    if method == "utheoretic":
        estimates = bundle.training_estimates()
    return method_config(
        method,
        Strategy(strategy),
        averaging,
        beta=beta,
        model=model,
        estimates=estimates,
        gold=bundle.gold,
    )


def _config_echo(config, sigma_used, xis=None, seed=None) -> dict:
    echo = {
        "method_gain_rule": config.gain_rule.value,
        "strategy": config.strategy.value,
        "beta": config.beta,
        "sigma": sigma_used,
        "probabilities": "calibrated" if config.prob_source.model else "oracle_truth",
    }
    if xis is not None:
        echo["xi"] = [float(x) for x in xis]
    if seed is not None:
        echo["seed"] = seed
    return echo


# shared option stacks

def _dataset_options(fn):
    opts = [
        click.option("--scores", required=True, help="Test score file."),
        click.option("--gold", default=None, help="Gold test labels (oracles, simulate)."),
        click.option("--estimates", default=None, help="Training-count estimates file."),
        click.option("--train-size", type=int, default=None, help="Training-set size for --estimates."),
        click.option("--cv-scores", default=None, help="Cross-validated training scores."),
        click.option("--train-labels", default=None, help="Training labels for --cv-scores."),
        click.option("--folds", type=int, default=10, show_default=True, help="CV folds (informational)."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _method_options(fn):
    opts = [
        click.option("--method", type=click.Choice(["baseline", "utheoretic", "oracle1", "oracle2"]),
                     default="utheoretic", show_default=True),
        click.option("--strategy", type=click.Choice(["static", "dynamic"]),
                     default="static", show_default=True),
        click.option("--averaging", type=click.Choice(["macro", "micro"]),
                     default="macro", show_default=True),
        click.option("--beta", type=float, default=1.0, show_default=True),
        click.option("--sigma", type=float, default=None, help="Growth rate; fitted from CV scores when omitted."),
        click.option("--grid", default="1e-3:1e3:100", show_default=True, help="Sigma grid LOW:HIGH:COUNT."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def cli() -> None:
    """Utility-theoretic ranking and evaluation for semi-automated text
    classification."""


@cli.command()
@click.option("--cv-scores", required=True)
@click.option("--train-labels", required=True)
@click.option("--averaging", type=click.Choice(["macro", "micro"]), default="macro", show_default=True)
@click.option("--grid", default="1e-3:1e3:100", show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
def calibrate(cv_scores, train_labels, averaging, grid, folds) -> None:
    """Fit the logistic growth rate sigma on cross-validated scores."""
    cv = _load_cv(cv_scores, train_labels, folds)
    fit = calibrate_sigma_macro if averaging == "macro" else calibrate_sigma_micro
    model = fit(cv, _parse_grid(grid))
    click.echo(f"sigma: {format_float(model.sigma)}")
    click.echo(f"averaging: {averaging}")


@cli.command()
@_dataset_options
@_method_options
@click.option("--out", default=None, help="Output ranking file (default: ranking.tsv in VALIRANK_OUT).")
def rank(scores, gold, estimates, train_size, cv_scores, train_labels, folds,
         method, strategy, averaging, beta, sigma, grid, out) -> None:
    """Rank test documents by expected validation utility."""
    bundle = _build_bundle(scores, gold, estimates, cv_scores, train_labels, train_size, folds)
    config = _make_config(bundle, method, strategy, averaging, beta, sigma, grid)
    ranking = rank_static(bundle.scores, config)
    path = Path(out) if out else _out_dir(None) / "ranking.tsv"
    write_ranking(ranking, path)
    click.echo(f"wrote {path}")


def _write_simulation_outputs(run, out_dir: Path, echo: dict, plot: bool) -> None:
    report = {"configuration": echo, "averaging": {}}
    curves_for_plot = {}
    for mode, rep in run.reports.items():
        write_curve(rep.er, out_dir / f"er_{mode}.csv")
        write_curve(rep.ner, out_dir / f"ner_{mode}.csv")
        report["averaging"][mode] = {
            "ener": {format_float(xi): v for xi, v in rep.ener_by_xi.items()},
            "excluded_classes": list(rep.excluded_classes),
        }
        curves_for_plot[f"ER ({mode})"] = rep.er
    report["visit_order"] = list(run.visit_order)
    report["timings_seconds"] = run.timings
    write_report(report, out_dir / "report.yaml")
    if plot:
        from .plots import render_curves

        render_curves(curves_for_plot, out_dir / "curves.png", "Error reduction")


@cli.command("simulate")
@_dataset_options
@_method_options
@click.option("--xi", "xis", type=float, multiple=True, default=(0.05, 0.10, 0.20), show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="Output directory.")
@click.option("--plot", is_flag=True, help="Also render the ER curves to curves.png.")
def simulate_cmd(scores, gold, estimates, train_size, cv_scores, train_labels, folds,
                 method, strategy, averaging, beta, sigma, grid, xis, seed, out, plot) -> None:
    """Simulate a perfect annotator over the ranking and report curves."""
    if not gold:
        raise ConfigurationError("simulate requires --gold labels")
    bundle = _build_bundle(scores, gold, estimates, cv_scores, train_labels, train_size, folds)
    config = _make_config(bundle, method, strategy, averaging, beta, sigma, grid)
    run = simulate(bundle.scores, bundle.gold, config, xis)
    out_dir = _out_dir(out)
    sigma_used = config.prob_source.model.sigma if config.prob_source.model else None
    _write_simulation_outputs(run, out_dir, _config_echo(config, sigma_used, xis, seed), plot)
    click.echo(f"wrote report to {out_dir}")


@cli.command("random-baseline")
@click.option("--scores", required=True)
@click.option("--gold", required=True)
@click.option("--averaging", type=click.Choice(["macro", "micro"]), default="micro", show_default=True)
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--xi", "xis", type=float, multiple=True, default=(0.05, 0.10, 0.20), show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="Output directory.")
@click.option("--plot", is_flag=True)
def random_baseline(scores, gold, averaging, beta, xis, trials, seed, out, plot) -> None:
    """Monte Carlo estimate of the random ranker's expected ER and ENER."""
    matrix = load_scores(scores)
    truth = load_labels(gold)
    mean_er, ener_by_xi = monte_carlo_random_ener(
        matrix, truth, xis, trials=trials, seed=seed, averaging=averaging, beta=beta
    )
    out_dir = _out_dir(out)
    write_curve(mean_er, out_dir / f"er_random_{averaging}.csv")
    write_report(
        {
            "configuration": {
                "method": "random",
                "averaging": averaging,
                "beta": beta,
                "trials": trials,
                "seed": seed,
                "xi": [float(x) for x in xis],
            },
            "ener": {format_float(xi): v for xi, v in ener_by_xi.items()},
        },
        out_dir / "report.yaml",
    )
    if plot:
        from .plots import render_curves

        render_curves({"ER (random)": mean_er}, out_dir / "curves.png", "Random ranker ER")
    click.echo(f"wrote report to {out_dir}")


@cli.command("split-simulate")
@_dataset_options
@_method_options
@click.option("--xi", "xis", type=float, multiple=True, default=(0.05, 0.10, 0.20), show_default=True)
@click.option("--parts", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None)
@click.option("--plot", is_flag=True)
def split_simulate_cmd(scores, gold, estimates, train_size, cv_scores, train_labels, folds,
                       method, strategy, averaging, beta, sigma, grid, xis, parts, seed,
                       out, plot) -> None:
    """Simulate over a random split of the test set, averaging curves."""
    if not gold:
        raise ConfigurationError("split-simulate requires --gold labels")
    bundle = _build_bundle(scores, gold, estimates, cv_scores, train_labels, train_size, folds)
    config = _make_config(bundle, method, strategy, averaging, beta, sigma, grid)
    run = split_simulate(bundle.scores, bundle.gold, config, xis, parts, seed)
    out_dir = _out_dir(out)
    sigma_used = config.prob_source.model.sigma if config.prob_source.model else None
    report = {
        "configuration": _config_echo(config, sigma_used, xis, seed) | {"parts": parts},
        "averaging": {
            mode: {"ener": {format_float(xi): v for xi, v in run.ener_by_xi[mode].items()}}
            for mode in run.er
        },
        "skipped_parts": list(run.skipped_parts),
    }
    for mode, er in run.er.items():
        write_curve(er, out_dir / f"er_{mode}.csv")
    write_report(report, out_dir / "report.yaml")
    if plot:
        from .plots import render_curves

        render_curves({f"ER ({m})": er for m, er in run.er.items()},
                      out_dir / "curves.png", f"Error reduction ({parts}-way split)")
    click.echo(f"wrote report to {out_dir}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8421, show_default=True)
@click.option("--data-dir", default=".", show_default=True,
              help="Directory for session logs and bundle files.")
def serve(host, port, data_dir) -> None:
    """Start the validation-session HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(Path(data_dir)), host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.exceptions.ClickException as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except ValirankError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
