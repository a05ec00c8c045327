"""
PhantomLab CLI - reproducible experiments on phantom relaxation in staircase circuits.
"""
import sys
import os
import logging
import click

if sys.platform == "win32":
    sys.stdout.reconfigure(encoding="utf-8")

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from lab import (
    CoefficientsExperiment,
    EntropyExperiment,
    KernelCheckExperiment,
    LabManager,
    MagicSumsExperiment,
    MonteCarloExperiment,
    PseudospectrumExperiment,
    RatesExperiment,
    ThetaExperiment,
    TimescalesExperiment,
    TrajectoryExperiment,
)
from model.config import Config
from model.errors import ParameterError, PhantomLabError
from model.params import make_params
from pseudospectrum import PerturbationConfig, decade_grid

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(name)s] %(message)s",
    datefmt="%H:%M:%S",
)

EXIT_COMPUTE = 1
EXIT_USAGE = 2


def parse_ks(value: str | None, n: int, default: tuple[int, ...]) -> tuple[int, ...]:
    """'2,25,50' -> (2, 25, 50); every cut is checked against n."""
    if value is None:
        ks = default
    else:
        try:
            ks = tuple(int(part) for part in value.split(",") if part.strip())
        except ValueError:
            raise ParameterError(f"--k must be a comma-separated list of integers (got '{value}')") from None
    if not ks:
        raise ParameterError("at least one cut k is required")
    for k in ks:
        make_params(n, k, 2)
    return ks


def parse_range(value: str) -> tuple[str, str, str]:
    """'5:0.5:60' -> ('5', '0.5', '60')."""
    parts = value.split(":")
    if len(parts) != 3:
        raise ParameterError(f"expected start:step:stop (got '{value}')", value=value)
    return parts[0], parts[1], parts[2]


def execute(ctx, build):
    """Build and run one experiment, mapping errors onto exit codes."""
    manager: LabManager = ctx.obj["manager"]
    try:
        result = manager.run(build())
    except ParameterError as e:
        click.echo(f"Error: {e.report()}", err=True)
        ctx.exit(EXIT_USAGE)
    except PhantomLabError as e:
        click.echo(f"Error: {e.report()}", err=True)
        ctx.exit(EXIT_COMPUTE)
    manager.print_summary(result)
    if not result.ok:
        ctx.exit(EXIT_COMPUTE)


@click.group()
@click.option("--output", default=None, help="Output directory (default PHANTOMLAB_OUTPUT_DIR)")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
@click.option("--threads", default=None, type=int, help="Worker threads for sweeps (default PHANTOMLAB_THREADS)")
@click.pass_context
def cli(ctx, output, output_format, log_level, threads):
    """PhantomLab - phantom relaxation of purity in staircase random circuits"""
    ctx.ensure_object(dict)
    config = Config()
    if output is not None:
        config.output_dir = output
    if log_level is not None:
        config.log_level = log_level
    if threads is not None:
        config.threads = threads

    errors = config.validate()
    if errors:
        for error in errors:
            click.echo(f"Error: {error}", err=True)
        ctx.exit(EXIT_USAGE)

    logging.getLogger().setLevel(config.logging_level)
    ctx.obj["config"] = config
    ctx.obj["manager"] = LabManager(config, output_format=output_format)


@cli.command()
@click.option("--n", "n", type=int, required=True, help="Number of qudits (even)")
@click.option("--k", "k", default=None, help="Comma-separated cuts (default 2)")
@click.option("--d", "d", type=int, default=2, help="Local dimension")
@click.option("--t-max", type=int, required=True)
@click.option("--mode", type=click.Choice(["rational", "float64"]), default="rational")
@click.pass_context
def trajectory(ctx, n, k, d, t_max, mode):
    """Purity I_k(t), Delta I_k(t) and lambda_eff(t) by iteration."""
    config = ctx.obj["config"]
    execute(ctx, lambda: TrajectoryExperiment(
        n=n, ks=parse_ks(k, n, (2,)), d=d, t_max=t_max, mode=mode,
        max_denominator_bits=config.max_denominator_bits,
    ))


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", default=None, help="Comma-separated cuts, e.g. 2,25,50,75,90")
@click.option("--d", "d", type=int, default=2)
@click.option("--t-max", type=int, default=None, help="Default 4n")
@click.pass_context
def rates(ctx, n, k, d, t_max):
    """Effective decay rate lambda_eff(t) for several cuts."""
    execute(ctx, lambda: RatesExperiment(
        n=n, ks=parse_ks(k, n, (2, n // 2)), d=d, t_max=4 * n if t_max is None else t_max,
    ))


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--d", "d", type=int, default=2)
@click.option("--method", type=click.Choice(["exact", "closed-form"]), default="exact")
@click.pass_context
def coefficients(ctx, n, k, d, method):
    """Expansion coefficients c_j as sign and ln|c_j|."""
    execute(ctx, lambda: CoefficientsExperiment(n=n, k=k, d=d, method=method))


@cli.command("magic-sums")
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", default=None, help="Comma-separated cuts (default all)")
@click.option("--p-min", type=int, default=None, help="Default -n")
@click.option("--p-max", type=int, default=None, help="Default 2n")
@click.pass_context
def magic_sums(ctx, n, k, p_min, p_max):
    """Grid of magic sums f_k(p)."""
    execute(ctx, lambda: MagicSumsExperiment(
        n=n, ks=parse_ks(k, n, tuple(range(2, n))),
        p_min=-n if p_min is None else p_min, p_max=2 * n if p_max is None else p_max,
    ))


@cli.command("kernel-check")
@click.option("--n", "n", type=int, required=True)
@click.option("--d", "d", type=int, default=2)
@click.option("--k", "k", default=None, help="Comma-separated cuts")
@click.option("--all-k", is_flag=True, help="Check every cut 2..n-1")
@click.option("--tol", type=float, default=1e-10)
@click.pass_context
def kernel_check(ctx, n, d, k, all_k, tol):
    """Cancellation of the Jordan-kernel term against the spectral series."""
    def build():
        if all_k or k is None:
            ks = parse_ks(None, n, tuple(range(2, n)))
        else:
            ks = parse_ks(k, n, ())
        return KernelCheckExperiment(n=n, d=d, ks=ks, tol=tol)

    execute(ctx, build)


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", type=int, default=2, help="2 or n/2")
@click.option("--d", "d", type=int, default=2)
@click.option("--t-start", type=int, default=None, help="Default t_c")
@click.option("--t-stop", type=int, default=None, help="Default 4n")
@click.option("--t-step", type=int, default=1)
@click.option("--exact/--no-exact", default=True, help="Overlay the iterated rate")
@click.option("--grid-points", type=int, default=0, help="Side of a complex-q theta4 grid (0 = none)")
@click.pass_context
def theta(ctx, n, k, d, t_start, t_stop, t_step, exact, grid_points):
    """Theta-function transition curves and their asymptotes."""
    execute(ctx, lambda: ThetaExperiment(
        n=n, k=k, d=d, t_start=t_start, t_stop=t_stop, t_step=t_step,
        exact_overlay=exact, grid_points=grid_points,
    ))


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--d", "d", type=int, default=2)
@click.option("--eps-exp", default="5:0.5:60", help="x range start:step:stop for eps = 10^-x")
@click.option("--realizations", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--precision-bits", type=int, default=None, help="Default PHANTOMLAB_PRECISION_BITS")
@click.pass_context
def pseudospectrum(ctx, n, d, eps_exp, realizations, seed, precision_bits):
    """Real-eigenvalue count and spectra of T + eps E over a decade grid of eps."""
    config = ctx.obj["config"]

    def build():
        start, step, stop = parse_range(eps_exp)
        return PseudospectrumExperiment(config=PerturbationConfig(
            params=make_params(n, 2, d),
            epsilons=decade_grid(start, stop, step),
            seed=seed,
            realizations=realizations,
            precision_bits=precision_bits or config.precision_bits,
            real_threshold=config.real_threshold,
            threads=config.threads,
        ))

    execute(ctx, build)


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--d", "d", type=int, default=2)
@click.option("--t-max", type=int, default=10)
@click.option("--realizations", type=int, default=10_000)
@click.option("--seed", type=int, default=0)
@click.pass_context
def montecarlo(ctx, n, d, t_max, realizations, seed):
    """Haar-circuit Monte Carlo against exact iteration."""
    config = ctx.obj["config"]
    execute(ctx, lambda: MonteCarloExperiment(
        n=n, d=d, t_max=t_max, realizations=realizations, seed=seed, threads=config.threads,
        state_limit=config.state_limit, min_realizations=config.min_realizations,
    ))


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--d", "d", type=int, default=2)
@click.pass_context
def timescales(ctx, n, d):
    """t_K, t_c and t_inf for every cut."""
    execute(ctx, lambda: TimescalesExperiment(n=n, d=d))


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", default=None, help="Comma-separated cuts (default 2)")
@click.option("--d", "d", type=int, default=2)
@click.option("--t-max", type=int, required=True)
@click.option("--mode", type=click.Choice(["rational", "float64"]), default="rational")
@click.pass_context
def entropy(ctx, n, k, d, t_max, mode):
    """Second Renyi entropy S_2(t) = -ln I_k(t)."""
    config = ctx.obj["config"]
    execute(ctx, lambda: EntropyExperiment(
        n=n, ks=parse_ks(k, n, (2,)), d=d, t_max=t_max, mode=mode,
        max_denominator_bits=config.max_denominator_bits,
    ))


if __name__ == "__main__":
    cli()
