#!/usr/bin/env python3
"""
crnmix command line

Every subcommand writes its artifacts to --out (or CRNMIX_OUTPUT_DIR) and
prints a single summary line, or a JSON document with --json. Exit codes:
0 success, 1 usage error, 2 input error, 3 resource guard, 4 not certified.
"""

import json
import sys
from pathlib import Path
from typing import List, Optional

import click
import structlog
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .certification import certify
from .conservation import find_conservation_vector
from .equilibrium import stationary_for
from .exceptions import CRNError, UsageError
from .graph import flow_decomposition
from .kinetics import LINEAR_W, LOG_V, drift_scan
from .library import list_networks, resolve_network
from .logging_setup import configure_logging
from .mixing import emit_curves, estimate_mixing_time, mixing_sweep, parse_t_grid, write_curves
from .settings import CRNSettings, get_settings
from .simulation import SimulationConfig, transient_distribution
from .tiers import parse_profile, tier_partition, top_tier_witness

logger = structlog.get_logger("crnmix.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CERTIFIED = 4


def _int_list(ctx, param, value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        items = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of integers, got {value!r}") from None
    if not items or any(v < 0 for v in items):
        raise click.BadParameter("entries must be non-negative integers")
    return items


def _float_list(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {value!r}") from None


def _delta(ctx, param, value: str) -> float:
    try:
        return float(value.strip().replace("1/2", "0.5"))
    except ValueError:
        raise click.BadParameter("delta must be 0 or 1/2") from None


def _emit(payload: dict, as_json: bool, line: str) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True) if as_json else line)


def _out_dir(settings: CRNSettings, out: Optional[Path]) -> Path:
    folder = Path(out) if out is not None else settings.output_dir
    folder.mkdir(parents=True, exist_ok=True)
    return folder


def _sim_config(settings: CRNSettings, seed, replicates, threads) -> SimulationConfig:
    try:
        return SimulationConfig.from_settings(settings, seed=seed, replicates=replicates, threads=threads)
    except ValidationError as exc:
        raise UsageError(f"invalid simulation parameters: {exc.errors()[0]['msg']}") from None


def _origin(x0: Optional[List[int]], dimension: int) -> List[int]:
    if x0 is None:
        return [1] * dimension
    if len(x0) != dimension:
        raise UsageError(f"--x0 has {len(x0)} entries, network has {dimension} species")
    return x0


network_argument = click.argument("network", metavar="NETWORK")
json_option = click.option("--json", "as_json", is_flag=True, help="Print JSON instead of a summary line")
out_option = click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    help="Output directory (default CRNMIX_OUTPUT_DIR)",
)


def simulation_options(fn):
    fn = click.option("--threads", type=int, help="Worker processes (results do not depend on it)")(fn)
    fn = click.option("--box", type=int, help="Truncation box radius N")(fn)
    fn = click.option("--replicates", type=int, help="Number of SSA replicates")(fn)
    fn = click.option("--seed", type=int, help="Root seed for every replicate stream")(fn)
    return fn


class CRNGroup(click.Group):
    """Maps click usage errors to exit 1 and crnmix errors to their own exit code."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = result if isinstance(result, int) else EXIT_OK
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_USAGE
        except click.ClickException as exc:
            exc.show()
            code = EXIT_USAGE
        except CRNError as exc:
            logger.error("command_failed", error=exc.message, type=type(exc).__name__)
            click.echo(json.dumps(exc.to_dict(), sort_keys=True), err=True)
            code = exc.exit_code
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=CRNGroup)
@click.version_option(__version__, prog_name="crnmix")
@click.option("--log-level", help="Override CRNMIX_LOG_LEVEL")
@click.option("--log-format", type=click.Choice(["console", "json"]), help="Override CRNMIX_LOG_FORMAT")
@click.pass_context
def main(ctx: click.Context, log_level: Optional[str], log_format: Optional[str]):
    """Ergodicity certificates and mixing-time experiments for reaction networks.

    NETWORK is a .crn file or builtin:<name>; see `crnmix networks`.
    """
    try:
        settings = get_settings()
    except ValidationError as exc:
        raise UsageError(f"invalid configuration: {exc.errors()[0]['msg']}") from None
    configure_logging(log_level or settings.log_level, log_format or settings.log_format)
    ctx.obj = settings


@main.command()
def networks():
    """List the bundled example networks."""
    for name in list_networks():
        click.echo(f"builtin:{name}")
    return EXIT_OK


@main.command("certify")
@network_argument
@json_option
@out_option
@click.pass_obj
def certify_command(settings: CRNSettings, network: str, as_json: bool, out: Optional[Path]):
    """Classify NETWORK into an exponentially ergodic class."""
    crn = resolve_network(network)
    certificate = certify(crn)
    (_out_dir(settings, out) / "certificate.json").write_text(certificate.to_json(), encoding="utf-8")
    if as_json:
        click.echo(certificate.to_json())
    else:
        click.echo(certificate.summary())
    return EXIT_OK if certificate.certified else EXIT_NOT_CERTIFIED


@main.command()
@network_argument
@click.option("--profile", required=True, help='Growth profile, e.g. "A:n, B:0"')
@json_option
@click.pass_obj
def tiers(settings: CRNSettings, network: str, profile: str, as_json: bool):
    """Tier partition of the complexes along a monomial growth profile."""
    crn = resolve_network(network)
    growth = parse_profile(profile, crn)
    partition = tier_partition(crn, growth)
    witness = top_tier_witness(crn, growth)
    named = partition.named(crn)
    payload = {
        "profile": growth.describe(crn.species_names),
        "tiers": [
            {"tier": k, "exponent": str(e), "complexes": members}
            for k, (e, members) in enumerate(zip(partition.exponents, named), start=1)
        ],
        "top_tier_witness": crn.reaction_label(witness) if witness is not None else None,
    }
    if as_json:
        click.echo(json.dumps(payload, indent=2))
        return EXIT_OK

    table = Table(title=f"tiers along {payload['profile']}", box=None)
    table.add_column("tier", justify="right")
    table.add_column("exponent", justify="right")
    table.add_column("complexes")
    for row in payload["tiers"]:
        table.add_row(f"T{row['tier']}", row["exponent"], ", ".join(row["complexes"]))
    Console(file=sys.stdout, width=120, no_color=True).print(table)
    click.echo(f"top-tier witness: {payload['top_tier_witness'] or 'none'}")
    return EXIT_OK


@main.command()
@network_argument
@click.option("--lyapunov", "kind", type=click.Choice([LOG_V, LINEAR_W]), default=LOG_V, show_default=True)
@click.option("--a", "a", type=float, default=0.05, show_default=True, help="Drift rate a > 0")
@click.option("--delta", callback=_delta, default="0", show_default=True, help="0 or 1/2")
@click.option("--box", type=int, help="Scan box radius N (default CRNMIX_DRIFT_BOX)")
@click.option("--weights", callback=_float_list, help="W weights; defaults to the core conservation vector")
@click.option("--threads", type=int)
@json_option
@out_option
@click.pass_obj
def drift(settings: CRNSettings, network, kind, a, delta, box, weights, threads, as_json, out):
    """Scan AV + aV^(1+delta) over the box [0, N]^d."""
    crn = resolve_network(network)
    if kind == LINEAR_W and weights is None:
        core = flow_decomposition(crn).core
        vector = find_conservation_vector(core.reactions, core.dimension)
        if vector is None:
            raise UsageError("the core reactions admit no positive conservation vector; pass --weights")
        weights = [float(w) for w in vector.weights]
    report = drift_scan(
        crn,
        lyapunov_kind=kind,
        a=a,
        delta=delta,
        box_radius=box if box is not None else settings.drift_box,
        weights=weights,
        max_states=settings.max_box_states,
        threads=threads or settings.threads,
    )
    (_out_dir(settings, out) / "drift_report.json").write_text(report.to_json(), encoding="utf-8")
    _emit(
        report.model_dump(mode="json"),
        as_json,
        f"b={report.b:.6g} argmax={tuple(report.argmax_state)} interior={report.argmax_interior} "
        f"negative_on_shell={report.negative_on_shell}",
    )
    return EXIT_OK


@main.command()
@network_argument
@click.option("--x0", callback=_int_list, help="Probe state, comma-separated (default all ones)")
@click.option("--guess", callback=_float_list, help="Newton initial guess (default all ones)")
@click.option("--t-burn", type=float, default=50.0, show_default=True, help="Burn-in for the empirical law")
@click.option("--no-empirical", is_flag=True, help="Do not fall back to a simulated stationary law")
@simulation_options
@json_option
@out_option
@click.pass_obj
def stationary(
    settings, network, x0, guess, t_burn, no_empirical, seed, replicates, box, threads, as_json, out
):
    """Positive equilibrium, complex balance, and the stationary law used for TV."""
    crn = resolve_network(network)
    config = _sim_config(settings, seed, replicates, threads)
    pi, report = stationary_for(
        crn,
        _origin(x0, crn.dimension),
        config=config,
        initial_guess=guess,
        box_radius=box if box is not None else settings.sim_box,
        t_burn=t_burn,
        newton_tolerance=settings.newton_tol,
        newton_max_iterations=settings.newton_max_iter,
        balance_tolerance=settings.balance_tol,
        empirical_fallback=not no_empirical,
    )
    (_out_dir(settings, out) / "stationary.json").write_text(report.to_json(), encoding="utf-8")
    equilibrium = ",".join(f"{v:.6g}" for v in report.equilibrium) if report.equilibrium else "none"
    _emit(
        report.model_dump(mode="json"),
        as_json,
        f"pi={report.pi_kind} equilibrium=({equilibrium}) complex_balanced={report.complex_balanced}",
    )
    return EXIT_OK


@main.command()
@network_argument
@click.option("--x0", callback=_int_list, required=True, help="Initial state, comma-separated")
@click.option("--t", "t", type=float, required=True, help="Observation time")
@simulation_options
@json_option
@out_option
@click.pass_obj
def simulate(settings, network, x0, t, seed, replicates, box, threads, as_json, out):
    """Empirical law of X(t) from x0 (CSV of state frequencies)."""
    crn = resolve_network(network)
    config = _sim_config(settings, seed, replicates, threads)
    sample = transient_distribution(
        crn, _origin(x0, crn.dimension), t, config, box if box is not None else settings.sim_box
    )
    folder = _out_dir(settings, out)
    sample.to_csv(folder / "distribution.csv")
    (folder / "distribution_summary.json").write_text(sample.summary_json(), encoding="utf-8")
    mean = ",".join(f"{m:.6g}" for m in sample.mean)
    _emit(
        sample.summary(),
        as_json,
        f"t={t:g} replicates={sample.replicates} mean=({mean}) out_of_box={sample.out_of_box_mass:.3g}",
    )
    return EXIT_OK


@main.command()
@network_argument
@click.option("--x0", callback=_int_list, required=True, help="Initial state, comma-separated")
@click.option("--t-grid", required=True, help="start:stop:step")
@click.option("--eps", type=float, help="Mixing threshold epsilon (default CRNMIX_EPSILON)")
@simulation_options
@json_option
@out_option
@click.pass_obj
def tv(settings, network, x0, t_grid, eps, seed, replicates, box, threads, as_json, out):
    """TV distance from the stationary law along a time grid."""
    crn = resolve_network(network)
    config = _sim_config(settings, seed, replicates, threads)
    radius = box if box is not None else settings.sim_box
    origin = _origin(x0, crn.dimension)
    pi, _ = stationary_for(crn, origin, config=config, box_radius=radius)
    estimate = estimate_mixing_time(
        crn, origin, pi, eps if eps is not None else settings.epsilon, parse_t_grid(t_grid), config, radius
    )
    curves, _ = emit_curves([estimate])
    (_out_dir(settings, out) / "tv_curves.csv").write_text(curves, encoding="utf-8")
    final = estimate.tv_conservative_curve[-1]
    _emit(
        estimate.model_dump(mode="json"),
        as_json,
        f"x0={tuple(origin)} points={len(estimate.t_grid)} tv_final={final:.4g} tau={estimate.tau}",
    )
    return EXIT_OK


@main.command()
@network_argument
@click.option("--m-list", callback=_int_list, required=True, help="Initial states (m,...,m), comma-separated")
@click.option("--t-grid", required=True, help="start:stop:step")
@click.option("--eps", type=float, help="Mixing threshold epsilon (default CRNMIX_EPSILON)")
@simulation_options
@json_option
@out_option
@click.pass_obj
def mixing(settings, network, m_list, t_grid, eps, seed, replicates, box, threads, as_json, out):
    """Mixing times tau(x_m) for each m, written as curve and summary CSVs."""
    crn = resolve_network(network)
    config = _sim_config(settings, seed, replicates, threads)
    radius = box if box is not None else settings.sim_box
    if max(m_list) > radius:
        raise UsageError(f"m={max(m_list)} lies outside the box of radius {radius}")
    pi, _ = stationary_for(crn, [1] * crn.dimension, config=config, box_radius=radius)
    estimates = mixing_sweep(
        crn, m_list, pi, eps if eps is not None else settings.epsilon, parse_t_grid(t_grid), config, radius
    )
    write_curves(estimates, _out_dir(settings, out))
    _emit(
        {"estimates": [e.model_dump(mode="json") for e in estimates]},
        as_json,
        " ".join(f"tau({e.m})={e.tau if e.tau is not None else 'not-reached'}" for e in estimates),
    )
    return EXIT_OK


@main.command()
@json_option
def selftest(as_json: bool):
    """Run the golden structural checks in-process."""
    from .selftest import run_selftest

    results = run_selftest()
    failed = [r for r in results if not r.passed]
    if as_json:
        click.echo(json.dumps([r.model_dump() for r in results], indent=2))
    else:
        for result in results:
            click.echo(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}", err=True)
        click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_USAGE


if __name__ == "__main__":
    main()
