import click

from clearnet.click.options import PositiveFloatType, PositiveIntType, SeedType
from clearnet.config_utils import ScenarioConfig, load_config
from clearnet.harness import default_threads, run_monte_carlo, run_scenario_suite
from clearnet.output_utils import write_frame, write_json
from clearnet.scripts import cli, default_out
from clearnet.types import EnumType, SuiteScenario


@cli.command()
@click.option('--config', '-c', help='path to the scenario JSON file', type=str, required=True)
@click.option('--dt', help='base step of the integrator', type=PositiveFloatType())
@click.option('--seed', '-s', help='seed of the Monte-Carlo streams', type=SeedType())
@click.option('--paths', '-p', help='number of simulated paths', type=PositiveIntType())
@click.option('--threads', '-t', help='number of worker processes', type=PositiveIntType(), default=default_threads)
@click.option('--out', '-o', help='output directory', type=str, default=default_out)
def mc(config, dt, seed, paths, threads, out):
    """
    Monte-Carlo distribution of terminal clearing wealths
    """
    scenario = ScenarioConfig.from_json(load_config(config)).with_overrides(dt0=dt, seed=seed, n_paths=paths)
    summary = run_monte_carlo(scenario, threads=threads)
    write_json(summary.to_json(), out, 'summary.json')
    write_frame(summary.samples_frame(), out, 'samples.csv')
    for name, frequency in zip(scenario.network.names, summary.default_frequency):
        click.echo('{}: default frequency {:.4f}'.format(name, frequency))
    payment = summary.societal_payment
    click.echo('societal payment: {:.2f} to {:.2f}'.format(payment.min(), payment.max()))


@cli.command()
@click.option('--dt', help='base step of the integrator', type=PositiveFloatType())
@click.option('--seed', '-s', help='seed of the Monte-Carlo streams', type=SeedType())
@click.option('--paths', '-p', help='number of simulated paths', type=PositiveIntType())
@click.option('--scenario', help='run only this scenario', type=EnumType(SuiteScenario), multiple=True)
@click.option('--threads', '-t', help='number of worker processes', type=PositiveIntType(), default=default_threads)
def suite(dt, seed, paths, scenario, threads):
    """
    Run the built-in regression scenarios
    """
    report = run_scenario_suite(dt=dt, paths=paths, seed=seed, only=set(scenario), threads=threads)
    for check in report.checks:
        click.echo(str(check))
    if not report.passed:
        raise click.ClickException('{} of {} checks failed'.format(len(report.failures), len(report.checks)))
