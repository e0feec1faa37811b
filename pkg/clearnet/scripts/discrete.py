import click

from clearnet.click.options import PositiveFloatType, SeedType
from clearnet.config_utils import ScenarioConfig, discrete_schedule_from_json, load_config
from clearnet.discrete_clearing import run_discrete, run_discrete_dt
from clearnet.output_utils import trajectory_frame, write_frame
from clearnet.processes import RngStream
from clearnet.scripts import cli, default_out


@cli.command()
@click.option('--config', '-c', help='path to the scenario JSON file', type=str, required=True)
@click.option('--dt', help='clearing interval; clears the continuous scenario on a grid when set',
              type=PositiveFloatType())
@click.option('--seed', '-s', help='seed of the cash-flow noise', type=SeedType())
@click.option('--emit-exposures', help='append the relative exposures to trajectory.csv', is_flag=True)
@click.option('--out', '-o', help='output directory', type=str, default=default_out)
def discrete(config, dt, seed, emit_exposures, out):
    """
    Clear a network at discrete dates with debt rolled forward
    """
    document = load_config(config)
    if dt is None:
        network, schedule = discrete_schedule_from_json(document)
        trajectory = run_discrete(schedule)
    else:
        scenario = ScenarioConfig.from_json(document).with_overrides(dt0=dt, seed=seed)
        network = scenario.network
        trajectory = run_discrete_dt(
            scenario.cashflow, scenario.schedule, scenario.V0, scenario.T, dt, RngStream(scenario.seed)
        )
    write_frame(trajectory_frame(trajectory, exposures=emit_exposures), out, 'trajectory.csv')
    for name, V in zip(network.names, trajectory[-1].V):
        click.echo('{}: terminal wealth {:.4f}'.format(name, V))
