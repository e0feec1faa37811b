import click

from clearnet.click.options import PositiveFloatType, SeedType
from clearnet.config_utils import ScenarioConfig, load_config
from clearnet.continuous_sim import conservation_gap, simulate_path
from clearnet.output_utils import events_frame, trajectory_frame, write_frame
from clearnet.scripts import cli, default_out


@cli.command()
@click.option('--config', '-c', help='path to the scenario JSON file', type=str, required=True)
@click.option('--dt', help='base step of the integrator', type=PositiveFloatType())
@click.option('--seed', '-s', help='seed of the cash-flow noise', type=SeedType())
@click.option('--out', '-o', help='output directory', type=str, default=default_out)
def continuous(config, dt, seed, out):
    """
    Simulate one path of continuous-time clearing
    """
    scenario = ScenarioConfig.from_json(load_config(config)).with_overrides(dt0=dt, seed=seed, n_paths=1)
    result = simulate_path(scenario)
    write_frame(trajectory_frame(result.trajectory), out, 'trajectory.csv')
    write_frame(events_frame(result.events), out, 'events.csv')
    for event in result.events:
        click.echo('t = {:.6f}: {} {}'.format(event.t, scenario.network.names[event.node], event.direction))
    for name, V in zip(scenario.network.names, result.terminal.V):
        click.echo('{}: terminal wealth {:.4f}'.format(name, V))
    click.echo('conservation gap: {:.3e}'.format(conservation_gap(result.terminal, scenario.V0)))
