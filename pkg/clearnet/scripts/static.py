import click

from clearnet.config_utils import load_config, problem_from_json
from clearnet.output_utils import static_frame, write_frame
from clearnet.scripts import cli, default_out
from clearnet.static_clearing import clear_static


@cli.command()
@click.option('--config', '-c', help='path to the scenario JSON file', type=str, required=True)
@click.option('--out', '-o', help='output directory', type=str, default=default_out)
def static(config, out):
    """
    Clear a static network with the fictitious default algorithm
    """
    network, problem = problem_from_json(load_config(config))
    solution = clear_static(problem)
    write_frame(static_frame(solution), out, 'static.csv')
    for name, V, p in zip(network.names, solution.V, solution.p):
        click.echo('{}: wealth {:.4f}, payment {:.4f}'.format(name, V, p))
    for k, order in enumerate(solution.orders, start=1):
        click.echo('default round {}: {}'.format(k, sorted(order)))
