import os

import click


default_out = os.environ.get('CLEARNET_OUT', '.')


@click.group()
def cli():
    """Clearing and contagion in interbank networks"""
