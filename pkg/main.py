#!/usr/bin/env python
import os
import sys
import logging.config
from pathlib import Path
import yaml
import click

env_path = Path(__file__).absolute().parent / '.env'
from dotenv import load_dotenv
load_dotenv(dotenv_path=env_path)

with open(os.environ.get('BCT_LOG_CFG', Path(__file__).absolute().parent / 'logging.yaml'),
          encoding="utf-8") as fobj:
    logging.config.dictConfig(yaml.safe_load(fobj))

from model.errors import BctError, InconclusiveVerdict
from process import process_group
from process.ext.utils import utc_now
from report.formats import dump_json
from report.manifest import RunManifest

logger = logging.getLogger('bct')


@click.group()
@click.option('--manifest', 'manifest_path', type=click.Path(dir_okay=False, writable=True),
              help='Write the run manifest to this file instead of stderr')
@click.pass_context
def cli(ctx, manifest_path):
    ctx.ensure_object(dict)
    ctx.obj['manifest_path'] = manifest_path
    ctx.obj['subcommand'] = ctx.invoked_subcommand


for name, command in process_group.commands.items():
    cli.add_command(command, name)


def run(argv=None):
    """
    Run one subcommand and return its exit code: 0 success, 1 usage error, 2 invalid input,
    3 infeasible margins, 4 budget or attempts exhausted, 5 inconclusive verdict with --strict.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    state = {'inputs': [], 'seed': None, 'subcommand': None, 'manifest_path': None}
    start = utc_now()
    try:
        rv = cli.main(args=argv, prog_name='bct', standalone_mode=False, obj=state)
        code = rv if isinstance(rv, int) else 0
    except click.exceptions.Abort:
        click.echo('Aborted!', err=True)
        code = 1
    except click.ClickException as exc:
        exc.show()
        code = 1
    except InconclusiveVerdict as exc:
        logger.warning(exc.message)
        code = exc.exit_code
    except BctError as exc:
        logger.error(exc.message)
        click.echo(dump_json(exc.to_json_dict()))
        code = exc.exit_code
    RunManifest.build(state['subcommand'], argv, state['seed'], code, start, state['inputs']) \
        .write(state['manifest_path'])
    return code


if __name__ == '__main__':
    sys.exit(run())
