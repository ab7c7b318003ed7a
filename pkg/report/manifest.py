import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import click

from model import __version__
from model.json_mixin import JSONOutputMixin
from process.ext.utils import file_checksum, return_checksum, time_info

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunManifest(JSONOutputMixin):
    """What was run, with which seed and inputs; identical manifests mean identical stdout."""
    subcommand: Optional[str]
    argv: List[str]
    argv_digest: int
    seed: Optional[int]
    version: str
    exit_code: int
    started: str
    finished: str
    seconds: float
    duration: str
    input_digests: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, subcommand, argv, seed, exit_code, start, inputs=()):
        timing = time_info(start)
        digests = {str(path): file_checksum(path) for path in inputs if Path(path).is_file()}
        return cls(subcommand=subcommand, argv=list(argv), argv_digest=return_checksum(argv), seed=seed,
                   version=__version__, exit_code=exit_code, started=timing['started'],
                   finished=timing['finished'], seconds=timing['seconds'], duration=timing['human'],
                   input_digests=digests)

    def write(self, path=None):
        if path:
            Path(path).write_text(self.to_json(indent=2) + '\n', encoding='utf-8')
            logger.debug('Manifest written to %s', path)
        else:
            click.echo(self.to_json(), err=True)
