"""Shared plumbing for the numerical management commands"""
import json
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from grid.exceptions import NumericalFailure
from grid.helpers import dump_json, output_path, read_json, write_csv, write_json

logger = logging.getLogger('grid')

EXIT_BAD_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


class ConfigCommand(BaseCommand):
    """Reads `--config` JSON, applies flag overrides, validates, runs.

    Subclasses set `serializer_class`, map flags onto config keys in
    `overrides()` and do the work in `run()`, which returns the report
    dict. A report whose `passed` is False exits with code 4.
    """
    serializer_class = None
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON file with run settings')
        parser.add_argument('--output', help='prefix for CSV/JSON artifacts')
        parser.add_argument('--seed', type=int)

    def overrides(self, options) -> dict:
        return {}

    def run(self, config: dict, serializer) -> dict:
        raise NotImplementedError

    def load_config(self, options) -> dict:
        config = {}
        if options.get('config'):
            try:
                config = read_json(options['config'])
            except OSError as exc:
                raise CommandError(f'cannot read config: {exc}',
                                   returncode=EXIT_IO) from exc
            except json.JSONDecodeError as exc:
                raise CommandError(f'config is not valid JSON: {exc}',
                                   returncode=EXIT_BAD_CONFIG) from exc

        config['command'] = self.command_name
        for key in ('output', 'seed'):
            if options.get(key) is not None:
                config[key] = options[key]
        config.update({key: value for key, value in self.overrides(options).items()
                       if value is not None})
        return config

    @property
    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def handle(self, *args, **options):
        config = self.load_config(options)
        serializer = self.serializer_class(data=config)
        if not serializer.is_valid():
            raise CommandError(f'invalid config: {dict(serializer.errors)}',
                               returncode=EXIT_BAD_CONFIG)

        logger.info('%s started', self.command_name)
        try:
            result = self.run(serializer.validated_data, serializer)
        except (ValidationError, serializers.ValidationError) as exc:
            raise CommandError(f'invalid parameters: {exc}',
                               returncode=EXIT_BAD_CONFIG) from exc
        except NumericalFailure as exc:
            self.save_json(serializer.validated_data,
                           {'error': exc.message, 'diagnostics': exc.diagnostics})
            raise CommandError(exc.message, returncode=EXIT_NUMERICAL) from exc

        self.save_json(serializer.validated_data, result)
        self.stdout.write(dump_json(result))
        logger.info('%s finished', self.command_name)

        if not result.get('passed', True):
            raise CommandError('verdict failed', returncode=EXIT_NUMERICAL)

    def artifact(self, config: dict, suffix: str):
        prefix = config.get('output')
        if not prefix:
            return None
        return output_path(f'{prefix}{suffix}')

    def save_json(self, config: dict, data: dict) -> None:
        path = self.artifact(config, '.json')
        if path is None:
            return
        try:
            write_json(path, data)
        except OSError as exc:
            raise CommandError(f'cannot write {path}: {exc}',
                               returncode=EXIT_IO) from exc

    def save_csv(self, config: dict, header, rows) -> None:
        path = self.artifact(config, '.csv')
        if path is None:
            return
        try:
            write_csv(path, header, rows)
        except OSError as exc:
            raise CommandError(f'cannot write {path}: {exc}',
                               returncode=EXIT_IO) from exc
