"""
Tests for the command-line application
"""

import os
import tempfile
import unittest
from unittest.mock import patch

from src.core.errors import ConfigError
from src.core.experiment import read_csv
from src.core.simulator_app import (
    main, parse_range, parse_int_list, parse_methods, load_config_file, build_parser,
    EXIT_OK, EXIT_CONFIG, EXIT_IO,
)
from src.core.simulator_app import _join_range_values


class TestParsing(unittest.TestCase):
    """Test cases for range, list and config-file parsing"""

    def test_parse_range(self):
        """Inclusive start:step:stop ranges and plain lists"""
        self.assertEqual(parse_range('-10:5:30'), [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
        self.assertEqual(parse_range('0.5:0.1:0.7'), [0.5, 0.6, 0.7])
        self.assertEqual(parse_range('0,10'), [0.0, 10.0])
        self.assertEqual(parse_range('1.0'), [1.0])

    def test_parse_range_errors(self):
        """Malformed ranges raise ConfigError"""
        for text in ('a:b:c', '0:0:10', '1:2', 'x'):
            with self.assertRaises(ConfigError):
                parse_range(text)
        with self.assertRaises(ConfigError):
            parse_range('10:1:0')

    def test_parse_lists(self):
        """Integer lists and method lists"""
        self.assertEqual(parse_int_list('4:4:16'), [4, 8, 12, 16])
        with self.assertRaises(ConfigError):
            parse_int_list('1.5')
        self.assertEqual(parse_methods('SPC-ZF, PAPC-CB'), ['SPC-ZF', 'PAPC-CB'])

    def test_negative_range_values(self):
        """Range values starting with a minus sign reach the parser intact"""
        argv = _join_range_values(['simulate', '--snr-db', '-10:5:30', '--beta', '1.0'])
        self.assertEqual(argv, ['simulate', '--snr-db=-10:5:30', '--beta=1.0'])
        args = build_parser().parse_args(argv)
        self.assertEqual(args.snr_db, '-10:5:30')

    def test_load_config_file(self):
        """key=value files are read with normalized keys"""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'sweep.env')
            with open(path, 'w', encoding='utf-8') as f:
                f.write("# sweep\nTRIALS=5\nsnr-db=-10:10:10\n")
            self.assertEqual(load_config_file(path), {'trials': '5', 'snr_db': '-10:10:10'})
            with self.assertRaises(ConfigError):
                load_config_file(os.path.join(tmp, 'missing.env'))


@patch('src.core.simulator_app.setup_logging')
class TestMain(unittest.TestCase):
    """Test cases for the entry point and its exit codes"""

    def setUp(self):
        """Set up a scratch directory"""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def test_simulate_success(self, mock_logging):
        """A small sweep writes its CSV and exits 0"""
        out = self._path('out.csv')
        code = main([
            'simulate', '--m', '16', '--k', '4', '--snr-db', '-10:20:30', '--beta', '1.0',
            '--trials', '2', '--seed', '3', '--methods', 'SPC-ZF,MMI-LS-ZF', '--out', out,
        ])
        self.assertEqual(code, EXIT_OK)
        rows = read_csv(out)
        self.assertEqual(len(rows), 6)
        self.assertEqual({row['snr_db'] for row in rows}, {'-10', '10', '30'})
        mock_logging.assert_called_once()
        print("✅ CLI simulate test passed")

    def test_config_file_overrides(self, mock_logging):
        """Config-file values replace flags"""
        out = self._path('cfg.csv')
        cfg = self._path('sweep.env')
        with open(cfg, 'w', encoding='utf-8') as f:
            f.write(f"m=8\nk=2\ntrials=1\nsnr-db=0,10\nmethods=SPC-ZF,PAPC-CB\nout={out}\n")
        self.assertEqual(main(['simulate', '--config', cfg, '--m', '64']), EXIT_OK)
        rows = read_csv(out)
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[0]['m'], '8')

    def test_configuration_errors(self, mock_logging):
        """Invalid settings exit with code 2"""
        bad_key = self._path('bad.env')
        with open(bad_key, 'w', encoding='utf-8') as f:
            f.write("colour=blue\n")
        cases = [
            ['simulate', '--m', '4', '--k', '8', '--out', self._path('x.csv')],
            ['simulate', '--methods', 'NOPE', '--out', self._path('x.csv')],
            ['simulate', '--snr-db', '1:0:2'],
            ['simulate', '--preset', 'fig1'],
            ['simulate', '--config', bad_key],
            ['simulate', '--config', self._path('missing.env')],
            ['simulate', '--trials', 'many'],
            [],
        ]
        for argv in cases:
            self.assertEqual(main(argv), EXIT_CONFIG, argv)

    def test_output_error(self, mock_logging):
        """An unwritable output path exits with code 3"""
        out = os.path.join(self.tmp.name, 'missing', 'out.csv')
        code = main(['simulate', '--m', '8', '--k', '2', '--trials', '1', '--snr-db', '0',
                     '--methods', 'SPC-ZF', '--out', out])
        self.assertEqual(code, EXIT_IO)

    def test_help(self, mock_logging):
        """--help exits cleanly"""
        self.assertEqual(main(['--help']), EXIT_OK)

    def test_validate_approx(self, mock_logging):
        """Approximation check writes its table"""
        out = self._path('approx.csv')
        code = main(['validate-approx', '--m', '32', '--k', '4', '--trials', '2',
                     '--snr-db', '30', '--beta', '1.0', '--out', out])
        self.assertEqual(code, EXIT_OK)
        with open(out, 'r', encoding='utf-8') as f:
            self.assertEqual(len(f.read().splitlines()), 1 + 3)


if __name__ == "__main__":
    unittest.main(verbosity=2)
