import os

import pytest

import flashsim
from modules import paths

SMALL = ['--topology', 'ws:10,4,0.3', '--txns', '20', '--reps', '1', '--fund', '2000,3000']


def test_bad_config_exits_2(capsys):
    assert flashsim.main(['run', '--m', '30']) == 2
    assert 'config error' in capsys.readouterr().err


def test_stats_needs_input(capsys):
    assert flashsim.main(['stats']) == 2
    assert 'stats needs' in capsys.readouterr().err


def test_stats_of_sample_trace(capsys):
    assert flashsim.main(['stats', '--trace', paths.SAMPLE_TRACE]) == 0
    lines = capsys.readouterr().out.splitlines()
    [records] = [line for line in lines if line.startswith('records:')]
    assert records.split()[-1] == '40'


def test_stats_missing_trace():
    assert flashsim.main(['stats', '--trace', '/nonexistent/trace.csv']) == 2


def test_oracle():
    assert flashsim.main(['--quiet', 'oracle', '--check', 'yen', '--seeds', '5']) == 0


def test_run_writes_outputs(tmp_path, capsys):
    assert flashsim.main(['--quiet', 'run', *SMALL, '--out', str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert all(f'{r:>7}: success ratio' in out for r in ('flash', 'sp', 'spider'))
    for name in ('runs.csv', 'summary.csv', 'config.yaml'):
        assert os.path.exists(tmp_path / name)


@pytest.mark.parametrize('axis,values', [('k', '4,6'), ('threshold_q', '0,1')])
def test_sweep(tmp_path, capsys, axis, values):
    argv = ['--quiet', 'sweep', *SMALL, '--router', 'flash', '--axis', axis, '--values', values, '--out', str(tmp_path)]
    assert flashsim.main(argv) == 0
    out = capsys.readouterr().out
    assert out.count(f'{axis}=') == 2
