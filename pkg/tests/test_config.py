import pytest
from omegaconf import OmegaConf

from modules import cmd_opts, paths
from modules.options import Options, OptionInfo, ConfigError, options_templates, load_options, is_same_type
from modules.spec_parser import TopologySource, parse_topology, parse_values


@pytest.fixture
def opts():
    return Options(options_templates)


class TestOptions:

    def test_defaults(self, opts):
        assert opts.k == 20 and opts.m == 4 and opts.mice_q == 0.9
        assert opts.routers == ['flash', 'sp', 'spider']
        opts.validate()

    def test_every_option_has_a_section(self):
        assert all(info.section is not None for info in options_templates.values())
        assert {info.section[0] for info in options_templates.values()} == \
            {'network', 'workload', 'router', 'fees', 'simulation', 'experiment'}

    def test_same_type(self):
        assert is_same_type(1, 2.5) and is_same_type(None, 'x')
        assert not is_same_type('1', 1)

    def test_update_warns(self, opts, capsys):
        assert opts.update({'k': 8, 'colour': 'red', 'm': 'four'}) == 2
        err = capsys.readouterr().err
        assert 'unknown setting: colour' in err and 'bad setting value: m' in err
        assert opts.k == 8

    def test_sectioned_yaml(self, opts, tmp_path):
        fp = tmp_path / 'cell.yaml'
        fp.write_text('router:\n  k: 12\n  m: 3\nexperiment:\n  reps: 2\ntxns: 50\n')
        opts.load(str(fp))
        assert (opts.k, opts.m, opts.reps, opts.txns) == (12, 3, 2, 50)

    def test_missing_file(self, opts):
        with pytest.raises(ConfigError):
            opts.load('/nonexistent/cell.yaml')

    def test_non_mapping(self, opts, tmp_path):
        fp = tmp_path / 'list.yaml'
        fp.write_text('- 1\n- 2\n')
        with pytest.raises(ConfigError):
            opts.load(str(fp))

    def test_dotlist(self, opts):
        opts.load_dotlist(['k=8', 'routers=[flash]', 'overlap=true'])
        assert opts.k == 8 and opts.routers == ['flash'] and opts.overlap is True

    @pytest.mark.parametrize('key,value', [
        ('mice_q', 1.5), ('k', 0), ('m', -1), ('fund', [10, 10]), ('fund', [5]),
        ('routers', []), ('routers', ['flash', 'teleport']), ('pairing', 'nearest'), ('fee_low', [0.5, 0.1]),
    ])
    def test_validate(self, opts, key, value):
        setattr(opts, key, value)
        with pytest.raises(ConfigError, match=key):
            opts.validate()

    def test_m_bounded_by_k(self, opts):
        opts.m, opts.k = 5, 3
        with pytest.raises(ConfigError, match='must not exceed'):
            opts.validate()

    def test_save_and_load(self, opts, tmp_path):
        opts.k, opts.fund = 9, [10, 20]
        fp = str(tmp_path / 'saved.yaml')
        opts.save(fp)
        assert OmegaConf.load(fp).router.k == 9
        again = Options(options_templates)
        again.load(fp)
        assert again.data == opts.data

    def test_load_options_layers(self, tmp_path):
        fp = tmp_path / 'user.yaml'
        fp.write_text('k: 10\nm: 2\n')
        opts = load_options(str(fp), ['m=1'])
        assert (opts.k, opts.m, opts.txns) == (10, 1, 10000)
        assert opts.out == paths.OUTPUT_PATH

    def test_custom_template(self):
        templates = {'x': OptionInfo(1, 'x', lambda v: v < 3), 'k': OptionInfo(1), 'm': OptionInfo(0)}
        o = Options(templates)
        o.x = 5
        with pytest.raises(ConfigError, match='bad value for x'):
            o.validate()


class TestCommandLine:

    def test_run(self):
        args, opts = cmd_opts.parse(['run', '--txns', '5', '--router', 'flash,sp', '--fund', '10,20', '--no-fees'])
        assert args.command == 'run'
        assert opts.txns == 5 and opts.routers == ['flash', 'sp'] and opts.fund == [10, 20]
        assert opts.assign_fees is False
        # flags not given keep the config value
        assert opts.fee_optimize is True and opts.k == 20

    def test_sweep(self):
        _, opts = cmd_opts.parse(['sweep', '--axis', 'm', '--values', '0,2,4'])
        assert opts.axis == 'm' and opts.values == [0, 2, 4]

    def test_sweep_needs_axis(self):
        with pytest.raises(SystemExit):
            cmd_opts.parse(['sweep', '--values', '1'])

    def test_set_before_flags(self):
        _, opts = cmd_opts.parse(['--set', 'k=7', '--set', 'm=1', 'run', '--m', '3'])
        assert (opts.k, opts.m) == (7, 3)

    def test_invalid(self):
        with pytest.raises(ConfigError):
            cmd_opts.parse(['run', '--m', '30'])
        with pytest.raises(ConfigError):
            cmd_opts.parse(['run', '--router', 'flash,teleport'])

    def test_stats_skips_validation(self):
        args, _ = cmd_opts.parse(['stats', '--synthetic', '100', '--seed', '3'])
        assert (args.synthetic, args.seed) == (100, 3)


class TestSpecParser:

    def test_topology(self):
        assert parse_topology(' ws:10,2 ') == TopologySource('ws', 10, 2, 0.3)
        assert parse_topology('ws:10,2,0') == TopologySource('ws', 10, 2, 0.0)
        assert parse_topology('file:/tmp/a b.txt').path == '/tmp/a b.txt'

    @pytest.mark.parametrize('text', ['', 'ws:10', 'ba:10,2', 'ws:a,2', 'file:'])
    def test_bad_topology(self, text):
        with pytest.raises(ConfigError):
            parse_topology(text)

    def test_values(self):
        assert parse_values('-1, 2.5') == [-1, 2.5]

    @pytest.mark.parametrize('text', ['', '1,,2', '1;2'])
    def test_bad_values(self, text):
        with pytest.raises(ConfigError):
            parse_values(text)
