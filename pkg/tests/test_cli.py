import json

import pytest

from main import run


def run_json(capsys, argv):
    assert run(argv + ['--format', 'json']) == 0
    return json.loads(capsys.readouterr().out)


class TestExitCodes:

    def test_even_n(self, capsys):
        assert run(['nchv-prove', '--n', '4']) == 1
        assert 'odd' in capsys.readouterr().err

    def test_unknown_flag(self):
        assert run(['witness', '--n', '3', '--bogus']) == 1

    def test_missing_subcommand(self):
        assert run([]) == 1

    def test_missing_data_file(self, tmp_path):
        assert run(['witness', '--n', '3', '--data', str(tmp_path / 'absent.csv')]) == 2

    def test_bad_projector_index(self):
        assert run(['witness', '--n', '3', '--j', '4', '--ideal']) == 1

    def test_help(self, capsys):
        assert run(['--help']) == 0
        assert 'reproduce' in capsys.readouterr().out


class TestCommands:

    def test_wheel_build(self, capsys):
        assert run(['wheel-build', '--n', '3']) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'context,kind,sign,observables'
        assert len(lines) == 7
        assert lines[1].startswith('ring:ZZ,ring,1,')

    def test_wheel_verify(self, capsys):
        payload = run_json(capsys, ['wheel-verify', '--n', '7'])
        assert payload['structure_problems'] == []

    def test_nchv_prove(self, capsys):
        assert run(['nchv-prove', '--n', '5']) == 0
        out = capsys.readouterr().out
        assert 'INCONSISTENT' in out
        assert '0/32768 satisfying' in out

    def test_nchv_prove_flipped(self, capsys):
        payload = run_json(capsys, ['nchv-prove', '--n', '9', '--flip', 'spoke:0'])
        assert payload['status'] == 'SATISFIABLE'

    def test_weak_value(self, capsys):
        payload = run_json(capsys, ['weak-value', '--n', '3'])
        assert payload['contradicted'] == ['ring:ZZ']
        zz = next(r for r in payload['weak_values'] if r['observable'] == '+ZZI')
        assert zz['re'] == pytest.approx(-1.0)
        assert zz['assigned'] == -1
        assert zz['abl_probability'] == pytest.approx(1.0, abs=1e-9)

    def test_ideal_witness(self, capsys):
        payload = run_json(capsys, ['witness', '--n', '3', '--ideal'])
        assert payload['results'][0]['re'] == pytest.approx(-1.0)

    def test_measured_witness(self, capsys):
        payload = run_json(capsys, ['witness', '--n', '5', '--j', '0'])
        witness, projector = payload['results']
        assert witness['re'] == pytest.approx(-2.85, abs=0.01)
        assert projector['re'] == pytest.approx(-0.2508, abs=5e-4)

    def test_output_file(self, tmp_path):
        out = tmp_path / 'witness.csv'
        assert run(['witness', '--n', '3', '--ideal', '--out', str(out)]) == 0
        assert out.read_text(encoding='utf-8').startswith('quantity,n,re,im')

    def test_reproduce(self, capsys, tmp_path):
        assert run(['reproduce', '--out', str(tmp_path), '--samples', '20000']) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 8
        assert any(line.startswith('N=5: C=-2.85±0.41') for line in lines)
        assert (tmp_path / 'fig1_pairs.csv').exists()
        assert (tmp_path / 'fig3d.svg').exists()

    def test_simulate_then_extract(self, tmp_path):
        files = {}
        for mode in ('IN', 'OUT', 'BLOCK_P1', 'BLOCK_P2', 'ORTHOGONAL_BG'):
            path = tmp_path / f'{mode.lower()}.json'
            argv = ['simulate', '--mode', mode, '--noiseless', '--format', 'json', '--out', str(path)]
            assert run(argv) == 0
            files[mode] = str(path)
        out = tmp_path / 'z.json'
        assert run([
            'extract', '--fringe-in', files['IN'], '--fringe-out', files['OUT'],
            '--block-p1', files['BLOCK_P1'], '--block-p2', files['BLOCK_P2'],
            '--background', files['ORTHOGONAL_BG'], '--format', 'json', '--out', str(out),
        ]) == 0
        z = json.loads(out.read_text(encoding='utf-8'))
        assert z['re'] == pytest.approx(0.0, abs=1e-6)
        assert z['im'] == pytest.approx(1.0, abs=1e-6)

    def test_output_format_follows_extension(self, tmp_path):
        out = tmp_path / 'in.json'
        assert run(['simulate', '--mode', 'IN', '--noiseless', '--out', str(out)]) == 0
        payload = json.loads(out.read_text(encoding='utf-8'))
        assert payload['mode'] == 'IN'
        forced = tmp_path / 'in_forced.json'
        assert run(['simulate', '--noiseless', '--format', 'csv', '--out', str(forced)]) == 0
        assert forced.read_text(encoding='utf-8').startswith('chi,counts')

    def test_simulate_protocol(self, capsys):
        payload = run_json(capsys, ['simulate', '--protocol', '--seed', '3'])
        assert set(payload['exposures']) == {'IN', 'OUT', 'BLOCK_P1', 'BLOCK_P2', 'ORTHOGONAL_BG'}
        assert payload['im'] == pytest.approx(1.0, abs=0.5)

    def test_extract_missing_file(self, tmp_path):
        missing = str(tmp_path / 'none.json')
        argv = ['extract', '--fringe-in', missing, '--fringe-out', missing,
                '--block-p1', missing, '--block-p2', missing]
        assert run(argv) == 2
