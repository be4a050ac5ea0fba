import json

import pytest

from phishinator.cli import main
from phishinator.config import RunConfig, load_config_file, resolve_seed
from phishinator.dataset import load_csv, save_csv
from phishinator.errors import ConfigError
from phishinator.schema import FEATURE_NAMES

KNN = '{"family": "knn", "hyperparams": {"k": 3}}'


@pytest.fixture
def small_csv(tmp_path, small):
    path = tmp_path / 'small.csv'
    save_csv(small, path)
    return str(path)


@pytest.fixture
def no_seed_env(monkeypatch):
    monkeypatch.delenv('PHISH_SEED', raising=False)


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_summarize(small_csv, capsys):
    assert main(['summarize', small_csv]) == 0
    out = capsys.readouterr().out
    assert 'Having IP Address' in out and 'Result' in out
    assert main(['summarize', small_csv, '--format', 'json']) == 0
    obj = _json_out(capsys)
    assert len(obj) == 31
    assert set(obj['Result']) == {'mean', 'std'}


def test_usage_errors_exit_2(small_csv, tmp_path, capsys):
    assert main(['summarize']) == 2
    assert main(['summarize', small_csv, '--format', 'xml']) == 2
    assert main(['summarize', str(tmp_path / 'missing.csv')]) == 2
    assert main(['crossval', small_csv]) == 2
    assert main(['crossval', small_csv, '--spec', '{"family": "bayes"}']) == 2
    assert main(['crossval', small_csv, '--spec', 'not json']) == 2
    assert main(['frobnicate']) == 2
    assert 'error:' in capsys.readouterr().err


def test_crossval_json(small_csv, capsys, no_seed_env):
    code = main(['crossval', small_csv, '--spec', KNN, '-k', '3',
                 '--format', 'json'])
    assert code == 0
    obj = _json_out(capsys)
    run, = obj['runs']
    assert run['name'] == 'knn'
    assert run['k'] == 3
    assert run['seed'] == 42
    assert len(run['per_fold']) == 3


def test_crossval_text_table(small_csv, capsys):
    assert main(['crossval', small_csv, '--spec', KNN, '-k', '3']) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.split()[:2] == ['classifier', 'train']


def test_seed_precedence(small_csv, tmp_path, capsys, monkeypatch):
    cfg = tmp_path / 'cfg.json'
    cfg.write_text('{"seed": 7, "k": 3, "format": "json"}')
    args = ['crossval', small_csv, '--spec', KNN, '--config', str(cfg)]

    monkeypatch.delenv('PHISH_SEED', raising=False)
    assert main(args) == 0
    assert _json_out(capsys)['runs'][0]['seed'] == 7

    monkeypatch.setenv('PHISH_SEED', '5')
    assert main(args) == 0
    assert _json_out(capsys)['runs'][0]['seed'] == 5

    assert main(args + ['--seed', '9']) == 0
    run = _json_out(capsys)['runs'][0]
    assert run['seed'] == 9
    assert run['spec']['seed'] == 9

    monkeypatch.setenv('PHISH_SEED', 'abc')
    assert main(args) == 2


def test_resolve_seed():
    assert resolve_seed(None, {}, {}) == 42
    assert resolve_seed(None, {'seed': 3}, {}) == 3
    assert resolve_seed(None, {'seed': 3}, {'PHISH_SEED': '4'}) == 4
    assert resolve_seed(1, {'seed': 3}, {'PHISH_SEED': '4'}) == 1
    with pytest.raises(ConfigError):
        resolve_seed(None, {'seed': 'x'}, {})


def test_config_file_and_run_config(tmp_path):
    path = tmp_path / 'c.json'
    path.write_text('{"spec-file": "s.json", "jobs": 2}')
    assert load_config_file(path) == {'spec_file': 's.json', 'jobs': 2}
    path.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        load_config_file(path)
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / 'missing.json')
    with pytest.raises(ConfigError):
        RunConfig('crossval', k=1)
    with pytest.raises(ConfigError):
        RunConfig('train')


def test_crossval_nonconvergence_exit_3(small_csv, tmp_path):
    out = tmp_path / 'r.json'
    spec = '{"family": "svm", "hyperparams": {"max_passes": 1}}'
    with pytest.warns(Warning):
        code = main(['crossval', small_csv, '--spec', spec, '-k', '3',
                     '--format', 'json', '-o', str(out)])
    assert code == 3
    assert json.loads(out.read_text())['runs'][0]['converged'] is False


def test_spec_file(small_csv, tmp_path, capsys):
    specs = tmp_path / 'specs.json'
    specs.write_text(json.dumps([
        {'family': 'knn', 'hyperparams': {'k': 1}},
        {'family': 'tree', 'hyperparams': {'max_depth': 2}}]))
    assert main(['crossval', small_csv, '--spec-file', str(specs), '-k', '3',
                 '--format', 'json']) == 0
    assert [r['name'] for r in _json_out(capsys)['runs']] == ['knn', 'tree']


def test_report_rerender(small_csv, tmp_path, capsys):
    out = tmp_path / 'r.json'
    assert main(['crossval', small_csv, '--spec', KNN, '-k', '3',
                 '--format', 'json', '-o', str(out)]) == 0
    assert main(['report', str(out)]) == 0
    assert 'knn' in capsys.readouterr().out
    assert main(['report', str(out), '--format', 'json']) == 0
    assert _json_out(capsys) == json.loads(out.read_text())
    bad = tmp_path / 'bad.json'
    bad.write_text('{"version": 9}')
    assert main(['report', str(bad)]) == 2


def test_sweep_writes_csv_and_json(small_csv, tmp_path):
    out = tmp_path / 'knn.csv'
    assert main(['sweep', small_csv, '--axis', 'knn-k', '--values', '1,3',
                 '-k', '3', '-o', str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == 'axis_value,accuracy,recall,precision,f1'
    assert [ln.split(',')[0] for ln in lines[1:]] == ['1', '3']
    doc = json.loads((tmp_path / 'knn.json').read_text())
    assert doc['axis'] == 'knn-k'
    assert len({r['plan_digest'] for r in doc['runs']}) == 1


def test_sweep_errors(small_csv):
    assert main(['sweep', small_csv]) == 2
    assert main(['sweep', small_csv, '--axis', 'tree-depth']) == 2
    assert main(['sweep', small_csv, '--axis', 'knn-k',
                 '--values', 'a,b']) == 2
    assert main(['sweep', small_csv, '--axis', 'knn-k', '--spec',
                 '{"family": "svm"}']) == 2


def test_extract_text(capsys):
    assert main(['extract', '--url', 'http://217.102.24.235//evil.html']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == '# http://217.102.24.235//evil.html'
    assert lines[1] == 'Having_IP_Address=-1'
    assert len(lines) == 31


def test_extract_json_and_csv(data_dir, capsys):
    args = ['extract', '--url', 'https://www.example.com/',
            '--evidence', str(data_dir / 'evidence.json')]
    assert main(args + ['--format', 'json']) == 0
    item, = _json_out(capsys)
    assert item['url'] == 'https://www.example.com/'
    assert len(item['features']) == 30
    assert item['features']['Having_IP_Address'] == 1

    assert main(args + ['--format', 'csv']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split(',') == ['url', *FEATURE_NAMES]
    assert len(lines) == 2


def test_extract_skips_bad_rows(capsys):
    code = main(['extract', '--url', 'http:///broken',
                 '--url', 'http://example.com/'])
    assert code == 0
    captured = capsys.readouterr()
    assert 'http:///broken' in captured.err
    assert captured.out.startswith('# http://example.com/')


def test_extract_no_rows_exit_4(capsys):
    assert main(['extract', '--url', 'http:///broken', '--url', '']) == 4
    assert main(['extract']) == 2


def test_extract_dump_and_append(data_dir, tmp_path, capsys):
    target = tmp_path / 'grown.csv'
    code = main(['extract', '--dump', str(data_dir / 'phishtank_dump.csv'),
                 '--append', str(target), '--format', 'json'])
    assert code == 0
    assert len(_json_out(capsys)) == 5
    d = load_csv(target)
    assert len(d) == 5
    assert set(d.y.tolist()) == {-1}
    assert main(['extract', '--url', 'http://example.com/', '--append',
                 str(target), '--label', '1']) == 0
    d = load_csv(target)
    assert len(d) == 6 and d.y[-1] == 1


def test_fit_and_predict(small_csv, small, tmp_path, capsys):
    model = tmp_path / 'knn.json'
    assert main(['fit', small_csv, '--spec', KNN, '-o', str(model)]) == 0
    assert json.loads(model.read_text())['spec']['family'] == 'knn'

    assert main(['predict', '--model', str(model), '--csv', small_csv]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == len(small)
    name, verdict, score = lines[0].split('\t')
    assert name == 'row 1'
    assert verdict in ('phishing', 'legitimate')

    assert main(['predict', '--model', str(model), '--url',
                 'http://example.com/', '--format', 'json']) == 0
    item, = _json_out(capsys)
    assert item['input'] == 'http://example.com/'
    assert item['label'] in (-1, 1)
    assert item['verdict'] == ('phishing' if item['label'] < 0
                               else 'legitimate')


def test_fit_and_predict_errors(small_csv, tmp_path):
    model = tmp_path / 'm.json'
    assert main(['fit', small_csv, '--spec', KNN]) == 2
    assert main(['fit', small_csv, '--spec', KNN, '--spec', KNN,
                 '-o', str(model)]) == 2
    model.write_text('{"format_version": 1, ')
    assert main(['predict', '--model', str(model), '--csv', small_csv]) == 2
    assert main(['predict', '--csv', small_csv]) == 2


def test_correlate(small_csv, capsys):
    assert main(['correlate', small_csv]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 32
    assert len(lines[0].split(',')) == 32
    assert main(['correlate', small_csv, '--format', 'json']) == 0
    assert len(_json_out(capsys)) == 31
