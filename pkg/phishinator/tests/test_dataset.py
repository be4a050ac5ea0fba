import json

import numpy as np
import pytest

from phishinator.dataset import (
    Dataset, FoldPlan, LabeledSample, holdout_split, load_csv,
    load_feature_csv, save_csv, stratified_kfold, stratified_mask,
    summarize)
from phishinator.errors import DatasetError
from phishinator.schema import (
    FEATURE_NAMES, FeatureSchema, canonical_schema, normalize_header)
from phishinator.tests.conftest import make_dataset


def _write_csv(path, header, rows):
    lines = [','.join(header)] + [','.join(str(v) for v in r) for r in rows]
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def _rows(n=3):
    return [[(ii + jj) % 3 - 1 for jj in range(30)] + [1 if ii % 2 else -1]
            for ii in range(n)]


def test_canonical_schema():
    s = canonical_schema()
    assert len(s) == 30
    assert s.feature_names == FEATURE_NAMES
    assert s.feature_names[0] == 'having_IP_Address'
    assert s.display_names[18] == 'Website Redirect Count'
    assert all(dom == {-1, 0, 1} for dom in s.feature_domains)
    assert s.index('Having IP Address') == 0
    assert s.index('having-ip-address') == 0
    assert s.underscored(0) == 'Having_IP_Address'


def test_schema_rejects_bad_domains():
    with pytest.raises(ValueError):
        FeatureSchema(('a', 'a'), (frozenset({1}), frozenset({1})))
    with pytest.raises(ValueError):
        FeatureSchema(('a',), (frozenset({2}),))
    with pytest.raises(ValueError):
        FeatureSchema(('a',), (frozenset(),))


def test_normalize_header():
    assert normalize_header(' Having_IP-Address ') == 'havingipaddress'


def test_load_canonical_header(tmp_path):
    path = _write_csv(tmp_path / 'd.csv', FEATURE_NAMES + ('Result',),
                      _rows(3))
    d = load_csv(path)
    assert len(d) == 3
    assert d.y.tolist() == [-1, 1, -1]
    assert d.X[1, :3].tolist() == [0, 1, -1]
    assert d.provenance == str(path)
    assert d.X.dtype == np.int8


def test_load_display_names_and_index_column(tmp_path):
    s = canonical_schema()
    # Display names in reverse order plus a leading index column
    header = ('index',) + tuple(reversed(s.display_names)) + ('Result',)
    rows = [[ii] + list(reversed(r[:30])) + [r[30]]
            for ii, r in enumerate(_rows(4))]
    d = load_csv(_write_csv(tmp_path / 'd.csv', header, rows))
    expected = np.array([r[:30] for r in _rows(4)])
    assert np.array_equal(d.X, expected)


def test_header_only_gives_empty_dataset(tmp_path):
    d = load_csv(_write_csv(tmp_path / 'd.csv', FEATURE_NAMES + ('Result',),
                            []))
    assert len(d) == 0


def test_save_load_roundtrip(tmp_path, small):
    save_csv(small, tmp_path / 'out.csv')
    back = load_csv(tmp_path / 'out.csv')
    assert back == small
    save_csv(back, tmp_path / 'again.csv')
    assert ((tmp_path / 'out.csv').read_bytes()
            == (tmp_path / 'again.csv').read_bytes())


def test_missing_file(tmp_path):
    with pytest.raises(DatasetError):
        load_csv(tmp_path / 'nope.csv')


def test_wrong_column_count(tmp_path):
    path = _write_csv(tmp_path / 'd.csv', FEATURE_NAMES[:29] + ('Result',),
                      [r[:29] + [r[30]] for r in _rows(2)])
    with pytest.raises(DatasetError, match='Expected 31 columns'):
        load_csv(path)


def test_unknown_and_duplicate_headers(tmp_path):
    header = ('bogus',) + FEATURE_NAMES[1:] + ('Result',)
    with pytest.raises(DatasetError) as err:
        load_csv(_write_csv(tmp_path / 'a.csv', header, _rows(1)))
    assert err.value.column == 'bogus'

    header = (FEATURE_NAMES[1],) + FEATURE_NAMES[1:] + ('Result',)
    with pytest.raises(DatasetError, match='Duplicate'):
        load_csv(_write_csv(tmp_path / 'b.csv', header, _rows(1)))


def test_cell_errors_name_row_and_column(tmp_path):
    rows = _rows(3)
    rows[1][4] = 'x'
    with pytest.raises(DatasetError) as err:
        load_csv(_write_csv(tmp_path / 'a.csv', FEATURE_NAMES + ('Result',),
                            rows))
    assert err.value.row == 2
    assert err.value.column == FEATURE_NAMES[4]

    rows = _rows(3)
    rows[2][7] = 2
    with pytest.raises(DatasetError) as err:
        load_csv(_write_csv(tmp_path / 'b.csv', FEATURE_NAMES + ('Result',),
                            rows))
    assert (err.value.row, err.value.column) == (3, FEATURE_NAMES[7])

    rows = _rows(3)
    rows[0][30] = 0
    with pytest.raises(DatasetError) as err:
        load_csv(_write_csv(tmp_path / 'c.csv', FEATURE_NAMES + ('Result',),
                            rows))
    assert (err.value.row, err.value.column) == (1, 'Result')

    rows = _rows(2)
    rows[1][0] = ''
    with pytest.raises(DatasetError, match='Missing'):
        load_csv(_write_csv(tmp_path / 'd.csv', FEATURE_NAMES + ('Result',),
                            rows))


def test_load_feature_csv_label_optional(tmp_path):
    rows = [r[:30] for r in _rows(2)]
    X = load_feature_csv(_write_csv(tmp_path / 'a.csv', FEATURE_NAMES, rows))
    assert X.shape == (2, 30)
    X2 = load_feature_csv(_write_csv(tmp_path / 'b.csv',
                                     FEATURE_NAMES + ('Result',), _rows(2)))
    assert np.array_equal(X, X2)


def test_dataset_validation():
    s = canonical_schema()
    with pytest.raises(ValueError):
        Dataset(s, np.zeros((2, 30)), [1])
    with pytest.raises(DatasetError):
        Dataset(s, np.zeros((1, 30)), [0])
    with pytest.raises(ValueError):
        LabeledSample((0,)*30, 2)


def test_dataset_is_read_only(small):
    with pytest.raises(ValueError):
        small.X[0, 0] = 1


def test_samples_and_subset(small):
    assert len(small.samples) == len(small)
    assert small[3].label == small.y[3]
    sub = small.subset([5, 2])
    assert sub[0] == small[5]
    assert sub[1] == small[2]
    assert Dataset.from_samples(small.samples) == small
    assert small.class_counts() == (30, 30)


def test_summarize_sample_std():
    s = canonical_schema()
    X = np.zeros((4, 30), dtype=int)
    X[:, 0] = [1, 1, -1, 1]
    d = Dataset(s, X, [1, -1, 1, 1])
    stats = summarize(d)
    assert list(stats.index[:1]) == ['Having IP Address']
    assert stats.index[-1] == 'Result'
    assert stats.loc['Having IP Address', 'mean'] == pytest.approx(.5)
    # values 1, 1, -1, 1: squared deviations sum to 3, over n - 1
    assert stats.loc['Having IP Address', 'std'] == pytest.approx(1.)
    assert stats.loc['URL Length', 'std'] == 0
    pop = summarize(d, ddof=0)
    assert pop.loc['Having IP Address', 'std'] == pytest.approx(np.sqrt(.75))


def test_summarize_single_row_and_empty():
    s = canonical_schema()
    stats = summarize(Dataset(s, np.ones((1, 30)), [1]))
    assert (stats['std'] == 0).all()
    with pytest.raises(DatasetError):
        summarize(Dataset(s, np.zeros((0, 30)), []))


def _check_plan(d, plan, k):
    folds = plan.folds()
    assert len(folds) == k
    everything = np.sort(np.concatenate(folds))
    assert np.array_equal(everything, np.arange(len(d)))
    sizes = [f.size for f in folds]
    assert max(sizes) - min(sizes) <= 1
    for label in (-1, 1):
        per_fold = [int(np.sum(d.y[f] == label)) for f in folds]
        assert max(per_fold) - min(per_fold) <= 1


def test_stratified_kfold_properties():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        k = int(rng.integers(2, 11))
        n_neg = int(rng.integers(k, 4*k + 5))
        n_pos = int(rng.integers(k, 4*k + 5))
        y = rng.permutation(np.r_[-np.ones(n_neg), np.ones(n_pos)])
        X = rng.integers(-1, 2, size=(y.size, 30))
        d = Dataset(canonical_schema(), X, y)
        seed = int(rng.integers(0, 2**31))
        plan = stratified_kfold(d, k, seed)
        _check_plan(d, plan, k)
        assert stratified_kfold(d, k, seed) == plan


def test_stratified_kfold_errors(small):
    with pytest.raises(ValueError):
        stratified_kfold(small, 1, 0)
    with pytest.raises(ValueError):
        stratified_kfold(small, 31, 0)


def test_stratified_kfold_seed_changes_plan(medium):
    assert (stratified_kfold(medium, 10, 1).assignments
            != stratified_kfold(medium, 10, 2).assignments)


def test_fold_plan_json(medium):
    plan = stratified_kfold(medium, 5, 7)
    text = plan.to_json()
    assert json.loads(text)['k'] == 5
    back = FoldPlan.from_json(text)
    assert back == plan
    assert back.digest() == plan.digest()
    assert len(plan.digest()) == 64


def test_holdout_split(medium):
    train, test = holdout_split(medium, .25, 3)
    assert len(test) == 50
    assert len(train) + len(test) == len(medium)
    n_phish, n_legit = medium.class_counts()
    t_phish, t_legit = test.class_counts()
    assert abs(t_phish - .25*n_phish) <= 1
    assert abs(t_legit - .25*n_legit) <= 1
    rows = {tuple(s.features) + (s.label,) for s in medium}
    assert {tuple(s.features) + (s.label,) for s in train} <= rows
    a, b = holdout_split(medium, .25, 3)
    assert a == train and b == test


def test_holdout_split_two_samples():
    d = make_dataset(n=2, seed=0)
    train, test = holdout_split(d, .5, 0)
    assert train.y.tolist() == [1]
    assert test.y.tolist() == [-1]


def test_holdout_split_errors(small):
    for bad in (0, 1, 1.5):
        with pytest.raises(ValueError):
            holdout_split(small, bad, 0)
    tiny = make_dataset(n=2, seed=0)
    with pytest.raises(ValueError):
        holdout_split(tiny, .1, 0)


def test_snapshot_description_table(snapshot):
    assert len(snapshot) == 11055
    assert snapshot.class_counts() == (4898, 6157)
    stats = summarize(snapshot)
    expected = {
        'Having IP Address': (.3137, .9495),
        'Result': (.1138, .9935),
    }
    for name, (mean, std) in expected.items():
        assert stats.loc[name, 'mean'] == pytest.approx(mean, abs=5e-5)
        assert stats.loc[name, 'std'] == pytest.approx(std, abs=5e-5)


def test_stratified_mask_keeps_class_shares():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n_phish, n_legit = rng.integers(1, 40, size=2)
        y = rng.permutation([-1]*n_phish + [1]*n_legit)
        n_take = int(rng.integers(1, y.size))
        mask = stratified_mask(y, n_take/y.size, n_take, rng)
        assert mask.sum() == n_take
        assert abs(np.sum(mask & (y < 0)) - n_take/y.size*n_phish) < 1
        assert abs(np.sum(mask & (y > 0)) - n_take/y.size*n_legit) < 1
