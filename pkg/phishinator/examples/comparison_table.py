"""Cross-validate all twelve classifiers and print the comparison table."""

from phishinator import cross_validate, emit_report
from phishinator.evaluation import battery_specs
from phishinator.examples._data import snapshot


if __name__ == '__main__':

    d = snapshot()
    reports = []
    for name, spec in battery_specs(seed=42):
        print('Running %s...' % name)
        reports.append(cross_validate(d, spec, k=10, seed=42, n_jobs=-1,
                                      name=name))
    print(emit_report(reports, 'text'))
