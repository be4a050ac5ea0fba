"""Compare SVM kernels with a 10-fold sweep."""

import numpy as np
import matplotlib.pyplot as plt

from phishinator import sweep
from phishinator.examples._data import snapshot


if __name__ == '__main__':

    res = sweep(snapshot(), None, 'svm-kernel', n_jobs=-1)
    names = ('accuracy', 'recall', 'precision', 'f1')
    vals = np.array([[getattr(r.aggregate, n) or 0 for n in names]
                     for r in res.reports])

    # One group of bars per kernel
    x = np.arange(len(res.axis_values))
    w = .8/len(names)
    for ii, n in enumerate(names):
        plt.bar(x + ii*w, vals[:, ii], width=w, label=n)
    plt.xticks(x + .4 - w/2, res.axis_values)
    plt.ylim(vals.min() - .05, 1)
    plt.title('SVM with various kernels')
    plt.legend()
    plt.show()
