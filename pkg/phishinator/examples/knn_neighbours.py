"""KNN accuracy as the number of neighbours grows."""

import matplotlib.pyplot as plt

from phishinator import sweep
from phishinator.examples._data import snapshot


if __name__ == '__main__':

    ks = (1, 3, 5, 7, 9, 15, 25, 50)
    res = sweep(snapshot(), None, 'knn-k', ks, n_jobs=-1)
    for name in ('accuracy', 'f1'):
        plt.plot(ks, [getattr(r.aggregate, name) for r in res.reports],
                 'o-', label=name)
    plt.xlabel('k')
    plt.title('KNN with different k')
    plt.legend()
    plt.show()
