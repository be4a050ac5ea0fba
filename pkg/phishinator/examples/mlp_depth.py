"""Neural network accuracy against the number of hidden layers."""

import matplotlib.pyplot as plt

from phishinator import sweep
from phishinator.examples._data import snapshot


if __name__ == '__main__':

    depths = (1, 2, 4, 8, 16, 30)
    res = sweep(snapshot(), None, 'mlp-depth', depths, n_jobs=-1)
    acc = [r.aggregate.accuracy for r in res.reports]
    plt.plot(depths, acc, 'o-')
    plt.xlabel('hidden layers (30 units each)')
    plt.ylabel('accuracy')
    plt.title('Neural network with different depth')
    plt.show()
