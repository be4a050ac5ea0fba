"""Heat map of the feature and label correlations."""

import numpy as np
import matplotlib.pyplot as plt

from phishinator import correlation_matrix
from phishinator.examples._data import snapshot


if __name__ == '__main__':

    d = snapshot()
    corr = correlation_matrix(d)
    plt.figure(figsize=(10, 9))
    plt.imshow(np.ma.masked_invalid(corr.to_numpy()), cmap='RdBu_r',
               vmin=-1, vmax=1)
    labels = list(d.schema.display_names) + ['Result']
    plt.xticks(range(len(labels)), labels, rotation=90, fontsize=6)
    plt.yticks(range(len(labels)), labels, fontsize=6)
    plt.colorbar()
    plt.title('Correlation of features')
    plt.tight_layout()
    plt.show()

    # Features most aligned with the label
    top = corr['Result'].drop('Result').abs().sort_values(ascending=False)
    print(top.head(5).to_string(float_format='%.4f'))
