"""scikit-learn compatible wrapper around the greedy engines."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dictionary import Dictionary
from .engines import AlgorithmConfig, run


class GreedyApproximator(TransformerMixin, BaseEstimator):
    """Encode vectors as greedy approximations over a fixed dictionary.

    Each row of ``X`` is approximated independently. ``transform`` returns
    signed atom coefficients, so ``inverse_transform(transform(X))`` gives the
    approximants. Like :class:`sklearn.decomposition.SparseCoder`, ``fit``
    learns nothing from the data; it only validates the dictionary.

    Parameters
    ----------
    dictionary : array-like of shape (n_atoms, n_features)
        Unit-norm atoms, one per symmetric pair ``{g, -g}``.
    algorithm : {"pga", "rga", "prga", "crga"}, default="crga"
    n_iterations : int, default=100
    alpha : float, default=1.0
        Relaxation power, used by ``"prga"`` only.
    stop_epsilon : float, default=1e-14
        Stop a row early once its residual norm drops below this value.

    Attributes
    ----------
    dictionary_ : Dictionary
    components_ : ndarray of shape (n_atoms, n_features)
    n_features_in_ : int

    Examples
    --------
    >>> import numpy as np
    >>> from relaxed_greedy import GreedyApproximator
    >>> est = GreedyApproximator(np.eye(2), algorithm="pga", n_iterations=2)
    >>> est.fit_transform([[0.6, 0.4]])
    array([[0.6, 0.4]])
    """

    def __init__(self, dictionary=None, algorithm="crga", n_iterations=100, alpha=1.0,
                 stop_epsilon=1e-14):
        self.dictionary = dictionary
        self.algorithm = algorithm
        self.n_iterations = n_iterations
        self.alpha = alpha
        self.stop_epsilon = stop_epsilon

    def _config(self):
        return AlgorithmConfig(
            kind=self.algorithm,
            alpha=self.alpha,
            max_iterations=self.n_iterations,
            stop_epsilon=self.stop_epsilon,
        )

    def fit(self, X, y=None):
        if self.dictionary is None:
            raise ValueError("GreedyApproximator requires a dictionary")
        self._config()
        d = self.dictionary if isinstance(self.dictionary, Dictionary) else Dictionary(self.dictionary)
        X = check_array(X)
        if X.shape[1] != d.dim:
            raise ValueError(f"X has {X.shape[1]} features, dictionary atoms have {d.dim}")
        self.dictionary_ = d
        self.components_ = np.asarray(d.atoms)
        self.n_features_in_ = d.dim
        return self

    def _check_X(self, X):
        check_is_fitted(self, "dictionary_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} is expecting "
                f"{self.n_features_in_} features as input"
            )
        return X

    def transform(self, X):
        """Signed atom coefficients, shape (n_samples, n_atoms)."""
        X = self._check_X(X)
        cfg = self._config()
        codes = np.empty((X.shape[0], self.dictionary_.n_atoms))
        for i, x in enumerate(X):
            codes[i] = run(x, self.dictionary_, cfg).coefficients
        return codes

    def inverse_transform(self, X):
        check_is_fitted(self, "dictionary_")
        X = check_array(X)
        return X @ self.components_

    def trace(self, x, label=""):
        """Full iteration trace for a single vector."""
        X = self._check_X(np.atleast_2d(x))
        if X.shape[0] != 1:
            raise ValueError("trace expects a single sample")
        return run(X[0], self.dictionary_, self._config(), label=label)

    def score(self, X, y=None):
        """Negative mean residual norm of the approximants."""
        X = self._check_X(X)
        cfg = self._config()
        errs = [run(x, self.dictionary_, cfg).final_residual_l2 for x in X]
        return -float(np.mean(errs))
