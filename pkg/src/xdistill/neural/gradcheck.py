"""Central finite-difference validation of analytic gradients."""
from __future__ import annotations

import numpy as np


def gradient_check(model, objective, x, rows=None, epsilon=1e-5):
    """Max relative error between analytic and numeric gradients.

    Checks every trainable parameter of the model against central finite
    differences of the objective. Dropout is disabled; batchnorm layers run
    on batch statistics so their parameters receive real gradients.
    Relative error: |a - f| / (|a| + |f| + 1e-12).
    """
    x = np.asarray(x, dtype=np.float64)
    if rows is None:
        rows = np.arange(x.shape[0])

    def loss_value():
        logits = model.forward(x, batch_stats=True, dropout_rng=None)
        return objective.value(logits, rows)

    logits = model.forward(x, batch_stats=True, dropout_rng=None)
    _, dlogits = objective.value_and_grad(logits, rows)
    analytic = model.backward(dlogits)

    worst = 0.0
    params = model.parameters()
    for p, g in zip(params, analytic):
        flat = p.reshape(-1)
        gflat = np.asarray(g).reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + epsilon
            f_plus = loss_value()
            flat[j] = orig - epsilon
            f_minus = loss_value()
            flat[j] = orig
            numeric = (f_plus - f_minus) / (2.0 * epsilon)
            a = gflat[j]
            rel = abs(a - numeric) / (abs(a) + abs(numeric) + 1e-12)
            if rel > worst:
                worst = rel
    return worst
