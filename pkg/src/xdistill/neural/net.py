"""Multilayer perceptron: architecture spec, parameters, forward/backward.

Hidden layers apply linear -> (batchnorm) -> ReLU -> (dropout), then any
configured skip connection adds the output of an earlier equal-width layer.
The output layer is linear; losses and metrics apply softmax where needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BN_EPS = 1e-5
BN_MOMENTUM = 0.9


@dataclass(frozen=True)
class MlpSpec:
    layer_widths: tuple
    dropout_rates: tuple
    batchnorm: tuple
    skip_blocks: tuple = ()
    output_dim: int = 1
    task: str = "classification"

    def __post_init__(self):
        widths = tuple(int(w) for w in self.layer_widths)
        drops = tuple(float(d) for d in self.dropout_rates)
        bns = tuple(bool(b) for b in self.batchnorm)
        skips = tuple((int(a), int(b)) for a, b in self.skip_blocks)
        if not widths:
            raise ValueError("need at least one hidden layer")
        if len(drops) != len(widths) or len(bns) != len(widths):
            raise ValueError("dropout_rates and batchnorm must match layer count")
        if any(not (0.0 <= d < 1.0) for d in drops):
            raise ValueError("dropout rates must lie in [0, 1)")
        if self.output_dim < 1:
            raise ValueError("output_dim must be positive")
        for a, b in skips:
            if not (0 <= a < b < len(widths)):
                raise ValueError(f"skip block ({a}, {b}) out of order or range")
            if widths[a] != widths[b]:
                raise ValueError(
                    f"skip block ({a}, {b}) connects widths {widths[a]} != {widths[b]}"
                )
        object.__setattr__(self, "layer_widths", widths)
        object.__setattr__(self, "dropout_rates", drops)
        object.__setattr__(self, "batchnorm", bns)
        object.__setattr__(self, "skip_blocks", skips)

    @property
    def n_hidden(self):
        return len(self.layer_widths)


def _preset(widths, dropout=0.0, batchnorm=False, skips=()):
    n = len(widths)
    return {
        "layer_widths": tuple(widths),
        "dropout_rates": (dropout,) * n,
        "batchnorm": (batchnorm,) * n,
        "skip_blocks": tuple(skips),
    }


ARCHITECTURES = {
    "standard": _preset((128, 64, 32), dropout=0.3),
    "deep": _preset((256, 128, 64, 32), batchnorm=True),
    "wide": _preset((512, 256, 64), dropout=0.4),
    "compact": _preset((64, 32), dropout=0.2),
    "residual": _preset((128, 128, 64), dropout=0.3, skips=((0, 1),)),
}


def spec_for(arch, output_dim, task):
    if isinstance(arch, MlpSpec):
        return arch
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}; choose from {sorted(ARCHITECTURES)}")
    return MlpSpec(output_dim=output_dim, task=task, **ARCHITECTURES[arch])


class MlpModel:
    """Parameter container with forward/backward passes."""

    def __init__(self, spec, input_dim, seed=0):
        if input_dim < 1:
            raise ValueError("input_dim must be positive")
        self.spec = spec
        self.input_dim = input_dim
        self.seed = seed
        self.history = {}
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self.weights = []
        self.biases = []
        self.gammas = []
        self.betas = []
        self.running_mean = []
        self.running_var = []
        fan_in = input_dim
        for width, use_bn in zip(spec.layer_widths, spec.batchnorm):
            limit = np.sqrt(6.0 / fan_in)
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, width)))
            if use_bn:
                # the batchnorm shift makes a pre-normalization bias redundant
                self.biases.append(None)
                self.gammas.append(np.ones(width))
                self.betas.append(np.zeros(width))
                self.running_mean.append(np.zeros(width))
                self.running_var.append(np.ones(width))
            else:
                self.biases.append(np.zeros(width))
                self.gammas.append(None)
                self.betas.append(None)
                self.running_mean.append(None)
                self.running_var.append(None)
            fan_in = width
        limit = np.sqrt(6.0 / fan_in)
        self.out_weight = rng.uniform(-limit, limit, size=(fan_in, spec.output_dim))
        self.out_bias = np.zeros(spec.output_dim)

    # -- parameter plumbing ------------------------------------------------
    def parameters(self):
        """Flat list of trainable arrays in a fixed order."""
        params = []
        for i in range(self.spec.n_hidden):
            params.append(self.weights[i])
            if self.biases[i] is not None:
                params.append(self.biases[i])
            if self.gammas[i] is not None:
                params.append(self.gammas[i])
                params.append(self.betas[i])
        params.append(self.out_weight)
        params.append(self.out_bias)
        return params

    def set_parameters(self, arrays):
        for target, source in zip(self.parameters(), arrays):
            target[...] = source

    def copy_parameters(self):
        return [p.copy() for p in self.parameters()]

    def n_parameters(self):
        return sum(p.size for p in self.parameters())

    # -- forward / backward ------------------------------------------------
    def forward(self, x, batch_stats=False, dropout_rng=None, update_running=False,
                return_hidden=False):
        """Compute logits.

        batch_stats: batchnorm uses batch statistics (training) instead of
        running averages. dropout_rng: draw dropout masks (None disables
        dropout). update_running: fold batch statistics into the running
        averages (training steps only).
        """
        spec = self.spec
        a = np.asarray(x, dtype=np.float64)
        skip_from = {b: a_ for a_, b in spec.skip_blocks}
        cache = {"inputs": [], "z": [], "zn": [], "inv_std": [], "masks": [],
                 "outputs": [], "batch_stats": batch_stats}
        for i in range(spec.n_hidden):
            cache["inputs"].append(a)
            z = a @ self.weights[i]
            if self.biases[i] is not None:
                z = z + self.biases[i]
            cache["z"].append(z)
            if self.gammas[i] is not None:
                if batch_stats:
                    mu = z.mean(axis=0)
                    var = z.var(axis=0)
                    if update_running:
                        self.running_mean[i] = (
                            BN_MOMENTUM * self.running_mean[i] + (1 - BN_MOMENTUM) * mu
                        )
                        self.running_var[i] = (
                            BN_MOMENTUM * self.running_var[i] + (1 - BN_MOMENTUM) * var
                        )
                else:
                    mu = self.running_mean[i]
                    var = self.running_var[i]
                inv_std = 1.0 / np.sqrt(var + BN_EPS)
                zn = (z - mu) * inv_std
                cache["zn"].append(zn)
                cache["inv_std"].append(inv_std)
                h = self.gammas[i] * zn + self.betas[i]
            else:
                cache["zn"].append(None)
                cache["inv_std"].append(None)
                h = z
            h = np.maximum(h, 0.0)
            rate = spec.dropout_rates[i]
            if dropout_rng is not None and rate > 0.0:
                mask = (dropout_rng.random(h.shape) >= rate) / (1.0 - rate)
                h = h * mask
                cache["masks"].append(mask)
            else:
                cache["masks"].append(None)
            if i in skip_from:
                h = h + cache["outputs"][skip_from[i]]
            cache["outputs"].append(h)
            a = h
        logits = a @ self.out_weight + self.out_bias
        self._cache = cache
        if return_hidden:
            return logits, cache["outputs"]
        return logits

    def backward(self, dlogits):
        """Gradients of all parameters given dLoss/dlogits; returns the list
        in parameters() order. Must follow a forward() call."""
        spec = self.spec
        cache = self._cache
        grads_w = [None] * spec.n_hidden
        grads_b = [None] * spec.n_hidden
        grads_g = [None] * spec.n_hidden
        grads_be = [None] * spec.n_hidden

        d_out_w = cache["outputs"][-1].T @ dlogits
        d_out_b = dlogits.sum(axis=0)
        d_h = [np.zeros_like(o) for o in cache["outputs"]]
        d_h[-1] = dlogits @ self.out_weight.T

        skip_from = {b: a_ for a_, b in spec.skip_blocks}
        batch_stats = cache["batch_stats"]
        for i in range(spec.n_hidden - 1, -1, -1):
            dh = d_h[i]
            if i in skip_from:
                d_h[skip_from[i]] = d_h[skip_from[i]] + dh
            mask = cache["masks"][i]
            if mask is not None:
                dh = dh * mask
            # ReLU on the pre-dropout activation
            z = cache["z"][i]
            if self.gammas[i] is not None:
                act_in = self.gammas[i] * cache["zn"][i] + self.betas[i]
            else:
                act_in = z
            dh = dh * (act_in > 0.0)
            if self.gammas[i] is not None:
                zn = cache["zn"][i]
                inv_std = cache["inv_std"][i]
                grads_g[i] = (dh * zn).sum(axis=0)
                grads_be[i] = dh.sum(axis=0)
                dzn = dh * self.gammas[i]
                if batch_stats:
                    dz = (
                        dzn - dzn.mean(axis=0) - zn * (dzn * zn).mean(axis=0)
                    ) * inv_std
                else:
                    dz = dzn * inv_std
            else:
                dz = dh
            grads_w[i] = cache["inputs"][i].T @ dz
            if self.biases[i] is not None:
                grads_b[i] = dz.sum(axis=0)
            if i > 0:
                d_h[i - 1] = d_h[i - 1] + dz @ self.weights[i].T
        grads = []
        for i in range(spec.n_hidden):
            grads.append(grads_w[i])
            if self.biases[i] is not None:
                grads.append(grads_b[i])
            if self.gammas[i] is not None:
                grads.append(grads_g[i])
                grads.append(grads_be[i])
        grads.append(d_out_w)
        grads.append(d_out_b)
        return grads


def build_mlp(arch, input_dim, output_dim, seed=0, task="classification"):
    """Instantiate a preset ('standard', 'deep', 'wide', 'compact',
    'residual') or a custom MlpSpec with He-uniform initial weights."""
    spec = spec_for(arch, output_dim, task)
    return MlpModel(spec, input_dim, seed=seed)
