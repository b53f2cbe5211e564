"""Model containers: Sequential stacks, a two-branch merge, and Model."""

import copy

import numpy as np

from touchstream.errors import ValidationError

from .layers import InputNorm, Layer, LogSoftmax


class Sequential:
    def __init__(self, layers):
        self.layers = list(layers)

    def forward(self, x, caches=None):
        for layer in self.layers:
            if caches is None:
                x = layer.forward(x, None)
            else:
                c = []
                x = layer.forward(x, c)
                caches.append(c[0] if c else None)
        return x

    def backward(self, dy, caches):
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dy = layer.backward(dy, cache)
        return dy

    def iter_layers(self):
        for layer in self.layers:
            if isinstance(layer, Branch2):
                yield from layer.iter_layers()
            else:
                yield layer

    def out_shape(self, shape):
        for layer in self.layers:
            shape = layer.out_shape(shape)
        return shape


class Branch2(Layer):
    """Split input channels at ``split_at``, run two stacks, concat outputs.

    Both branch stacks must emit flat [B, N] tensors.
    """

    def __init__(self, name, split_at, branch_a, branch_b):
        super().__init__(name)
        self.split_at = split_at
        self.branch_a = branch_a
        self.branch_b = branch_b

    def forward(self, x, cache=None):
        xa = np.ascontiguousarray(x[:, : self.split_at])
        xb = np.ascontiguousarray(x[:, self.split_at :])
        if cache is None:
            ya = self.branch_a.forward(xa, None)
            yb = self.branch_b.forward(xb, None)
            return np.concatenate([ya, yb], axis=1)
        ca, cb = [], []
        ya = self.branch_a.forward(xa, ca)
        yb = self.branch_b.forward(xb, cb)
        cache.append((ca, cb, ya.shape[1]))
        return np.concatenate([ya, yb], axis=1)

    def backward(self, dy, cache):
        ca, cb, na = cache
        dxa = self.branch_a.backward(np.ascontiguousarray(dy[:, :na]), ca)
        dxb = self.branch_b.backward(np.ascontiguousarray(dy[:, na:]), cb)
        return np.concatenate([dxa, dxb], axis=1)

    def iter_layers(self):
        yield from self.branch_a.iter_layers()
        yield from self.branch_b.iter_layers()

    def out_shape(self, shape):
        c, length = shape
        (na,) = self.branch_a.out_shape((self.split_at, length))
        (nb,) = self.branch_b.out_shape((c - self.split_at, length))
        return (na + nb,)


class MeanOverTime(Layer):
    """[B, T, C] -> [B, C]."""

    def forward(self, x, cache=None):
        if cache is not None:
            cache.append(x.shape[1])
        return x.mean(axis=1)

    def backward(self, dy, cache):
        t = cache
        return np.repeat(dy[:, None, :], t, axis=1) / t

    def out_shape(self, shape):
        t, c = shape
        return (c,)


class Model:
    """A built architecture: layer stack, optional aggregation head, metadata.

    output_kind:
        "logprobs"        stack emits [B, classes] log-probabilities
        "logprobs_steps"  stack emits per-step [B, T, classes]; forward()
                          aggregates (mean log-prob, renormalized) unless
                          per_step=True
        "regression"      stack emits [B, 2]
    """

    def __init__(self, arch_id, stack, input_shape, output_kind, class_names=None):
        self.arch_id = arch_id
        self.stack = stack
        self.input_shape = tuple(input_shape)  # (channels, length)
        self.output_kind = output_kind
        self.class_names = tuple(class_names) if class_names else None
        if output_kind == "logprobs_steps":
            self.agg = Sequential([MeanOverTime("agg_mean"), LogSoftmax("agg_norm")])
        else:
            self.agg = None

    # -- structure ------------------------------------------------------

    def iter_layers(self):
        yield from self.stack.iter_layers()
        if self.agg is not None:
            yield from self.agg.iter_layers()

    def parameters(self):
        out = {}
        for layer in self.iter_layers():
            for key, val in layer.params.items():
                out[f"{layer.name}.{key}"] = val
        return out

    def named_buffers(self):
        out = {}
        for layer in self.iter_layers():
            for key, val in layer.buffers.items():
                out[f"{layer.name}.{key}"] = val
        return out

    def grads(self):
        out = {}
        for layer in self.iter_layers():
            for key, val in layer.grad.items():
                out[f"{layer.name}.{key}"] = val
        return out

    def zero_grad(self):
        for layer in self.iter_layers():
            layer.zero_grad()

    def input_norm(self):
        first = self.stack.layers[0]
        if not isinstance(first, InputNorm):
            raise ValidationError(f"{self.arch_id} has no input normalization layer")
        return first

    def astype(self, dtype):
        m = copy.deepcopy(self)
        for layer in m.iter_layers():
            layer.params = {k: v.astype(dtype) for k, v in layer.params.items()}
            layer.buffers = {k: v.astype(dtype) for k, v in layer.buffers.items()}
            layer.grad = {}
        return m

    def describe(self):
        """Chained (layer name, output shape) pairs for the stack."""
        shape = self.input_shape
        rows = [("input", shape)]
        for layer in self.stack.layers:
            shape = layer.out_shape(shape)
            rows.append((layer.name, shape))
        return rows

    # -- compute --------------------------------------------------------

    def _check_input(self, x):
        if x.ndim != 3 or x.shape[1:] != self.input_shape:
            raise ValidationError(
                f"{self.arch_id} expects input [B, {self.input_shape[0]}, "
                f"{self.input_shape[1]}], got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise ValidationError("model input contains non-finite values")

    def forward(self, x, per_step=False):
        """Inference forward pass (no caches, thread-safe over weights)."""
        x = np.asarray(x)
        if x.ndim == 2:
            x = x[None]
        self._check_input(x)
        y = self.stack.forward(x, None)
        if self.agg is not None and not per_step:
            y = self.agg.forward(y, None)
        return y

    def forward_train(self, x):
        self._check_input(x)
        stack_caches, agg_caches = [], []
        y = self.stack.forward(x, stack_caches)
        if self.agg is not None:
            y = self.agg.forward(y, agg_caches)
        return y, (stack_caches, agg_caches)

    def backward(self, dy, caches):
        stack_caches, agg_caches = caches
        if self.agg is not None:
            dy = self.agg.backward(dy, agg_caches)
        return self.stack.backward(dy, stack_caches)
