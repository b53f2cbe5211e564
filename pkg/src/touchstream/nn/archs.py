"""The four model architectures.

All are CNN-LSTM stacks over 2 kHz aligned windows except the fingertip
regressor, which merges covariance features of the EMG block with a
depthwise-separable branch over the IR/IMU block.  Convolutions are valid
(no padding) so the documented intermediate lengths are exact.
"""

import numpy as np

from touchstream.errors import ValidationError

from .layers import (
    Conv1d,
    CovarianceFeatures,
    Dense,
    DepthwiseSeparableConv1d,
    Downsample2,
    Flatten,
    InputNorm,
    LogSoftmax,
    LSTM,
    MaxPool1d,
    ToTimeMajor,
)
from .model import Branch2, Model, Sequential

ARCH_IDS = ("world_touch", "body_touch", "fingertip", "gesture")

EVENT_CLASSES = ("null", "onset", "offset")
GESTURE_CLASSES = ("null", "tap", "swipe_left", "swipe_right", "swipe_up", "swipe_down")

INPUT_SPECS = {
    "world_touch": (18, 2000),
    "body_touch": (4, 500),
    "fingertip": (18, 400),
    "gesture": (10, 2000),
}

COV_SUBWINDOW = 40
COV_STRIDE = 12


def _event_cnn_lstm(channels, length, classes, rng):
    return Sequential(
        [
            InputNorm("norm", channels),
            Conv1d("conv1", channels, 32, 67, 5, rng),
            MaxPool1d("pool1", 3),
            Conv1d("conv2", 32, 32, 23, 3, rng),
            MaxPool1d("pool2", 2),
            Conv1d("conv3", 32, 16, 7, 1, rng),
            ToTimeMajor("to_steps"),
            LSTM("lstm", 16, 128, return_sequences=False, rng=rng),
            Dense("head", 128, classes, rng=rng),
            LogSoftmax("logprob"),
        ]
    )


def build_model(arch_id, seed=0):
    """Construct an architecture with randomly initialized weights."""
    if arch_id not in ARCH_IDS:
        raise ValidationError(f"unknown architecture id '{arch_id}'")
    rng = np.random.default_rng(seed)
    channels, length = INPUT_SPECS[arch_id]

    if arch_id == "world_touch":
        stack = _event_cnn_lstm(channels, length, 3, rng)
        return Model(arch_id, stack, (channels, length), "logprobs", EVENT_CLASSES)

    if arch_id == "gesture":
        stack = _event_cnn_lstm(channels, length, len(GESTURE_CLASSES), rng)
        return Model(arch_id, stack, (channels, length), "logprobs", GESTURE_CLASSES)

    if arch_id == "body_touch":
        stack = Sequential(
            [
                InputNorm("norm", channels),
                Downsample2("down"),
                Conv1d("conv1", channels, 60, 35, 1, rng),
                MaxPool1d("pool1", 2),
                Conv1d("conv2", 60, 60, 15, 1, rng),
                MaxPool1d("pool2", 2),
                Conv1d("conv3", 60, 30, 9, 1, rng),
                ToTimeMajor("to_steps"),
                LSTM("lstm", 30, 60, return_sequences=True, rng=rng),
                Dense("head", 60, 3, rng=rng),
                LogSoftmax("logprob"),
            ]
        )
        return Model(arch_id, stack, (channels, length), "logprobs_steps", EVENT_CLASSES)

    # fingertip: EMG covariance branch + IR/IMU depthwise-separable branch
    emg_branch = Sequential(
        [
            CovarianceFeatures("emg_cov", COV_SUBWINDOW, COV_STRIDE),
            Flatten("emg_flat"),
        ]
    )
    motion_branch = Sequential(
        [
            Downsample2("down"),
            DepthwiseSeparableConv1d("dwsep1", 10, 40, 11, 1, rng),
            MaxPool1d("pool1", 2),
            DepthwiseSeparableConv1d("dwsep2", 40, 40, 5, 1, rng),
            MaxPool1d("pool2", 2),
            Flatten("motion_flat"),
        ]
    )
    n_emg = 64 * ((400 - COV_SUBWINDOW) // COV_STRIDE + 1)  # 64 x 31
    n_motion = 40 * 45
    stack = Sequential(
        [
            InputNorm("norm", channels),
            Branch2("branches", 8, emg_branch, motion_branch),
            Dense("fc1", n_emg + n_motion, 20, relu=True, rng=rng),
            Dense("fc2", 20, 2, rng=rng),
        ]
    )
    return Model(arch_id, stack, (channels, length), "regression")


def conv_chain_lengths(model):
    """Time-axis lengths after each conv/pool stage of the main stack."""
    shape = model.input_shape
    lengths = []
    for layer in model.stack.layers:
        shape = layer.out_shape(shape)
        if isinstance(layer, (Conv1d, MaxPool1d, Downsample2, DepthwiseSeparableConv1d)):
            lengths.append(shape[1])
    return lengths
