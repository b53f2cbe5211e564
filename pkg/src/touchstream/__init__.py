"""touchstream: hardware-free multimodal wristband touch sensing pipeline.

Subpackages:
    sim       scenario scripting and synthetic sensor stream generation
    ingest    wire protocol, recording files, resampling, windowing
    nn        minimal neural-network core and the four model architectures
    tracking  orientation filter, dead reckoning, fingertip post-processing
    events    touch event post-processing, timeline, gestures, surface gate
    runtime   graph-based streaming pipeline (deterministic + concurrent)
    evalkit   classification/event/regression metrics and pointing-task math
    kernels   compiled/NumPy compute kernel backends
"""

__version__ = "0.1.0"
