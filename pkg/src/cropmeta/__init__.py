"""Hybrid meta-modeling toolkit for potato yield prediction.

A process-based crop simulator generates synthetic training data for a
three-stream convolutional network; the pretrained network is fine-tuned
on scarce target data and benchmarked against a purely data-driven
network and an expert linear regression.
"""

__version__ = "0.1.0"
