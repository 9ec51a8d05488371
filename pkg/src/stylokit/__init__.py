"""stylokit: corpus preparation, style features, divergence metrics and
LoRA adapter merging for author-style experiments."""

__version__ = "0.1.0"
