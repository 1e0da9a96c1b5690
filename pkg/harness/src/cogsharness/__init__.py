"""Toy finetuning harness for exposure-controlled COGS-format datasets."""

__version__ = "0.1.0"
