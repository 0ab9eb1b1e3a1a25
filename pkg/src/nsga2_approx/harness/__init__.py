"""Experiment configuration, statistics, orchestration and the command line."""
