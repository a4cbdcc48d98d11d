"""Synthetic models, experiment suites, benches, figures, and the CLI."""
