"""Post-quantum key exchange over an intermittent CSP radio link, simulated."""

__version__ = "0.1.0"
