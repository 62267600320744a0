"""Cross-talk error estimates for cavity-mediated iSWAP gates."""

__version__ = "0.1.0"
