"""secretrisk: find hard-coded database secret-asset pairs and rank them by risk."""

__version__ = "0.1.0"
