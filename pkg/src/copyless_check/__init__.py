"""copyless-check - session types for copyless message passing."""

__version__ = "0.1.0"
__author__ = "copyless-check contributors"
