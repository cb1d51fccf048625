__version__ = "0.0.1"
TOOL_NAME = "qudit-thresholds"
