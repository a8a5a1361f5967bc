"""Chat-driven building agent: grid world, instruction parsing, planning, concept learning."""

__version__ = "0.1.0"
