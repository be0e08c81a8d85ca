"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A structurally valid input asks for something unsupported or
    inconsistent (e.g. an unbounded kernel integral)."""


class ScenarioError(ValueError):
    """A scenario document failed validation; the message names the
    offending key or constraint."""
