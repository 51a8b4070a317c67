"""Cross-cultural interpretation platform for Traditional Chinese Paintings."""

from importlib import resources

__version__ = "0.1.0"


def fixture_root() -> str:
    """Path to the desk-scale dataset fixture shipped with the package."""
    return str(resources.files(__package__) / "fixture")
