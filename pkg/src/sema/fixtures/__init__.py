"""Bundled example storyboards."""

from importlib import resources

NAMES = ("messenger", "messenger_private", "messenger_fixed")


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.sb")


def source(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
