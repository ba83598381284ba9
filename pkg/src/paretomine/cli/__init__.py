from paretomine.cli.main import main

__all__ = ["main"]
