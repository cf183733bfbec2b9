"""Entry point for python -m mimo_antsel."""

from .cli import app

if __name__ == "__main__":
    app()
