"""Entry point for running nh_eur as a module."""

from .cli import app

if __name__ == "__main__":
    app()
