#!/usr/bin/env python
"""Command-line entry point: evaluate, sweep, boundary, validate and the Django built-ins."""
import os
import sys


def main():
    """Run management commands."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "_settings.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the packages from requirements.txt "
            "into the active virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
