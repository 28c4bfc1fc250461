"""Entry point for running copyless-check as a module."""

from copyless_check.cli import main

if __name__ == "__main__":
    main()
