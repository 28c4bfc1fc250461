"""Setup script for copyless-check package."""

from setuptools import setup

if __name__ == "__main__":
    setup()
