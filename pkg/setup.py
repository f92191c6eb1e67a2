import sys

from setuptools import find_packages, setup

if sys.version_info.major != 3:
    print("This module is only compatible with Python 3, but you are running "
          "Python {}. The installation will likely fail.".format(sys.version_info.major))

setup(
    name='steady_euler',
    version='0.0.1',
    packages=find_packages(),
    install_requires=[
        'numpy >= 1.17',
        'scipy >= 1.3',
        'tqdm',
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        'console_scripts': ['steady-euler = steady_euler.cli:main'],
    },
)
