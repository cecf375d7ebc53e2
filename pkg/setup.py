#!/usr/bin/env python
# setup.py

"""
twounitary setup file

"""
# http://python-packaging-user-guide.readthedocs.org/en/latest/distributing/

from setuptools import setup, find_packages
from codecs import open
from os import path

from twounitary.version import VERSION

here = path.abspath(path.dirname(__file__))

# -----------------------------------------------------------------------------
# Get the long description from the README file
# -----------------------------------------------------------------------------
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

# -----------------------------------------------------------------------------
# setup args
# -----------------------------------------------------------------------------
setup(
    name='twounitary',

    version=VERSION,

    description='2-unitary operators and AME(4,d) states: construction, '
                'verification and local-unitary classification',
    long_description=long_description,

    author='the twounitary authors',

    license='Apache License, Version 2.0',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',

        'License :: OSI Approved :: Apache Software License',

        'Natural Language :: English',

        'Operating System :: OS Independent',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',  # math.isqrt
        'Programming Language :: Python :: 3 :: Only',

        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],

    keywords='quantum 2-unitary dual-unitary AME entanglement latin squares',

    packages=find_packages(),  # finds all the .py files in subdirectories
    package_data={
        'twounitary': [
            'data/*.mat',
            'data/*.txt',
        ],
    },

    python_requires='>=3.8',

    install_requires=[
        # ---------------------------------------------------------------------
        # Standard PyPI packages
        # ---------------------------------------------------------------------
        # FIX PACKAGE NUMBERS EXACTLY, FOR CONSISTENCY.
        'arrow==1.3.0',  # better datetime
        'colorlog==6.8.0',  # coloured console logging
        'numpy==1.26.4',  # dense complex linear algebra
        'opt_einsum==3.3.0',  # tensor network contraction paths
        'scipy==1.11.4',  # Haar sampling, QR, Schur
        'SQLAlchemy==2.0.25',  # database ORM (optional run ledger)

        # ---------------------------------------------------------------------
        # Database connections (SQLite is built in)
        # ---------------------------------------------------------------------
        # Other backends: install the SQLAlchemy driver of your choice.
    ],

    extras_require={
        'dev': [
            'flake8==7.0.0',
            'hypothesis==6.92.0',
            'pytest==7.4.4',
            'sympy==1.12',  # exact rank oracle in tests
        ],
    },

    entry_points={
        'console_scripts': [
            # Format is 'script=module:function".
            'twounitary=twounitary.main:main',
        ],
    },
)
