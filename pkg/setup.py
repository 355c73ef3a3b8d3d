#!/usr/bin/env python
"""
Setup script for bandsel.
"""

from setuptools import setup, find_packages
import os

# Read the version from __init__.py
with open(os.path.join('bandsel', '__init__.py'), 'r') as f:
    for line in f:
        if line.startswith('__version__'):
            version = line.split('=')[1].strip().strip("'\"")
            break
    else:
        version = '0.1.0'

# Read long description from README.md
with open('README.md', 'r', encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='bandsel',
    version=version,
    description='Kernel trend estimation and Mallows CL bandwidth selection under ARCH noise',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='bandsel Contributors',
    packages=find_packages(),
    include_package_data=True,
    install_requires=[
        'click>=8.0.0',
        'python-dotenv>=0.15.0',
        'pyyaml>=6.0.1',
        'numpy>=1.22.0',
        'scipy>=1.9.0',
        'pandas>=1.4.0',
        'joblib>=1.1.0',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'pytest-cov>=4.0.0',
        ],
    },
    entry_points={
        'console_scripts': [
            'bandsel=bandsel.cli:run',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: 3.13',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.9',
    keywords='kernel smoothing, bandwidth selection, mallows cl, arch, monte carlo',
)
