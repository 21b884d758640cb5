# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

from setuptools import find_packages, setup

setup(
    name='gaussdyn',
    version='0.1.0',
    description='Entanglement dynamics of two cavity modes under engineered squeezed reservoirs',
    packages=find_packages(exclude=['tests*']),
    zip_safe=False,
    dependency_links=[],
    include_package_data=True,
    install_requires=[
        'flask>=2.0',
        'marshmallow>=3.13',
        'numpy>=1.19',
        'overrides>=3.1',
        'scipy>=1.5',
        'typing_extensions>=3.7.4',
    ],
    python_requires=">=3.7",
    package_data={'gaussdyn': ['py.typed']},
    entry_points={
        'console_scripts': ['gaussdyn = gaussdyn.cli:main'],
    },
    classifiers=[
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
    ],
)
