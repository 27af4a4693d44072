from setuptools import setup, find_packages

setup(
    name='LayerPotExplorerPy',
    version='0.1.0',
    description='A Python package to assemble, verify and study two-dimensional Laplace layer-potential operators on smooth and perforated domains.',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'numpy',
        'scipy',
        'sympy',
        'pandas>=1.5',
    ],
    entry_points={
        'console_scripts': [
            'layerpot-explorer=layerpot_explorer_py.cli.main:main',
        ],
    },
    classifiers=[
        'Programming Language :: Python :: 3',
        'Operating System :: OS Independent',
    ],
    python_requires='>=3.8',
)
