"""Setup script."""

import setuptools

setuptools.setup(
    name='nlkansa',
    version='0.1.0',
    packages=setuptools.find_packages(exclude=['tests', 'examples', 'examples.*']),
    package_data={'nlkansa': ['config_default.yml', 'presets/*.yml']},
    entry_points={'console_scripts': ['nlkansa=nlkansa.cli:main']},
    install_requires=[
        # Please note: Dependencies must also be added in `docs/conf.py` to `autodoc_mock_imports`.
        'dill',
        'diskcache',
        'multimethod',
        'multiprocess',
        'numpy',
        'pandas',
        'parameterized',  # For tests.
        'pyyaml',
        'scipy',
    ]
)
