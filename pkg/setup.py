#!/usr/bin/env python

import setuptools

setuptools.setup(name='subres',
                 version='0.1',
                 description='Capacitance matrices and nonlinear subwavelength resonances of sphere systems.',
                 packages=setuptools.find_packages(exclude=['tests', 'examples', 'examples.*']),
                 package_data={'subres': ['data/*.cfg']},
                 python_requires='>=3.9',
                 install_requires=['numpy',
                                   'scipy',
                                   'pandas',
                                   'matplotlib',
                                   'psutil'],
                 extras_require={'test': ['pytest']},
                 entry_points={'console_scripts': ['subres=subres.cli.cli:main']},
                )
