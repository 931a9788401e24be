# pylint: disable=missing-module-docstring
import setuptools  # type: ignore

with open('README.md', 'r', encoding='utf8') as fh:
    long_description = fh.read()

setuptools.setup(
    name="marketlab",
    version="0.1.0",
    description="Equilibria, verification and parameter sweeps for two-stage "
                "electricity markets",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['tests', 'tests.*']),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.10',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'pandas>=1.5'
    ],
    entry_points={
        'console_scripts': [
            'marketlab=marketlab.__main__:main',
        ],
    }
)
