from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="sym-orbits",
    version="0.1.0",
    description="Symmetric periodic orbits, Floquet data and bifurcation graphs for the restricted three-body problem",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    package_data={"sym_orbits.fixtures": ["*.json", "seeds/*.json"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Astronomy",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pandas>=2.0",
        "networkx>=3.0",
        "PyYAML>=6.0",
    ],
    extras_require={
        "opentelemetry": [
            "opentelemetry-api>=1.20.0",
            "opentelemetry-sdk>=1.20.0",
        ],
        "test": [
            "behave>=1.2.6",
            "pytest>=7.4.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "sym-orbits=sym_orbits.main:main",
        ],
    },
)
