from setuptools import setup, find_packages

setup(
    name="moyal-spin",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.24.0",  # Coefficient tensors and matrices
        "scipy>=1.10",    # expm, eigh, Legendre functions and rotations
        "tqdm>=4.66.0"    # Progress bars for validation and surface sampling
    ],
    extras_require={
        "dev": [
            "black>=23.12.0",   # Code formatting
            "flake8>=7.0.0",    # Linting
            "pytest>=7.4.0",    # Testing
            "pytest-cov>=4.1.0" # Test coverage
        ]
    },
    entry_points={"console_scripts": ["moyal-spin=moyal_spin.cli.main:main"]},
    description="Spherical Wigner functions, star products and equations of motion for coupled spins",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    author="Moyal-Spin Team",
    license="MIT",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
        "Intended Audience :: Science/Research",
        "Development Status :: 3 - Alpha"
    ],
    python_requires=">=3.9",
)
