# setup.py

from setuptools import setup, find_packages

setup(
    name="qklab",
    version="0.1.0",
    description="Noisy quantum-kernel SVM laboratory",
    author="qklab developers",
    packages=find_packages(),
    package_data={"qklab": ["configs/*.cfg"]},
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "pandas>=1.5",
        "networkx>=2.0",
        "scikit-learn>=1.1",
    ],
    extras_require={"test": ["pytest>=7"]},
    entry_points={"console_scripts": ["qklab=qklab.cli:main"]},
    python_requires=">=3.9",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
)
