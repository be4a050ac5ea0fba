"""Setup.py"""

from setuptools import find_packages, setup


setup(
    name="phishinator",
    version="0.1.0",
    packages=find_packages(),
    package_data={
        "phishinator.tests": ["data/*.json", "data/*.csv"],
    },
    scripts=[],
    license="MIT",
    description="Detect phishing websites from URL, page and domain features.",
    long_description=open("README.rst").read(),
    install_requires=[
        "numpy>=1.24.2",
        "scipy>=1.9.1",
        "pandas>=1.5.0",
        "beautifulsoup4>=4.11.0",
        "tldextract>=3.4.0",
        "joblib>=1.2.0",
    ],
    extras_require={
        "examples": ["matplotlib>=3.7.1"],
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": ["phishinator=phishinator.cli:main"],
    },
    python_requires=">=3.8",
)
