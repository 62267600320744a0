from setuptools import setup, find_packages

setup(
    name="cavity-xtalk",
    version="0.1.0",
    packages=find_packages(include=["cavity_xtalk", "cavity_xtalk.*"]),
    include_package_data=True,
    package_data={"cavity_xtalk": ["config.yaml"]},
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pandas>=2.0",
        "prometheus-client",
        "pydantic>=2,<3",
        # Additional runtime dependencies (mirrored from pyproject.toml)
        "pyyaml>=6.0",
        "python-dotenv>=1.0",
    ],
    extras_require={"dev": ["pytest>=7.4"]},
    entry_points={
        "console_scripts": [
            "cavity-xtalk=cavity_xtalk.cli:main",
        ],
    },
)
