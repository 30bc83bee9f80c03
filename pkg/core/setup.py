from setuptools import setup, find_packages

setup(
    name='privamp-core',
    version='1.0.0',
    description='Entropies, exponents, simulators, verifier and CLI for the privacy amplification toolkit',
    packages=find_packages(),
    install_requires=[
        'privamp-api',
        'numpy>=1.22',
        'scipy>=1.8',
    ],
    entry_points={
        'console_scripts': [
            'privamp = privamp.cli.__main__:main',
        ],
    },
    python_requires='>=3.8',
)
