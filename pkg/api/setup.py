from setuptools import setup, find_packages

setup(
    name='privamp-api',
    version='1.0.0',
    description='Operator, c-q state and hashing models for the privacy amplification toolkit',
    packages=find_packages(),
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
    ],
    python_requires='>=3.8',
)
