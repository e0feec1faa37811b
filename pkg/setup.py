from setuptools import setup, find_packages

setup(
    name='clearnet',
    version='0.1.0',
    description='Clearing and default contagion in interbank networks in static, discrete and continuous time',
    keywords='eisenberg-noe, clearing, systemic risk, contagion, monte carlo',
    author='Druids team',
    license='MIT',
    package_dir={'clearnet': 'clearnet'},
    include_package_data=True,
    packages=find_packages(exclude=('tests',)),
    install_requires=[
        'click>=7.0',
        'python-dotenv>=0.10.3',
        'numpy>=1.17',
        'pandas>=0.25',
    ],
    extras_require={
        'test': ['pytest>=5.0'],
    },
    entry_points={'console_scripts': [
        'clearnet=clearnet.bin.clearnet:cli',
    ]},
    zip_safe=False
)
