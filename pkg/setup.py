from setuptools import setup, find_packages

setup(
    name='feltfp',
    version='0.1.0',
    packages=find_packages(exclude=['examples', 'examples.*']),
    description='Check felt metric spaces and locate fixed points of self-maps '
                'satisfying band contraction conditions.',
    keywords=['fixed point', 'felt metric', 'partial metric', 'contraction'],  # arbitrary keywords
    license='GPLv3',
    python_requires='>=3.7',
    install_requires=[
        'flask>=2.1', 'lxml', 'numpy'
    ],
    extras_require=dict(
        test=['pytest', 'hypothesis', 'scipy']
    ),
    classifiers=[],
    entry_points={
        'console_scripts': ['feltfp=feltfp.scripts.cli:main'],
    },
    include_package_data=True
)
