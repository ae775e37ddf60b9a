import os
from setuptools import setup, find_packages

try:
    from tethys_apps.app_installation import custom_develop_command, custom_install_command
except ImportError:
    custom_develop_command = custom_install_command = None

# -- Apps Definition -- #
app_package = 'excursion_gap'
release_package = 'tethysapp-' + app_package
app_class = 'excursion_gap.app:ExcursionGap'
app_package_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'tethysapp', app_package)

# -- Python Dependencies -- #
dependencies = [
    'numpy>=1.20',
    'scipy>=1.7',
    'sqlalchemy>=1.4',
]

# -- Portal install hooks, only when Tethys Platform is present -- #
cmdclass = {}
if custom_install_command is not None:
    cmdclass = {
        'install': custom_install_command(app_package, app_package_dir, dependencies),
        'develop': custom_develop_command(app_package, app_package_dir, dependencies)
    }

setup(
    name=release_package,
    version='0.1.0',
    tags='Reinforcement Learning, Off-Policy, Markov Chains',
    description='Exact analysis of the gap between on-policy and excursion objectives in tabular MDPs.',
    long_description=open(os.path.join(os.path.dirname(os.path.abspath(__file__)), 'README.md')).read(),
    long_description_content_type='text/markdown',
    keywords='reinforcement learning, off-policy, emphatic, markov chain, mixing time',
    author='',
    author_email='',
    url='',
    license='MIT License',
    packages=find_packages(exclude=['ez_setup', 'examples', 'tests']),
    namespace_packages=['tethysapp', 'tethysapp.' + app_package],
    include_package_data=True,
    zip_safe=False,
    install_requires=dependencies,
    extras_require={
        'portal': ['tethys-platform'],
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'excursion-gap=tethysapp.excursion_gap.cli:main',
        ],
    },
    cmdclass=cmdclass
)
