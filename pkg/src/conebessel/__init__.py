"""Bessel functions and hypergroup convolutions on cones of positive
semidefinite matrices over R, C and H, and on the associated Weyl chamber.

Submodules
----------
algebra
    Matrices over R, C, H; spectra, determinants, the cone gamma function.
jack
    Exact Jack polynomial tables.
bessel
    Hypergeometric series of matrix argument and cone Bessel functions.
montecarlo, sampling
    Seeded Monte Carlo estimation and random matrix samplers.
cone
    The cone hypergroup: convolution, Haar measure, product formula.
chamber
    The chamber hypergroup, its characters and Dunkl Bessel functions of type B.
transforms
    Hankel and hypergroup Fourier transforms.
verify, cli
    Verification suites and the ``conebessel`` command.
"""

from .algebra import *  # noqa: F401,F403
from .bessel import *  # noqa: F401,F403
from .chamber import *  # noqa: F401,F403
from .cone import *  # noqa: F401,F403
from .jack import *  # noqa: F401,F403
from .montecarlo import *  # noqa: F401,F403
from .sampling import *  # noqa: F401,F403
from .transforms import *  # noqa: F401,F403
from . import algebra, bessel, chamber, cone, jack, montecarlo, sampling, transforms  # noqa: F401

__version__ = "0.1.0"
