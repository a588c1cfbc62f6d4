"""Stable user-IRS matching for multi-IRS multiuser MISO downlink.

The compiled kernels in ``_ckernels`` are used when built; otherwise the
numpy fallback in ``_pykernels`` is selected (see ``irsmatch._backend``).
"""
__version__ = "0.1.0"

from . import _backend  # noqa: E402
from .beamforming import PhaseAlphabet, PhaseBank, PhaseConfig, passive_beamform, zf_precoder  # noqa: E402
from .channels import ChannelSet, FadingParams, Geometry, make_drop, make_geometry  # noqa: E402
from .config import ScenarioConfig, load_config  # noqa: E402
from .linalg import SingularMatrixError, right_pseudo_inverse  # noqa: E402
from .matching import gale_shapley, propose, stabilize  # noqa: E402
from .rates import DropEvaluator, LinkBudget, Matching  # noqa: E402

backend = _backend.name
