import pytest
from hypothesis import HealthCheck, settings

from kantorovich.kernels import KernelSpec, make_kernel

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ALL_SPECS = {
    "fejer": KernelSpec.fejer(),
    "vallee-poussin": KernelSpec.vallee_poussin(),
    "mixed-sinc": KernelSpec.mixed_sinc(),
    "M1": KernelSpec.bspline(1),
    "M2": KernelSpec.bspline(2),
    "M3": KernelSpec.bspline(3),
    "M4": KernelSpec.bspline(4),
    "M2-shift3": KernelSpec.bspline(2, shift=3.0),
    "compound-0.3": KernelSpec.compound_bspline(2, 0.3),
    "c2": KernelSpec("c2"),
    "d2": KernelSpec("d2"),
    "phi-1.5": KernelSpec.sigmoidal(1.5),
}
# kernels satisfying the lattice partition of unity (the step perturbation S does not)
POU_SPECS = ALL_SPECS
COMPACT_SPECS = {k: s for k, s in ALL_SPECS.items() if make_kernel(s).is_compact}


@pytest.fixture(params=sorted(POU_SPECS))
def pou_kernel(request):
    return make_kernel(POU_SPECS[request.param])


@pytest.fixture(params=sorted(COMPACT_SPECS))
def compact_kernel(request):
    return make_kernel(COMPACT_SPECS[request.param])
