import pytest

from censored_pricing.inventory import InventoryGenerator
from censored_pricing.market import ProblemInstance
from censored_pricing.noise import DegenerateNoise, TriangularNoise, TruncatedGaussianNoise, UniformNoise


def canonical(noise=None, inventory=None, **overrides):
    """a=10, b=1, a_max=10, b_min=b_max=1, c=1, p_max=6, band [5.5, 8.5] (gamma_0 = 5)."""
    params = dict(a=10.0, b=1.0, a_max=10.0, b_min=1.0, b_max=1.0, c=1.0, p_max=6.0, gamma_min=5.5)
    params.update(overrides)
    c = params["c"]
    return ProblemInstance(
        **params,
        noise=noise or UniformNoise(c),
        inventory=inventory or InventoryGenerator("iid-uniform-in-band", 5.5, 8.5),
    )


@pytest.fixture
def instance():
    return canonical()


@pytest.fixture(params=["uniform", "triangular", "truncated-gaussian"])
def lipschitz_noise(request):
    return {
        "uniform": UniformNoise(1.0),
        "triangular": TriangularNoise(1.0),
        "truncated-gaussian": TruncatedGaussianNoise(1.0, sigma=0.5),
    }[request.param]


ALL_NOISE = [UniformNoise(1.0), TriangularNoise(1.0), TruncatedGaussianNoise(1.0, sigma=0.5),
             TruncatedGaussianNoise(2.0, sigma=3.0), UniformNoise(0.5), DegenerateNoise(1.0)]


def random_instance(rng, noise_kind=None, inventory_kind="iid-uniform-in-band"):
    """Rejection-sample an instance that passes validation."""
    from censored_pricing.market import validate_instance
    from censored_pricing.noise import make_noise

    while True:
        a = rng.uniform(6, 20)
        b = rng.uniform(0.4, 2.5)
        kappa = rng.uniform(0.5, 0.9)
        p_max = kappa * a / b
        b_min = b * rng.uniform(0.9, 1.0)
        b_max = b * rng.uniform(1.0, 1.2)
        a_max = a * rng.uniform(1.0, 1.05)
        c = rng.uniform(0.05, 0.25) * a * (1 - kappa)
        g0 = a_max - b_min * p_max + c
        top = a - c
        if g0 >= top - 1e-3:
            continue
        gamma_min = g0 + rng.uniform(0.05, 0.4) * (top - g0)
        lo = gamma_min
        hi = lo + rng.uniform(0.0, 0.99) * (top - lo)
        kind = noise_kind or rng.choice(["uniform", "triangular", "truncated-gaussian"])
        noise = make_noise(str(kind), c)
        inv = InventoryGenerator(inventory_kind, lo, hi)
        inst = ProblemInstance(a, b, a_max, b_min, b_max, c, p_max, gamma_min, noise, inv)
        if validate_instance(inst).ok:
            return inst


ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Log one acceptance verdict; all verdicts are echoed at the end of the session."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
