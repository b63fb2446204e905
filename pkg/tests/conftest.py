import pytest

# lambda values reused across modules: Dirichlet, the fitted qBounce value,
# a moderate wall, a stiff wall and a negative (attractive) wall
SAMPLE_LAMBDAS = (0.0, 0.11928, 1.0, 10.0, -0.5)


@pytest.fixture(params=SAMPLE_LAMBDAS)
def lam(request):
    return request.param
