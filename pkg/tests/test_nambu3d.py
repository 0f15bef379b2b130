"""Tests for Nambu brackets, Poisson vectors and conformal Nambu fields."""

from typing import Tuple

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lastmult.core.errors import FormError
from lastmult.core.expr import ONE, ZERO, Chart, Expr, evaluate
from lastmult.core.forms import (
    DifferentialForm,
    VectorField,
    interior,
    residual_field,
    residual_form,
)
from lastmult.core.parser import parse
from lastmult.core.stats import SampleBatch, sample_points
from lastmult.models import ConformalBlock3D, ModelSpec, get_model
from lastmult.structures.nambu3d import (
    HamiltonianPair,
    NambuData,
    antisymmetry_residual,
    conformal_nambu_residuals,
    conservation_residual,
    derivation_residual,
    evolution_identity_residuals,
    fundamental_identity_residual,
    induced_poisson_bracket,
    jacobi_residual,
    leibniz_residual,
    liouville_field_3d,
    mu_H_residual,
    nambu_bracket,
    nambu_field,
    nambu_form_residual,
    pencil_jacobi_residual,
    poisson_field_3d,
    poisson_vectors,
    sharp_map,
    triple_product_halves,
    vector_bracket,
    volume_preservation_residual,
)


SPACE = Chart(("x", "y", "z"), "t")
PROPERTY_TOLERANCE = 1e-7

monomials = st.tuples(
    st.integers(min_value=-3, max_value=3),
    st.integers(min_value=0, max_value=2),
    st.integers(min_value=0, max_value=2),
    st.integers(min_value=0, max_value=2),
)


@st.composite
def polynomials(draw: st.DrawFn) -> Expr:
    """Small integer polynomials in x, y, z."""
    x, y, z = SPACE.coordinate_exprs()
    result: Expr = ZERO
    for c, i, j, k in draw(st.lists(monomials, min_size=1, max_size=4)):
        result = result + c * x**i * y**j * z**k
    return result


def model_points(spec: ModelSpec, seed: int = 21) -> SampleBatch:
    return sample_points(spec.chart, 64, seed, spec.parameters(), spec.sample_domain())


@pytest.fixture(scope="module")
def property_points() -> SampleBatch:
    """Shared points for the bracket properties."""
    return sample_points(SPACE, 16, seed=5)


class TestNambuBracket:
    """Test the ternary bracket and its identities."""

    def test_lu_bracket_at_unit_point(self, unit_point: dict) -> None:
        """Test {x, H1, H2} = alpha y = 36 at (1, 1, 1, t = 0)."""
        spec = get_model("lu")
        pair = spec.pair
        x = spec.chart.coordinate_exprs()[0]
        bracket = nambu_bracket(x, pair.H1, pair.H2, NambuData(spec.chart, spec.multiplier))

        assert evaluate(bracket, {**unit_point, **spec.parameters()}) == pytest.approx(36.0)

    def test_coordinate_bracket_is_inverse_multiplier(self) -> None:
        """Test {x, y, z} = 1/M."""
        x, y, z = SPACE.coordinate_exprs()
        d = NambuData(SPACE, parse("x*z + 2", SPACE))
        value = evaluate(nambu_bracket(x, y, z, d), {"x": 1.0, "y": 0.0, "z": 3.0})
        assert value == pytest.approx(0.2)

    @settings(max_examples=25, deadline=None)
    @given(F1=polynomials(), F2=polynomials(), F3=polynomials())
    def test_antisymmetry(
        self, property_points: SampleBatch, F1: Expr, F2: Expr, F3: Expr
    ) -> None:
        """Test sign changes under every transposition."""
        stats = antisymmetry_residual(
            NambuData(SPACE), F1, F2, F3, property_points, PROPERTY_TOLERANCE
        )
        assert stats.passed

    @settings(max_examples=25, deadline=None)
    @given(F1=polynomials(), F2=polynomials(), F=polynomials(), H=polynomials())
    def test_leibniz_rule(
        self, property_points: SampleBatch, F1: Expr, F2: Expr, F: Expr, H: Expr
    ) -> None:
        """Test {F1, F2, F H} = {F1, F2, F} H + F {F1, F2, H}."""
        stats = leibniz_residual(
            NambuData(SPACE), F1, F2, F, H, property_points, PROPERTY_TOLERANCE
        )
        assert stats.passed

    @settings(max_examples=25, deadline=None)
    @given(
        F1=polynomials(),
        F2=polynomials(),
        H1=polynomials(),
        H2=polynomials(),
        H3=polynomials(),
    )
    def test_fundamental_identity(
        self,
        property_points: SampleBatch,
        F1: Expr,
        F2: Expr,
        H1: Expr,
        H2: Expr,
        H3: Expr,
    ) -> None:
        """Test the fundamental identity for the unit volume."""
        stats = fundamental_identity_residual(
            NambuData(SPACE), F1, F2, H1, H2, H3, property_points, PROPERTY_TOLERANCE
        )
        assert stats.passed

    def test_induced_brackets(self) -> None:
        """Test that freezing a slot gives an antisymmetric binary bracket."""
        d = NambuData(SPACE)
        F, G, K = (parse(s, SPACE) for s in ("x*y", "z^2 + x", "y*z"))

        third = induced_poisson_bracket(F, G, K, 3, d)
        second = induced_poisson_bracket(F, G, K, 2, d)
        assert evaluate(third, {"x": 1.0, "y": 2.0, "z": 0.5}) == pytest.approx(
            -evaluate(second, {"x": 1.0, "y": 2.0, "z": 0.5})
        )

        with pytest.raises(ValueError):
            induced_poisson_bracket(F, G, K, 1, d)

    def test_planar_chart_rejected(self, plane: Chart) -> None:
        """Test that Nambu data needs three coordinates."""
        with pytest.raises(FormError):
            NambuData(plane)


class TestNambuField:
    """Test Nambu fields of Hamiltonian pairs."""

    @pytest.fixture(params=["lu", "qi"])
    def spec(self, request: pytest.FixtureRequest) -> ModelSpec:
        """The three-dimensional chaotic models."""
        return get_model(request.param)

    @pytest.fixture
    def data(self, spec: ModelSpec) -> Tuple[HamiltonianPair, NambuData]:
        """Hamiltonian pair and multiplier volume of the model."""
        return spec.pair, NambuData(spec.chart, spec.multiplier)

    def test_lu_reduced_field(self) -> None:
        """Test that the Lu pair generates (alpha y, -x z, x y)."""
        spec = get_model("lu")
        chart = spec.chart
        X = nambu_field(spec.pair, NambuData(chart, spec.multiplier))
        expected = nambu_field(
            HamiltonianPair(parse("x^2/2 - alpha*z", chart), parse("(y^2 + z^2)/2", chart)),
            NambuData(chart),
        )
        pts = model_points(spec)
        point = {**spec.parameters(), "x": 1.0, "y": 2.0, "z": 1.0, "t": 0.4}

        assert residual_field(X, expected, pts).passed
        assert evaluate(X.component("x"), point) == pytest.approx(72.0)

    def test_form_conservation_and_volume(
        self, spec: ModelSpec, data: Tuple[HamiltonianPair, NambuData]
    ) -> None:
        """Test i_X mu = dH1^dH2, X(H1) = X(H2) = 0 and div(M X) = 0."""
        pair, d = data
        pts = model_points(spec)

        assert nambu_form_residual(pair, d, pts).passed
        assert conservation_residual(pair, d, pts).passed
        assert volume_preservation_residual(pair, d, pts).passed

    def test_conservation_with_large_time_factor(
        self, spec: ModelSpec, data: Tuple[HamiltonianPair, NambuData]
    ) -> None:
        """Test that X(H1) = X(H2) = 0 holds to rounding where the time factor is large."""
        pair, d = data
        pts = sample_points(spec.chart, 64, 23, spec.parameters(), {"t": (0.5, 1.0)})

        stats = conservation_residual(pair, d, pts, tolerance=1e-12)

        assert stats.passed, stats.max
        assert set(stats.components) == {"H1", "H2"}

    def test_triple_product_halves(self) -> None:
        """Test that e_x . (e_y x e_z) splits into 1 and 0."""
        cyclic, anticyclic = triple_product_halves(
            (ONE, ZERO, ZERO), (ZERO, ONE, ZERO), (ZERO, ZERO, ONE)
        )

        assert evaluate(cyclic, {}) == 1.0
        assert evaluate(anticyclic, {}) == 0.0

    def test_pencil_jacobi(
        self, spec: ModelSpec, data: Tuple[HamiltonianPair, NambuData]
    ) -> None:
        """Test J . curl J = 0 on several members of the Poisson pencil."""
        pair, d = data
        J1, J2 = poisson_vectors(pair, d)
        pts = model_points(spec)

        assert pencil_jacobi_residual(J1, J2, pts).passed
        # J1 x grad H2 and J2 x grad H1 reproduce the Nambu field
        X = nambu_field(pair, d)
        assert residual_field(poisson_field_3d(J1, pair.H2), X, pts).passed
        assert residual_field(poisson_field_3d(J2, pair.H1), X, pts).passed

    def test_vector_bracket(self, spec: ModelSpec, data: Tuple[HamiltonianPair, NambuData]) -> None:
        """Test {F, G}_J1 = {H1, F, G}."""
        pair, d = data
        J1, _ = poisson_vectors(pair, d)
        x, y, _ = spec.chart.coordinate_exprs()
        point = {**spec.parameters(), "x": 1.2, "y": 0.7, "z": 1.9, "t": 0.3}

        assert evaluate(vector_bracket(x, y, J1), point) == pytest.approx(
            evaluate(nambu_bracket(pair.H1, x, y, d), point)
        )

    def test_derivation(self, spec: ModelSpec, data: Tuple[HamiltonianPair, NambuData]) -> None:
        """Test that the field acts as a derivation of the bracket."""
        pair, d = data
        x, y, z = spec.chart.coordinate_exprs()
        assert derivation_residual(pair, d, x, y, z, model_points(spec)).passed

    def test_jacobi_detects_non_integrable_vector(
        self, space: Chart, space_points: SampleBatch
    ) -> None:
        """Test that (y, -x, 1) fails J . curl J = 0."""
        J = nambu_field(
            HamiltonianPair(parse("z", space), parse("(x^2 + y^2)/2", space)), NambuData(space)
        )
        assert jacobi_residual(J, space_points).passed

        twisted = VectorField(space, tuple(parse(s, space) for s in ("y", "-x", "1")))
        assert not jacobi_residual(twisted, space_points).passed


class TestSharpMap:
    """Test the isomorphism between 2-forms and vector fields."""

    def test_inverts_interior(self, space: Chart, space_points: SampleBatch) -> None:
        """Test sharp(i_X mu) = X for a non-constant multiplier."""
        d = NambuData(space, parse("1 + x^2", space))
        X = nambu_field(HamiltonianPair(parse("x*y", space), parse("z^2", space)), d)
        assert residual_field(sharp_map(interior(X, d.volume()), d), X, space_points).passed

    def test_rejects_other_degrees(self, space: Chart) -> None:
        """Test that only spatial 2-forms are accepted."""
        d = NambuData(space)
        with pytest.raises(FormError):
            sharp_map(DifferentialForm.basis(space, ("x",)), d)
        with pytest.raises(FormError):
            sharp_map(DifferentialForm.basis(space, ("x", "y"), True), d)


class TestEvolution:
    """Test the extended-space identities of the standard coordinates."""

    @pytest.mark.parametrize("name", ["lu", "qi"])
    def test_evolution_identities(self, name: str) -> None:
        """Test i_E dt = 1, i_E mu_H = 0, i_X dt = 0 and the mu_H decomposition."""
        spec = get_model(name)
        block = spec.canonical
        assert block is not None
        H1, H2 = block.hamiltonians
        pair = HamiltonianPair(H1, H2)
        d = NambuData(block.chart)
        pts = block.transform.push_batch(model_points(spec))

        for check, stats in evolution_identity_residuals(pair, d, pts).items():
            assert stats.passed, check
        for check, stats in mu_H_residual(pair, d, pts).items():
            assert stats.passed, check

    def test_needs_time(self) -> None:
        """Test that mu_H is undefined without a time symbol."""
        chart = Chart(("u", "v", "w"))
        pair = HamiltonianPair(parse("u", chart), parse("v", chart))
        with pytest.raises(FormError):
            mu_H_residual(pair, NambuData(chart), sample_points(chart, 4, 1))


class TestConformalNambu:
    """Test conformal Nambu fields with linear scalings."""

    @pytest.mark.parametrize("name,divergence", [("lu", -19.0), ("qi", -3.0)])
    def test_identities(self, name: str, divergence: float) -> None:
        """Test contraction, scaling and divergence for the published scalings."""
        spec = get_model(name)
        block = spec.conformal
        assert isinstance(block, ConformalBlock3D)
        pts = model_points(spec)

        results = conformal_nambu_residuals(block.pair.H1, block.pair.H2, block.params, pts)
        for check, stats in results.items():
            assert stats.passed, check

        assert evaluate(block.factor, spec.parameters()) == pytest.approx(divergence)
        assert residual_field(block.field(), spec.dynamics, pts).passed

    def test_liouville_field(self) -> None:
        """Test i_Z mu = zeta for the linear scaling field."""
        block = get_model("qi").conformal
        assert isinstance(block, ConformalBlock3D)
        cp = block.params
        pts = model_points(get_model("qi"))

        Z = liouville_field_3d(cp)
        assert residual_form(interior(Z, NambuData(cp.chart).volume()), cp.zeta, pts).passed
