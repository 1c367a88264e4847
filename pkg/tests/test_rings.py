import pytest

from workbench.algebra.rings import (
    LocalizationCertificate,
    PresentedRing,
    RingMap,
    compose_certificates,
    compose_maps,
    identity,
    is_isomorphism,
    is_surjective,
    localize,
    map_kernel,
    prime_preimage,
    require_verified,
    tensor_product,
    verify_certificate,
)
from workbench.core.errors import (
    CertificateError,
    CertificateRequiredError,
    DegenerateLocalizationError,
    InvalidPrimeError,
    RingMapError,
    WorkbenchError,
)
from workbench.services.parser import parse_polynomial


def presented(variables, *relations) -> PresentedRing:
    return PresentedRing(variables, [parse_polynomial(r, variables) for r in relations])


def poly(A: PresentedRing, text: str):
    return A.element(parse_polynomial(text, A.variables))


class TestPresentedRing:
    """Normal forms modulo the relations"""

    def test_equality_modulo_relations(self):
        A = presented(["u", "w"], "u*w - 1")
        assert A.equal(poly(A, "u^2*w"), poly(A, "u"))
        assert not A.is_zero(poly(A, "u"))
        assert A.format(poly(A, "u*w + u*w")) == "2"

    def test_zero_ring(self):
        assert presented(["x"], "x", "x - 1").is_zero_ring()
        assert not presented(["x"], "x^2").is_zero_ring()

    def test_duplicate_variables(self):
        with pytest.raises(WorkbenchError, match="duplicate"):
            PresentedRing(["x", "x"])

    def test_relations_must_map_to_zero(self):
        A = presented(["x"], "x^2")
        B = presented(["y"])
        with pytest.raises(RingMapError, match="does not map to zero"):
            RingMap(A, B, [B.gens["y"]])


class TestCertificates:
    """Localization certificates are checked, never trusted"""

    def test_localize_is_verified(self, qx):
        B, phi = localize(qx, qx.gens["x"])
        assert B.variables == ("x", "w")
        assert verify_certificate(phi) == []

    def test_localize_degenerate(self, qx):
        with pytest.raises(DegenerateLocalizationError):
            localize(qx, 0)
        nilpotent = presented(["x"], "x^2")
        with pytest.raises(DegenerateLocalizationError, match="nilpotent"):
            localize(nilpotent, nilpotent.gens["x"])

    def test_uncertified_map(self, qx):
        square = RingMap(qx, qx, [poly(qx, "x^2")])
        assert verify_certificate(square) == ["no certificate"]

    def test_wrong_inverse_is_rejected(self, qx):
        B = presented(["x", "w"], "x*w - 1")
        cert = LocalizationCertificate(
            witness=poly(qx, "x"),
            inverse=poly(B, "x"),
            sections={"x": (poly(qx, "x"), 0), "w": (qx.one, 1)},
        )
        phi = RingMap(qx, B, [B.gens["x"]], cert)
        problems = verify_certificate(phi)
        assert problems and "not an inverse" in problems[0]
        with pytest.raises(CertificateError):
            require_verified(phi, "x")

    def test_quotient_is_not_a_localization(self, qx):
        B = presented(["x"], "x^2 - x")
        cert = LocalizationCertificate(
            witness=qx.one, inverse=B.one, sections={"x": (poly(qx, "x"), 0)}
        )
        phi = RingMap(qx, B, [B.gens["x"]], cert)
        assert verify_certificate(phi) == [
            "comparison map from the localization is not injective"
        ]

    def test_composite_of_localizations(self, qx):
        B, f = localize(qx, qx.gens["x"])
        C, g = localize(B, poly(B, "x - 1"))
        composite = compose_maps([f, g])
        assert composite.is_certified
        assert verify_certificate(composite) == []

    def test_single_composite_witness(self, qx):
        B, f = localize(qx, qx.gens["x"])
        C, g = localize(B, poly(B, "x - 1"))
        assert qx.equal(compose_certificates([f]), qx.gens["x"])
        assert qx.equal(compose_certificates([f, g]), poly(qx, "x^2 - x"))

    def test_composite_needs_certified_links(self, qx):
        B, f = localize(qx, qx.gens["x"])
        bare = RingMap(B, B, [B.gens[v] for v in B.variables])
        with pytest.raises(CertificateRequiredError):
            compose_certificates([f, bare])

    def test_identity(self, qx):
        assert verify_certificate(identity(qx)) == []
        assert identity(qx).then(identity(qx)).equals(identity(qx))


class TestRingMaps:
    """Kernels, surjectivity and preimages through elimination"""

    def test_surjective_onto_localization(self):
        source = presented(["u", "v"])
        target = presented(["u", "w"], "u*w - 1")
        phi = RingMap(source, target, [target.gens["u"], target.gens["w"]])
        assert is_surjective(phi)
        assert not is_isomorphism(phi)
        assert map_kernel(phi).contains(poly(source, "u*v - 1"))

    def test_localization_is_not_surjective(self, qx):
        _, phi = localize(qx, qx.gens["x"])
        assert not is_surjective(phi)
        assert map_kernel(phi).is_zero()

    def test_kernel_of_the_cusp(self):
        A = presented(["x", "y"])
        T = presented(["t"])
        phi = RingMap(A, T, [poly(T, "t^2"), poly(T, "t^3")])
        kernel = map_kernel(phi)
        assert kernel.contains(poly(A, "x^3 - y^2"))
        assert not kernel.contains(poly(A, "x"))

    def test_prime_preimage(self, qx):
        B, phi = localize(qx, qx.gens["x"])
        preimage = prime_preimage(phi, B.ideal([poly(B, "x - 1")]))
        assert preimage.contains(poly(qx, "x - 1"))
        assert not preimage.contains(poly(qx, "x"))

    def test_preimage_of_unit_ideal(self, qx):
        B, phi = localize(qx, qx.gens["x"])
        with pytest.raises(InvalidPrimeError):
            prime_preimage(phi, B.ideal([poly(B, "x")]))


class TestTensorProduct:
    """Pushouts of finitely presented algebras"""

    def test_disjoint_variables(self):
        Q = PresentedRing([])
        U, V = presented(["u"]), presented(["v"])
        ring, left, right = tensor_product(RingMap(Q, U, []), RingMap(Q, V, []))
        assert ring.variables == ("u", "v")
        assert left(U.gens["u"]) == ring.gens["u"]
        assert right(V.gens["v"]) == ring.gens["v"]

    def test_colliding_names_are_renamed(self, qx):
        Q = PresentedRing([])
        ring, _, right = tensor_product(RingMap(Q, qx, []), RingMap(Q, qx, []))
        assert ring.variables == ("x", "x_2")
        assert right(qx.gens["x"]) == ring.gens["x_2"]

    def test_base_change_of_a_localization(self, qx):
        B, phi = localize(qx, qx.gens["x"])
        C, psi = localize(qx, poly(qx, "x - 1"))
        ring, left, right = tensor_product(phi, psi)
        assert not ring.is_zero_ring()
        assert verify_certificate(left) == []
        assert verify_certificate(right) == []

    def test_swapping_factors_is_an_isomorphism(self, rng):
        R = presented(["x"])
        for _ in range(6):
            relations = [f"a^2 - {rng.choice([2, 3, 5])}"] if rng.random() < 0.5 else []
            A, B = presented(["a"], *relations), presented(["b"])
            a, b = A.gens["a"], B.gens["b"]
            f = RingMap(R, A, [rng.randint(1, 3) * a ** rng.randint(1, 2) + rng.randint(-2, 2)])
            g = RingMap(R, B, [rng.randint(1, 3) * b ** rng.randint(1, 2) + rng.randint(-2, 2)])
            first, left, right = tensor_product(f, g)
            second, left2, right2 = tensor_product(g, f)
            swap = RingMap(first, second, [second.gens[v] for v in first.variables])
            back = RingMap(second, first, [first.gens[v] for v in second.variables])
            assert is_isomorphism(swap)
            assert swap.then(back).equals(identity(first))
            assert second.equal(swap(left(a)), right2(a))
            assert second.equal(swap(right(b)), left2(b))
