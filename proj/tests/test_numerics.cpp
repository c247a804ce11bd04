#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iso/lie_rep.hpp"
#include "iso/numerics.hpp"
#include "iso/rng.hpp"

using namespace iso;

namespace {

cmat pauli(int k) {
    cmat s(2, 2);
    const cplx i1(0, 1);
    if (k == 0)
        s << 0, 1, 1, 0;
    else if (k == 1)
        s << 0, -i1, i1, 0;
    else
        s << 1, 0, 0, -1;
    return s;
}

cmat random_matrix(int n, GaussianRng& rng, double scale) {
    cmat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = scale * cplx(rng.gaussian(), rng.gaussian());
    return m;
}

}  // namespace

TEST_CASE("hs_inner on the Pauli basis") {
    const cmat id = cmat::Identity(2, 2);
    CHECK(std::abs(num::hs_inner(id, id) - cplx(2, 0)) < 1e-15);
    CHECK(std::abs(num::hs_inner(pauli(2), pauli(2)) - cplx(2, 0)) < 1e-15);
    CHECK(std::abs(num::hs_inner(pauli(0), pauli(2))) < 1e-15);
}

TEST_CASE("hs_inner conjugate symmetry and shape checks") {
    GaussianRng rng(1);
    const cmat a = random_matrix(3, rng, 1.0);
    const cmat b = random_matrix(3, rng, 1.0);
    CHECK(std::abs(num::hs_inner(a, b) - std::conj(num::hs_inner(b, a))) < 1e-13);
    CHECK_THROWS_AS(num::hs_inner(a, random_matrix(2, rng, 1.0)), dimension_error);
}

TEST_CASE("expm special values") {
    CHECK((num::expm(cmat::Zero(3, 3)) - cmat::Identity(3, 3)).norm() < 1e-14);

    cmat d = cmat::Zero(2, 2);
    d(0, 0) = cplx(0, M_PI);
    d(1, 1) = cplx(0, -M_PI);
    CHECK((num::expm(d) + cmat::Identity(2, 2)).norm() < 1e-12);

    // exp(-i pi sigma_y / 2) = cos(pi/2) - i sin(pi/2) sigma_y
    const cmat x = cplx(0, -M_PI / 2) * pauli(1);
    cmat expect(2, 2);
    expect << 0, -1, 1, 0;
    CHECK((num::expm(x) - expect).norm() < 1e-13);
    CHECK_THROWS_AS(num::expm(cmat::Zero(2, 3)), dimension_error);
}

TEST_CASE("expm inverse pairing for norms up to 10") {
    GaussianRng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        cmat x = random_matrix(4, rng, 1.0);
        x *= 10.0 / std::max(1.0, x.operatorNorm()) * (trial % 3 == 0 ? 1.0 : 0.3);
        const cmat prod = num::expm(x) * num::expm((-x).eval());
        CHECK((prod - cmat::Identity(4, 4)).norm() < 1e-10);
    }
}

TEST_CASE("det(expm(x)) = exp(tr x) via log-determinant") {
    GaussianRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const cmat x = random_matrix(4, rng, 0.6);
        const num::SvdResult sv = num::svd(num::expm(x));
        const double logdet = sv.s.array().log().sum();
        const double expected = std::real(x.trace());
        CHECK(std::abs(logdet - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("expm_hermitian matches the general path") {
    GaussianRng rng(3);
    const cmat g = random_matrix(5, rng, 0.7);
    const cmat h = 0.5 * (g + g.adjoint());
    CHECK((num::expm_hermitian(h) - num::expm(h)).norm() < 1e-11);
    // expu gives a unitary
    const cmat u = num::expu(h, 1.3);
    CHECK((u * u.adjoint() - cmat::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("svd of simple matrices") {
    const num::SvdResult id = num::svd(cmat::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(id.s(i) == doctest::Approx(1.0).epsilon(1e-12));

    cmat d = cmat::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const num::SvdResult ds = num::svd(d);
    CHECK(ds.s(0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(ds.s(1) == doctest::Approx(0.5).epsilon(1e-13));

    // exp(alpha J_z) for spin 1: singular values e, 1, 1/e
    const Irrep ir = build_spin_irrep(1.0);
    const num::SvdResult es = num::svd(num::expm_hermitian(ir.gen.generators[2]));
    CHECK(es.s(0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(es.s(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es.s(2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("svd reconstruction and unitarity on well-conditioned inputs") {
    GaussianRng rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + int(rng.raw() % 6);
        cmat k = random_matrix(n, rng, 1.0);
        // push singular values into [0.1, 10]
        num::SvdResult base = num::svd(k);
        rvec s(n);
        for (int i = 0; i < n; ++i) s(i) = 0.1 + 9.9 * rng.uniform01();
        std::sort(s.data(), s.data() + n, std::greater<double>());
        k = base.u * s.asDiagonal() * base.v.adjoint();

        const num::SvdResult sv = num::svd(k);
        const cmat recon = sv.u * sv.s.asDiagonal() * sv.v.adjoint();
        CHECK((recon - k).norm() <= 1e-9 * k.norm());
        CHECK((sv.u * sv.u.adjoint() - cmat::Identity(n, n)).operatorNorm() < 1e-10);
        CHECK((sv.v * sv.v.adjoint() - cmat::Identity(n, n)).operatorNorm() < 1e-10);
        for (int i = 0; i + 1 < n; ++i) CHECK(sv.s(i) >= sv.s(i + 1));
    }
}

TEST_CASE("svd rejects rank-deficient input") {
    CHECK_THROWS_AS(num::svd(cmat::Zero(3, 3)), degenerate_spectrum_error);
}

TEST_CASE("spectral norm") {
    cmat d = cmat::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -0.2;
    CHECK(num::spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-13));
}
