#include "qha/parity_ops.hpp"
#include "qha/quantize.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qha;

namespace {

Mat random_matrix(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return a;
}

}  // namespace

TEST_CASE("even odd split halves and reconstructs") {
    FockSpec spec{1, 32};
    Mat u = parity_operator(spec);

    EvenOddSplit su = even_odd_split(spec, u);
    CHECK(su.odd_part.norm() == 0.0);
    CHECK((su.even_part - u).norm() == 0.0);

    Mat t = toeplitz_matrix(spec, symbol_winding(1));
    EvenOddSplit st = even_odd_split(spec, t);
    CHECK(st.even_part.norm() < 1e-10);  // the winding shift is purely odd

    Mat a = random_matrix(32, 11);
    EvenOddSplit sa = even_odd_split(spec, a);
    CHECK(sa.residual < 1e-13);
    CHECK((sa.even_part + sa.odd_part - a).norm() < 1e-13 * a.norm());
    CHECK((u * sa.even_part * u - sa.even_part).norm() < 1e-12 * a.norm());
    CHECK((u * sa.odd_part * u + sa.odd_part).norm() < 1e-12 * a.norm());
    // splitting a part again moves nothing
    EvenOddSplit again = even_odd_split(spec, sa.even_part);
    CHECK(again.odd_part.norm() < 1e-12 * a.norm());
}

TEST_CASE("graded block structure") {
    FockSpec spec{1, 24};
    Mat u = parity_operator(spec);
    ParityBlocks bu = block_decompose(spec, u);
    CHECK(bu.eo.norm() == 0.0);
    CHECK(bu.oe.norm() == 0.0);
    CHECK((bu.ee - Mat::Identity(12, 12)).norm() == 0.0);
    CHECK((bu.oo + Mat::Identity(12, 12)).norm() == 0.0);

    Mat t = toeplitz_matrix(spec, symbol_winding(1));
    ParityBlocks bt = block_decompose(spec, t);
    CHECK(bt.ee.norm() < 1e-12);
    CHECK(bt.oo.norm() < 1e-12);
    // degree-raising part maps even into odd; its singular values are the
    // nonzero shift weights, so the block is injective
    auto sv = singular_values(bt.oe);
    CHECK(sv.minCoeff() > 0.5);

    Mat a = random_matrix(24, 5);
    CHECK((block_reassemble(spec, block_decompose(spec, a)) - a).norm() == 0.0);

    // consistency with the split: even parts carry no off-diagonal blocks
    EvenOddSplit s = even_odd_split(spec, a);
    ParityBlocks be = block_decompose(spec, s.even_part);
    CHECK(be.eo.norm() < 1e-12 * a.norm());
    CHECK(be.oe.norm() < 1e-12 * a.norm());
    ParityBlocks bo = block_decompose(spec, s.odd_part);
    CHECK(bo.ee.norm() < 1e-12 * a.norm());
    CHECK(bo.oo.norm() < 1e-12 * a.norm());

    // two-factor grading uses total degree
    FockSpec two{2, 4};
    Mat up = parity_operator(two);
    ParityBlocks bp = block_decompose(two, up);
    CHECK(bp.eo.norm() == 0.0);
    CHECK(long(bp.even_index.size()) + long(bp.odd_index.size()) == two.total_dim());
    CHECK(block_reassemble(two, bp).isApprox(up));
}

TEST_CASE("prescribed-index even operators") {
    FockSpec spec{1, 32};
    Mat u = parity_operator(spec);

    CHECK((make_even_with_index(0, spec) - Mat::Identity(32, 32)).norm() == 0.0);

    for (int k : {-3, -2, -1, 1, 2, 3}) {
        Mat a = make_even_with_index(k, spec);
        CHECK((u * a * u - a).norm() == 0.0);  // even by construction
        auto cls = symmetry_class(spec, a, cplx(-1.0, 0.0), 2);
        REQUIRE(cls.has_value());
        CHECK(*cls == 0);
    }

    // even k: both graded blocks are shifts of the same offset k/2
    Mat a2 = make_even_with_index(2, spec);
    ParityBlocks b2 = block_decompose(spec, a2);
    CHECK(b2.eo.norm() == 0.0);
    CHECK(b2.oe.norm() == 0.0);
    Mat down1 = Mat::Zero(16, 16);
    for (int j = 0; j + 1 < 16; ++j) down1(j, j + 1) = 1.0;
    CHECK((b2.ee - down1).norm() == 0.0);
    CHECK((b2.oo - down1).norm() == 0.0);

    // odd k: identity even block, shifted odd block
    Mat am1 = make_even_with_index(-1, spec);
    ParityBlocks bm1 = block_decompose(spec, am1);
    CHECK((bm1.ee - Mat::Identity(16, 16)).norm() == 0.0);
    CHECK((bm1.oo - down1.adjoint()).norm() == 0.0);

    CHECK_THROWS_AS(make_even_with_index(8, spec), std::invalid_argument);
    FockSpec two{2, 8};
    CHECK_THROWS_AS(make_even_with_index(1, two), std::invalid_argument);
}

TEST_CASE("symmetry classes under root-of-unity rotations") {
    FockSpec spec{1, 32};
    Mat u = parity_operator(spec);
    auto c0 = symmetry_class(spec, u, cplx(-1.0, 0.0), 2);
    REQUIRE(c0.has_value());
    CHECK(*c0 == 0);

    Mat t = toeplitz_matrix(spec, symbol_winding(1));
    auto c1 = symmetry_class(spec, t, cplx(-1.0, 0.0), 2);
    REQUIRE(c1.has_value());
    CHECK(*c1 == 1);

    cplx w3 = std::polar(1.0, 2.0 * pi / 3.0);
    auto c3 = symmetry_class(spec, t, w3, 3);
    REQUIRE(c3.has_value());
    CHECK(*c3 == 1);
    Mat u3 = parity_rotation(spec, w3);
    CHECK((u3 * t * u3.adjoint() - w3 * t).norm() < 1e-10);

    // quantization parity mirrors symbol parity
    Mat teven = toeplitz_matrix(spec, symbol_gaussian(0.5));
    auto ce = symmetry_class(spec, teven, cplx(-1.0, 0.0), 2);
    REQUIRE(ce.has_value());
    CHECK(*ce == 0);

    SymbolFn mixed;
    mixed.separable = false;
    mixed.eval = [](cplx z) { return std::exp(-0.5 * std::norm(z)) + z / (1.0 + std::abs(z)); };
    mixed.name = "mixed_parity";
    Mat tm = toeplitz_matrix(spec, mixed);
    CHECK_FALSE(symmetry_class(spec, tm, cplx(-1.0, 0.0), 2).has_value());

    CHECK_THROWS_AS(symmetry_class(spec, u, cplx(0.5, 0.0), 2), std::invalid_argument);
}

TEST_CASE("continuity moduli separate the conjugation classes") {
    FockSpec spec{1, 48};
    Mat u = parity_operator(spec);
    std::vector<double> radii{0.0, 0.1, 0.25, 0.5, 1.0};

    Mat p0 = basis_outer(spec, 0, 0);
    ContinuityProfile shift_p0 = continuity_modulus(spec, p0, ModulusMode::shift, radii);
    CHECK(shift_p0.moduli[0] == 0.0);
    for (size_t i = 1; i < radii.size(); ++i)
        CHECK(shift_p0.moduli[i - 1] < shift_p0.moduli[i] + 1e-15);
    // rank-one defect has the closed form sqrt(1 - e^{-r^2/2})
    for (size_t i = 1; i < radii.size(); ++i) {
        double c = std::exp(-0.25 * radii[i] * radii[i]);
        CHECK(std::abs(shift_p0.moduli[i] - std::sqrt(1.0 - c * c)) < 1e-8);
    }

    ContinuityProfile mod_u = continuity_modulus(spec, u, ModulusMode::modulation, radii);
    ContinuityProfile shift_u = continuity_modulus(spec, u, ModulusMode::shift, radii);
    for (double m : mod_u.moduli) CHECK(m < 1e-8);
    CHECK(shift_u.moduli.back() > 0.5);
    CHECK(shift_u.moduli.back() / std::max(mod_u.moduli.back(), 1e-300) > 1e6);
    CHECK_FALSE(mod_u.truncation_warning);

    // theta with the mirror rotation reproduces modulation, with identity shift
    Vec th(1);
    th[0] = cplx(-1.0, 0.0);
    ContinuityProfile theta_u =
        continuity_modulus(spec, u, ModulusMode::theta, radii, 8, &th);
    for (size_t i = 0; i < radii.size(); ++i)
        CHECK(std::abs(theta_u.moduli[i] - mod_u.moduli[i]) < 1e-10);

    // a tight truncation makes tiny defects untrustworthy and says so
    FockSpec tight{1, 8};
    Mat ut = parity_operator(tight);
    ContinuityProfile warn =
        continuity_modulus(tight, ut, ModulusMode::modulation, {2.5});
    CHECK(warn.truncation_warning);
}

TEST_CASE("modulation modulus of U A matches shift modulus of A") {
    FockSpec spec{1, 48};
    Mat u = parity_operator(spec);
    std::vector<double> radii{0.3, 0.7};
    std::vector<Mat> probes;
    probes.push_back(toeplitz_matrix(spec, symbol_smooth_bounded()));
    probes.push_back(basis_outer(spec, 2, 5) + basis_outer(spec, 0, 0));
    for (const Mat& a : probes) {
        ContinuityProfile lhs = continuity_modulus(spec, u * a, ModulusMode::modulation, radii);
        ContinuityProfile rhs = continuity_modulus(spec, a, ModulusMode::shift, radii);
        for (size_t i = 0; i < radii.size(); ++i)
            CHECK(std::abs(lhs.moduli[i] - rhs.moduli[i]) < 1e-8);
    }
}

TEST_CASE("theta modulus obeys the conjugation-shift bound") {
    FockSpec spec{1, 32};
    Mat a = toeplitz_matrix(spec, symbol_gaussian(1.0));
    Vec th(1);
    th[0] = cplx(0.0, 1.0);  // quarter turn
    double norm_a = op_norm(a);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
    for (int trial = 0; trial < 4; ++trial) {
        Vec z(1), w(1);
        z[0] = std::polar(0.4, ang(rng));
        w[0] = std::polar(0.3, ang(rng));
        Mat aw = shift_alpha(spec, a, w);
        double lhs = conjugation_defect(spec, aw, z, ModulusMode::theta, &th);
        double base = conjugation_defect(spec, a, z, ModulusMode::theta, &th);
        cplx zm = z[0] - th[0] * z[0];
        double phase_gap = std::abs(1.0 - std::exp(iunit * symplectic_form(zm, w[0])));
        CHECK(lhs <= base + phase_gap * norm_a + 1e-8);
    }
}

TEST_CASE("localization profiles along mirrored coherent pairs") {
    FockSpec spec{1, 64};
    std::vector<double> radii{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};

    std::vector<double> prof_i = localization_profile(spec, Mat::Identity(64, 64), radii);
    for (size_t i = 0; i < radii.size(); ++i)
        CHECK(std::abs(prof_i[i] - std::exp(-radii[i] * radii[i])) < 1e-6);

    auto nu = [](int m) { return monomial_norm(m); };
    for (auto [ai, bi] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
        Mat e = basis_outer(spec, ai, bi);
        std::vector<double> prof = localization_profile(spec, e, radii);
        for (size_t i = 0; i < radii.size(); ++i) {
            double r = radii[i];
            double expect = std::exp(-0.5 * r * r) * std::pow(r, ai + bi) / (nu(ai) * nu(bi));
            CHECK(std::abs(prof[i] - expect) < 1e-6);
        }
        // decay sets in past the profile peak at sqrt(a + b)
        size_t start = ai + bi <= 1 ? 2 : 3;  // radius 1.0 resp. 1.5
        for (size_t i = start; i + 1 < radii.size(); ++i)
            CHECK(prof[i + 1] < prof[i] + 1e-12);
    }
}

TEST_CASE("fixed factors of rotation families") {
    FockSpec two{2, 8};
    Vec ident(2);
    ident << cplx(1.0, 0.0), cplx(1.0, 0.0);
    FixedSplit s0 = fixed_eigenspace_complement(two, {ident});
    CHECK(s0.moving_factors.empty());
    CHECK(s0.fixed_factors == std::vector<int>{0, 1});

    Vec th1(2);
    th1 << cplx(-1.0, 0.0), cplx(1.0, 0.0);
    FixedSplit s1 = fixed_eigenspace_complement(two, {th1});
    CHECK(s1.moving_factors == std::vector<int>{0});
    CHECK(s1.fixed_factors == std::vector<int>{1});

    Vec th2(2);
    th2 << cplx(1.0, 0.0), cplx(-1.0, 0.0);
    FixedSplit s2 = fixed_eigenspace_complement(two, {th1, th2});
    CHECK(s2.moving_factors == std::vector<int>{0, 1});
    CHECK(s2.fixed_factors.empty());

    Vec bad(2);
    bad << cplx(0.5, 0.0), cplx(1.0, 0.0);
    CHECK_THROWS_AS(fixed_eigenspace_complement(two, {bad}), std::invalid_argument);
    Vec wrong(1);
    wrong << cplx(1.0, 0.0);
    CHECK_THROWS_AS(fixed_eigenspace_complement(two, {wrong}), std::invalid_argument);
}

TEST_CASE("berezin decay envelopes over a factor split") {
    FockSpec two{2, 12};
    long n = two.total_dim();
    std::vector<double> v_radii{0.0, 1.0, 2.0, 3.0};
    std::vector<cplx> wgrid;
    for (int i = -2; i <= 2; ++i) wgrid.push_back(cplx(0.6 * i, 0.3 * i));

    // rank-one on the moving factor, identity on the rest
    FockSpec one{1, 12};
    Mat k00 = tensor_product(basis_outer(one, 0, 0), Mat::Identity(12, 12));
    auto env = berezin_envelope(two, k00, {0}, v_radii, wgrid);
    REQUIRE(env.size() == v_radii.size());
    for (size_t i = 0; i < env.size(); ++i) {
        double expect = std::exp(-0.5 * v_radii[i] * v_radii[i]);
        CHECK(std::abs(env[i].envelope - expect) < 1e-4);
        CHECK(env[i].flat_variation < 0.05);
    }
    CHECK(env.back().envelope < 1e-1 * env.front().envelope);

    // identity stays put: no decay anywhere
    auto flat = berezin_envelope(two, Mat::Identity(n, n), {0}, v_radii, wgrid);
    for (const auto& s : flat) {
        CHECK(s.envelope > 0.99);
        CHECK(s.envelope <= 1.0 + 1e-12);
    }

    CHECK_THROWS_AS(berezin_envelope(two, k00, {5}, v_radii, wgrid),
                    std::invalid_argument);
}
