#include "qha/fredholm.hpp"
#include "qha/parity_ops.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qha;

TEST_CASE("band profiles") {
    Mat d = Mat::Zero(24, 24);
    for (int i = 0; i < 24; ++i) d(i, i) = cplx(1.0 + 0.1 * i, 0.2);
    BandProfile bd = band_profile(d);
    CHECK(bd.lower == 0);
    CHECK(bd.upper == 0);
    CHECK(bd.residual == 0.0);

    FockSpec spec{1, 48};
    BandProfile b1 = band_profile(toeplitz_matrix(spec, symbol_winding(1)));
    CHECK(b1.lower == 1);
    CHECK(b1.upper == 0);
    CHECK(b1.residual < 1e-10);

    BandProfile b2 = band_profile(toeplitz_matrix(spec, symbol_winding(2)));
    CHECK(b2.lower == 2);
    CHECK(b2.upper == 0);

    BandProfile bm = band_profile(toeplitz_matrix(spec, symbol_winding(-1)));
    CHECK(bm.lower == 0);
    CHECK(bm.upper == 1);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Mat dense(32, 32);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) dense(i, j) = cplx(g(rng), g(rng));
    CHECK_THROWS_AS(band_profile(dense), std::runtime_error);
}

TEST_CASE("deficiency index on shifts and prescribed-index operators") {
    FockSpec spec{1, 200};
    CHECK(index_deficiency(Mat::Identity(200, 200)).value == 0);

    for (int j : {1, 2, 3}) {
        IndexEstimate est = index_deficiency(toeplitz_matrix(spec, symbol_winding(j)));
        CHECK(est.value == -j);
        CHECK(est.kernel_dim == 0);
        CHECK(est.cokernel_dim == j);
        CHECK(est.cokernel_gap > 1e6);
    }
    CHECK(index_deficiency(toeplitz_matrix(spec, symbol_winding(-2))).value == 2);

    for (int k : {-3, -2, -1, 0, 1, 2, 3})
        CHECK(index_deficiency(make_even_with_index(k, spec)).value == k);
}

TEST_CASE("deficiency estimates are stable in truncation dimension") {
    for (int d : {100, 200}) {
        FockSpec spec{1, d};
        CHECK(index_deficiency(toeplitz_matrix(spec, symbol_winding(1))).value == -1);
        CHECK(index_deficiency(make_even_with_index(2, spec)).value == 2);
        CHECK(index_deficiency(make_even_with_index(-1, spec)).value == -1);
    }
}

TEST_CASE("index is invariant under right multiplication by diagonal unitaries") {
    FockSpec spec{1, 128};
    Mat t = toeplitz_matrix(spec, symbol_winding(1));
    Mat u = parity_operator(spec);
    Mat u3 = parity_rotation(spec, std::polar(1.0, 2.0 * pi / 3.0));
    int base = index_deficiency(t).value;
    CHECK(index_deficiency(t * u).value == base);
    CHECK(index_deficiency(t * u3).value == base);
    CHECK(index_deficiency(u * t).value == base);
}

TEST_CASE("even operators have equal block indices") {
    FockSpec spec{1, 160};
    for (int k : {-2, 0, 2}) {
        Mat a = make_even_with_index(k, spec);
        ParityBlocks b = block_decompose(spec, a);
        int ie = index_deficiency(b.ee).value;
        int io = index_deficiency(b.oo).value;
        CHECK(ie == io);
        CHECK(ie + io == k);
    }
    Mat t2 = toeplitz_matrix(spec, symbol_winding(2));
    ParityBlocks b = block_decompose(spec, t2);
    CHECK(index_deficiency(b.ee).value == -1);
    CHECK(index_deficiency(b.oo).value == -1);
}

TEST_CASE("deficiency preconditions and conditioning guards") {
    FockSpec spec{1, 32};
    Mat t = toeplitz_matrix(spec, symbol_winding(1));
    CHECK_THROWS_AS(index_deficiency(t, 1e-8, 0.05), std::invalid_argument);

    // singular values sliding smoothly through the tolerance: no rank gap
    Mat slide = Mat::Zero(25, 25);
    for (int i = 0; i < 25; ++i) slide(i, i) = std::pow(10.0, -0.75 * i);
    CHECK_THROWS_AS(index_deficiency(slide, 1e-8), std::runtime_error);
}

TEST_CASE("winding index from the smoothed boundary curve") {
    FockSpec spec{1, 200};
    CHECK(index_winding(spec, Mat::Identity(200, 200)).value == 0);

    for (int j : {1, 3}) {
        IndexEstimate est = index_winding(spec, toeplitz_matrix(spec, symbol_winding(j)));
        CHECK(est.value == -j);
        CHECK(est.min_modulus > 0.5);
        CHECK(est.winding_residual < 1e-6);
    }
    CHECK(index_winding(spec, toeplitz_matrix(spec, symbol_winding(-1))).value == 1);

    CHECK_THROWS_AS(index_winding(spec, Mat::Zero(200, 200)), std::runtime_error);
}

TEST_CASE("the two estimators agree wherever both apply") {
    FockSpec spec{1, 200};
    for (int j : {-1, 1, 2}) {
        Mat t = toeplitz_matrix(spec, symbol_winding(j));
        CHECK(index_deficiency(t).value == index_winding(spec, t).value);
    }
}
