#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "dmtk/linalg.hpp"
#include "dmtk/matrix.hpp"
#include "doctest.h"

using dmtk::FactorMatrix;
using dmtk::GramMatrix;
using dmtk::Layout;
using dmtk::MatView;
using dmtk::MutMatView;

namespace {

double frand(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Logical rows x cols matrix materialized in a given layout with padding.
struct Stored {
    std::vector<double> buf;
    std::int64_t rows, cols, ld;
    Layout layout;

    Stored(std::int64_t r, std::int64_t c, Layout l, std::int64_t pad, std::mt19937_64& rng,
           bool integers)
        : rows(r), cols(c), layout(l) {
        ld = (l == Layout::row_major ? c : r) + pad;
        const std::int64_t lanes = l == Layout::row_major ? r : c;
        buf.assign(static_cast<std::size_t>(ld * lanes), -7.5);
        for (std::int64_t i = 0; i < r; ++i) {
            for (std::int64_t j = 0; j < c; ++j) {
                const double v = integers
                                     ? static_cast<double>(static_cast<std::int64_t>(rng() % 19) - 9)
                                     : frand(rng);
                at(i, j) = v;
            }
        }
    }

    double& at(std::int64_t i, std::int64_t j) {
        return buf[static_cast<std::size_t>(layout == Layout::row_major ? i * ld + j
                                                                        : i + j * ld)];
    }
    double get(std::int64_t i, std::int64_t j) const {
        return buf[static_cast<std::size_t>(layout == Layout::row_major ? i * ld + j
                                                                        : i + j * ld)];
    }
    MatView view() const { return {buf.data(), rows, cols, layout, ld, false}; }
};

FactorMatrix random_factor(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FactorMatrix m(rows, cols);
    for (auto& v : m.values()) v = frand(rng);
    return m;
}

}  // namespace

TEST_CASE("gemm matches the triple loop in every layout and transpose combination") {
    std::mt19937_64 rng(42);
    const struct {
        std::int64_t m, k, n;
    } sizes[] = {{1, 1, 1}, {3, 4, 5}, {5, 2, 7}, {8, 8, 8}, {17, 9, 33}, {2, 64, 3}};

    for (const auto& sz : sizes) {
        for (Layout la : {Layout::row_major, Layout::col_major}) {
            for (bool ta : {false, true}) {
                for (Layout lb : {Layout::row_major, Layout::col_major}) {
                    for (Layout lc : {Layout::row_major, Layout::col_major}) {
                        for (bool accumulate : {false, true}) {
                            // A stored pre-transpose when ta is set.
                            Stored a(ta ? sz.k : sz.m, ta ? sz.m : sz.k, la, 2, rng, true);
                            Stored b(sz.k, sz.n, lb, 1, rng, true);
                            Stored c(sz.m, sz.n, lc, 3, rng, true);
                            std::vector<double> expected(
                                static_cast<std::size_t>(sz.m * sz.n));
                            for (std::int64_t i = 0; i < sz.m; ++i) {
                                for (std::int64_t j = 0; j < sz.n; ++j) {
                                    double acc = accumulate ? c.get(i, j) : 0.0;
                                    for (std::int64_t p = 0; p < sz.k; ++p) {
                                        const double av = ta ? a.get(p, i) : a.get(i, p);
                                        acc += av * b.get(p, j);
                                    }
                                    expected[static_cast<std::size_t>(i * sz.n + j)] = acc;
                                }
                            }
                            MatView av = a.view();
                            if (ta) av = av.transposed();
                            const MutMatView cv{c.buf.data(), sz.m, sz.n, c.layout, c.ld};
                            dmtk::gemm_acc(av, b.view(), cv, accumulate, 2);
                            for (std::int64_t i = 0; i < sz.m; ++i) {
                                for (std::int64_t j = 0; j < sz.n; ++j) {
                                    REQUIRE(c.get(i, j) ==
                                            expected[static_cast<std::size_t>(i * sz.n + j)]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("gemm leaves the padding untouched") {
    std::mt19937_64 rng(1);
    Stored a(3, 4, Layout::row_major, 0, rng, true);
    Stored b(4, 5, Layout::row_major, 0, rng, true);
    Stored c(3, 5, Layout::row_major, 2, rng, true);
    const std::vector<double> before = c.buf;
    dmtk::gemm_acc(a.view(), b.view(), MutMatView{c.buf.data(), 3, 5, c.layout, c.ld}, false, 1);
    for (std::int64_t i = 0; i < 3; ++i) {
        for (std::int64_t j = 5; j < c.ld; ++j) {
            CHECK(c.buf[static_cast<std::size_t>(i * c.ld + j)] ==
                  before[static_cast<std::size_t>(i * c.ld + j)]);
        }
    }
}

TEST_CASE("gemm is bitwise identical for every thread count") {
    std::mt19937_64 rng(7);
    Stored a(33, 21, Layout::row_major, 0, rng, false);
    Stored b(21, 18, Layout::col_major, 0, rng, false);

    std::vector<double> reference;
    for (int threads : {1, 2, 3, 8, 64}) {
        std::vector<double> c(33 * 18, 0.0);
        dmtk::gemm_acc(a.view(), b.view(), MutMatView::row_major(c.data(), 33, 18), false,
                       threads);
        if (threads == 1) {
            reference = c;
        } else {
            CHECK(c == reference);
        }
    }
}

TEST_CASE("gemm validates dimensions") {
    std::vector<double> buf(64, 0.0);
    const MatView a = MatView::row_major(buf.data(), 3, 4);
    const MatView b = MatView::row_major(buf.data(), 5, 2);
    CHECK_THROWS_AS(
        dmtk::gemm_acc(a, b, MutMatView::row_major(buf.data(), 3, 2), false, 1),
        std::invalid_argument);
}

TEST_CASE("gemv matches the loop with strides") {
    std::mt19937_64 rng(3);
    for (Layout layout : {Layout::row_major, Layout::col_major}) {
        for (bool accumulate : {false, true}) {
            Stored a(6, 5, layout, 1, rng, true);
            std::vector<double> x(5 * 2, 0.0), y(6 * 3, 0.5);
            for (std::int64_t j = 0; j < 5; ++j) x[static_cast<std::size_t>(2 * j)] = frand(rng);

            std::vector<double> expected(6);
            for (std::int64_t i = 0; i < 6; ++i) {
                double acc = accumulate ? y[static_cast<std::size_t>(3 * i)] : 0.0;
                for (std::int64_t j = 0; j < 5; ++j) {
                    acc += a.get(i, j) * x[static_cast<std::size_t>(2 * j)];
                }
                expected[static_cast<std::size_t>(i)] = acc;
            }
            dmtk::gemv(a.view(), x.data(), 2, y.data(), 3, accumulate);
            for (std::int64_t i = 0; i < 6; ++i) {
                CHECK(y[static_cast<std::size_t>(3 * i)] ==
                      doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("gram of a small matrix") {
    const FactorMatrix u(3, 2, {1, 2, 3, 4, 5, 6});
    const GramMatrix g = dmtk::gram(u);
    CHECK(g.at(0, 0) == 35.0);
    CHECK(g.at(0, 1) == 44.0);
    CHECK(g.at(1, 0) == 44.0);
    CHECK(g.at(1, 1) == 56.0);
    CHECK(g.trace() == 91.0);
}

TEST_CASE("gram is exactly symmetric") {
    const FactorMatrix u = random_factor(37, 9, 123);
    const GramMatrix g = dmtk::gram(u);
    for (std::int64_t i = 0; i < 9; ++i) {
        for (std::int64_t j = 0; j < 9; ++j) {
            CHECK(g.at(i, j) == g.at(j, i));
        }
    }
}

TEST_CASE("gram matches gemm") {
    const FactorMatrix u = random_factor(14, 4, 9);
    const GramMatrix g = dmtk::gram(u);
    std::vector<double> full(16, 0.0);
    dmtk::gemm_acc(u.view().transposed(), u.view(), MutMatView::row_major(full.data(), 4, 4),
                   false, 1);
    for (std::int64_t i = 0; i < 4; ++i) {
        for (std::int64_t j = 0; j < 4; ++j) {
            CHECK(g.at(i, j) == doctest::Approx(full[static_cast<std::size_t>(i * 4 + j)])
                                    .epsilon(1e-13));
        }
    }
}

TEST_CASE("gram_hadamard multiplies elementwise and honors skip") {
    const FactorMatrix u0(1, 2, {1, 1});  // gram(u0) is all ones
    const FactorMatrix u1(2, 2, {1, 2, 3, 4});
    const FactorMatrix u2(1, 2, {2, 5});
    const std::vector<FactorMatrix> factors = {u0, u1, u2};

    const GramMatrix g1 = dmtk::gram(u1);
    const GramMatrix g2 = dmtk::gram(u2);

    const GramMatrix skip0 = dmtk::gram_hadamard(factors, 0);
    for (std::int64_t i = 0; i < 2; ++i) {
        for (std::int64_t j = 0; j < 2; ++j) {
            CHECK(skip0.at(i, j) == g1.at(i, j) * g2.at(i, j));
        }
    }

    const GramMatrix all = dmtk::gram_hadamard(factors, -1);
    // gram(u0) is all ones, the Hadamard identity: including it changes nothing.
    for (std::int64_t i = 0; i < 2; ++i) {
        for (std::int64_t j = 0; j < 2; ++j) {
            CHECK(all.at(i, j) == skip0.at(i, j));
        }
    }

    CHECK_THROWS_AS(dmtk::gram_hadamard(std::vector<FactorMatrix>{}, -1), std::invalid_argument);
    const std::vector<FactorMatrix> mismatched = {u0, FactorMatrix(2, 3)};
    CHECK_THROWS_AS(dmtk::gram_hadamard(mismatched, -1), std::invalid_argument);
}

TEST_CASE("solve_psd with identity and scaled identity") {
    const FactorMatrix m(2, 3, {1, 2, 3, 4, 5, 6});

    GramMatrix h(3);
    for (std::int64_t i = 0; i < 3; ++i) h.at(i, i) = 1.0;
    FactorMatrix u = dmtk::solve_psd(h, m);
    for (std::size_t i = 0; i < 6; ++i) CHECK(u.values()[i] == m.values()[i]);

    for (std::int64_t i = 0; i < 3; ++i) h.at(i, i) = 2.0;
    u = dmtk::solve_psd(h, m);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(u.values()[i] == doctest::Approx(m.values()[i] / 2.0).epsilon(1e-14));
    }
}

TEST_CASE("solve_psd solves a well-conditioned system") {
    std::mt19937_64 rng(17);
    const std::int64_t c = 5;
    const FactorMatrix v = random_factor(8, c, 99);
    GramMatrix h = dmtk::gram(v);
    for (std::int64_t i = 0; i < c; ++i) h.at(i, i) += 1.0;

    const FactorMatrix m = random_factor(6, c, 100);
    const FactorMatrix u = dmtk::solve_psd(h, m);

    for (std::int64_t r = 0; r < 6; ++r) {
        for (std::int64_t j = 0; j < c; ++j) {
            double acc = 0;
            for (std::int64_t p = 0; p < c; ++p) acc += u(r, p) * h.at(p, j);
            CHECK(acc == doctest::Approx(m(r, j)).epsilon(1e-10));
        }
    }
    (void)rng;
}

TEST_CASE("solve_psd handles a singular system through the eigen path") {
    // h = v v^T is rank one; the minimum-norm least-squares solution still
    // satisfies the normal equations (U h - m) h = 0.
    const std::vector<double> vv = {1.0, 2.0, -1.0};
    GramMatrix h(3);
    for (std::int64_t i = 0; i < 3; ++i) {
        for (std::int64_t j = 0; j < 3; ++j) {
            h.at(i, j) = vv[static_cast<std::size_t>(i)] * vv[static_cast<std::size_t>(j)];
        }
    }
    const FactorMatrix m = random_factor(4, 3, 55);
    const FactorMatrix u = dmtk::solve_psd(h, m);

    for (std::int64_t r = 0; r < 4; ++r) {
        for (std::int64_t j = 0; j < 3; ++j) {
            double residual = 0;  // row r of (U h - m) times column j of h
            for (std::int64_t p = 0; p < 3; ++p) {
                double uh = 0;
                for (std::int64_t q = 0; q < 3; ++q) uh += u(r, q) * h.at(q, p);
                residual += (uh - m(r, p)) * h.at(p, j);
            }
            CHECK(residual == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("solve_psd validates shapes") {
    CHECK_THROWS_AS(dmtk::solve_psd(GramMatrix(3), FactorMatrix(2, 2)), std::invalid_argument);
}

TEST_CASE("parallel_reduce sums exactly in any thread count") {
    for (int count : {1, 2, 3, 5, 8}) {
        std::vector<FactorMatrix> parts_a, parts_b;
        FactorMatrix expected(4, 3);
        for (int i = 0; i < count; ++i) {
            FactorMatrix p = random_factor(4, 3, 200 + static_cast<std::uint64_t>(i));
            for (std::size_t v = 0; v < p.values().size(); ++v) {
                p.values()[v] = std::floor(p.values()[v] * 64.0);
                expected.values()[v] += p.values()[v];
            }
            parts_a.push_back(p);
            parts_b.push_back(std::move(p));
        }
        const FactorMatrix r1 = dmtk::parallel_reduce(std::move(parts_a), 1);
        const FactorMatrix r4 = dmtk::parallel_reduce(std::move(parts_b), 4);
        CHECK(r1 == expected);
        CHECK(r4 == expected);
    }
}

TEST_CASE("parallel_reduce validates input") {
    CHECK_THROWS_AS(dmtk::parallel_reduce(std::vector<FactorMatrix>{}, 1), std::invalid_argument);
    std::vector<FactorMatrix> bad;
    bad.emplace_back(2, 2);
    bad.emplace_back(3, 2);
    CHECK_THROWS_AS(dmtk::parallel_reduce(std::move(bad), 1), std::invalid_argument);
}
