#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "dmtk/krp.hpp"
#include "dmtk/oracle.hpp"
#include "doctest.h"

using dmtk::FactorList;
using dmtk::FactorMatrix;
using dmtk::KrpState;
using dmtk::KrpStats;

namespace {

FactorMatrix random_factor(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FactorMatrix m(rows, cols);
    for (auto& v : m.values()) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return m;
}

std::vector<FactorMatrix> random_inputs(const std::vector<std::int64_t>& dims, std::int64_t cols,
                                        std::uint64_t seed) {
    std::vector<FactorMatrix> mats;
    for (std::size_t z = 0; z < dims.size(); ++z) {
        mats.push_back(random_factor(dims[z], cols, seed + z * 1000));
    }
    return mats;
}

FactorList pointers(const std::vector<FactorMatrix>& mats) {
    FactorList list;
    for (const FactorMatrix& m : mats) list.push_back(&m);
    return list;
}

}  // namespace

TEST_CASE("one row through three inputs") {
    const FactorMatrix a(1, 2, {1, 2});
    const FactorMatrix b(1, 2, {3, 4});
    const FactorMatrix c(1, 2, {5, 6});
    KrpState state({&a, &b, &c});
    std::vector<double> row(2);
    dmtk::krp_row(state, row);
    CHECK(row == std::vector<double>{15, 48});
}

TEST_CASE("two-input product, last input fastest") {
    const FactorMatrix a(2, 1, {1, 2});
    const FactorMatrix b(2, 1, {3, 4});
    const FactorMatrix k = dmtk::krp({&a, &b}, 1);
    REQUIRE(k.rows() == 4);
    REQUIRE(k.cols() == 1);
    CHECK(k(0, 0) == 3);
    CHECK(k(1, 0) == 4);
    CHECK(k(2, 0) == 6);
    CHECK(k(3, 0) == 8);
}

TEST_CASE("single input copies through") {
    const FactorMatrix a = random_factor(5, 3, 77);
    const FactorMatrix k = dmtk::krp({&a}, 2);
    CHECK(k == a);
}

TEST_CASE("krp, naive krp and the Kronecker construction agree bitwise") {
    const std::vector<std::vector<std::int64_t>> shapes = {
        {6}, {3, 4}, {2, 3, 4}, {3, 2, 2, 3}, {2, 2, 3, 2, 2}, {4, 1, 3}, {1, 1, 5}};
    for (const auto& dims : shapes) {
        for (std::int64_t cols : {1, 3, 25}) {
            const auto mats = random_inputs(dims, cols, 42);
            const FactorList inputs = pointers(mats);
            const FactorMatrix reference = dmtk::oracle::krp_kron(inputs);
            CHECK(dmtk::krp(inputs, 1) == reference);
            CHECK(dmtk::krp_naive(inputs, 1) == reference);
        }
    }
}

TEST_CASE("identical rows for every thread count") {
    const auto mats = random_inputs({5, 4, 3, 2}, 7, 9);
    const FactorList inputs = pointers(mats);
    const FactorMatrix reference = dmtk::krp(inputs, 1);
    for (int threads : {2, 3, 7, 16, 200}) {
        CHECK(dmtk::krp(inputs, threads) == reference);
        CHECK(dmtk::krp_naive(inputs, threads) == reference);
    }
}

TEST_CASE("seek lands exactly where sequential advancing lands") {
    const auto mats = random_inputs({3, 2, 4, 2}, 5, 31);
    const FactorList inputs = pointers(mats);

    KrpState sequential(inputs);
    std::vector<double> a(5), b(5);
    for (std::int64_t row = 0; row < 48; ++row) {
        KrpState sought(inputs, row);
        sought.write_row(a);
        sequential.write_row(b);
        CHECK(a == b);
        sequential.advance();
    }
}

TEST_CASE("cached partials do the bookkeeping the docs promise") {
    // Z = 3, all radices 2: one partial, rebuilt on every second advance.
    const auto m3 = random_inputs({2, 2, 2}, 4, 7);
    KrpStats stats;
    dmtk::krp(pointers(m3), 1, &stats);
    CHECK(stats.hadamard_products == 12);  // 1 seed + 8 rows + 3 rebuilds

    KrpStats naive;
    dmtk::krp_naive(pointers(m3), 1, &naive);
    CHECK(naive.hadamard_products == 16);  // (Z-1) per row

    // Z = 4, radices 2: two partials.
    const auto m4 = random_inputs({2, 2, 2, 2}, 4, 7);
    KrpStats stats4;
    dmtk::krp(pointers(m4), 1, &stats4);
    CHECK(stats4.hadamard_products == 28);  // 2 seeds + 16 rows + 10 rebuilds

    KrpStats naive4;
    dmtk::krp_naive(pointers(m4), 1, &naive4);
    CHECK(naive4.hadamard_products == 48);
}

TEST_CASE("single-thread work bound") {
    const std::vector<std::vector<std::int64_t>> shapes = {
        {2, 2, 2}, {2, 2, 2, 2}, {3, 4, 5}, {5, 4, 3, 2}, {2, 3, 2, 3, 2}, {4, 4, 4, 4}};
    for (const auto& dims : shapes) {
        const auto mats = random_inputs(dims, 3, 11);
        const FactorList inputs = pointers(mats);
        const std::int64_t z = static_cast<std::int64_t>(dims.size());
        std::int64_t rows = 1;
        for (std::int64_t d : dims) rows *= d;
        const std::int64_t j_last = dims.back();

        KrpStats reuse;
        dmtk::krp(inputs, 1, &reuse);
        const std::uint64_t bound = static_cast<std::uint64_t>(
            rows + (rows + j_last - 1) / j_last * (z - 2) + (z - 2));
        CHECK(reuse.hadamard_products >= static_cast<std::uint64_t>(rows));
        CHECK(reuse.hadamard_products <= bound);

        KrpStats naive;
        dmtk::krp_naive(inputs, 1, &naive);
        CHECK(naive.hadamard_products == static_cast<std::uint64_t>(rows * (z - 1)));
        if (z >= 3 && j_last >= 2) {
            CHECK(reuse.hadamard_products < naive.hadamard_products);
        }
    }
}

TEST_CASE("two-input product costs exactly one product per row") {
    const auto mats = random_inputs({3, 2}, 4, 5);
    KrpStats stats;
    dmtk::krp(pointers(mats), 1, &stats);
    CHECK(stats.hadamard_products == 6);
}

TEST_CASE("inputs are validated") {
    CHECK_THROWS_AS(dmtk::krp(FactorList{}, 1), std::invalid_argument);

    const FactorMatrix a(2, 2, {1, 2, 3, 4});
    const FactorMatrix b(2, 3);
    CHECK_THROWS_AS(dmtk::krp({&a, &b}, 1), std::invalid_argument);
    CHECK_THROWS_AS(dmtk::krp({&a, nullptr}, 1), std::invalid_argument);

    KrpState two({&a, &a});
    std::vector<double> row(2);
    CHECK_THROWS_AS(dmtk::krp_row(two, row), std::invalid_argument);
}

TEST_CASE("radix-1 inputs collapse cleanly") {
    const FactorMatrix ones(1, 3, {2, 3, 4});
    const auto mats = random_inputs({3, 4}, 3, 21);
    const FactorList with = {&mats[0], &ones, &mats[1]};
    const FactorMatrix k = dmtk::krp(with, 2);
    const FactorMatrix reference = dmtk::oracle::krp_kron(with);
    CHECK(k == reference);
}
