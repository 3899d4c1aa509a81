#include "lpsum/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lpsum/rng.hpp"

namespace lpsum {

DatasetKind dataset_kind_from_name(const std::string& name) {
    if (name == "gaussian") return DatasetKind::gaussian;
    if (name == "heavytail") return DatasetKind::heavytail;
    if (name == "augmented-identity") return DatasetKind::augmented_identity;
    if (name == "census-like") return DatasetKind::census_like;
    throw std::invalid_argument("unknown dataset generator '" + name + "'");
}

std::string dataset_kind_name(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::gaussian: return "gaussian";
        case DatasetKind::heavytail: return "heavytail";
        case DatasetKind::augmented_identity: return "augmented-identity";
        case DatasetKind::census_like: return "census-like";
    }
    return "?";
}

namespace {

void check_params(const GenParams& p, bool needs_k) {
    if (p.n == 0 || p.d == 0) {
        throw std::invalid_argument("gen_dataset: n and d must be positive");
    }
    if (needs_k && (p.k == 0 || p.k >= p.n)) {
        throw std::invalid_argument("gen_dataset: k must lie in [1, n)");
    }
    if (!(p.noise >= 0.0) || !(p.scale > 0.0)) {
        throw std::invalid_argument("gen_dataset: bad noise/scale");
    }
}

std::vector<double> targets_from(const MatrixF& a, double noise, Rng& rng,
                                 bool heavy) {
    std::vector<double> x0(a.cols());
    for (auto& v : x0) v = rng.normal();
    auto b = matvec(a, x0);
    for (auto& v : b) v += noise * (heavy ? rng.cauchy() : rng.normal());
    return b;
}

Dataset gen_gaussian(const GenParams& p, std::uint64_t seed) {
    Rng rng(seed, 0x67617573ULL);
    Dataset ds;
    ds.a = MatrixF(p.n, p.d);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.d; ++j) ds.a(i, j) = rng.normal();
    ds.b = targets_from(ds.a, p.noise, rng, false);
    return ds;
}

Dataset gen_heavytail(const GenParams& p, std::uint64_t seed) {
    Rng rng(seed, 0x68656176ULL);
    Dataset ds;
    ds.a = MatrixF(p.n, p.d);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.d; ++j) ds.a(i, j) = rng.cauchy();
    ds.b = targets_from(ds.a, p.noise, rng, true);
    return ds;
}

Dataset gen_augmented_identity(const GenParams& p, std::uint64_t seed) {
    Rng rng(seed, 0x6175676dULL);
    const std::size_t width = p.d + p.k;
    const std::size_t base = p.n - p.k;
    MatrixF staged(p.n, width);
    for (std::size_t i = 0; i < base; ++i) {
        for (std::size_t j = 0; j < p.d; ++j) staged(i, j) = p.scale * rng.normal();
    }
    for (std::size_t j = 0; j < p.k; ++j) {
        staged(base + j, p.d + j) = 1.0;  // the only mass in these directions
    }
    std::vector<double> x0(width);
    for (auto& v : x0) v = rng.normal();
    auto b_staged = matvec(staged, x0);
    for (auto& v : b_staged) v += p.noise * rng.normal();

    std::vector<std::size_t> order(p.n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = p.n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
    }
    Dataset ds;
    ds.a = MatrixF(p.n, width);
    ds.b.assign(p.n, 0.0);
    for (std::size_t i = 0; i < p.n; ++i) {
        const std::size_t src = order[i];
        for (std::size_t j = 0; j < width; ++j) ds.a(i, j) = staged(src, j);
        ds.b[i] = b_staged[src];
        if (src >= base) ds.planted_rows.push_back(i);
    }
    std::sort(ds.planted_rows.begin(), ds.planted_rows.end());
    return ds;
}

Dataset gen_census_like(const GenParams& p, std::uint64_t seed) {
    Rng rng(seed, 0x63656e73ULL);
    const std::size_t n_unique = std::max<std::size_t>(p.n / 5, 1);
    std::vector<double> sparsity(p.d);
    std::vector<double> col_scale(p.d);
    for (std::size_t j = 0; j < p.d; ++j) {
        sparsity[j] = 0.3 + 0.4 * rng.uniform();
        col_scale[j] = std::pow(10.0, static_cast<double>(j % 3));
    }
    MatrixF pool(n_unique, p.d);
    for (std::size_t i = 0; i < n_unique; ++i) {
        for (std::size_t j = 0; j < p.d; ++j) {
            if (rng.uniform() < sparsity[j]) continue;  // zero entry
            const double v = std::exp(1.2 * rng.normal() + 0.5) * col_scale[j];
            pool(i, j) = std::round(v);
        }
    }
    std::vector<double> x0(p.d);
    for (auto& v : x0) v = rng.normal();

    Dataset ds;
    ds.a = MatrixF(p.n, p.d);
    ds.b.assign(p.n, 0.0);
    for (std::size_t i = 0; i < p.n; ++i) {
        // Quadratic skew clusters the draws on a few heavy rows.
        const double u = rng.uniform();
        const std::size_t src = std::min<std::size_t>(
            static_cast<std::size_t>(u * u * static_cast<double>(n_unique)), n_unique - 1);
        for (std::size_t j = 0; j < p.d; ++j) ds.a(i, j) = pool(src, j);
        double t = 0.0;
        for (std::size_t j = 0; j < p.d; ++j) t += ds.a(i, j) * x0[j];
        const double lap = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.exponential();
        ds.b[i] = std::round(t + p.noise * lap);
    }
    return ds;
}

}  // namespace

Dataset gen_dataset(DatasetKind kind, const GenParams& params, std::uint64_t seed) {
    Dataset ds;
    switch (kind) {
        case DatasetKind::gaussian:
            check_params(params, false);
            ds = gen_gaussian(params, seed);
            break;
        case DatasetKind::heavytail:
            check_params(params, false);
            ds = gen_heavytail(params, seed);
            break;
        case DatasetKind::augmented_identity:
            check_params(params, true);
            ds = gen_augmented_identity(params, seed);
            break;
        case DatasetKind::census_like:
            check_params(params, false);
            ds = gen_census_like(params, seed);
            break;
    }
    ds.name = dataset_kind_name(kind);
    return ds;
}

MatrixF joint_matrix(const Dataset& ds) {
    MatrixF joint(ds.a.rows(), ds.a.cols() + 1);
    for (std::size_t i = 0; i < ds.a.rows(); ++i) {
        for (std::size_t j = 0; j < ds.a.cols(); ++j) joint(i, j) = ds.a(i, j);
        joint(i, ds.a.cols()) = ds.b[i];
    }
    return joint;
}

}  // namespace lpsum
