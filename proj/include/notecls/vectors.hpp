#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "notecls/errors.hpp"

namespace notecls {

// Sparse document vector: entries sorted by strictly increasing index, no
// explicit zeros. The interchange type for BoW and TF-IDF features.
struct SparseVector {
    int dim = 0;
    std::vector<std::pair<int, double>> entries;

    double l2_norm() const {
        double s = 0.0;
        for (const auto& [i, v] : entries) s += v * v;
        return std::sqrt(s);
    }
};

// Dense document vector, used for embedding features.
struct DenseVector {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }

    double l2_norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }
};

inline int dim_of(const SparseVector& x) { return x.dim; }
inline int dim_of(const DenseVector& x) { return x.dim(); }

inline double dot(std::span<const double> w, const SparseVector& x) {
    if (static_cast<int>(w.size()) != x.dim)
        throw DimensionMismatch(w.size(), static_cast<std::size_t>(x.dim));
    double s = 0.0;
    for (const auto& [i, v] : x.entries) s += w[static_cast<std::size_t>(i)] * v;
    return s;
}

inline double dot(std::span<const double> w, const DenseVector& x) {
    if (w.size() != x.values.size())
        throw DimensionMismatch(w.size(), x.values.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x.values[i];
    return s;
}

// acc += scale * x, touching only the nonzero coordinates for sparse input.
inline void add_scaled(std::span<double> acc, double scale, const SparseVector& x) {
    for (const auto& [i, v] : x.entries) acc[static_cast<std::size_t>(i)] += scale * v;
}

inline void add_scaled(std::span<double> acc, double scale, const DenseVector& x) {
    for (std::size_t i = 0; i < x.values.size(); ++i) acc[i] += scale * x.values[i];
}

inline DenseVector densify(const SparseVector& x) {
    DenseVector d;
    d.values.assign(static_cast<std::size_t>(x.dim), 0.0);
    for (const auto& [i, v] : x.entries) d.values[static_cast<std::size_t>(i)] = v;
    return d;
}

} // namespace notecls
