// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokprune/errors.hpp"

namespace tokprune {

namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc += a[k] * b[k];
    }
    return acc;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t n_tokens, std::size_t dim, std::vector<double> data)
    : m_n_tokens(n_tokens),
      m_dim(dim),
      m_data(std::move(data)) {
    if (n_tokens == 0 || dim == 0) {
        throw DomainError("feature matrix needs at least one token and one dimension");
    }
    if (m_data.size() != n_tokens * dim) {
        throw DomainError("feature matrix data has " + std::to_string(m_data.size()) + " values, expected " +
                          std::to_string(n_tokens * dim));
    }
    m_norms.resize(n_tokens);
    m_sq_norms.resize(n_tokens);
    for (std::size_t i = 0; i < n_tokens; ++i) {
        const auto r = row(i);
        for (double v : r) {
            if (!std::isfinite(v)) {
                throw ValidationError("non-finite feature value in token " + std::to_string(i));
            }
        }
        m_sq_norms[i] = dot(r, r);
        m_norms[i] = std::sqrt(m_sq_norms[i]);
        if (m_norms[i] == 0.0) {
            throw DegenerateVectorError("token " + std::to_string(i) + " has zero norm", i);
        }
    }
}

ImportanceVector::ImportanceVector(std::vector<double> scores) : m_scores(std::move(scores)) {
    if (m_scores.empty()) {
        throw DomainError("importance vector is empty");
    }
    for (std::size_t i = 0; i < m_scores.size(); ++i) {
        if (!std::isfinite(m_scores[i])) {
            throw ValidationError("non-finite importance score at index " + std::to_string(i));
        }
    }
}

std::string_view method_name(Method method) noexcept {
    switch (method) {
    case Method::importance:
        return "importance";
    case Method::fps:
        return "fps";
    case Method::hybrid:
        return "hybrid";
    case Method::mmr:
        return "mmr";
    case Method::mmr_naive:
        return "mmr-naive";
    case Method::dpp:
        return "dpp";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    for (Method m : {Method::importance, Method::fps, Method::hybrid, Method::mmr, Method::mmr_naive, Method::dpp}) {
        if (method_name(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

bool method_uses_lambda(Method method) noexcept {
    return method == Method::hybrid || method == Method::mmr || method == Method::mmr_naive;
}

void validate_selection(const Selection& selection, std::size_t n_tokens) {
    if (selection.indices.empty()) {
        throw ValidationError("selection is empty");
    }
    std::vector<char> seen(n_tokens, 0);
    for (std::size_t pos = 0; pos < selection.indices.size(); ++pos) {
        const std::size_t idx = selection.indices[pos];
        if (idx >= n_tokens) {
            throw ValidationError("selection index " + std::to_string(idx) + " at position " + std::to_string(pos) +
                                  " is out of range for " + std::to_string(n_tokens) + " tokens");
        }
        if (seen[idx]) {
            throw ValidationError("duplicate selection index " + std::to_string(idx) + " at position " +
                                  std::to_string(pos));
        }
        seen[idx] = 1;
    }
    if (selection.step_scores && selection.step_scores->size() != selection.indices.size()) {
        throw ValidationError("step_scores has " + std::to_string(selection.step_scores->size()) +
                              " entries for " + std::to_string(selection.indices.size()) + " indices");
    }
}

void check_paired(const FeatureMatrix& features, const ImportanceVector& w) {
    if (features.n_tokens() != w.size()) {
        throw PairingError("importance vector has " + std::to_string(w.size()) + " entries but feature matrix has " +
                           std::to_string(features.n_tokens()) + " tokens");
    }
}

MaxSimState::MaxSimState(std::size_t n_tokens) : m_max_sim(n_tokens, -1.0), m_selected(n_tokens, 0) {}

void MaxSimState::absorb(std::size_t selected, std::span<const double> similarity_row) {
    m_selected[selected] = 1;
    ++m_n_selected;
    for (std::size_t i = 0; i < m_max_sim.size(); ++i) {
        const double s = similarity_row[i];
        m_negative += s < 0.0 ? 1 : 0;
        m_max_sim[i] = std::max(m_max_sim[i], s);
    }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DomainError("cosine similarity of vectors with different lengths " + std::to_string(a.size()) +
                          " and " + std::to_string(b.size()));
    }
    const double sq_a = dot(a, a);
    if (std::sqrt(sq_a) == 0.0) {
        throw DegenerateVectorError("first vector has zero norm", 0);
    }
    const double sq_b = dot(b, b);
    if (std::sqrt(sq_b) == 0.0) {
        throw DegenerateVectorError("second vector has zero norm", 1);
    }
    return dot(a, b) / std::sqrt(sq_a * sq_b);
}

double pair_similarity(const FeatureMatrix& features, std::size_t i, std::size_t j) noexcept {
    // sqrt(|a|^2 |b|^2) rather than |a| |b| so identical rows give exactly 1.
    return dot(features.row(i), features.row(j)) / std::sqrt(features.sq_norm(i) * features.sq_norm(j));
}

std::vector<double> similarity_row(const FeatureMatrix& features, std::size_t j) {
    std::vector<double> out(features.n_tokens());
    similarity_row_into(features, j, out);
    return out;
}

void similarity_row_into(const FeatureMatrix& features, std::size_t j, std::span<double> out) {
    if (j >= features.n_tokens()) {
        throw DomainError("token index " + std::to_string(j) + " out of range");
    }
    for (std::size_t i = 0; i < features.n_tokens(); ++i) {
        out[i] = pair_similarity(features, i, j);
    }
}

NormalizedImportance normalize_importance(const ImportanceVector& w, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("epsilon must be a positive finite number");
    }
    const auto [lo, hi] = std::minmax_element(w.scores().begin(), w.scores().end());
    const double min_w = *lo;
    const double denom = (*hi - min_w) + epsilon;
    NormalizedImportance out;
    out.values.reserve(w.size());
    for (double v : w.scores()) {
        out.values.push_back((v - min_w) / denom);
    }
    return out;
}

}  // namespace tokprune
