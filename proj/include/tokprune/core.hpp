// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tokprune {

inline constexpr double default_epsilon = 1e-8;

/**
 * N tokens by d dimensions, row-major, one row per token. Immutable after
 * construction. Rows are validated (finite, non-zero norm) and their
 * Euclidean norms cached, so every similarity evaluation over the same
 * matrix divides by the same stored values.
 */
class FeatureMatrix {
public:
    FeatureMatrix(std::size_t n_tokens, std::size_t dim, std::vector<double> data);

    std::size_t n_tokens() const noexcept { return m_n_tokens; }
    std::size_t dim() const noexcept { return m_dim; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {m_data.data() + i * m_dim, m_dim};
    }
    double norm(std::size_t i) const noexcept { return m_norms[i]; }
    double sq_norm(std::size_t i) const noexcept { return m_sq_norms[i]; }
    std::span<const double> data() const noexcept { return m_data; }
    std::span<const double> norms() const noexcept { return m_norms; }

    friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
        return a.m_n_tokens == b.m_n_tokens && a.m_dim == b.m_dim && a.m_data == b.m_data;
    }

private:
    std::size_t m_n_tokens;
    std::size_t m_dim;
    std::vector<double> m_data;
    std::vector<double> m_norms;
    std::vector<double> m_sq_norms;
};

/// Raw per-token importance scores; finite and non-empty.
class ImportanceVector {
public:
    explicit ImportanceVector(std::vector<double> scores);

    std::size_t size() const noexcept { return m_scores.size(); }
    double operator[](std::size_t i) const noexcept { return m_scores[i]; }
    std::span<const double> scores() const noexcept { return m_scores; }

    friend bool operator==(const ImportanceVector&, const ImportanceVector&) = default;

private:
    std::vector<double> m_scores;
};

/// Min-max normalized importance, every value in [0, 1].
struct NormalizedImportance {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

enum class Method { importance, fps, hybrid, mmr, mmr_naive, dpp };

std::string_view method_name(Method method) noexcept;
/// Accepts the CLI spellings: importance, fps, hybrid, mmr, mmr-naive, dpp.
std::optional<Method> parse_method(std::string_view name) noexcept;
/// True for the strategies parameterized by lambda (hybrid, mmr, mmr-naive).
bool method_uses_lambda(Method method) noexcept;

/// Ordered result of a selector. `indices` keep selection order.
struct Selection {
    std::vector<std::size_t> indices;
    std::optional<std::vector<double>> step_scores;
    Method method = Method::mmr;
    std::optional<double> lambda;

    std::size_t k() const noexcept { return indices.size(); }
    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Throws ValidationError unless indices are distinct, in [0, n_tokens), and
/// non-empty, and step_scores (when present) has one entry per index.
void validate_selection(const Selection& selection, std::size_t n_tokens);

/// Throws PairingError if the two inputs disagree on the token count.
void check_paired(const FeatureMatrix& features, const ImportanceVector& w);

/**
 * Running maximum similarity of every token to the selected set.
 * Starts at -1 for every token; `absorb` folds in the similarity row of a
 * newly selected token.
 */
class MaxSimState {
public:
    explicit MaxSimState(std::size_t n_tokens);

    void absorb(std::size_t selected, std::span<const double> similarity_row);

    std::span<const double> max_similarity() const noexcept { return m_max_sim; }
    bool is_selected(std::size_t i) const noexcept { return m_selected[i] != 0; }
    std::size_t n_selected() const noexcept { return m_n_selected; }
    /// Number of negative similarities folded in so far (diagnostic only).
    std::size_t negative_similarity_count() const noexcept { return m_negative; }

private:
    std::vector<double> m_max_sim;
    std::vector<char> m_selected;
    std::size_t m_n_selected = 0;
    std::size_t m_negative = 0;
};

/// Cosine similarity of two equal-length vectors. Throws DegenerateVectorError
/// (index 0 or 1 for a or b) on a zero-norm input and DomainError on a length
/// mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Similarity of rows i and j using the cached norms. Symmetric bit for bit.
double pair_similarity(const FeatureMatrix& features, std::size_t i, std::size_t j) noexcept;

/// Similarity of every row to row j.
std::vector<double> similarity_row(const FeatureMatrix& features, std::size_t j);
void similarity_row_into(const FeatureMatrix& features, std::size_t j, std::span<double> out);

/// (w_i - min w) / (max w - min w + epsilon). Throws DomainError for
/// epsilon <= 0.
NormalizedImportance normalize_importance(const ImportanceVector& w, double epsilon = default_epsilon);

}  // namespace tokprune
