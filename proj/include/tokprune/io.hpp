// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tokprune/core.hpp"
#include "tokprune/metrics.hpp"

namespace tokprune::io {

/*
 * Binary layouts, all integers and values little-endian, no padding:
 *
 *   FMAT: "FMAT" | u32 version=1 | u64 n_tokens | u64 dim | u8 dtype | payload
 *   FVEC: "FVEC" | u32 version=1 | u64 length   | u8 dtype | payload
 *
 * dtype 0 = float32, 1 = float64. Payload is row-major. 32-bit values are
 * widened to double on load.
 */
enum class Dtype : std::uint8_t { f32 = 0, f64 = 1 };

inline constexpr std::size_t fmat_header_size = 25;
inline constexpr std::size_t fvec_header_size = 17;

std::vector<std::uint8_t> encode_features(const FeatureMatrix& features, Dtype dtype = Dtype::f64);
FeatureMatrix decode_features(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_importance(const ImportanceVector& w, Dtype dtype = Dtype::f64);
ImportanceVector decode_importance(const std::vector<std::uint8_t>& bytes);

/// `.csv` paths use text (one token per line, comma-separated); anything
/// else is FMAT.
FeatureMatrix read_features(const std::filesystem::path& path);
void write_features(const FeatureMatrix& features, const std::filesystem::path& path, Dtype dtype = Dtype::f64);

/// `.csv` paths use one value per line; anything else is FVEC.
ImportanceVector read_importance(const std::filesystem::path& path);
void write_importance(const ImportanceVector& w, const std::filesystem::path& path, Dtype dtype = Dtype::f64);

FeatureMatrix parse_features_csv(const std::string& text);
ImportanceVector parse_importance_csv(const std::string& text);

/**
 * Selection documents are JSON objects:
 *   {"method": "mmr", "lambda": 0.5, "k": 2, "indices": [0, 2],
 *    "step_scores": [1.0, 0.0], "params": {...}}
 * lambda may be null, step_scores and params are optional. Doubles are
 * written in shortest round-trip form.
 */
std::string format_selection(const Selection& selection, const std::string& params_json = "");
Selection parse_selection(const std::string& text);
void write_selection(const Selection& selection, const std::filesystem::path& path,
                     const std::string& params_json = "");
Selection read_selection(const std::filesystem::path& path);

/// `method,lambda,hopkins,retention` with 9 significant digits.
std::string format_sweep_csv(const std::vector<TradeoffPoint>& points);
void write_sweep_csv(const std::vector<TradeoffPoint>& points, const std::filesystem::path& path);

/// Binary PGM (P5); token i maps to pixel (i mod grid_w, i div grid_w).
std::vector<std::uint8_t> encode_mask_pgm(const Selection& selection, std::size_t grid_w, std::size_t grid_h);
void write_mask_pgm(const Selection& selection, std::size_t grid_w, std::size_t grid_h,
                    const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
/// Writes to a sibling temp file then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace tokprune::io
