// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokprune/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "tokprune/errors.hpp"

namespace tokprune::io {

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class ByteWriter {
public:
    void put_bytes(const void* data, std::size_t size) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        m_bytes.insert(m_bytes.end(), p, p + size);
    }
    template <typename T>
    void put(T value) {
        put_bytes(&value, sizeof(T));
    }
    std::vector<std::uint8_t> take() { return std::move(m_bytes); }

private:
    std::vector<std::uint8_t> m_bytes;
};

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : m_bytes(bytes) {}

    template <typename T>
    T get(const char* field) {
        if (m_bytes.size() - m_pos < sizeof(T)) {
            throw FormatError("truncated header: missing " + std::string(field) + " at byte " + std::to_string(m_pos),
                              m_pos);
        }
        T value;
        std::memcpy(&value, m_bytes.data() + m_pos, sizeof(T));
        m_pos += sizeof(T);
        return value;
    }
    std::size_t pos() const noexcept { return m_pos; }
    std::size_t remaining() const noexcept { return m_bytes.size() - m_pos; }
    const std::uint8_t* cursor() const noexcept { return m_bytes.data() + m_pos; }

private:
    const std::vector<std::uint8_t>& m_bytes;
    std::size_t m_pos = 0;
};

void check_magic(ByteReader& in, const char (&magic)[5]) {
    if (in.remaining() < 4) {
        throw FormatError("truncated header: file shorter than the 4-byte magic", 0);
    }
    char got[4];
    std::memcpy(got, in.cursor(), 4);
    if (std::memcmp(got, magic, 4) != 0) {
        throw FormatError(std::string("bad magic at byte 0, expected ") + magic, 0);
    }
    in.get<std::uint32_t>("magic");
    const std::size_t at = in.pos();
    const auto version = in.get<std::uint32_t>("version");
    if (version != 1) {
        throw FormatError("unsupported version " + std::to_string(version) + " at byte " + std::to_string(at), at);
    }
}

std::size_t dtype_width(std::uint8_t dtype, std::size_t offset) {
    switch (dtype) {
    case 0:
        return 4;
    case 1:
        return 8;
    default:
        throw FormatError("unknown dtype " + std::to_string(dtype) + " at byte " + std::to_string(offset), offset);
    }
}

void put_payload(ByteWriter& out, std::span<const double> values, Dtype dtype) {
    for (double v : values) {
        if (dtype == Dtype::f32) {
            out.put(static_cast<float>(v));
        } else {
            out.put(v);
        }
    }
}

std::vector<double> get_payload(ByteReader& in, std::uint64_t count, std::size_t width) {
    const std::size_t header_end = in.pos();
    if (count > std::numeric_limits<std::uint64_t>::max() / width) {
        throw FormatError("payload size overflows", header_end);
    }
    const std::uint64_t expected = count * width;
    if (in.remaining() != expected) {
        throw FormatError("payload at byte " + std::to_string(header_end) + " has " +
                              std::to_string(in.remaining()) + " bytes, expected " + std::to_string(expected),
                          header_end + std::min<std::uint64_t>(in.remaining(), expected));
    }
    std::vector<double> values(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        values[i] = width == 4 ? static_cast<double>(in.get<float>("payload")) : in.get<double>("payload");
    }
    return values;
}

bool has_csv_extension(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv";
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw FormatError("line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "' as a number",
                          line);
    }
    if (!std::isfinite(value)) {
        throw ValidationError("line " + std::to_string(line) + ": non-finite value");
    }
    return value;
}

/// Non-empty, non-comment lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> data_lines(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::string_view rest(text);
    std::size_t line_no = 0;
    while (!rest.empty()) {
        ++line_no;
        const auto nl = rest.find('\n');
        const auto line = trim(rest.substr(0, nl));
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (!line.empty() && line.front() != '#') {
            lines.emplace_back(line_no, line);
        }
    }
    return lines;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::vector<std::uint8_t> encode_features(const FeatureMatrix& features, Dtype dtype) {
    ByteWriter out;
    out.put_bytes("FMAT", 4);
    out.put<std::uint32_t>(1);
    out.put<std::uint64_t>(features.n_tokens());
    out.put<std::uint64_t>(features.dim());
    out.put(static_cast<std::uint8_t>(dtype));
    put_payload(out, features.data(), dtype);
    return out.take();
}

FeatureMatrix decode_features(const std::vector<std::uint8_t>& bytes) {
    ByteReader in(bytes);
    check_magic(in, "FMAT");
    const auto n = in.get<std::uint64_t>("n_tokens");
    const auto dim = in.get<std::uint64_t>("dim");
    const std::size_t dtype_at = in.pos();
    const std::size_t width = dtype_width(in.get<std::uint8_t>("dtype"), dtype_at);
    if (n == 0 || dim == 0) {
        throw FormatError("header declares an empty matrix (" + std::to_string(n) + " x " + std::to_string(dim) + ")",
                          8);
    }
    if (n > std::numeric_limits<std::uint64_t>::max() / dim) {
        throw FormatError("header shape overflows", 8);
    }
    auto values = get_payload(in, n * dim, width);
    return FeatureMatrix(n, dim, std::move(values));
}

std::vector<std::uint8_t> encode_importance(const ImportanceVector& w, Dtype dtype) {
    ByteWriter out;
    out.put_bytes("FVEC", 4);
    out.put<std::uint32_t>(1);
    out.put<std::uint64_t>(w.size());
    out.put(static_cast<std::uint8_t>(dtype));
    put_payload(out, w.scores(), dtype);
    return out.take();
}

ImportanceVector decode_importance(const std::vector<std::uint8_t>& bytes) {
    ByteReader in(bytes);
    check_magic(in, "FVEC");
    const auto length = in.get<std::uint64_t>("length");
    const std::size_t dtype_at = in.pos();
    const std::size_t width = dtype_width(in.get<std::uint8_t>("dtype"), dtype_at);
    if (length == 0) {
        throw FormatError("header declares an empty vector", 8);
    }
    return ImportanceVector(get_payload(in, length, width));
}

FeatureMatrix parse_features_csv(const std::string& text) {
    const auto lines = data_lines(text);
    if (lines.empty()) {
        throw FormatError("CSV feature file has no rows", 1);
    }
    std::vector<double> data;
    std::size_t dim = 0;
    for (const auto& [line_no, line] : lines) {
        std::size_t columns = 0;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            data.push_back(parse_number(rest.substr(0, comma), line_no));
            ++columns;
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
        if (dim == 0) {
            dim = columns;
        } else if (columns != dim) {
            throw FormatError("line " + std::to_string(line_no) + " has " + std::to_string(columns) +
                                  " columns, expected " + std::to_string(dim),
                              line_no);
        }
    }
    return FeatureMatrix(lines.size(), dim, std::move(data));
}

ImportanceVector parse_importance_csv(const std::string& text) {
    const auto lines = data_lines(text);
    if (lines.empty()) {
        throw FormatError("CSV importance file has no values", 1);
    }
    std::vector<double> values;
    for (const auto& [line_no, line] : lines) {
        if (line.find(',') != std::string_view::npos) {
            throw FormatError("line " + std::to_string(line_no) + " has more than one value", line_no);
        }
        values.push_back(parse_number(line, line_no));
    }
    return ImportanceVector(std::move(values));
}

FeatureMatrix read_features(const std::filesystem::path& path) {
    if (has_csv_extension(path)) {
        return parse_features_csv(read_file_text(path));
    }
    return decode_features(read_file_bytes(path));
}

void write_features(const FeatureMatrix& features, const std::filesystem::path& path, Dtype dtype) {
    if (has_csv_extension(path)) {
        std::string text;
        for (std::size_t i = 0; i < features.n_tokens(); ++i) {
            const auto row = features.row(i);
            for (std::size_t c = 0; c < row.size(); ++c) {
                text += (c ? "," : "") + format_double(row[c]);
            }
            text += '\n';
        }
        write_file_atomic(path, text);
        return;
    }
    const auto bytes = encode_features(features, dtype);
    write_file_atomic(path, bytes.data(), bytes.size());
}

ImportanceVector read_importance(const std::filesystem::path& path) {
    if (has_csv_extension(path)) {
        return parse_importance_csv(read_file_text(path));
    }
    return decode_importance(read_file_bytes(path));
}

void write_importance(const ImportanceVector& w, const std::filesystem::path& path, Dtype dtype) {
    if (has_csv_extension(path)) {
        std::string text;
        for (double v : w.scores()) {
            text += format_double(v) + '\n';
        }
        write_file_atomic(path, text);
        return;
    }
    const auto bytes = encode_importance(w, dtype);
    write_file_atomic(path, bytes.data(), bytes.size());
}

std::string format_selection(const Selection& selection, const std::string& params_json) {
    // Hand-rolled so doubles use format_double and the key order is stable.
    std::string out = "{\n  \"method\": \"" + std::string(method_name(selection.method)) + "\",\n";
    out += "  \"lambda\": " + (selection.lambda ? format_double(*selection.lambda) : std::string("null")) + ",\n";
    out += "  \"k\": " + std::to_string(selection.indices.size()) + ",\n";
    out += "  \"indices\": [";
    for (std::size_t i = 0; i < selection.indices.size(); ++i) {
        out += (i ? ", " : "") + std::to_string(selection.indices[i]);
    }
    out += "]";
    if (selection.step_scores) {
        out += ",\n  \"step_scores\": [";
        for (std::size_t i = 0; i < selection.step_scores->size(); ++i) {
            out += (i ? ", " : "") + format_double((*selection.step_scores)[i]);
        }
        out += "]";
    }
    if (!params_json.empty()) {
        out += ",\n  \"params\": " + params_json;
    }
    out += "\n}\n";
    return out;
}

Selection parse_selection(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("selection document: ") + e.what(), e.byte);
    }
    auto fail = [](const std::string& msg) -> ParseError { return ParseError("selection document: " + msg, 0); };
    if (!doc.is_object()) {
        throw fail("top level must be an object");
    }

    Selection out;
    if (!doc.contains("method") || !doc["method"].is_string()) {
        throw fail("missing string field 'method'");
    }
    const auto method = parse_method(doc["method"].get<std::string>());
    if (!method) {
        throw fail("unknown method '" + doc["method"].get<std::string>() + "'");
    }
    out.method = *method;

    if (doc.contains("lambda") && !doc["lambda"].is_null()) {
        if (!doc["lambda"].is_number()) {
            throw fail("'lambda' must be a number or null");
        }
        const double lambda = doc["lambda"].get<double>();
        if (!(lambda >= 0.0 && lambda <= 1.0)) {
            throw ValidationError("selection document: lambda outside [0, 1]");
        }
        out.lambda = lambda;
    }

    if (!doc.contains("indices") || !doc["indices"].is_array()) {
        throw fail("missing array field 'indices'");
    }
    for (const auto& v : doc["indices"]) {
        if (!v.is_number_unsigned()) {
            throw fail("'indices' must hold non-negative integers");
        }
        out.indices.push_back(v.get<std::size_t>());
    }
    if (out.indices.empty()) {
        throw ValidationError("selection document: 'indices' is empty");
    }
    if (doc.contains("k")) {
        if (!doc["k"].is_number_unsigned() || doc["k"].get<std::size_t>() != out.indices.size()) {
            throw ValidationError("selection document: 'k' does not match the number of indices");
        }
    }
    auto sorted = out.indices;
    std::sort(sorted.begin(), sorted.end());
    if (const auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
        throw ValidationError("selection document: duplicate index " + std::to_string(*dup));
    }

    if (doc.contains("step_scores") && !doc["step_scores"].is_null()) {
        if (!doc["step_scores"].is_array()) {
            throw fail("'step_scores' must be an array");
        }
        std::vector<double> scores;
        for (const auto& v : doc["step_scores"]) {
            if (!v.is_number()) {
                throw fail("'step_scores' must hold numbers");
            }
            scores.push_back(v.get<double>());
        }
        if (scores.size() != out.indices.size()) {
            throw ValidationError("selection document: 'step_scores' length does not match 'indices'");
        }
        out.step_scores = std::move(scores);
    }
    return out;
}

void write_selection(const Selection& selection, const std::filesystem::path& path, const std::string& params_json) {
    write_file_atomic(path, format_selection(selection, params_json));
}

Selection read_selection(const std::filesystem::path& path) {
    return parse_selection(read_file_text(path));
}

std::string format_sweep_csv(const std::vector<TradeoffPoint>& points) {
    if (points.empty()) {
        throw DomainError("sweep has no points");
    }
    auto sig9 = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    std::string out = "method,lambda,hopkins,retention\n";
    for (const auto& p : points) {
        out += std::string(method_name(p.method)) + "," + (p.lambda ? sig9(*p.lambda) : "") + "," + sig9(p.hopkins) +
               "," + sig9(p.retention) + "\n";
    }
    return out;
}

void write_sweep_csv(const std::vector<TradeoffPoint>& points, const std::filesystem::path& path) {
    write_file_atomic(path, format_sweep_csv(points));
}

std::vector<std::uint8_t> encode_mask_pgm(const Selection& selection, std::size_t grid_w, std::size_t grid_h) {
    if (grid_w == 0 || grid_h == 0) {
        throw DomainError("mask grid must be non-empty");
    }
    const std::size_t n = grid_w * grid_h;
    validate_selection(selection, n);
    const std::string header = "P5\n" + std::to_string(grid_w) + " " + std::to_string(grid_h) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const std::size_t pixels_at = out.size();
    out.resize(pixels_at + n, 0);
    for (std::size_t i : selection.indices) {
        const std::size_t x = i % grid_w;
        const std::size_t y = i / grid_w;
        out[pixels_at + y * grid_w + x] = 255;
    }
    return out;
}

void write_mask_pgm(const Selection& selection, std::size_t grid_w, std::size_t grid_h,
                    const std::filesystem::path& path) {
    const auto bytes = encode_mask_pgm(selection, grid_w, grid_h);
    write_file_atomic(path, bytes.data(), bytes.size());
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) {
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename temp file onto " + path.string());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace tokprune::io
