#include "omcal/dataset.hpp"

#include "omcal/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <unordered_map>

namespace omcal {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string location(const fs::path& file, std::size_t line, std::size_t col) {
    return file.string() + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::ifstream open_input(const fs::path& file, std::ios::openmode mode = std::ios::in) {
    if (!fs::exists(file)) throw Error(ErrorKind::MissingFile, file.string() + ": no such file");
    std::ifstream in(file, mode);
    if (!in) throw Error(ErrorKind::IoError, file.string() + ": cannot open for reading");
    return in;
}

void byteswap_if_big_endian(double* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, data + i, sizeof(double));
            std::reverse(std::begin(bytes), std::end(bytes));
            std::memcpy(data + i, bytes, sizeof(double));
        }
    } else {
        (void)data;
        (void)count;
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

MatrixFormat parse_format(const std::string& s, const fs::path& meta) {
    if (s == "csv") return MatrixFormat::Csv;
    if (s == "f64le") return MatrixFormat::F64le;
    throw Error(ErrorKind::MalformedMeta, meta.string() + ": unknown view format '" + s + "'");
}

} // namespace

int MultiViewDataset::class_count() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
}

void validate(const MultiViewDataset& ds) {
    if (ds.views.empty()) throw Error(ErrorKind::ShapeMismatch, "dataset has no views");
    if (!ds.view_names.empty() && ds.view_names.size() != ds.views.size())
        throw Error(ErrorKind::ShapeMismatch, "view_names has " + std::to_string(ds.view_names.size()) +
                                                  " entries for " + std::to_string(ds.views.size()) + " views");
    const Index n = ds.views.front().rows();
    if (n < 1) throw Error(ErrorKind::ShapeMismatch, "view 0 has no rows");
    for (std::size_t v = 0; v < ds.views.size(); ++v) {
        const Matrix& x = ds.views[v];
        if (x.rows() != n)
            throw Error(ErrorKind::ShapeMismatch, "view " + std::to_string(v) + ": expected " + std::to_string(n) +
                                                      " rows, found " + std::to_string(x.rows()));
        if (x.cols() < 1) throw Error(ErrorKind::ShapeMismatch, "view " + std::to_string(v) + " has no columns");
        for (Index i = 0; i < x.rows(); ++i)
            for (Index j = 0; j < x.cols(); ++j)
                if (!std::isfinite(x(i, j)))
                    throw Error(ErrorKind::NonFiniteValue, "view " + std::to_string(v) + " row " +
                                                               std::to_string(i) + " col " + std::to_string(j));
    }
    if (ds.labels && static_cast<Index>(ds.labels->size()) != n)
        throw Error(ErrorKind::ShapeMismatch, "labels: expected " + std::to_string(n) + " entries, found " +
                                                  std::to_string(ds.labels->size()));
}

Matrix read_matrix_csv(const fs::path& file, Index expected_cols) {
    auto in = open_input(file);
    std::vector<double> values;
    Index cols = expected_cols;
    Index rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = line;
        if (trim(rest).empty()) continue;
        Index count = 0;
        std::size_t col_start = 0;
        while (true) {
            const auto comma = rest.find(',');
            std::string_view field = trim(rest.substr(0, comma));
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
                throw Error(ErrorKind::NonFiniteValue,
                            location(file, line_no, col_start + 1) + ": not a number: '" + std::string(field) + "'");
            if (!std::isfinite(v))
                throw Error(ErrorKind::NonFiniteValue, location(file, line_no, col_start + 1) + ": non-finite value");
            values.push_back(v);
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
            col_start += comma + 1;
        }
        if (cols < 0) cols = count;
        if (count != cols)
            throw Error(ErrorKind::ShapeMismatch, location(file, line_no, 1) + ": expected " + std::to_string(cols) +
                                                      " columns, found " + std::to_string(count));
        ++rows;
    }
    if (rows == 0) return Matrix(0, std::max<Index>(cols, 0));
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    return m;
}

Matrix read_matrix_f64le(const fs::path& file, Index rows, Index cols) {
    auto in = open_input(file, std::ios::binary);
    const auto bytes = fs::file_size(file);
    const auto expected = static_cast<std::uintmax_t>(rows) * static_cast<std::uintmax_t>(cols) * sizeof(double);
    if (bytes != expected)
        throw Error(ErrorKind::ShapeMismatch, file.string() + ": expected " + std::to_string(expected) +
                                                  " bytes for " + std::to_string(rows) + "x" + std::to_string(cols) +
                                                  ", found " + std::to_string(bytes));
    std::vector<double> buf(static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected));
    if (!in) throw Error(ErrorKind::IoError, file.string() + ": short read");
    byteswap_if_big_endian(buf.data(), buf.size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double v = buf[static_cast<std::size_t>(i * cols + j)];
            if (!std::isfinite(v))
                throw Error(ErrorKind::NonFiniteValue,
                            file.string() + ": row " + std::to_string(i) + " col " + std::to_string(j));
            m(i, j) = v;
        }
    return m;
}

void write_file_atomic(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(file.parent_path(), ec);
    }
    fs::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoError, tmp.string() + ": cannot open for writing");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw Error(ErrorKind::IoError, tmp.string() + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, file, ec);
    if (ec) throw Error(ErrorKind::IoError, file.string() + ": rename failed: " + ec.message());
}

void write_matrix_csv(const Matrix& m, const fs::path& file) {
    std::string text;
    text.reserve(static_cast<std::size_t>(m.size()) * 20);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) text += ',';
            text += format_double(m(i, j));
        }
        text += '\n';
    }
    write_file_atomic(file, text);
}

void write_matrix_f64le(const Matrix& m, const fs::path& file) {
    std::vector<double> buf(static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) buf[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    byteswap_if_big_endian(buf.data(), buf.size());
    std::string text(reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(double));
    write_file_atomic(file, text);
}

Labels remap_labels(std::span<const long long> raw) {
    std::set<long long> distinct(raw.begin(), raw.end());
    const bool contiguous = distinct.empty() ||
                            (*distinct.begin() == 0 && *distinct.rbegin() == static_cast<long long>(distinct.size()) - 1);
    Labels out;
    out.reserve(raw.size());
    if (contiguous) {
        for (long long v : raw) out.push_back(static_cast<int>(v));
        return out;
    }
    std::unordered_map<long long, int> ids;
    for (long long v : raw) {
        auto [it, inserted] = ids.try_emplace(v, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

Labels read_labels(const fs::path& file) {
    auto in = open_input(file);
    std::vector<long long> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view field = trim(line);
        if (field.empty()) continue;
        long long v = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size())
            throw Error(ErrorKind::NonFiniteValue,
                        location(file, line_no, 1) + ": not an integer label: '" + std::string(field) + "'");
        raw.push_back(v);
    }
    return remap_labels(raw);
}

void write_labels(std::span<const int> labels, const fs::path& file) {
    std::string text;
    for (int l : labels) {
        text += std::to_string(l);
        text += '\n';
    }
    write_file_atomic(file, text);
}

MultiViewDataset load_dataset(const fs::path& root) {
    const fs::path meta_path = root / "meta.json";
    if (!fs::is_directory(root)) throw Error(ErrorKind::MissingFile, root.string() + ": no such dataset directory");
    auto in = open_input(meta_path);
    json meta;
    try {
        meta = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedMeta, meta_path.string() + ": " + e.what());
    }

    MultiViewDataset ds;
    try {
        if (!meta.is_object() || !meta.contains("n") || !meta.contains("views"))
            throw Error(ErrorKind::MalformedMeta, meta_path.string() + ": requires keys 'n' and 'views'");
        const auto n = meta.at("n").get<Index>();
        if (n < 1) throw Error(ErrorKind::MalformedMeta, meta_path.string() + ": n must be >= 1");
        const auto& views = meta.at("views");
        if (!views.is_array() || views.empty())
            throw Error(ErrorKind::MalformedMeta, meta_path.string() + ": 'views' must be a non-empty array");
        for (std::size_t v = 0; v < views.size(); ++v) {
            const auto& entry = views[v];
            const auto name = entry.value("name", "view" + std::to_string(v));
            const fs::path file = root / entry.at("file").get<std::string>();
            const auto dims = entry.at("dims").get<Index>();
            if (dims < 1)
                throw Error(ErrorKind::MalformedMeta, meta_path.string() + ": views[" + std::to_string(v) +
                                                          "].dims must be >= 1");
            const auto format = parse_format(entry.value("format", std::string("csv")), meta_path);
            Matrix x = format == MatrixFormat::Csv ? read_matrix_csv(file, dims) : read_matrix_f64le(file, n, dims);
            if (x.rows() != n)
                throw Error(ErrorKind::ShapeMismatch, file.string() + ": expected " + std::to_string(n) +
                                                          " rows, found " + std::to_string(x.rows()));
            ds.views.push_back(std::move(x));
            ds.view_names.push_back(name);
        }
        if (meta.contains("labels") && !meta.at("labels").is_null()) {
            const fs::path file = root / meta.at("labels").get<std::string>();
            Labels labels = read_labels(file);
            if (static_cast<Index>(labels.size()) != n)
                throw Error(ErrorKind::ShapeMismatch, file.string() + ": expected " + std::to_string(n) +
                                                          " labels, found " + std::to_string(labels.size()));
            ds.labels = std::move(labels);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedMeta, meta_path.string() + ": " + e.what());
    }
    validate(ds);
    return ds;
}

void save_dataset(const MultiViewDataset& ds, const fs::path& root, SaveOptions options) {
    validate(ds);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw Error(ErrorKind::IoError, root.string() + ": " + ec.message());

    json meta;
    meta["n"] = ds.n();
    meta["views"] = json::array();
    for (std::size_t v = 0; v < ds.views.size(); ++v) {
        const bool csv = options.format == MatrixFormat::Csv;
        const std::string file = "view_" + std::to_string(v) + (csv ? ".csv" : ".f64");
        const std::string name = v < ds.view_names.size() ? ds.view_names[v] : "view" + std::to_string(v);
        if (csv)
            write_matrix_csv(ds.views[v], root / file);
        else
            write_matrix_f64le(ds.views[v], root / file);
        meta["views"].push_back(
            {{"name", name}, {"file", file}, {"dims", ds.views[v].cols()}, {"format", csv ? "csv" : "f64le"}});
    }
    if (ds.labels) {
        write_labels(*ds.labels, root / "labels.txt");
        meta["labels"] = "labels.txt";
    }
    write_file_atomic(root / "meta.json", meta.dump(2) + "\n");
}

void zscore_normalize(MultiViewDataset& ds) {
    for (Matrix& x : ds.views) {
        const Eigen::RowVectorXd mean = x.colwise().mean();
        x.rowwise() -= mean;
        const double denom = std::max<double>(1.0, static_cast<double>(x.rows() - 1));
        for (Index j = 0; j < x.cols(); ++j) {
            const double sd = std::sqrt(x.col(j).squaredNorm() / denom);
            if (sd > 0.0)
                x.col(j) /= sd;
            else
                x.col(j).setZero();
        }
    }
}

} // namespace omcal
