#include "cli/reports.hpp"

#include <omcal/error.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace omcal::cli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, end);
}

ojson to_json(const MetricReport& m) {
    ojson j;
    j["acc"] = m.acc;
    j["nmi"] = m.nmi;
    j["purity"] = m.purity;
    j["ari"] = m.ari;
    j["f_score"] = m.f_score;
    j["precision"] = m.precision;
    return j;
}

MetricReport metrics_from_json(const json& j) {
    MetricReport m;
    m.acc = j.at("acc").get<double>();
    m.nmi = j.at("nmi").get<double>();
    m.purity = j.at("purity").get<double>();
    m.ari = j.at("ari").get<double>();
    m.f_score = j.at("f_score").get<double>();
    m.precision = j.at("precision").get<double>();
    return m;
}

ojson to_json(const FitReport& r) {
    ojson j;
    j["labels_file"] = r.labels_file;
    j["convergence_file"] = r.convergence_file;
    j["n"] = r.n;
    j["views"] = r.views;
    j["clusters"] = r.clusters;
    j["anchors"] = r.anchors;
    j["neighbors"] = r.neighbors;
    j["beta"] = r.beta;
    j["gamma"] = r.gamma;
    j["seed"] = r.seed;
    j["single_view"] = r.single_view;
    j["alpha"] = r.alpha;
    j["objective"] = r.objective;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["restart_used"] = r.restart_used;
    j["build_seconds"] = r.build_seconds;
    j["solve_seconds"] = r.solve_seconds;
    j["metrics"] = r.metrics ? to_json(*r.metrics) : ojson(nullptr);
    ojson warnings = ojson::array();
    for (const auto& [message, count] : r.warnings) warnings.push_back({{"message", message}, {"count", count}});
    j["warnings"] = warnings;
    return j;
}

FitReport fit_report_from_json(const json& j) {
    FitReport r;
    try {
        r.labels_file = j.at("labels_file").get<std::string>();
        r.convergence_file = j.at("convergence_file").get<std::string>();
        r.n = j.at("n").get<Index>();
        r.views = j.at("views").get<int>();
        r.clusters = j.at("clusters").get<int>();
        r.anchors = j.at("anchors").get<Index>();
        r.neighbors = j.at("neighbors").get<Index>();
        r.beta = j.at("beta").get<double>();
        r.gamma = j.at("gamma").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.single_view = j.at("single_view").get<bool>();
        r.alpha = j.at("alpha").get<std::vector<double>>();
        r.objective = j.at("objective").get<double>();
        r.iterations = j.at("iterations").get<int>();
        r.converged = j.at("converged").get<bool>();
        r.restart_used = j.at("restart_used").get<int>();
        r.build_seconds = j.at("build_seconds").get<double>();
        r.solve_seconds = j.at("solve_seconds").get<double>();
        if (!j.at("metrics").is_null()) r.metrics = metrics_from_json(j.at("metrics"));
        for (const auto& w : j.at("warnings")) r.warnings.emplace_back(w.at("message"), w.at("count"));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedMeta, std::string("results: ") + e.what());
    }
    return r;
}

FitReport read_fit_report(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::MissingFile, file.string() + ": cannot open");
    try {
        return fit_report_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedMeta, file.string() + ": " + e.what());
    }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep, std::size_t max_fields) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (out.size() + 1 < max_fields) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) break;
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    out.push_back(line.substr(start));
    return out;
}

double parse_double(const std::string& field, const std::string& where) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw Error(ErrorKind::MalformedMeta, where + ": not a number: '" + field + "'");
    return value;
}

long long parse_int(const std::string& field, const std::string& where) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw Error(ErrorKind::MalformedMeta, where + ": not an integer: '" + field + "'");
    return value;
}

// Reads a CSV with the given header; returns the data rows split into at
// most header-size fields.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& file, const std::string& header) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::MissingFile, file.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw Error(ErrorKind::MalformedMeta, file.string() + ":1: expected header '" + header + "'");
    const std::size_t fields = split(header, ',', 1000).size();
    std::vector<std::vector<std::string>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto row = split(line, ',', fields);
        if (row.size() != fields)
            throw Error(ErrorKind::MalformedMeta, file.string() + ":" + std::to_string(line_no) + ": expected " +
                                                      std::to_string(fields) + " fields, found " +
                                                      std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

constexpr const char* kConvergenceHeader = "iteration,objective";
constexpr const char* kBenchmarkHeader = "n,build_seconds,solve_seconds,total_seconds,iterations,kmeans_iterations";
constexpr const char* kSweepHeader =
    "anchors,beta,gamma,status,acc,nmi,purity,ari,f_score,precision,objective,iterations,converged,monotone,seconds,"
    "error";

} // namespace

std::string convergence_csv(const std::vector<double>& history) {
    std::string out = std::string(kConvergenceHeader) + "\n";
    for (std::size_t i = 0; i < history.size(); ++i)
        out += std::to_string(i) + "," + format_number(history[i]) + "\n";
    return out;
}

std::vector<double> read_convergence_csv(const std::filesystem::path& file) {
    std::vector<double> history;
    for (const auto& row : read_table(file, kConvergenceHeader)) {
        const std::string where = file.string() + ": iteration " + row[0];
        if (parse_int(row[0], where) != static_cast<long long>(history.size()))
            throw Error(ErrorKind::MalformedMeta, where + ": iterations must count up from 0");
        history.push_back(parse_double(row[1], where));
    }
    return history;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
    std::string out = std::string(kBenchmarkHeader) + "\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + format_number(r.build_seconds) + "," + format_number(r.solve_seconds) +
               "," + format_number(r.total_seconds) + "," + std::to_string(r.iterations) + "," +
               std::to_string(r.kmeans_iterations) + "\n";
    return out;
}

std::vector<BenchmarkRow> read_benchmark_csv(const std::filesystem::path& file) {
    std::vector<BenchmarkRow> rows;
    for (const auto& f : read_table(file, kBenchmarkHeader)) {
        const std::string where = file.string() + ": n=" + f[0];
        BenchmarkRow r;
        r.n = parse_int(f[0], where);
        r.build_seconds = parse_double(f[1], where);
        r.solve_seconds = parse_double(f[2], where);
        r.total_seconds = parse_double(f[3], where);
        r.iterations = static_cast<int>(parse_int(f[4], where));
        r.kmeans_iterations = static_cast<int>(parse_int(f[5], where));
        rows.push_back(r);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out << kSweepHeader << '\n';
    for (const auto& c : cells) {
        out << c.anchors << ',' << format_number(c.beta) << ',' << format_number(c.gamma) << ','
            << (c.ok ? "ok" : "failed") << ',';
        if (c.metrics) {
            const MetricReport& m = *c.metrics;
            for (double v : {m.acc, m.nmi, m.purity, m.ari, m.f_score, m.precision}) out << format_number(v) << ',';
        } else {
            out << ",,,,,,";
        }
        if (c.ok)
            out << format_number(c.objective) << ',' << c.iterations << ',' << (c.converged ? 1 : 0) << ','
                << (c.monotone ? 1 : 0) << ',';
        else
            out << ",,,,";
        std::string error = c.error;
        for (char& ch : error)
            if (ch == '\n' || ch == '\r') ch = ' ';
        out << format_number(c.seconds) << ',' << error << '\n';
    }
    return out.str();
}

std::vector<SweepCell> read_sweep_csv(const std::filesystem::path& file) {
    std::vector<SweepCell> cells;
    for (const auto& f : read_table(file, kSweepHeader)) {
        const std::string where = file.string() + ": cell " + std::to_string(cells.size());
        SweepCell c;
        c.anchors = parse_int(f[0], where);
        c.beta = parse_double(f[1], where);
        c.gamma = parse_double(f[2], where);
        if (f[3] != "ok" && f[3] != "failed") throw Error(ErrorKind::MalformedMeta, where + ": bad status " + f[3]);
        c.ok = f[3] == "ok";
        if (!f[4].empty()) {
            MetricReport m;
            m.acc = parse_double(f[4], where);
            m.nmi = parse_double(f[5], where);
            m.purity = parse_double(f[6], where);
            m.ari = parse_double(f[7], where);
            m.f_score = parse_double(f[8], where);
            m.precision = parse_double(f[9], where);
            c.metrics = m;
        }
        if (c.ok) {
            c.objective = parse_double(f[10], where);
            c.iterations = static_cast<int>(parse_int(f[11], where));
            c.converged = parse_int(f[12], where) != 0;
            c.monotone = parse_int(f[13], where) != 0;
        }
        c.seconds = parse_double(f[14], where);
        c.error = f[15];
        cells.push_back(std::move(c));
    }
    return cells;
}

} // namespace omcal::cli
