#include "gf/config.hpp"

#include <cstdio>
#include <stdexcept>

#include "gf/errors.hpp"

namespace gf {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double toNumber(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("config: bad numeric value '" + v + "' for " + key);
    }
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "eps_max")
        epsMax = toNumber(key, value);
    else if (key == "ratio")
        ratio = toNumber(key, value);
    else if (key == "grid_count")
        gridCount = static_cast<int>(toNumber(key, value));
    else if (key == "mollifier_q")
        mollifierQ = static_cast<int>(toNumber(key, value));
    else if (key == "mollifier_r")
        mollifierR = toNumber(key, value);
    else if (key == "tol_slope")
        tolSlope = toNumber(key, value);
    else if (key == "tol_res")
        tolRes = toNumber(key, value);
    else if (key == "tol_assoc")
        tolAssoc = toNumber(key, value);
    else if (key == "ode_rel_tol")
        odeRelTol = toNumber(key, value);
    else if (key == "out_dir")
        outDir = value;
    else
        throw ParseError("config: unknown key '" + key + "'");
}

RunConfig RunConfig::fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config: line " + std::to_string(lineNo) +
                             " is not 'key = value'");
        cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string CsvWriter::formatNumber(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
    if (!out_) throw Error("csv: cannot open '" + path + "' for writing");
    for (size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw ParameterError("csv: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << formatNumber(values[i]);
    out_ << "\n";
}

void CsvWriter::textRow(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw ParameterError("csv: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

}  // namespace gf
