#include "cbtest/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace cbtest {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_field(const std::string& field, double& out) {
    std::string t = trim(field);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool split_two(const std::string& line, std::string& a, std::string& b) {
    size_t comma = line.find(',');
    if (comma == std::string::npos) return false;
    if (line.find(',', comma + 1) != std::string::npos) return false;
    a = line.substr(0, comma);
    b = line.substr(comma + 1);
    return true;
}

}  // namespace

LabeledSample read_pairs_csv(std::istream& in, const std::string& source_name) {
    LabeledSample out;
    std::string line;
    long lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::string fa, fb;
        double x, y;
        bool two = split_two(line, fa, fb);
        bool ok = two && parse_field(fa, x) && parse_field(fb, y);
        if (!ok) {
            if (first_content && two) {  // header row
                first_content = false;
                continue;
            }
            throw csv_error(source_name + ":" + std::to_string(lineno) +
                            ": expected two numeric comma-separated fields, got \"" + line + "\"");
        }
        first_content = false;
        out.pairs.emplace_back(x, y);
    }
    if (out.pairs.empty()) throw csv_error(source_name + ": no data rows");
    return out;
}

LabeledSample read_pairs_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw csv_error(path + ": cannot open");
    return read_pairs_csv(in, path);
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace cbtest
