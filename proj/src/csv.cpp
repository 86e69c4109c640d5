#include "nbf/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "nbf/analysis.hpp"

namespace nbf {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

[[noreturn]] void parse_fail(const std::string& path, long line_no, const std::string& message) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + message);
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& path,
                                        long line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (in_quotes) parse_fail(path, line_no, "unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

double parse_double_field(const std::string& field, const std::string& path, long line_no) {
    const std::string t = trim(field);
    if (t.empty()) parse_fail(path, line_no, "empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        parse_fail(path, line_no, "cannot parse number '" + t + "'");
    }
    if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite value '" + t + "'");
    return v;
}

long parse_long_field(const std::string& field, const std::string& path, long line_no) {
    const std::string t = trim(field);
    if (t.empty()) parse_fail(path, line_no, "empty integer field");
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) {
        parse_fail(path, line_no, "cannot parse integer '" + t + "'");
    }
    return v;
}

std::uint64_t parse_u64_field(const std::string& field, const std::string& path, long line_no) {
    const std::string t = trim(field);
    if (t.empty()) parse_fail(path, line_no, "empty integer field");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) {
        parse_fail(path, line_no, "cannot parse integer '" + t + "'");
    }
    return static_cast<std::uint64_t>(v);
}

Study study_from_name(const std::string& name, const std::string& path, long line_no) {
    if (name == "type1") return Study::Type1;
    if (name == "power") return Study::Power;
    if (name == "coverage") return Study::Coverage;
    parse_fail(path, line_no, "unknown study '" + name + "'");
}

Method method_from_name(const std::string& name, const std::string& path, long line_no) {
    if (name == "bm") return Method::BM;
    if (name == "perm") return Method::Perm;
    if (name == "c2") return Method::C2;
    if (name == "c2_theta0") return Method::C2Theta0;
    if (name == "c2_sigma_max") return Method::C2SigmaMax;
    parse_fail(path, line_no, "unknown method '" + name + "'");
}

constexpr const char* kSimHeader =
    "study,setting_id,dist1,dist2,n1,n2,alpha,method,rate,se,n_iter,n_degenerate,seed,"
    "target_theta,bradley_violation";
constexpr std::size_t kSimFieldCount = 15;

}  // namespace

ParsedGroups read_group_value_csv(const std::string& path, bool swap_groups) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);

    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> groups;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, path, line_no);
        if (!header_seen) {
            if (fields.size() != 2 || lower(trim(fields[0])) != "group" ||
                lower(trim(fields[1])) != "value") {
                parse_fail(path, line_no, "expected header 'group,value'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) {
            parse_fail(path, line_no,
                       "expected 2 fields, got " + std::to_string(fields.size()));
        }
        const std::string label = trim(fields[0]);
        if (label.empty()) parse_fail(path, line_no, "empty group label");
        const double value = parse_double_field(fields[1], path, line_no);

        std::size_t gi = labels.size();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) {
                gi = i;
                break;
            }
        }
        if (gi == labels.size()) {
            if (labels.size() == 2) {
                parse_fail(path, line_no, "more than two groups (unexpected '" + label + "')");
            }
            labels.push_back(label);
            groups.emplace_back();
        }
        groups[gi].push_back(value);
    }
    if (!header_seen) {
        throw std::runtime_error(path + ": empty file, expected header 'group,value'");
    }
    if (labels.size() != 2) {
        throw std::runtime_error(path + ": expected exactly two groups, found " +
                                 std::to_string(labels.size()));
    }

    ParsedGroups out{Sample{std::move(groups[0]), labels[0]},
                     Sample{std::move(groups[1]), labels[1]}};
    if (swap_groups) std::swap(out.sample1, out.sample2);
    return out;
}

std::string format_double_exact(double value) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_sim_csv(const SimReport& report, std::ostream& out) {
    out << kSimHeader << '\n';
    for (const auto& cell : report.cells) {
        out << study_name(cell.study) << ',' << cell.setting_id << ',' << csv_escape(cell.dist1)
            << ',' << csv_escape(cell.dist2) << ',' << cell.n1 << ',' << cell.n2 << ','
            << format_double_exact(cell.alpha) << ',' << method_name(cell.method) << ','
            << format_double_exact(cell.rate) << ',' << format_double_exact(cell.se) << ','
            << cell.n_iter << ',' << cell.n_degenerate << ',' << cell.seed << ',';
        if (cell.target_theta) out << format_double_exact(*cell.target_theta);
        out << ',';
        if (cell.bradley_violation) out << (*cell.bradley_violation ? '1' : '0');
        out << '\n';
    }
}

void write_sim_csv_file(const SimReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_sim_csv(report, out);
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::vector<SimCell> read_sim_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);

    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::vector<SimCell> cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, path, line_no);
        if (!header_seen) {
            if (fields.size() != kSimFieldCount || trim(fields[0]) != "study") {
                parse_fail(path, line_no, "unexpected simulation CSV header");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != kSimFieldCount) {
            parse_fail(path, line_no,
                       "expected " + std::to_string(kSimFieldCount) + " fields, got " +
                           std::to_string(fields.size()));
        }
        SimCell cell;
        cell.study = study_from_name(trim(fields[0]), path, line_no);
        cell.setting_id = static_cast<int>(parse_long_field(fields[1], path, line_no));
        cell.dist1 = fields[2];
        cell.dist2 = fields[3];
        cell.n1 = static_cast<int>(parse_long_field(fields[4], path, line_no));
        cell.n2 = static_cast<int>(parse_long_field(fields[5], path, line_no));
        cell.alpha = parse_double_field(fields[6], path, line_no);
        cell.method = method_from_name(trim(fields[7]), path, line_no);
        cell.rate = parse_double_field(fields[8], path, line_no);
        cell.se = parse_double_field(fields[9], path, line_no);
        cell.n_iter = parse_long_field(fields[10], path, line_no);
        cell.n_degenerate = parse_long_field(fields[11], path, line_no);
        cell.seed = parse_u64_field(fields[12], path, line_no);
        if (!trim(fields[13]).empty()) {
            cell.target_theta = parse_double_field(fields[13], path, line_no);
        }
        const std::string bradley = trim(fields[14]);
        if (!bradley.empty()) {
            if (bradley != "0" && bradley != "1") {
                parse_fail(path, line_no, "bradley_violation must be empty, 0, or 1");
            }
            cell.bradley_violation = bradley == "1";
        }
        cells.push_back(std::move(cell));
    }
    if (!header_seen) throw std::runtime_error(path + ": empty simulation CSV");
    return cells;
}

}  // namespace nbf
