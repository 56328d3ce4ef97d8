#include "cli/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twinbeam/units.hpp"

namespace twinbeam::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<double>>> rows;  // (line, values)
};

Table parse_table(const std::string& text, const std::string& file) {
    Table t;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line = trim(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        auto fields = split(line);
        if (!have_header) {
            t.header.assign(fields.begin(), fields.end());
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ParseError(file, line_no,
                             "expected " + std::to_string(t.header.size()) + " columns, found " +
                                 std::to_string(fields.size()));
        }
        std::vector<double> values;
        for (auto f : fields) {
            double v = 0.0;
            const auto* end = f.data() + f.size();
            auto res = std::from_chars(f.data(), end, v);
            if (f.empty() || res.ec != std::errc() || res.ptr != end) {
                throw ParseError(file, line_no, "not a number: '" + std::string(f) + "'");
            }
            values.push_back(v);
        }
        t.rows.emplace_back(line_no, std::move(values));
        if (eol == text.size()) break;
    }
    if (!have_header) {
        throw ParseError(file, 1, "file is empty");
    }
    return t;
}

std::size_t column(const Table& t, std::string_view name, const std::string& file) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) return i;
    }
    throw ParseError(file, 1, "missing column '" + std::string(name) + "'");
}

}  // namespace

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_number(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double x, int decimals) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, decimals);
    std::string s(buf, res.ptr);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

std::string spectrum_csv(const NoiseSpectrum& spectrum) {
    std::string out = "freq_hz,linear,db\n";
    const auto f = spectrum.freqs_hz();
    const auto v = spectrum.values();
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        out += format_number(f[i]);
        out += ',';
        out += format_number(v[i]);
        out += ',';
        out += v[i] > 0.0 ? format_fixed(to_db(v[i]), 4) : std::string("-inf");
        out += '\n';
    }
    return out;
}

std::string power_csv(const PowerDataset& data) {
    std::string out = "p_pump_mw,p_out_mw\n";
    for (const auto& p : data.points) {
        out += format_number(p.p_pump_mw);
        out += ',';
        out += format_number(p.p_out_mw);
        out += '\n';
    }
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NoiseSpectrum read_spectrum_csv(const std::filesystem::path& path) {
    const auto file = path.string();
    const auto table = parse_table(read_text(path), file);
    const auto fc = column(table, "freq_hz", file);
    const auto lc = column(table, "linear", file);
    std::vector<double> f, v;
    for (const auto& [line, row] : table.rows) {
        if (!f.empty() && !(row[fc] > f.back())) {
            throw ParseError(file, line, "frequencies must be strictly increasing");
        }
        if (!(row[lc] >= 0.0)) {
            throw ParseError(file, line, "negative noise power");
        }
        f.push_back(row[fc]);
        v.push_back(row[lc]);
    }
    if (f.empty()) {
        throw ParseError(file, 2, "no data rows");
    }
    return NoiseSpectrum(std::move(f), std::move(v));
}

PowerDataset read_power_csv(const std::filesystem::path& path) {
    const auto file = path.string();
    const auto table = parse_table(read_text(path), file);
    const auto pc = column(table, "p_pump_mw", file);
    const auto oc = column(table, "p_out_mw", file);
    PowerDataset data;
    for (const auto& [line, row] : table.rows) {
        if (!(row[pc] > 0.0)) {
            throw ParseError(file, line, "pump power must be positive");
        }
        data.points.push_back({row[pc], row[oc], 1.0});
    }
    return data;
}

}  // namespace twinbeam::cli
