// Bit-stable CSV tables: '#'-prefixed metadata comment lines, one header
// line, then numeric rows. Values are formatted with 6 significant digits,
// so write(parse(write(x))) == write(x) byte for byte.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sawlab {

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;  // ordered key/value comments
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void set_meta(const std::string& key, const std::string& value) {
        for (auto& kv : meta)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        meta.emplace_back(key, value);
    }

    const std::string* find_meta(const std::string& key) const {
        for (const auto& kv : meta)
            if (kv.first == key) return &kv.second;
        return nullptr;
    }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::runtime_error("csv: no column named " + name);
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t idx = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[idx]);
        return out;
    }

    std::string to_string() const {
        std::string out;
        for (const auto& kv : meta) out += "# " + kv.first + " = " + kv.second + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ',';
            out += columns[i];
        }
        out += '\n';
        char buf[64];
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                std::snprintf(buf, sizeof buf, "%.6g", r[i]);
                out += buf;
            }
            out += '\n';
        }
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
        f << to_string();
    }

    static CsvTable parse(std::istream& in) {
        CsvTable t;
        std::string line;
        bool header_seen = false;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                std::string body = line.substr(1);
                const auto eq = body.find('=');
                if (eq != std::string::npos) {
                    auto trim = [](std::string s) {
                        const auto b = s.find_first_not_of(" \t");
                        const auto e = s.find_last_not_of(" \t");
                        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
                    };
                    t.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
                }
                continue;
            }
            std::vector<std::string> fields;
            std::string field;
            std::istringstream ss(line);
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (!header_seen) {
                t.columns = std::move(fields);
                header_seen = true;
                continue;
            }
            if (fields.size() != t.columns.size())
                throw std::runtime_error("csv: row width does not match header");
            std::vector<double> row;
            row.reserve(fields.size());
            for (const auto& f : fields) row.push_back(std::stod(f));
            t.rows.push_back(std::move(row));
        }
        if (!header_seen) throw std::runtime_error("csv: missing header line");
        return t;
    }

    static CsvTable load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path);
        return parse(f);
    }
};

}  // namespace sawlab
