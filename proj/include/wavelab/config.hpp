#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wavelab/coefficient.hpp"

namespace wavelab {

/// Flat sectioned key-value config, e.g.
///   coeff = { family = "scale_invariant", mu = 0.5, ell = 5 }
///   zones = { N = "auto", k = 2, safety = 0.5 }
///   n = 3
/// '#' starts a comment; values are numbers, bare words, or quoted strings.
class Config {
  public:
    static Config parse(const std::string& text) {
        Config c;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: missing '=' in line: " + line);
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (!val.empty() && val.front() == '{') {
                if (val.back() != '}')
                    throw std::invalid_argument("config: unterminated section: " + line);
                parse_section(c.values_, key, val.substr(1, val.size() - 2));
            } else {
                c.values_[key] = unquote(val);
            }
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open config " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str());
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_number(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("config: not a number: " + key + " = " + it->second);
        return v;
    }

    int get_int(const std::string& key, int fallback) const {
        return static_cast<int>(get_number(key, fallback));
    }

    /// Build the coefficient model from the `coeff` section.
    CoefficientModel make_model() const {
        std::string family = get_string("coeff.family", "scale_invariant");
        CoeffParams p;
        p.mu = get_number("coeff.mu", 0.5);
        p.n = get_int("coeff.n", 1);
        p.alpha = get_number("coeff.alpha", 10.0);
        int ell = get_int("coeff.ell", 5);
        return make_family(family, p, ell);
    }

  private:
    static std::string trim(const std::string& s) {
        size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            return s.substr(1, s.size() - 2);
        return s;
    }

    static void parse_section(std::map<std::string, std::string>& out, const std::string& prefix,
                              const std::string& body) {
        std::istringstream in(body);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            size_t eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: bad section entry: " + item);
            out[prefix + "." + trim(item.substr(0, eq))] = unquote(trim(item.substr(eq + 1)));
        }
    }

    std::map<std::string, std::string> values_;
};

}  // namespace wavelab
