#pragma once
// Plain-text experiment configuration: nested key-value sections validated
// against a published schema. No interactive mode; files are the interface.
//
// Format, line oriented:
//     # comment (also allowed after a value)
//     seed = 42
//     spec {
//       factors = 1
//       dim = 48
//     }
// Section headers are `name {` on their own line, closed by `}`. Keys nest
// with dots: the dim above is "spec.dim". Lists are comma separated.

#include "qha/common.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qha {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// schema

enum class FieldType { integer, unsigned64, real, text, choice, int_list, real_list };

struct FieldSpec {
    std::string path;
    FieldType type = FieldType::text;
    std::string fallback;  // applied when the key is absent
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool pow2 = false;                  // integer must be a power of two
    bool even_entries = false;          // int_list entries must be even
    std::vector<std::string> choices;   // for FieldType::choice
    std::string doc;
};

inline const char* field_type_name(FieldType t) {
    switch (t) {
        case FieldType::integer: return "integer";
        case FieldType::unsigned64: return "unsigned integer";
        case FieldType::real: return "real";
        case FieldType::text: return "text";
        case FieldType::choice: return "choice";
        case FieldType::int_list: return "integer list";
        default: return "real list";
    }
}

// The published schema. Every key a config file may contain appears here;
// unknown keys are validation errors. Defaults reproduce the shipped
// acceptance setup.
inline const std::vector<FieldSpec>& config_schema() {
    static const std::vector<FieldSpec> schema = [] {
        std::vector<FieldSpec> s;
        auto add = [&s](std::string path, FieldType t, std::string def, double lo,
                        double hi, std::string doc) {
            FieldSpec f;
            f.path = std::move(path);
            f.type = t;
            f.fallback = std::move(def);
            f.lo = lo;
            f.hi = hi;
            f.doc = std::move(doc);
            s.push_back(std::move(f));
            return &s.back();
        };
        const double inf = std::numeric_limits<double>::infinity();

        add("spec.factors", FieldType::integer, "1", 1, 4,
            "phase-space factors n");
        add("spec.dim", FieldType::integer, "48", 2, 512,
            "per-factor truncation dimension for the transform experiments");
        add("grid.extent", FieldType::real, "10", 0.5, 64,
            "phase-space grid half width");
        add("grid.points", FieldType::integer, "128", 8, 2048,
            "grid points per axis, power of two")->pow2 = true;
        {
            FieldSpec f;
            f.path = "convention";
            f.type = FieldType::choice;
            f.fallback = "half-phase";
            f.choices = {"half-phase", "full-phase"};
            f.doc = "normalization set used by the transform experiments";
            s.push_back(std::move(f));
        }
        add("haar", FieldType::real, "0", 0, 100,
            "synthesis measure constant; 0 keeps the audited 1/(2 pi)");
        add("seed", FieldType::unsigned64, "20260819", 0, inf,
            "seed for every random family");
        add("threads", FieldType::integer, "0", 0, 64,
            "suite worker threads; 0 picks the hardware count");
        add("out", FieldType::text, "", 0, 0,
            "report directory; empty writes no files");

        add("families.operator_count", FieldType::integer, "20", 1, 200,
            "seeded operators in the round-trip and transform families");
        add("families.pair_count", FieldType::integer, "10", 1, 100,
            "seeded pairs and symbols in the convolution families");
        add("families.rank", FieldType::integer, "5", 1, 16,
            "largest rank in the seeded operator family");
        add("families.interior_extent", FieldType::integer, "6", 1, 64,
            "modes populated by the seeded interior operators");
        add("families.winding_powers", FieldType::int_list, "1,2,3", 1, 8,
            "winding powers of the shift family");
        add("families.even_indices", FieldType::int_list, "-2,0,2", -16, 16,
            "shift indices of the constructed even family")->even_entries = true;
        add("families.congruence_orders", FieldType::int_list, "2,3,4", 2, 8,
            "rotation orders for the congruence experiment");

        add("symbols.toeplitz", FieldType::text, "winding:1", 0, 0,
            "registry name of the weighted-shift symbol");
        add("symbols.index", FieldType::text, "winding:1", 0, 0,
            "registry name of the index symbol");

        add("ccr-check.pairs", FieldType::integer, "50", 1, 1000,
            "random displacement pairs");
        add("ccr-check.dim", FieldType::integer, "64", 8, 512, "base dimension");
        add("ccr-check.refined_dim", FieldType::integer, "128", 8, 512,
            "refined dimension for the improvement check");
        add("ccr-check.interior", FieldType::integer, "32", 4, 256,
            "interior block edge; clamped to the displacement coupling width");
        add("ccr-check.radius", FieldType::real, "1.5", 0.1, 4,
            "componentwise bound on the sampled displacements");
        add("ccr-check.tolerance", FieldType::real, "1e-8", 0, 1, "defect bound");

        add("parity-check.points", FieldType::integer, "20", 1, 500,
            "sampled displacements per dimension");
        add("parity-check.dims", FieldType::int_list, "64,128", 8, 512,
            "dimensions to check");
        add("parity-check.radius", FieldType::real, "2", 0.1, 6,
            "componentwise bound on the sampled displacements");
        add("parity-check.tolerance", FieldType::real, "1e-12", 0, 1,
            "intertwining defect bound");

        add("toeplitz-shift.dim", FieldType::integer, "64", 8, 512, "dimension");
        add("toeplitz-shift.modes", FieldType::integer, "40", 4, 500,
            "compare the shift weights up to this mode");
        add("toeplitz-shift.tolerance", FieldType::real, "1e-8", 0, 1,
            "quadrature vs closed form");
        add("toeplitz-shift.vacuum_tolerance", FieldType::real, "1e-10", 0, 1,
            "bound on the first weight against its closed form");
        add("toeplitz-shift.offshift_tolerance", FieldType::real, "1e-10", 0, 1,
            "bound on entries off the shift diagonal");
        add("toeplitz-shift.limit_window", FieldType::real, "0.01", 0, 1,
            "distance of the last compared weight from 1");

        add("index.dim", FieldType::integer, "200", 32, 512, "base dimension");
        add("index.refined_dim", FieldType::integer, "400", 32, 512,
            "stability dimension");
        add("index.radius", FieldType::real, "6", 1, 12,
            "winding-circle radius");
        add("index.samples", FieldType::integer, "720", 16, 10000,
            "winding-circle samples");

        add("even-odd.dim", FieldType::integer, "64", 16, 512, "dimension");
        add("index-parity.dim", FieldType::integer, "64", 16, 512, "dimension");
        add("congruence.dim", FieldType::integer, "64", 16, 512, "dimension");

        add("modulation-scan.dim", FieldType::integer, "96", 16, 512, "dimension");
        add("modulation-scan.radius", FieldType::real, "1", 0.1, 4,
            "largest displacement radius");
        add("modulation-scan.samples", FieldType::integer, "12", 2, 100,
            "radii sampled up to the largest");
        add("modulation-scan.tolerance", FieldType::real, "1e-8", 0, 1,
            "modulation-invariance bound");
        add("modulation-scan.shift_floor", FieldType::real, "0.5", 0, 10,
            "least shift modulus at the largest radius");
        add("modulation-scan.contrast_floor", FieldType::real, "1e6", 1, 1e300,
            "least shift/modulation contrast");

        add("localization-scan.dim", FieldType::integer, "64", 16, 512,
            "dimension");
        add("localization-scan.max_radius", FieldType::real, "3", 0.5, 6,
            "largest profile radius");
        add("localization-scan.steps", FieldType::integer, "13", 3, 200,
            "profile radii count");
        add("localization-scan.tolerance", FieldType::real, "1e-6", 0, 1,
            "profile vs Gaussian oracle");

        add("intersection-probe.factor_dim", FieldType::integer, "16", 4, 64,
            "per-factor dimension of the two-factor probe");
        add("intersection-probe.max_radius", FieldType::real, "4", 1, 8,
            "largest moving-direction radius");
        add("intersection-probe.steps", FieldType::integer, "9", 3, 100,
            "moving-direction radii count");
        add("intersection-probe.decay_ratio", FieldType::real, "1e-3", 0, 1,
            "required envelope drop at the largest radius");
        add("intersection-probe.flat_variation", FieldType::real, "0.05", 0, 1,
            "allowed transverse variation");

        add("fourier-roundtrip.dim", FieldType::integer, "48", 8, 512,
            "dimension");
        add("fourier-roundtrip.tolerance", FieldType::real, "1e-4", 0, 1,
            "relative round-trip error bound");

        add("fop-identity.dim", FieldType::integer, "48", 8, 512, "dimension");
        add("fop-identity.tolerance", FieldType::real, "1e-3", 0, 1,
            "fit and involution residual bound");

        add("twisted-conv.dim", FieldType::integer, "32", 8, 512, "dimension");
        add("twisted-conv.tolerance", FieldType::real, "1e-3", 0, 1,
            "product-identity bound");
        add("twisted-conv.vacuum_tolerance", FieldType::real, "1e-6", 0, 1,
            "vacuum closed-form bound");
        add("twisted-conv.impl_tolerance", FieldType::real, "1e-10", 0, 1,
            "fast path vs direct summation");

        add("delta-parity.dim", FieldType::integer, "48", 16, 512, "dimension");
        add("delta-parity.widths", FieldType::real_list, "0.2,0.1,0.05", 0.005, 1,
            "spike widths, decreasing");
        add("delta-parity.extent", FieldType::real, "6", 1, 32,
            "spike grid half width");
        add("delta-parity.alignment_floor", FieldType::real, "0.99", 0, 1,
            "required alignment at the narrowest spike");

        add("ideal-suite.dim", FieldType::integer, "32", 8, 512, "dimension");
        add("ideal-suite.extent", FieldType::real, "16", 1, 64,
            "grid half width; the dual grid must resolve every mode");
        add("ideal-suite.points", FieldType::integer, "128", 8, 2048,
            "grid points per axis")->pow2 = true;
        add("ideal-suite.sv_tolerance", FieldType::real, "1e-12", 0, 1,
            "singular values against a right unitary factor");
        add("ideal-suite.quantized_sv_tolerance", FieldType::real, "1e-3", 0, 1,
            "singular values across the quantized partners");
        add("ideal-suite.conjugation_tolerance", FieldType::real, "1e-3", 0, 1,
            "parity conjugation vs reflected quantization");

        add("convention-audit.dim", FieldType::integer, "32", 8, 512,
            "dimension");
        add("convention-audit.extent", FieldType::real, "10", 1, 64,
            "audit grid half width");
        add("convention-audit.points", FieldType::integer, "64", 8, 2048,
            "audit grid points per axis")->pow2 = true;
        add("convention-audit.haar_tolerance", FieldType::real, "0.01", 0, 1,
            "fitted vs declared synthesis measure");
        return s;
    }();
    return schema;
}

inline const FieldSpec* find_field(const std::string& path) {
    for (const FieldSpec& f : config_schema())
        if (f.path == path) return &f;
    return nullptr;
}

// Printable form of the schema, one line per key.
inline std::string schema_text() {
    std::ostringstream out;
    out << "# configuration schema: key  type  default  range  description\n";
    for (const FieldSpec& f : config_schema()) {
        out << f.path << "  " << field_type_name(f.type);
        out << "  default=" << (f.fallback.empty() ? "(empty)" : f.fallback);
        if (f.lo != -std::numeric_limits<double>::infinity() &&
            f.type != FieldType::text && f.type != FieldType::choice) {
            out << "  range=[" << f.lo << ", ";
            if (f.hi == std::numeric_limits<double>::infinity())
                out << "inf";
            else
                out << f.hi;
            out << "]";
        }
        if (f.pow2) out << "  power-of-two";
        if (f.even_entries) out << "  even-entries";
        if (!f.choices.empty()) {
            out << "  one-of={";
            for (std::size_t i = 0; i < f.choices.size(); ++i)
                out << (i ? "," : "") << f.choices[i];
            out << "}";
        }
        out << "  " << f.doc << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            return false;
    return true;
}

// keys may carry their section inline: every dot-separated part must be an
// identifier, so "grid.extent" works at top level
inline bool valid_key_path(const std::string& s) {
    std::size_t start = 0;
    while (true) {
        std::size_t dot = s.find('.', start);
        std::string part =
            dot == std::string::npos ? s.substr(start) : s.substr(start, dot - start);
        if (!valid_identifier(part)) return false;
        if (dot == std::string::npos) return true;
        start = dot + 1;
    }
}

}  // namespace detail

// Parsed key-value store with the raw strings and their source lines.
struct ConfigMap {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;  // for error messages
    std::string source = "(inline)";

    bool has(const std::string& path) const { return values.count(path) != 0; }

    const std::string& raw(const std::string& path) const {
        auto it = values.find(path);
        if (it == values.end())
            throw ConfigError(path + ": missing (validate the config first)");
        return it->second;
    }

    long get_int(const std::string& path) const {
        const std::string& v = raw(path);
        std::size_t used = 0;
        long out = 0;
        try {
            out = std::stol(v, &used);
        } catch (const std::exception&) {
            throw ConfigError(path + ": expected integer, got '" + v + "'");
        }
        if (used != v.size())
            throw ConfigError(path + ": expected integer, got '" + v + "'");
        return out;
    }

    std::uint64_t get_u64(const std::string& path) const {
        const std::string& v = raw(path);
        if (!v.empty() && v[0] == '-')
            throw ConfigError(path + ": expected unsigned integer, got '" + v + "'");
        std::size_t used = 0;
        std::uint64_t out = 0;
        try {
            out = std::stoull(v, &used);
        } catch (const std::exception&) {
            throw ConfigError(path + ": expected unsigned integer, got '" + v + "'");
        }
        if (used != v.size())
            throw ConfigError(path + ": expected unsigned integer, got '" + v + "'");
        return out;
    }

    double get_real(const std::string& path) const {
        const std::string& v = raw(path);
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            throw ConfigError(path + ": expected real, got '" + v + "'");
        }
        if (used != v.size())
            throw ConfigError(path + ": expected real, got '" + v + "'");
        return out;
    }

    std::string get_text(const std::string& path) const { return raw(path); }

    std::vector<std::string> split_list(const std::string& path) const {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : raw(path)) {
            if (c == ',') {
                parts.push_back(detail::trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(detail::trim(cur));
        return parts;
    }

    std::vector<long> get_int_list(const std::string& path) const {
        std::vector<long> out;
        for (const std::string& p : split_list(path)) {
            std::size_t used = 0;
            try {
                out.push_back(std::stol(p, &used));
            } catch (const std::exception&) {
                throw ConfigError(path + ": expected integer list, got '" + raw(path) + "'");
            }
            if (used != p.size())
                throw ConfigError(path + ": expected integer list, got '" + raw(path) + "'");
        }
        return out;
    }

    std::vector<double> get_real_list(const std::string& path) const {
        std::vector<double> out;
        for (const std::string& p : split_list(path)) {
            std::size_t used = 0;
            try {
                out.push_back(std::stod(p, &used));
            } catch (const std::exception&) {
                throw ConfigError(path + ": expected real list, got '" + raw(path) + "'");
            }
            if (used != p.size())
                throw ConfigError(path + ": expected real list, got '" + raw(path) + "'");
        }
        return out;
    }
};

inline ConfigMap parse_config_text(const std::string& text,
                                   const std::string& source = "(inline)") {
    ConfigMap cfg;
    cfg.source = source;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> stack;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line == "}") {
            if (stack.empty()) fail("unmatched '}'");
            stack.pop_back();
            continue;
        }
        if (line.back() == '{') {
            std::string name = detail::trim(line.substr(0, line.size() - 1));
            if (!detail::valid_identifier(name))
                fail("bad section name '" + name + "'");
            stack.push_back(name);
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail("expected 'key = value', section header, or '}'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (!detail::valid_key_path(key)) fail("bad key '" + key + "'");
        std::string path;
        for (const std::string& s : stack) path += s + ".";
        path += key;
        if (cfg.values.count(path))
            fail("duplicate key '" + path + "' (first at line " +
                 std::to_string(cfg.lines[path]) + ")");
        cfg.values[path] = value;
        cfg.lines[path] = lineno;
    }
    if (!stack.empty())
        throw ConfigError(source + ": unclosed section '" + stack.back() + "'");
    return cfg;
}

inline ConfigMap load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

// ---------------------------------------------------------------------------
// validation

// Checks every present key against the schema, then fills in defaults so the
// typed getters always succeed. All problems are reported at once, one field
// path per line.
inline void validate_config(ConfigMap& cfg) {
    std::vector<std::string> problems;
    auto complain = [&](const std::string& path, const std::string& msg) {
        std::string where = path;
        auto it = cfg.lines.find(path);
        if (it != cfg.lines.end())
            where += " (" + cfg.source + ":" + std::to_string(it->second) + ")";
        problems.push_back(where + ": " + msg);
    };

    auto check_range = [&](const FieldSpec& f, double v) {
        if (v < f.lo || v > f.hi) {
            std::ostringstream msg;
            msg << "value " << v << " out of range [" << f.lo << ", " << f.hi << "]";
            complain(f.path, msg.str());
            return false;
        }
        return true;
    };

    for (const auto& [path, value] : cfg.values) {
        const FieldSpec* f = find_field(path);
        if (f == nullptr) {
            complain(path, "unknown key");
            continue;
        }
        try {
            switch (f->type) {
                case FieldType::integer: {
                    long v = cfg.get_int(path);
                    if (check_range(*f, double(v)) && f->pow2 &&
                        (v <= 0 || (v & (v - 1)) != 0))
                        complain(path, "value " + std::to_string(v) +
                                           " is not a power of two");
                    break;
                }
                case FieldType::unsigned64:
                    cfg.get_u64(path);
                    break;
                case FieldType::real:
                    check_range(*f, cfg.get_real(path));
                    break;
                case FieldType::text:
                    break;
                case FieldType::choice: {
                    bool ok = false;
                    for (const std::string& c : f->choices) ok = ok || c == value;
                    if (!ok) {
                        std::string opts;
                        for (std::size_t i = 0; i < f->choices.size(); ++i)
                            opts += (i ? ", " : "") + f->choices[i];
                        complain(path, "'" + value + "' is not one of: " + opts);
                    }
                    break;
                }
                case FieldType::int_list: {
                    for (long v : cfg.get_int_list(path)) {
                        if (double(v) < f->lo || double(v) > f->hi) {
                            std::ostringstream msg;
                            msg << "entry " << v << " out of range [" << f->lo
                                << ", " << f->hi << "]";
                            complain(path, msg.str());
                        } else if (f->even_entries && v % 2 != 0) {
                            complain(path, "entry " + std::to_string(v) +
                                               " must be even");
                        }
                    }
                    break;
                }
                case FieldType::real_list: {
                    for (double v : cfg.get_real_list(path)) check_range(*f, v);
                    break;
                }
            }
        } catch (const ConfigError& e) {
            // getter messages start with the path; reattach the source line
            std::string msg = e.what();
            if (msg.rfind(path + ":", 0) == 0)
                complain(path, msg.substr(path.size() + 2));
            else
                problems.push_back(msg);
        }
    }

    if (!problems.empty()) {
        std::string joined = "config validation failed:";
        for (const std::string& p : problems) joined += "\n  " + p;
        throw ConfigError(joined);
    }

    for (const FieldSpec& f : config_schema())
        if (!cfg.values.count(f.path)) cfg.values[f.path] = f.fallback;
}

}  // namespace qha
