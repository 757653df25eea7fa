#include "actorgauss/config.hpp"

#include <sstream>
#include <stdexcept>

#include "actorgauss/io.hpp"

namespace actorgauss {

namespace {

bool parse_bool(std::string_view v, std::string_view key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

PersonaMode parse_persona_mode(std::string_view v) {
    if (v == "none") return PersonaMode::None;
    if (v == "T" || v == "topic") return PersonaMode::Topic;
    if (v == "AG" || v == "age_gender") return PersonaMode::AgeGender;
    if (v == "AGT" || v == "full") return PersonaMode::Full;
    throw std::invalid_argument("bad persona_mode '" + std::string(v) + "'");
}

}  // namespace

std::string_view persona_mode_name(PersonaMode m) {
    switch (m) {
        case PersonaMode::None: return "none";
        case PersonaMode::Topic: return "T";
        case PersonaMode::AgeGender: return "AG";
        case PersonaMode::Full: return "AGT";
    }
    return "?";
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    key = io::trim(key);
    value = io::trim(value);
    auto& m = cfg.model;
    auto& t = cfg.train;
    if (key == "dim") m.dim = io::parse_int(value, key);
    else if (key == "var_min") m.var_min = io::parse_double(value, key);
    else if (key == "var_max") m.var_max = io::parse_double(value, key);
    else if (key == "spherical") m.spherical = parse_bool(value, key);
    else if (key == "persona_mode") m.persona_mode = parse_persona_mode(value);
    else if (key == "composition") {
        if (value == "sum") m.composition = Composition::Sum;
        else if (value == "concat") m.composition = Composition::Concat;
        else throw std::invalid_argument("bad composition '" + std::string(value) + "'");
    }
    else if (key == "epochs") t.epochs = io::parse_int(value, key);
    else if (key == "batch_size") t.batch_size = io::parse_int(value, key);
    else if (key == "lr_initial") t.lr_initial = io::parse_double(value, key);
    else if (key == "lr_min") t.lr_min = io::parse_double(value, key);
    else if (key == "margin") t.margin = io::parse_double(value, key);
    else if (key == "dropout_keep") t.dropout_keep = io::parse_double(value, key);
    else if (key == "dropout_rate") t.dropout_keep = 1.0 - io::parse_double(value, key);
    else if (key == "rmsprop_decay") t.rmsprop_decay = io::parse_double(value, key);
    else if (key == "rmsprop_eps") t.rmsprop_eps = io::parse_double(value, key);
    else if (key == "negatives_per_positive") t.negatives_per_positive = io::parse_int(value, key);
    else if (key == "seed") t.seed = static_cast<std::uint64_t>(io::parse_int(value, key));
    else if (key == "cosine_pi_variant") t.cosine_pi_variant = parse_bool(value, key);
    else if (key == "include_validation") t.include_validation = parse_bool(value, key);
    else if (key == "norm") {
        if (value == "l1" || value == "L1") cfg.norm = Norm::L1;
        else if (value == "l2" || value == "L2") cfg.norm = Norm::L2;
        else throw std::invalid_argument("bad norm '" + std::string(value) + "'");
    }
    else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw std::invalid_argument("expected key=value, got '" + std::string(assignment) + "'");
    apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = io::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        try {
            apply_override(cfg, line);
        } catch (const std::exception& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
}

std::string format_report(const std::vector<MetricRow>& rows) {
    std::ostringstream os;
    os << "# name\tvalue\tn\tseed\n";
    for (const auto& r : rows)
        os << r.name << '\t' << io::format_double(r.value) << '\t' << r.n << '\t' << r.seed << '\n';
    return os.str();
}

void write_report(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
    io::write_file_atomic(path, format_report(rows));
}

std::vector<MetricRow> read_report(const std::filesystem::path& path) {
    std::vector<MetricRow> rows;
    const auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (io::trim(line).empty() || line.front() == '#') continue;
        const auto f = io::split(line, '\t');
        if (f.size() != 4)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": expected 4 tab-separated fields");
        try {
            rows.push_back({std::string(f[0]), io::parse_double(f[1], "value"),
                            static_cast<std::size_t>(io::parse_int(f[2], "n")),
                            static_cast<std::uint64_t>(io::parse_int(f[3], "seed"))});
        } catch (const std::invalid_argument& e) {
            throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return rows;
}

}  // namespace actorgauss
