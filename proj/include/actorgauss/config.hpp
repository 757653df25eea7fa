#pragma once
// "key = value" configuration files and TSV metric reports.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "actorgauss/embedding_store.hpp"
#include "actorgauss/training.hpp"
#include "actorgauss/transe.hpp"

namespace actorgauss {

struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    Norm norm = Norm::L2;  // TransE only
};

// Keys are ModelConfig / TrainConfig field names, plus `norm` (l1|l2) and
// `dropout_rate` (sets dropout_keep = 1 - rate). Unknown keys throw.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Blank lines and '#' comments are skipped; errors carry "path:line".
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Accepts "key=value".
void apply_override(RunConfig& cfg, std::string_view assignment);

std::string_view persona_mode_name(PersonaMode m);

struct MetricRow {
    std::string name;
    double value = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

// Header "# name\tvalue\tn\tseed", one metric per line.
std::string format_report(const std::vector<MetricRow>& rows);
void write_report(const std::vector<MetricRow>& rows, const std::filesystem::path& path);
std::vector<MetricRow> read_report(const std::filesystem::path& path);

}  // namespace actorgauss
