// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmetrics/types.hpp"

namespace vmetrics {

enum class MaskMode { fullframe, foreground };

std::string to_string(MaskMode mode);
MaskMode mask_mode_from_string(const std::string &s);

enum class ReportFormat { json, csv };

struct MetricEntry {
    std::string metric;            // "dfci", "silhouette", "l1", ...
    std::optional<int> horizon;    // T for DFCI entries, nullopt otherwise
    MaskMode mode = MaskMode::fullframe;
    double value = 0.0;
};

struct MetricReport {
    std::vector<MetricEntry> entries;
    // ordered metadata: run identifiers, frame counts, estimator parameters
    std::vector<std::pair<std::string, std::string>> metadata;

    void add(const std::string &metric, std::optional<int> horizon,
             MaskMode mode, double value) {
        entries.push_back({metric, horizon, mode, value});
    }
    void set_meta(const std::string &key, const std::string &value) {
        metadata.emplace_back(key, value);
    }
    std::optional<double> find(const std::string &metric,
                               std::optional<int> horizon,
                               MaskMode mode) const;
};

std::string write_report(const MetricReport &report, ReportFormat format);
MetricReport parse_report_json(const std::string &text);

} // namespace vmetrics
