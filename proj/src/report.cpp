// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace vmetrics {

using ordered_json = nlohmann::ordered_json;

std::string to_string(MaskMode mode) {
    return mode == MaskMode::fullframe ? "fullframe" : "foreground";
}

MaskMode mask_mode_from_string(const std::string &s) {
    if (s == "fullframe") return MaskMode::fullframe;
    if (s == "foreground") return MaskMode::foreground;
    throw ValidationError("unknown mask mode: " + s);
}

std::optional<double> MetricReport::find(const std::string &metric,
                                         std::optional<int> horizon,
                                         MaskMode mode) const {
    for (const auto &e : entries)
        if (e.metric == metric && e.horizon == horizon && e.mode == mode)
            return e.value;
    return std::nullopt;
}

namespace {

std::string csv_column(const MetricEntry &e) {
    if (e.metric == "dfci") {
        std::string col = e.mode == MaskMode::foreground ? "dfci_fg_T" : "dfci_full_T";
        return col + std::to_string(e.horizon.value_or(0));
    }
    return e.metric;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string write_csv(const MetricReport &report) {
    // dfci columns first (foreground then fullframe, horizons ascending),
    // then the remaining metrics in insertion order
    std::vector<const MetricEntry *> ordered;
    for (MaskMode mode : {MaskMode::foreground, MaskMode::fullframe}) {
        std::vector<const MetricEntry *> dfci;
        for (const auto &e : report.entries)
            if (e.metric == "dfci" && e.mode == mode) dfci.push_back(&e);
        std::sort(dfci.begin(), dfci.end(), [](auto *a, auto *b) {
            return a->horizon.value_or(0) < b->horizon.value_or(0);
        });
        ordered.insert(ordered.end(), dfci.begin(), dfci.end());
    }
    for (const auto &e : report.entries)
        if (e.metric != "dfci") ordered.push_back(&e);

    std::ostringstream header, row;
    for (size_t i = 0; i < ordered.size(); ++i) {
        if (i) {
            header << ",";
            row << ",";
        }
        header << csv_column(*ordered[i]);
        row << format_value(ordered[i]->value);
    }
    return header.str() + "\n" + row.str() + "\n";
}

std::string write_json(const MetricReport &report) {
    ordered_json meta = ordered_json::object();
    for (const auto &[k, v] : report.metadata) meta[k] = v;
    ordered_json entries = ordered_json::array();
    for (const auto &e : report.entries) {
        ordered_json item = ordered_json::object();
        item["metric"] = e.metric;
        if (e.horizon)
            item["T"] = *e.horizon;
        else
            item["T"] = nullptr;
        item["mode"] = to_string(e.mode);
        item["value"] = e.value;
        entries.push_back(std::move(item));
    }
    ordered_json doc = ordered_json::object();
    doc["metadata"] = std::move(meta);
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

} // namespace

std::string write_report(const MetricReport &report, ReportFormat format) {
    switch (format) {
    case ReportFormat::json:
        return write_json(report);
    case ReportFormat::csv:
        return write_csv(report);
    }
    throw ValidationError("unsupported report format");
}

MetricReport parse_report_json(const std::string &text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception &e) {
        throw ValidationError(std::string("report parse error: ") + e.what());
    }
    MetricReport report;
    for (auto &[k, v] : doc.at("metadata").items())
        report.set_meta(k, v.get<std::string>());
    for (auto &item : doc.at("entries")) {
        MetricEntry e;
        e.metric = item.at("metric").get<std::string>();
        if (!item.at("T").is_null()) e.horizon = item.at("T").get<int>();
        e.mode = mask_mode_from_string(item.at("mode").get<std::string>());
        e.value = item.at("value").get<double>();
        report.entries.push_back(std::move(e));
    }
    return report;
}

} // namespace vmetrics
