#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "featkit/error.hpp"
#include "featkit/evaltasks.hpp"
#include "featkit/timing.hpp"

// Report serialization. JSON objects are emitted with sorted keys and
// metric values snapped to 6 significant digits, so identical runs produce
// byte-identical files and the CSV view carries the same numbers.

namespace featkit {

namespace detail {

/// Snap to 6 significant digits (the report precision contract).
inline double round6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

inline std::string format6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

inline std::string combination_label(const EvalReport& report) {
    if (report.detector == "external") return "external";
    return report.detector + "+" + report.descriptor;
}

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json config{
        {"n_queries", report.config.n_queries},
        {"distractor_images", report.config.n_distractor_images},
        {"distractor_keypoints", report.config.n_distractor_keypoints},
        {"reps", report.config.reps},
        {"seed", report.config.master_seed},
        {"max_keypoints", report.config.max_keypoints},
        {"strict_zero", report.config.strict_zero},
        {"retrieval_per_query", report.config.retrieval_per_query},
    };
    nlohmann::json detector_params{
        {"harris_k", report.detector_config.harris_k},
        {"harris_sigma_d", report.detector_config.harris_sigma_d},
        {"harris_sigma_i", report.detector_config.harris_sigma_i},
        {"fast_threshold", report.detector_config.fast_threshold},
        {"fast_arc", report.detector_config.fast_arc},
        {"gftt_quality", report.detector_config.gftt_quality},
        {"nms_radius", report.detector_config.nms_radius},
        {"max_keypoints", report.detector_config.max_keypoints},
        {"border_margin", report.detector_config.border_margin},
    };
    nlohmann::json results = nlohmann::json::array();
    for (const TaskResult& tr : report.results) {
        nlohmann::json aps = nlohmann::json::array();
        for (double ap : tr.ap_per_rep) aps.push_back(detail::round6(ap));
        results.push_back({
            {"task", tr.task},
            {"split", tr.split},
            {"map", detail::round6(tr.map)},
            {"std", detail::round6(tr.stddev)},
            {"ap_per_rep", aps},
            {"skipped_units", tr.skipped_units},
        });
    }
    return nlohmann::json{
        {"meta",
         {
             {"combination", combination_label(report)},
             {"detector", report.detector},
             {"descriptor", report.descriptor},
             {"config", config},
             {"detector_params", detector_params},
             {"dataset_digest", report.dataset_digest},
             {"version", report.version},
         }},
        {"results", results},
        {"timing", nullptr},
    };
}

inline std::string report_to_json_text(const EvalReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

inline std::string report_to_csv(const EvalReport& report) {
    std::string out =
        "combination,detector,descriptor,task,split,map,std,skipped_units,ap_per_rep\n";
    for (const TaskResult& tr : report.results) {
        out += combination_label(report) + "," + report.detector + "," + report.descriptor +
               "," + tr.task + "," + tr.split + "," + detail::format6(tr.map) + "," +
               detail::format6(tr.stddev) + "," + std::to_string(tr.skipped_units) + ",";
        for (std::size_t i = 0; i < tr.ap_per_rep.size(); ++i)
            out += (i ? ";" : "") + detail::format6(tr.ap_per_rep[i]);
        out += "\n";
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out.flush()) raise(ErrorCode::IoFailure, "short write to " + path.string());
}

/// Merge eval report JSONs into one plot-ready table: a row per DET+DESC
/// combination, a column per task/split mAP, ranked by one task's mean-split
/// value (descending).
inline std::string merge_reports_csv(const std::vector<nlohmann::json>& reports,
                                     const std::string& rank_by) {
    static const char* kTasks[3] = {"verification", "matching", "retrieval"};
    static const char* kSplits[3] = {"illumination", "viewpoint", "mean"};
    if (rank_by != "verification" && rank_by != "matching" && rank_by != "retrieval")
        raise(ErrorCode::IoFailure, "rank-by must be verification, matching or retrieval");

    struct Row {
        std::string combination;
        std::map<std::string, double> values;  // "<task>_<split>" -> mAP
    };
    std::vector<Row> rows;
    for (const nlohmann::json& r : reports) {
        Row row;
        row.combination = r.at("meta").at("combination").get<std::string>();
        for (const nlohmann::json& tr : r.at("results"))
            row.values[tr.at("task").get<std::string>() + "_" +
                       tr.at("split").get<std::string>()] = tr.at("map").get<double>();
        rows.push_back(std::move(row));
    }

    auto rank_value = [&](const Row& row) {
        for (const char* split : {"mean", "viewpoint", "illumination"}) {
            const auto it = row.values.find(rank_by + "_" + split);
            if (it != row.values.end()) return it->second;
        }
        return -1.0;
    };
    std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        const double va = rank_value(a), vb = rank_value(b);
        if (va != vb) return va > vb;
        return a.combination < b.combination;
    });

    std::string out = "combination";
    for (const char* task : kTasks)
        for (const char* split : kSplits) out += std::string(",") + task + "_" + split;
    out += "\n";
    for (const Row& row : rows) {
        out += row.combination;
        for (const char* task : kTasks) {
            for (const char* split : kSplits) {
                const auto it = row.values.find(std::string(task) + "_" + split);
                out += ",";
                if (it != row.values.end()) out += detail::format6(it->second);
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace featkit
