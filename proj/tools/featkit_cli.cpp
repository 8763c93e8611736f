// featkit command line: evaluate detector/descriptor pipelines on
// homography-sequence datasets, extract features to FEATB files, time
// pipelines, and merge reports into plot-ready tables.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "featkit/featkit.hpp"
#include "featkit/report_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int exit_code_for(const featkit::Error& e) {
    switch (e.code()) {
        case featkit::ErrorCode::UnknownDetector:
        case featkit::ErrorCode::UnknownDescriptor:
            return kExitConfig;
        default:
            return kExitData;
    }
}

featkit::Split parse_split(const std::string& s) {
    if (s == "all") return featkit::Split::All;
    if (s == "illumination") return featkit::Split::Illumination;
    if (s == "viewpoint") return featkit::Split::Viewpoint;
    throw CLI::ValidationError("--split", "must be all, illumination or viewpoint");
}

unsigned parse_tasks(const std::string& list) {
    unsigned tasks = 0;
    std::string token;
    std::istringstream in(list);
    while (std::getline(in, token, ',')) {
        if (token == "verification")
            tasks |= featkit::kTaskVerification;
        else if (token == "matching")
            tasks |= featkit::kTaskMatching;
        else if (token == "retrieval")
            tasks |= featkit::kTaskRetrieval;
        else
            throw CLI::ValidationError("--tasks", "unknown task '" + token + "'");
    }
    if (tasks == 0) throw CLI::ValidationError("--tasks", "no tasks selected");
    return tasks;
}

std::vector<std::string> split_csv(const std::string& list) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(list);
    while (std::getline(in, token, ','))
        if (!token.empty()) out.push_back(token);
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    featkit::write_text_file(out_path, text);
}

struct EvalArgs {
    std::string data, detector, descriptor, external, out;
    std::string tasks = "verification,matching,retrieval";
    std::string split = "all";
    std::string format = "json";
    featkit::EvalConfig cfg;
    int threads = 1;
    bool time_features = false;
};

int run_eval(const EvalArgs& args) {
    if (args.external.empty() && (args.detector.empty() || args.descriptor.empty())) {
        std::cerr << "eval: need --detector and --descriptor, or --external\n";
        return kExitConfig;
    }
    if (!args.external.empty() && (!args.detector.empty() || !args.descriptor.empty())) {
        std::cerr << "eval: --external excludes --detector/--descriptor\n";
        return kExitConfig;
    }
    if (args.format != "json" && args.format != "csv") {
        std::cerr << "eval: --format must be json or csv\n";
        return kExitConfig;
    }
    const unsigned tasks = parse_tasks(args.tasks);

    // Registry lookups fail before any dataset I/O starts.
    if (args.external.empty()) {
        featkit::find_detector(args.detector);
        featkit::find_descriptor(args.descriptor);
    }

    const featkit::Dataset ds = featkit::load_dataset(args.data, parse_split(args.split));
    featkit::EvalReport report =
        args.external.empty()
            ? featkit::run_evaluation(ds, args.detector, args.descriptor, args.cfg, tasks,
                                      args.threads)
            : featkit::run_evaluation_external(ds, args.external, args.cfg, tasks, args.threads);

    if (args.format == "csv") {
        emit(featkit::report_to_csv(report), args.out);
        return kExitOk;
    }
    nlohmann::json doc = featkit::report_to_json(report);
    if (args.time_features && args.external.empty()) {
        const featkit::TimingResult t =
            featkit::time_pipeline(ds, args.detector, args.descriptor, 0, 1);
        doc["timing"] = {
            {"mean_ms", featkit::detail::round6(t.mean_ms)},
            {"std_ms", featkit::detail::round6(t.std_ms)},
            {"min_ms", featkit::detail::round6(t.min_ms)},
            {"max_ms", featkit::detail::round6(t.max_ms)},
            {"images", t.images_timed},
            {"excluded", t.images_excluded},
        };
    }
    emit(doc.dump(2) + "\n", args.out);
    return kExitOk;
}

struct ExtractArgs {
    std::string data, detector, descriptor, out;
    int max_keypoints = 500;
};

int run_extract(const ExtractArgs& args) {
    featkit::find_detector(args.detector);
    featkit::find_descriptor(args.descriptor);
    const featkit::Dataset ds = featkit::load_dataset(args.data, featkit::Split::All);
    featkit::DetectorConfig det_cfg;
    det_cfg.max_keypoints = args.max_keypoints;
    const featkit::DatasetFeatures feats =
        featkit::extract_features(ds, args.detector, args.descriptor, det_cfg);

    for (std::size_t s = 0; s < ds.sequences.size(); ++s) {
        const std::filesystem::path dir = std::filesystem::path(args.out) / ds.sequences[s].id;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) featkit::raise(featkit::ErrorCode::IoFailure, "cannot create " + dir.string());
        for (int j = 1; j <= featkit::kImagesPerSequence; ++j)
            featkit::write_features(dir / (std::to_string(j) + ".feat"),
                                    feats.sequences[s].images[j - 1]);
    }
    return kExitOk;
}

struct TimeArgs {
    std::string data, detector, descriptor, out;
    int warmup = 2;
    int passes = 3;
};

int run_time(const TimeArgs& args) {
    const std::vector<std::string> detectors = split_csv(args.detector);
    const std::vector<std::string> descriptors = split_csv(args.descriptor);
    if (detectors.empty() || descriptors.empty()) {
        std::cerr << "time: need --detector and --descriptor\n";
        return kExitConfig;
    }
    for (const std::string& d : detectors) featkit::find_detector(d);
    for (const std::string& d : descriptors) featkit::find_descriptor(d);

    const featkit::Dataset ds = featkit::load_dataset(args.data, featkit::Split::All);
    std::vector<featkit::TimingResult> rows;
    for (const std::string& det : detectors)
        for (const std::string& desc : descriptors)
            rows.push_back(featkit::time_pipeline(ds, det, desc, args.warmup, args.passes));
    emit(featkit::timing_csv(std::move(rows)), args.out);
    return kExitOk;
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out;
    std::string rank_by = "matching";
};

int run_report(const ReportArgs& args) {
    if (args.rank_by != "verification" && args.rank_by != "matching" &&
        args.rank_by != "retrieval") {
        std::cerr << "report: --rank-by must be verification, matching or retrieval\n";
        return kExitConfig;
    }
    std::vector<nlohmann::json> reports;
    for (const std::string& path : args.inputs) {
        std::ifstream in(path);
        if (!in) featkit::raise(featkit::ErrorCode::IoFailure, "cannot open " + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            featkit::raise(featkit::ErrorCode::IoFailure, path + ": " + e.what());
        }
        reports.push_back(std::move(doc));
    }
    emit(featkit::merge_reports_csv(reports, args.rank_by), args.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local feature detector/descriptor benchmark"};
    app.set_version_flag("--version", featkit::kVersion);
    app.require_subcommand(1);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Run the three evaluation tasks");
    eval->add_option("--data", eval_args.data, "Dataset root directory")->required();
    eval->add_option("--detector", eval_args.detector, "Detector name");
    eval->add_option("--descriptor", eval_args.descriptor, "Descriptor name");
    eval->add_option("--external", eval_args.external, "Directory of FEATB feature files");
    eval->add_option("--tasks", eval_args.tasks, "Comma list of tasks");
    eval->add_option("--split", eval_args.split, "all, illumination or viewpoint");
    eval->add_option("--n-queries", eval_args.cfg.n_queries, "Reference keypoints per sequence");
    eval->add_option("--distractor-images", eval_args.cfg.n_distractor_images,
                     "Out-of-sequence images per sequence (verification)");
    eval->add_option("--distractor-keypoints", eval_args.cfg.n_distractor_keypoints,
                     "Out-of-sequence keypoints per sequence (retrieval)");
    eval->add_option("--reps", eval_args.cfg.reps, "Sampling repetitions");
    eval->add_option("--seed", eval_args.cfg.master_seed, "Master seed");
    eval->add_option("--max-keypoints", eval_args.cfg.max_keypoints, "Keypoint cap per image");
    eval->add_option("--out", eval_args.out, "Output path (stdout when omitted)");
    eval->add_option("--format", eval_args.format, "json or csv");
    eval->add_option("--threads", eval_args.threads, "Worker threads (0 = all cores)");
    eval->add_flag("--strict-zero", eval_args.cfg.strict_zero,
                   "Score units without positives 0 instead of skipping them");
    eval->add_flag("--retrieval-per-query", eval_args.cfg.retrieval_per_query,
                   "Per-query retrieval APs instead of one pooled AP per sequence");
    eval->add_flag("--time-features", eval_args.time_features,
                   "Embed wall-clock extraction stats (report stops being reproducible)");

    ExtractArgs extract_args;
    CLI::App* extract = app.add_subcommand("extract", "Write FEATB feature files");
    extract->add_option("--data", extract_args.data, "Dataset root directory")->required();
    extract->add_option("--detector", extract_args.detector, "Detector name")->required();
    extract->add_option("--descriptor", extract_args.descriptor, "Descriptor name")->required();
    extract->add_option("--out", extract_args.out, "Feature directory to create")->required();
    extract->add_option("--max-keypoints", extract_args.max_keypoints, "Keypoint cap per image");

    TimeArgs time_args;
    CLI::App* time_cmd = app.add_subcommand("time", "Time detect+describe per image");
    time_cmd->add_option("--data", time_args.data, "Dataset root directory")->required();
    time_cmd->add_option("--detector", time_args.detector, "Detector name(s), comma list")
        ->required();
    time_cmd->add_option("--descriptor", time_args.descriptor, "Descriptor name(s), comma list")
        ->required();
    time_cmd->add_option("--warmup", time_args.warmup, "Unmeasured passes per image");
    time_cmd->add_option("--passes", time_args.passes, "Measured passes per image");
    time_cmd->add_option("--out", time_args.out, "Output CSV path (stdout when omitted)");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Merge eval reports into one CSV table");
    report->add_option("--in", report_args.inputs, "Eval report JSON files")
        ->required()
        ->expected(-1);
    report->add_option("--out", report_args.out, "Output CSV path (stdout when omitted)");
    report->add_option("--rank-by", report_args.rank_by, "Task whose mAP orders the rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (eval->parsed()) return run_eval(eval_args);
        if (extract->parsed()) return run_extract(extract_args);
        if (time_cmd->parsed()) return run_time(time_args);
        if (report->parsed()) return run_report(report_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const featkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
