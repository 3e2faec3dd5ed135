// Command-line front end for the process-trace classification toolkit.
//
// Subcommands mirror the pipeline stages: ingest -> transform -> featurize ->
// train -> classify/detect, plus evaluate/tune for model selection, simulate
// for synthetic corpora and project for 3-component scatter data.
//
// Exit codes: 0 success, 1 data/input error, 2 usage error.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "proctrace/evaluation.hpp"
#include "proctrace/markov.hpp"
#include "proctrace/model.hpp"
#include "proctrace/simulator.hpp"
#include "proctrace/utf8.hpp"

using namespace proctrace;

namespace {

AlphabetConfig load_config(const std::string& path) {
    if (path.empty()) return default_alphabet_config();
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open alphabet config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return alphabet_config_from_json(ss.str());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    return out;
}

// --out means a file; otherwise stdout
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        open_out(out_path) << text;
    }
}

std::vector<EventString> transform_paths(const std::vector<std::string>& log_paths,
                                         const AlphabetConfig& config) {
    std::vector<ParsedRecord> records;
    for (const auto& path : log_paths) {
        auto part = read_event_log_file(path);
        records.insert(records.end(), part.begin(), part.end());
    }
    const TraceCorpus corpus = group_into_traces(records);
    std::vector<EventString> strings;
    strings.reserve(corpus.traces.size());
    for (const auto& trace : corpus.traces) strings.push_back(transform_trace(trace, config));
    return strings;
}

// either raw event logs or an already-transformed strings file
std::vector<EventString> load_strings(const std::vector<std::string>& log_paths,
                                      const std::string& strings_path,
                                      const AlphabetConfig& config) {
    if (!strings_path.empty()) return read_strings_file(strings_path);
    if (log_paths.empty()) throw ParamError("no input: pass event logs or --strings");
    return transform_paths(log_paths, config);
}

std::string outcome_line(const TraceOutcome& o) {
    std::ostringstream line;
    line << o.trace_id << "\t";
    if (o.skipped) {
        line << "skipped\t" << o.skip_reason;
    } else {
        line << (o.verdict.is_anomaly ? "ANOMALY" : "ok") << "\tnatural="
             << o.verdict.natural_name << "\tassigned=" << o.verdict.assigned_name
             << "\tdistance=" << o.verdict.confidence;
        if (o.low_confidence) line << "\tlow-confidence";
    }
    line << "\n";
    return line.str();
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string config_path;
    std::string model_path;
    std::string out_path;
    std::size_t min_len = kDefaultMinLen;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_model = false) {
    cmd->add_option("--seed", opts.seed, "random seed (default 0)");
    cmd->add_option("--config", opts.config_path,
                    "alphabet config JSON (default: built-in configuration)");
    if (with_model) cmd->add_option("--model", opts.model_path, "model file path");
    cmd->add_option("--out", opts.out_path, "output path (default: stdout)");
    cmd->add_option("--min-len", opts.min_len, "minimum string length (default 6)");
}

Hyperparameters parse_hyper(const std::string& voting_name, const Hyperparameters& base) {
    Hyperparameters h = base;
    h.voting = voting_from_string(voting_name);
    return h;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"process-trace behavior classification and anomaly detection"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> log_paths;
    std::string strings_path;
    std::string spec_path;
    std::string svg_path;
    Hyperparameters hyper;
    std::string voting_name = to_string(hyper.voting);
    int folds = 3;

    auto* ingest = app.add_subcommand("ingest", "parse event logs and list the grouped traces");
    ingest->add_option("logs", log_paths, "event log files (JSONL)")->required();
    add_common(ingest, opts);

    auto* transform =
        app.add_subcommand("transform", "reduce event logs to one string per process");
    transform->add_option("logs", log_paths, "event log files (JSONL)")->required();
    add_common(transform, opts);

    auto* featurize =
        app.add_subcommand("featurize", "build sparse transition-probability features");
    featurize->add_option("--strings", strings_path, "strings file (JSONL)")->required();
    add_common(featurize, opts);

    auto* train = app.add_subcommand("train", "train a classification model");
    train->add_option("logs", log_paths, "event log files (JSONL)");
    train->add_option("--strings", strings_path, "train from a strings file instead of logs");
    add_common(train, opts, true);
    train->add_option("-k,--neighbors", hyper.k, "neighbor count (default 1)");
    train->add_option("--voting", voting_name, "uniform | distance_weighted");
    train->add_option("-p,--minkowski", hyper.p, "Minkowski exponent (default 1)");
    train->add_option("-m,--components", hyper.m, "projected dimensions (default 100)");

    auto* classify_cmd = app.add_subcommand("classify", "classify traces with a trained model");
    classify_cmd->add_option("logs", log_paths, "event log files (JSONL)");
    classify_cmd->add_option("--strings", strings_path, "classify a strings file instead of logs");
    add_common(classify_cmd, opts, true);

    auto* detect = app.add_subcommand("detect", "report traces whose behavior mismatches their name");
    detect->add_option("logs", log_paths, "event log files (JSONL)");
    detect->add_option("--strings", strings_path, "detect over a strings file instead of logs");
    add_common(detect, opts, true);

    auto* evaluate = app.add_subcommand("evaluate", "3:1 stratified split, train and score");
    evaluate->add_option("logs", log_paths, "event log files (JSONL)");
    evaluate->add_option("--strings", strings_path, "evaluate a strings file instead of logs");
    add_common(evaluate, opts);
    evaluate->add_option("-k,--neighbors", hyper.k, "neighbor count (default 1)");
    evaluate->add_option("--voting", voting_name, "uniform | distance_weighted");
    evaluate->add_option("-p,--minkowski", hyper.p, "Minkowski exponent (default 1)");
    evaluate->add_option("-m,--components", hyper.m, "projected dimensions (default 100)");

    auto* tune = app.add_subcommand("tune", "cross-validated grid search over hyperparameters");
    tune->add_option("logs", log_paths, "event log files (JSONL)");
    tune->add_option("--strings", strings_path, "tune over a strings file instead of logs");
    add_common(tune, opts);
    tune->add_option("--folds", folds, "cross-validation folds (default 3)");

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic corpus of strings");
    simulate->add_option("--spec", spec_path, "corpus spec JSON")->required();
    add_common(simulate, opts);

    auto* project = app.add_subcommand("project", "emit 3-component scatter data as CSV pairs");
    project->add_option("logs", log_paths, "event log files (JSONL)");
    project->add_option("--strings", strings_path, "project a strings file instead of logs");
    add_common(project, opts);
    project->add_option("--svg", svg_path, "also render an SVG scatter (components 1 and 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            std::vector<ParsedRecord> records;
            for (const auto& path : log_paths) {
                auto part = read_event_log_file(path);
                records.insert(records.end(), part.begin(), part.end());
            }
            const TraceCorpus corpus = group_into_traces(records);
            std::ostringstream out;
            for (const auto& trace : corpus.traces) {
                out << trace.trace_id << "\t" << trace.program_name << "\tevents="
                    << trace.events.size();
                for (const auto& problem : validate_trace(trace)) out << "\tINVALID: " << problem;
                out << "\n";
            }
            out << corpus.traces.size() << " traces, " << corpus.label_set().size()
                << " programs\n";
            emit(opts.out_path, out.str());
        } else if (*transform) {
            const AlphabetConfig config = load_config(opts.config_path);
            const auto strings = transform_paths(log_paths, config);
            std::ostringstream out;
            write_strings_jsonl(out, strings);
            emit(opts.out_path, out.str());
        } else if (*featurize) {
            const AlphabetConfig config = load_config(opts.config_path);
            const auto strings =
                filter_short_strings(read_strings_file(strings_path), opts.min_len);
            const FeatureMatrix features = assemble_feature_matrix(strings, config);
            std::ostringstream out;
            for (std::size_t i = 0; i < features.rows.size(); ++i) {
                nlohmann::json j;
                j["trace_id"] = features.trace_ids[i];
                j["program"] = features.labels[i];
                j["length"] = features.rows[i].length;
                nlohmann::json nz = nlohmann::json::array();
                for (const auto& [index, value] : features.rows[i].nonzeros) {
                    nz.push_back({index, value});
                }
                j["nonzeros"] = std::move(nz);
                out << j.dump() << "\n";
            }
            emit(opts.out_path, out.str());
        } else if (*train) {
            if (opts.model_path.empty()) throw ParamError("train needs --model for the output file");
            const AlphabetConfig config = load_config(opts.config_path);
            const Hyperparameters h = parse_hyper(voting_name, hyper);
            const auto strings = load_strings(log_paths, strings_path, config);
            const TrainedModel model =
                train_from_strings(strings, config, h, opts.seed, opts.min_len);
            persist_model(model, opts.model_path);
            std::cerr << "trained on " << model.index.points.size() << " traces, "
                      << model.index.label_set().size() << " programs -> " << opts.model_path
                      << "\n";
        } else if (*classify_cmd || *detect) {
            if (opts.model_path.empty()) throw ParamError("--model is required");
            const TrainedModel model = restore_model(opts.model_path);
            if (!opts.config_path.empty() && !(load_config(opts.config_path) == model.config)) {
                throw DataError("alphabet config mismatch: the model was trained with a "
                                "different configuration than --config");
            }
            const auto strings = load_strings(log_paths, strings_path, model.config);
            const auto outcomes = classify_strings(model, strings, opts.min_len);
            std::ostringstream out;
            std::size_t anomalies = 0, skipped = 0;
            for (const auto& o : outcomes) {
                if (o.skipped) ++skipped;
                if (!o.skipped && o.verdict.is_anomaly) ++anomalies;
                if (*detect && !o.skipped && !o.verdict.is_anomaly) continue;
                out << outcome_line(o);
            }
            out << outcomes.size() << " traces, " << anomalies << " anomalies, " << skipped
                << " skipped\n";
            emit(opts.out_path, out.str());
        } else if (*evaluate) {
            const AlphabetConfig config = load_config(opts.config_path);
            const Hyperparameters h = parse_hyper(voting_name, hyper);
            const auto strings = filter_short_strings(
                load_strings(log_paths, strings_path, config), opts.min_len);
            std::vector<std::string> labels;
            for (const auto& s : strings) labels.push_back(s.program_name);
            const SplitResult split = stratified_split(labels, opts.seed);
            for (const auto& warning : split.warnings) std::cerr << "warning: " << warning << "\n";
            std::vector<EventString> train_strings, verify_strings;
            for (std::size_t i : split.train) train_strings.push_back(strings[i]);
            for (std::size_t i : split.verify) verify_strings.push_back(strings[i]);
            const TrainedModel model =
                train_from_strings(train_strings, config, h, opts.seed, opts.min_len);
            const auto outcomes = classify_strings(model, verify_strings, opts.min_len);
            std::vector<std::string> predicted, truth;
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                predicted.push_back(outcomes[i].prediction.label);
                truth.push_back(verify_strings[i].program_name);
            }
            const ScoreReport report = score_report(confusion_counts(predicted, truth));
            emit(opts.out_path, format_score_table(report));
        } else if (*tune) {
            const AlphabetConfig config = load_config(opts.config_path);
            const auto strings = filter_short_strings(
                load_strings(log_paths, strings_path, config), opts.min_len);
            const GridSearchResult result =
                grid_search(strings, config, GridSpec{}, folds, opts.seed);
            for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
            emit(opts.out_path, format_grid_search_result(result));
        } else if (*simulate) {
            std::ifstream in(spec_path);
            if (!in) throw ParseError("cannot open corpus spec '" + spec_path + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            CorpusSpec spec = corpus_spec_from_json(ss.str());
            if (app.get_subcommand("simulate")->count("--seed") > 0) spec.seed = opts.seed;
            const SimulatedCorpus corpus = generate_corpus(spec);
            std::ostringstream out;
            write_strings_jsonl(out, corpus.strings);
            emit(opts.out_path, out.str());
            std::cerr << corpus.strings.size() << " traces, realized separation "
                      << corpus.realized_separation << "\n";
        } else if (*project) {
            const AlphabetConfig config = load_config(opts.config_path);
            const auto strings = load_strings(log_paths, strings_path, config);
            const ProjectionDatasets data =
                emit_projection(strings, config, opts.seed, opts.min_len);
            const std::string prefix = opts.out_path.empty() ? "projection" : opts.out_path;
            write_projection_csv(prefix, data);
            if (!svg_path.empty()) open_out(svg_path) << projection_svg(data, 0, 2);
            std::cerr << "wrote " << prefix << "_c1c2.csv, " << prefix << "_c2c3.csv, " << prefix
                      << "_c1c3.csv\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
