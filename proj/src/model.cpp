#include "proctrace/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "proctrace/markov.hpp"
#include "proctrace/utf8.hpp"

namespace proctrace {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string corpus_digest(const std::vector<EventString>& strings) {
    std::string blob;
    for (const auto& s : strings) {
        blob += s.trace_id;
        blob += '\x1f';
        blob += s.program_name;
        blob += '\x1f';
        blob += to_utf8(s.chars);
        blob += '\n';
    }
    return hex64(fnv1a64(blob));
}

TrainedModel train_from_strings(const std::vector<EventString>& strings,
                                const AlphabetConfig& config, const Hyperparameters& hyper,
                                std::uint64_t seed, std::size_t min_len) {
    const std::vector<EventString> kept = filter_short_strings(strings, min_len);
    std::set<std::string> classes;
    for (const auto& s : kept) classes.insert(s.program_name);
    if (classes.size() < 2)
        throw DataError("training needs at least 2 program classes after the min-length filter, got " +
                        std::to_string(classes.size()));

    TrainedModel model;
    model.config = config;
    model.hyper = hyper;
    model.provenance.seed = seed;
    model.provenance.corpus_digest = corpus_digest(kept);

    const FeatureMatrix features = assemble_feature_matrix(kept, config);
    model.basis = fit_projection(features, hyper.m, seed);
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        model.index.points.push_back({project(features.rows[i], model.basis), features.labels[i]});
    }
    return model;
}

namespace {

std::vector<EventString> transform_logs(const std::vector<std::string>& paths,
                                        const AlphabetConfig& config) {
    std::vector<ParsedRecord> records;
    for (const auto& path : paths) {
        auto part = read_event_log_file(path);
        records.insert(records.end(), part.begin(), part.end());
    }
    const TraceCorpus corpus = group_into_traces(records);
    std::vector<EventString> strings;
    strings.reserve(corpus.traces.size());
    for (const auto& trace : corpus.traces) strings.push_back(transform_trace(trace, config));
    return strings;
}

}  // namespace

TrainedModel train_model(const std::vector<std::string>& event_log_paths,
                         const AlphabetConfig& config, const Hyperparameters& hyper,
                         std::uint64_t seed, std::size_t min_len) {
    return train_from_strings(transform_logs(event_log_paths, config), config, hyper, seed,
                              min_len);
}

std::vector<TraceOutcome> classify_strings(const TrainedModel& model,
                                           const std::vector<EventString>& strings,
                                           std::size_t min_len) {
    std::vector<TraceOutcome> outcomes;
    outcomes.reserve(strings.size());
    for (const auto& s : strings) {
        TraceOutcome out;
        out.trace_id = s.trace_id;
        if (s.chars.size() < min_len) {
            out.skipped = true;
            out.skip_reason = "below min length " + std::to_string(min_len);
            outcomes.push_back(std::move(out));
            continue;
        }
        const FeatureVector v = flatten(build_transition_matrix(s, model.config));
        const std::vector<double> coords = project(v, model.basis);
        out.low_confidence =
            std::all_of(coords.begin(), coords.end(), [](double c) { return c == 0.0; });
        out.prediction = classify(model.index, coords, model.hyper);
        out.verdict = detect_mismatch(s.trace_id, s.program_name, out.prediction);
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

std::vector<TraceOutcome> classify_traces(const TrainedModel& model,
                                          const std::vector<std::string>& event_log_paths,
                                          std::size_t min_len) {
    return classify_strings(model, transform_logs(event_log_paths, model.config), min_len);
}

namespace {

nlohmann::json model_payload(const TrainedModel& model) {
    nlohmann::json j;
    j["format_version"] = model.format_version;
    j["alphabet"] = nlohmann::json::parse(alphabet_config_to_json(model.config));
    j["basis"] = {{"m", model.basis.m},
                  {"width", model.basis.width},
                  {"seed", model.basis.seed},
                  {"singular_values", model.basis.singular_values},
                  {"directions", model.basis.directions}};
    nlohmann::json points = nlohmann::json::array();
    for (const auto& pt : model.index.points) {
        points.push_back({{"label", pt.label}, {"coords", pt.coords}});
    }
    j["index"] = {{"points", std::move(points)}};
    j["hyper"] = {{"k", model.hyper.k},
                  {"voting", to_string(model.hyper.voting)},
                  {"p", model.hyper.p},
                  {"m", model.hyper.m}};
    j["provenance"] = {{"seed", model.provenance.seed},
                       {"corpus_digest", model.provenance.corpus_digest},
                       {"created", model.provenance.created}};
    return j;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
    nlohmann::json j = model_payload(model);
    j["digest"] = hex64(fnv1a64(j.dump()));
    return j.dump() + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptionError(std::string("model file is not valid JSON: ") + e.what());
    }
    TrainedModel model;
    try {
        model.format_version = j.at("format_version").get<int>();
        if (model.format_version != kModelFormatVersion)
            throw VersionError("unsupported model format version " +
                               std::to_string(model.format_version));

        const std::string stored_digest = j.at("digest").get<std::string>();
        nlohmann::json payload = j;
        payload.erase("digest");
        if (hex64(fnv1a64(payload.dump())) != stored_digest)
            throw CorruptionError("model digest mismatch");

        model.config = alphabet_config_from_json(j.at("alphabet").dump());
        const auto& b = j.at("basis");
        model.basis.m = b.at("m").get<std::size_t>();
        model.basis.width = b.at("width").get<std::size_t>();
        model.basis.seed = b.at("seed").get<std::uint64_t>();
        model.basis.singular_values = b.at("singular_values").get<std::vector<double>>();
        model.basis.directions = b.at("directions").get<std::vector<std::vector<double>>>();
        for (const auto& pj : j.at("index").at("points")) {
            model.index.points.push_back(
                {pj.at("coords").get<std::vector<double>>(), pj.at("label").get<std::string>()});
        }
        const auto& h = j.at("hyper");
        model.hyper.k = h.at("k").get<std::size_t>();
        model.hyper.voting = voting_from_string(h.at("voting").get<std::string>());
        model.hyper.p = h.at("p").get<double>();
        model.hyper.m = h.at("m").get<std::size_t>();
        const auto& prov = j.at("provenance");
        model.provenance.seed = prov.at("seed").get<std::uint64_t>();
        model.provenance.corpus_digest = prov.at("corpus_digest").get<std::string>();
        model.provenance.created = prov.at("created").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw CorruptionError(std::string("model file is missing fields: ") + e.what());
    }
    return model;
}

void persist_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << model_to_json(model);
}

TrainedModel restore_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

ProjectionDatasets emit_projection(const std::vector<EventString>& strings,
                                   const AlphabetConfig& config, std::uint64_t seed,
                                   std::size_t min_len) {
    const std::vector<EventString> kept = filter_short_strings(strings, min_len);
    if (kept.empty()) throw DataError("no strings survive the min-length filter");
    const FeatureMatrix features = assemble_feature_matrix(kept, config);
    const ProjectionBasis basis = fit_projection(features, 3, seed);
    if (basis.singular_values[2] <= 1e-12 * std::max(basis.singular_values[0], 1e-300))
        throw DataError("feature matrix rank is below 3; cannot emit a 3-component projection");

    ProjectionDatasets data;
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        const std::vector<double> c = project(features.rows[i], basis);
        data.coords.push_back({c[0], c[1], c[2]});
        data.labels.push_back(features.labels[i]);
    }
    return data;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_pair_csv(const std::string& path, const ProjectionDatasets& data, int xc, int yc) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "x,y,label\n";
    for (std::size_t i = 0; i < data.coords.size(); ++i) {
        out << format_double(data.coords[i][static_cast<std::size_t>(xc)]) << ","
            << format_double(data.coords[i][static_cast<std::size_t>(yc)]) << "," << data.labels[i]
            << "\n";
    }
}

}  // namespace

void write_projection_csv(const std::string& prefix, const ProjectionDatasets& data) {
    write_pair_csv(prefix + "_c1c2.csv", data, 0, 1);
    write_pair_csv(prefix + "_c2c3.csv", data, 1, 2);
    write_pair_csv(prefix + "_c1c3.csv", data, 0, 2);
}

std::string projection_svg(const ProjectionDatasets& data, int x_component, int y_component) {
    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    const int size = 640;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!data.coords.empty()) {
        xmin = xmax = data.coords[0][static_cast<std::size_t>(x_component)];
        ymin = ymax = data.coords[0][static_cast<std::size_t>(y_component)];
        for (const auto& c : data.coords) {
            xmin = std::min(xmin, c[static_cast<std::size_t>(x_component)]);
            xmax = std::max(xmax, c[static_cast<std::size_t>(x_component)]);
            ymin = std::min(ymin, c[static_cast<std::size_t>(y_component)]);
            ymax = std::max(ymax, c[static_cast<std::size_t>(y_component)]);
        }
    }
    const double xspan = xmax > xmin ? xmax - xmin : 1.0;
    const double yspan = ymax > ymin ? ymax - ymin : 1.0;

    std::map<std::string, std::size_t> color_of;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < data.coords.size(); ++i) {
        const auto [it, inserted] = color_of.emplace(data.labels[i], color_of.size());
        (void)inserted;
        const double x =
            20 + (data.coords[i][static_cast<std::size_t>(x_component)] - xmin) / xspan * (size - 40);
        const double y =
            size - 20 - (data.coords[i][static_cast<std::size_t>(y_component)] - ymin) / yspan * (size - 40);
        svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\""
            << kPalette[it->second % 10] << "\" fill-opacity=\"0.7\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace proctrace
