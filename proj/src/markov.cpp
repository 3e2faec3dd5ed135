#include "proctrace/markov.hpp"

#include <ostream>

#include "proctrace/utf8.hpp"

namespace proctrace {

TransitionMatrix build_transition_matrix(const EventString& s, const AlphabetConfig& config) {
    TransitionMatrix m;
    m.dim = config.size();
    if (s.chars.size() < 2) return m;

    std::map<std::pair<int, int>, std::int64_t> counts;
    int prev = config.index_of(s.chars[0]);
    if (prev < 0)
        throw DataError("character '" + to_utf8(s.chars[0]) + "' of trace " + s.trace_id +
                        " is not in the alphabet");
    for (std::size_t t = 1; t < s.chars.size(); ++t) {
        const int cur = config.index_of(s.chars[t]);
        if (cur < 0)
            throw DataError("character '" + to_utf8(s.chars[t]) + "' of trace " + s.trace_id +
                            " is not in the alphabet");
        ++counts[{prev, cur}];
        ++m.row_counts[prev];
        prev = cur;
    }
    for (const auto& [ij, c] : counts) {
        m.entries[ij] = static_cast<double>(c) / static_cast<double>(m.row_counts.at(ij.first));
    }
    return m;
}

FeatureVector flatten(const TransitionMatrix& m) {
    FeatureVector v;
    v.length = m.dim * m.dim;
    v.nonzeros.reserve(m.entries.size());
    for (const auto& [ij, p] : m.entries) {
        v.nonzeros.emplace_back(static_cast<std::int64_t>(ij.first) * static_cast<std::int64_t>(m.dim) +
                                    ij.second,
                                p);
    }
    return v;
}

FeatureMatrix assemble_feature_matrix(const std::vector<EventString>& strings,
                                      const AlphabetConfig& config) {
    FeatureMatrix fm;
    fm.width = config.size() * config.size();
    fm.rows.reserve(strings.size());
    for (const auto& s : strings) {
        fm.rows.push_back(flatten(build_transition_matrix(s, config)));
        fm.labels.push_back(s.program_name);
        fm.trace_ids.push_back(s.trace_id);
    }
    return fm;
}

void dump_matrix_pgm(std::ostream& out, const TransitionMatrix& m) {
    out << "P2\n" << m.dim << " " << m.dim << "\n255\n";
    for (std::size_t i = 0; i < m.dim; ++i) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            const auto it = m.entries.find({static_cast<int>(i), static_cast<int>(j)});
            // white = zero, darker = higher probability
            const int pix = (it == m.entries.end()) ? 255 : static_cast<int>(255.0 * (1.0 - it->second));
            out << pix << (j + 1 == m.dim ? "" : " ");
        }
        out << "\n";
    }
}

void dump_matrix_csv(std::ostream& out, const TransitionMatrix& m) {
    for (std::size_t i = 0; i < m.dim; ++i) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            const auto it = m.entries.find({static_cast<int>(i), static_cast<int>(j)});
            out << (it == m.entries.end() ? 0.0 : it->second) << (j + 1 == m.dim ? "" : ",");
        }
        out << "\n";
    }
}

}  // namespace proctrace
