#include "geoforge/alignment_metrics.hpp"

#include "geoforge/errors.hpp"
#include "geoforge/quantity_dsl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

namespace geoforge::metrics {

namespace {

std::set<schema::Segment> segments_of(const schema::PlotCode& pc) {
    std::set<schema::Segment> out;
    for (const auto& [a, b] : pc.segments)
        if (a != b) out.insert(schema::canonical_segment(a, b));
    return out;
}

std::optional<double> literal_value(const std::string& text, dsl::ValueContext ctx) {
    try {
        return dsl::parse_value_literal(text, ctx);
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Greedy one-to-one matching; entries are few, so quadratic is fine.
template <typename Entry, typename Same>
CategoryMatch match_entries(const std::vector<Entry>& pred, const std::vector<Entry>& truth, Same same) {
    CategoryMatch m{truth.size(), pred.size(), 0, false};
    std::vector<bool> used(pred.size(), false);
    for (const auto& t : truth) {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (used[i] || !same(pred[i], t)) continue;
            used[i] = true;
            ++m.matched;
            break;
        }
    }
    m.correct = m.matched == m.truth && m.matched == m.predicted;
    return m;
}

bool same_angle(const schema::Triple& a, const schema::Triple& b) {
    return a[1] == b[1] && ((a[0] == b[0] && a[2] == b[2]) || (a[0] == b[2] && a[2] == b[0]));
}

}  // namespace

F1Report f1_from_counts(std::size_t intersection, std::size_t predicted, std::size_t truth) {
    F1Report r{0, 0, 0, intersection, predicted, truth};
    if (predicted > 0) r.precision = static_cast<double>(intersection) / static_cast<double>(predicted);
    if (truth > 0) r.recall = static_cast<double>(intersection) / static_cast<double>(truth);
    // Same value as 2PR/(P+R), with a single rounding.
    if (intersection > 0) r.f1 = static_cast<double>(2 * intersection) / static_cast<double>(predicted + truth);
    return r;
}

F1Report segment_f1(const schema::PlotCode& pred, const schema::PlotCode& truth) {
    const auto p = segments_of(pred);
    const auto t = segments_of(truth);
    std::size_t common = 0;
    for (const auto& s : p) common += t.count(s);
    return f1_from_counts(common, p.size(), t.size());
}

std::vector<Bin> bin_by_score(const std::vector<Sample>& samples, std::size_t k) {
    if (k == 0) throw BinningError("bin count must be at least 1");
    if (samples.empty()) throw BinningError("no samples");
    const std::size_t n = samples.size();
    if (k > n) throw BinningError(std::to_string(k) + " bins for " + std::to_string(n) + " samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a].score < samples[b].score; });

    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::vector<Bin> bins;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < k; ++b) {
        Bin bin;
        bin.index = b;
        bin.size = base + (b >= k - extra ? 1 : 0);
        std::size_t solved = 0;
        for (std::size_t i = 0; i < bin.size; ++i) {
            const std::size_t idx = order[pos++];
            bin.members.push_back(idx);
            solved += samples[idx].solved ? 1 : 0;
        }
        bin.min_score = samples[bin.members.front()].score;
        bin.max_score = samples[bin.members.back()].score;
        bin.accuracy = static_cast<double>(solved) / static_cast<double>(bin.size);
        bins.push_back(std::move(bin));
    }
    return bins;
}

AnnotationMatch annotation_match(const schema::Annotations& pred, const schema::Annotations& truth,
                                 const core::Tolerance& tol) {
    auto close = [&](double a, double b, double abs_tol) {
        return std::abs(a - b) <= std::max(abs_tol, tol.eps_rel * std::abs(b));
    };
    AnnotationMatch m;
    m.right_angles = match_entries(pred.right_angles, truth.right_angles, same_angle);
    m.lengths = match_entries(pred.length_of_line, truth.length_of_line, [&](const auto& p, const auto& t) {
        const bool same_seg = (p.first[0] == t.first[0] && p.first[1] == t.first[1]) ||
                              (p.first[0] == t.first[1] && p.first[1] == t.first[0]);
        if (!same_seg) return false;
        const auto pv = literal_value(p.second, dsl::ValueContext::length);
        const auto tv = literal_value(t.second, dsl::ValueContext::length);
        return pv && tv && close(*pv, *tv, tol.eps_abs);
    });
    m.angles = match_entries(pred.measure_of_angle, truth.measure_of_angle, [&](const auto& p, const auto& t) {
        if (!same_angle(p.first, t.first)) return false;
        const auto pv = literal_value(p.second, dsl::ValueContext::angle);
        const auto tv = literal_value(t.second, dsl::ValueContext::angle);
        return pv && tv && close(*pv, *tv, tol.eps_angle_deg);
    });
    m.fully_correct = m.right_angles.correct && m.lengths.correct && m.angles.correct;
    return m;
}

}  // namespace geoforge::metrics
