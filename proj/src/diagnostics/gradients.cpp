#include "lossbal/diagnostics/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lossbal/csv.hpp"

namespace lossbal::diag {

GradientStats gradient_stats(const std::vector<double>& g) {
    if (g.empty()) throw std::invalid_argument("gradient_stats: empty gradient");
    GradientStats s;
    for (double v : g) {
        if (!std::isfinite(v)) throw std::invalid_argument("gradient_stats: non-finite gradient component");
        s.mean += v;
        s.max_abs = std::max(s.max_abs, std::abs(v));
    }
    s.mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (double v : g) var += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(var / static_cast<double>(g.size()));
    return s;
}

GradientHistogram gradient_histogram(const balance::ObjectiveGradients& grads, const HistogramSpec& spec) {
    if (grads.empty()) throw std::invalid_argument("gradient_histogram: no objectives");
    if (spec.bins == 0) throw std::invalid_argument("gradient_histogram: need at least one bin");
    GradientHistogram h;
    double m = 0.0;
    for (const auto& g : grads) {
        h.stats.push_back(gradient_stats(g));
        m = std::max(m, h.stats.back().max_abs);
    }
    if (m == 0.0) m = 1.0;
    const double lo = spec.lo.value_or(-m), hi = spec.hi.value_or(m);
    if (!(hi > lo)) throw std::invalid_argument("gradient_histogram: empty range");
    const double width = (hi - lo) / static_cast<double>(spec.bins);
    for (std::size_t i = 0; i <= spec.bins; ++i) h.edges.push_back(lo + width * static_cast<double>(i));
    h.edges.back() = hi;
    for (const auto& g : grads) {
        std::vector<std::size_t> counts(spec.bins, 0);
        for (double v : g) {
            const double pos = std::floor((v - lo) / width);
            const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(spec.bins - 1)));
            ++counts[bin];
        }
        h.counts.push_back(std::move(counts));
    }
    return h;
}

void write_histogram_csv(const std::filesystem::path& path, const GradientHistogram& hist,
                         const std::vector<std::string>& names) {
    if (names.size() != hist.counts.size()) throw std::invalid_argument("write_histogram_csv: name count mismatch");
    CsvWriter csv(path);
    std::vector<std::string> cols{"bin_left", "bin_right"};
    cols.insert(cols.end(), names.begin(), names.end());
    csv.header(cols);
    for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b) {
        csv.cell(hist.edges[b]).cell(hist.edges[b + 1]);
        for (const auto& c : hist.counts) csv.cell(static_cast<long long>(c[b]));
        csv.end_row();
    }
    csv.close();
}

}  // namespace lossbal::diag
