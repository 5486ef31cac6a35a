#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lossbal {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (key, counter), so streams are reproducible
/// on every platform and can be split without sequential state.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
};

/// A named random stream. The stream key is derived from (seed, name), so
/// "init", "batching" and "sampling" never share draws and changing how many
/// numbers one consumer takes does not shift the others.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::string_view name);

    /// Independent child stream, e.g. one per epoch or per layer.
    RandomStream substream(std::uint64_t index) const;

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    /// Uniform in the open interval (0, 1), 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; the second variate of each pair is kept.
    double normal();
    /// Uniform integer in [0, n), rejection sampled (unbiased).
    std::uint64_t below(std::uint64_t n);

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

  private:
    RandomStream(Philox4x32::Key key, std::uint64_t lane);

    Philox4x32::Key key_{};
    std::uint64_t lane_ = 0;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lossbal
