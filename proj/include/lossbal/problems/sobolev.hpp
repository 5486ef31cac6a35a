#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "lossbal/problems/problem.hpp"

namespace lossbal::problems {

/// u(x, y) = sum_i A_x^i cos(2 pi l_x^i x / L + phi_x^i) * A_y^i sin(2 pi l_y^i y / L + phi_y^i)
struct SobolevMode {
    double ax = 0, ay = 0;
    double phx = 0, phy = 0;
    int lx = 1, ly = 1;
};

class SobolevTarget {
  public:
    SobolevTarget(std::vector<SobolevMode> modes, double domain);
    /// M modes with A in [-5, 5], phi in [0, 2 pi], l in {1..5}, from the seed's "target" stream.
    static SobolevTarget random(std::size_t modes, std::uint64_t seed, double domain = 2 * std::numbers::pi);

    /// d^(bx + by) u / dx^bx dy^by, in closed form.
    double eval(double x, double y, int bx = 0, int by = 0) const;

    const std::vector<SobolevMode>& modes() const { return modes_; }
    double domain() const { return domain_; }

  private:
    std::vector<SobolevMode> modes_;
    double domain_;
};

struct SobolevConfig {
    std::size_t modes = 20;
    double domain = 2 * std::numbers::pi;
    std::size_t grid = 128;
    int max_order = 4;
    /// Objective k compares only the x-partials instead of both pure partials.
    bool pure_x_only = false;
    double xi_init = 0.5;
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
};

/// Objective 0 fits u; objective k = 1..max_order fits xi_hat_k * d^k u in
/// each axis against xi_k * d^k u with xi_k = 1.
ProblemData make_sobolev_problem(const SobolevConfig& cfg, const SobolevTarget& target);
ProblemData make_sobolev_problem(const SobolevConfig& cfg);

}  // namespace lossbal::problems
