#include "lossbal/problems/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lossbal/csv.hpp"

namespace lossbal::problems {

std::vector<int> ProblemData::required_orders(std::size_t s, std::size_t input_dim) const {
    std::vector<int> orders(input_dim, 0);
    for (const auto& obj : objectives) {
        if (obj.point_set != s) continue;
        for (const auto& res : obj.residuals)
            for (const auto& t : res.terms) orders.at(t.axis) = std::max(orders.at(t.axis), t.order);
    }
    return orders;
}

void ProblemData::validate() const {
    if (objectives.empty()) throw std::invalid_argument("problem has no objectives");
    if (task_init.size() != task_truth.size()) throw std::invalid_argument("task parameter size mismatch");
    for (const auto& obj : objectives) {
        if (obj.point_set >= point_sets.size()) throw std::invalid_argument(obj.name + ": unknown point set");
        const auto n = point_sets[obj.point_set].points.cols();
        if (obj.residuals.empty()) throw std::invalid_argument(obj.name + ": no residuals");
        for (const auto& res : obj.residuals) {
            if (res.target.size() != n) throw std::invalid_argument(obj.name + ": target size mismatch");
            for (const auto& t : res.terms) {
                if (t.order < 0 || t.order > 4) throw std::invalid_argument(obj.name + ": order out of range");
                if (t.task_parameter && *t.task_parameter >= task_init.size())
                    throw std::invalid_argument(obj.name + ": unknown task parameter");
            }
        }
    }
    if (energies && energies->size() != objectives.size()) throw std::invalid_argument("energy count mismatch");
    if (test_points.cols() != test_truth.size()) throw std::invalid_argument("test set size mismatch");
}

double relative_l2(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("relative_l2: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        num += (pred[i] - truth[i]) * (pred[i] - truth[i]);
        den += truth[i] * truth[i];
    }
    if (!(den > 0.0)) throw std::invalid_argument("relative_l2: reference has zero norm");
    return std::sqrt(num / den);
}

double relative_l1(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("relative_l1: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        num += std::abs(pred[i] - truth[i]);
        den += std::abs(truth[i]);
    }
    if (!(den > 0.0)) throw std::invalid_argument("relative_l1: reference has zero norm");
    return num / den;
}

void export_grid_csv(const std::filesystem::path& path, const Eigen::MatrixXd& points, const Eigen::VectorXd& values) {
    if (points.cols() != values.size() || points.rows() != 2) throw std::invalid_argument("export_grid_csv: shape mismatch");
    CsvWriter csv(path);
    csv.header({"x", "y", "value"});
    for (Eigen::Index p = 0; p < points.cols(); ++p) {
        csv.cell(points(0, p)).cell(points(1, p)).cell(values(p));
        csv.end_row();
    }
    csv.close();
}

}  // namespace lossbal::problems
