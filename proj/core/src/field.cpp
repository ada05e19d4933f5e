#include "calabi/field.hpp"

#include "calabi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace calabi {

ScalarField::ScalarField(Grid grid, double fill)
    : grid_(grid), values_(grid.point_count(), fill)
{
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.point_count()) {
        throw GridMismatch("ScalarField: value count " + std::to_string(values_.size())
                           + " does not match grid with " + std::to_string(grid_.point_count())
                           + " points");
    }
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where)
{
    if (!(a.grid() == b.grid())) {
        throw GridMismatch(std::string(where) + ": fields live on different grids");
    }
}

ScalarField& ScalarField::operator+=(const ScalarField& other)
{
    require_same_grid(*this, other, "operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other)
{
    require_same_grid(*this, other, "operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double c)
{
    for (double& v : values_) v *= c;
    return *this;
}

double ScalarField::mean() const
{
    double acc = 0.0;
    for (double v : values_) acc += v;
    return acc / static_cast<double>(values_.size());
}

double ScalarField::sup_norm() const
{
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::l2_norm() const
{
    double acc = 0.0;
    for (double v : values_) acc += v * v;
    return std::sqrt(acc / static_cast<double>(values_.size()));
}

double ScalarField::dot(const ScalarField& other) const
{
    require_same_grid(*this, other, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
    return acc / static_cast<double>(values_.size());
}

bool ScalarField::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b)
{
    require_same_grid(a, b, "hadamard");
    ScalarField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

} // namespace calabi
