// Dense row-major matrix of doubles, sized for desk-scale instance data.

#ifndef FHSAP_MATRIX_HPP
#define FHSAP_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <vector>

namespace fhsap {

class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Mat&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double row_sum(const Mat& m, int i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j);
    return s;
}

inline double col_sum(const Mat& m, int j) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += m(i, j);
    return s;
}

}  // namespace fhsap

#endif  // FHSAP_MATRIX_HPP
