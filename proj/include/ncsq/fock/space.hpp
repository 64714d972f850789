#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ncsq/error.hpp"

namespace ncsq::fock {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx>;
using DenseMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Two-mode Fock space truncated at `cutoff` quanta per mode (inclusive).
/// Basis order is row-major over (n_a, n_b).
class FockSpace {
 public:
  static constexpr int kMaxCutoff = 200;

  explicit FockSpace(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1 || cutoff > kMaxCutoff)
      throw Error(Errc::CutoffOutOfRange,
                  "cutoff " + std::to_string(cutoff) + " outside [1, " +
                      std::to_string(kMaxCutoff) + "]");
  }

  [[nodiscard]] int cutoff() const noexcept { return cutoff_; }
  [[nodiscard]] Index levels() const noexcept { return cutoff_ + 1; }
  [[nodiscard]] Index dim() const noexcept { return levels() * levels(); }

  [[nodiscard]] Index index(int na, int nb) const noexcept { return na * levels() + nb; }
  [[nodiscard]] std::pair<int, int> occupations(Index i) const noexcept {
    return {static_cast<int>(i / levels()), static_cast<int>(i % levels())};
  }
  [[nodiscard]] int total(Index i) const noexcept {
    auto [na, nb] = occupations(i);
    return na + nb;
  }

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  int cutoff_;
};

[[nodiscard]] inline FockSpace make_space(int cutoff) { return FockSpace(cutoff); }

inline void require_same_space(const FockSpace& a, const FockSpace& b) {
  if (!(a == b))
    throw Error(Errc::SpaceMismatch, "operands live on cutoffs " + std::to_string(a.cutoff()) +
                                         " and " + std::to_string(b.cutoff()));
}

/// A matrix bound to the space it acts on. Arithmetic between different spaces
/// is rejected. Storage is SparseMat for ladder-type operators and DenseMat
/// for exponentials.
template <class Storage>
class TaggedMatrix {
 public:
  using storage_type = Storage;

  TaggedMatrix(FockSpace space, Storage data) : space_(space), data_(std::move(data)) {
    if (data_.rows() != space_.dim() || data_.cols() != space_.dim())
      throw Error(Errc::SpaceMismatch, "matrix dimensions do not match the tagged space");
  }

  [[nodiscard]] const FockSpace& space() const noexcept { return space_; }
  [[nodiscard]] const Storage& data() const noexcept { return data_; }

  [[nodiscard]] TaggedMatrix adjoint() const { return {space_, Storage(data_.adjoint())}; }

  [[nodiscard]] DenseMat dense() const {
    if constexpr (std::is_same_v<Storage, DenseMat>) {
      return data_;
    } else {
      return DenseMat(data_);
    }
  }

  [[nodiscard]] Vec apply(const Vec& v) const { return data_ * v; }

  friend TaggedMatrix operator*(cplx s, const TaggedMatrix& m) {
    return {m.space_, Storage(s * m.data_)};
  }
  friend TaggedMatrix operator*(const TaggedMatrix& m, cplx s) { return s * m; }

 private:
  FockSpace space_;
  Storage data_;
};

using OperatorMatrix = TaggedMatrix<SparseMat>;
using DenseOperator = TaggedMatrix<DenseMat>;

namespace detail {
template <class L, class R>
using result_storage_t =
    std::conditional_t<std::is_same_v<L, SparseMat> && std::is_same_v<R, SparseMat>, SparseMat,
                       DenseMat>;

template <class Out, class In>
Out convert(const In& m) {
  if constexpr (std::is_same_v<Out, In>) {
    return m;
  } else {
    return Out(m);
  }
}
}  // namespace detail

template <class L, class R>
[[nodiscard]] auto operator*(const TaggedMatrix<L>& a, const TaggedMatrix<R>& b) {
  require_same_space(a.space(), b.space());
  using Out = detail::result_storage_t<L, R>;
  return TaggedMatrix<Out>(a.space(), Out(a.data() * b.data()));
}

template <class L, class R>
[[nodiscard]] auto operator+(const TaggedMatrix<L>& a, const TaggedMatrix<R>& b) {
  require_same_space(a.space(), b.space());
  using Out = detail::result_storage_t<L, R>;
  return TaggedMatrix<Out>(a.space(), Out(detail::convert<Out>(a.data()) +
                                          detail::convert<Out>(b.data())));
}

template <class L, class R>
[[nodiscard]] auto operator-(const TaggedMatrix<L>& a, const TaggedMatrix<R>& b) {
  require_same_space(a.space(), b.space());
  using Out = detail::result_storage_t<L, R>;
  return TaggedMatrix<Out>(a.space(), Out(detail::convert<Out>(a.data()) -
                                          detail::convert<Out>(b.data())));
}

template <class L, class R>
[[nodiscard]] auto commutator(const TaggedMatrix<L>& a, const TaggedMatrix<R>& b) {
  return a * b - b * a;
}

[[nodiscard]] inline OperatorMatrix identity_op(const FockSpace& space) {
  SparseMat id(space.dim(), space.dim());
  id.setIdentity();
  return {space, std::move(id)};
}

/// Normalized state on a tagged space.
class StateVector {
 public:
  StateVector(FockSpace space, Vec data) : space_(space), data_(std::move(data)) {
    if (data_.size() != space_.dim())
      throw Error(Errc::SpaceMismatch, "state length does not match the tagged space");
  }

  [[nodiscard]] const FockSpace& space() const noexcept { return space_; }
  [[nodiscard]] const Vec& data() const noexcept { return data_; }

  [[nodiscard]] cplx inner(const StateVector& ket) const {
    require_same_space(space_, ket.space_);
    return data_.dot(ket.data_);  // conjugates the left operand
  }

 private:
  FockSpace space_;
  Vec data_;
};

/// Max |M_ij - target delta_ij| over basis states with total occupation <= max_total.
template <class Storage>
[[nodiscard]] double block_residual(const TaggedMatrix<Storage>& m, cplx target, int max_total) {
  const FockSpace& s = m.space();
  double worst = 0;
  if constexpr (std::is_same_v<Storage, SparseMat>) {
    const SparseMat& d = m.data();
    for (Index j = 0; j < d.outerSize(); ++j) {
      if (s.total(j) > max_total) continue;
      bool diag_seen = false;
      for (SparseMat::InnerIterator it(d, j); it; ++it) {
        if (s.total(it.row()) > max_total) continue;
        cplx v = it.value();
        if (it.row() == j) {
          v -= target;
          diag_seen = true;
        }
        worst = std::max(worst, std::abs(v));
      }
      if (!diag_seen) worst = std::max(worst, std::abs(target));
    }
  } else {
    const DenseMat& d = m.data();
    for (Index j = 0; j < d.cols(); ++j) {
      if (s.total(j) > max_total) continue;
      for (Index i = 0; i < d.rows(); ++i) {
        if (s.total(i) > max_total) continue;
        const cplx v = d(i, j) - (i == j ? target : cplx{});
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  return worst;
}

/// block_residual over the safe subspace: total occupation <= cutoff - buffer.
template <class Storage>
[[nodiscard]] double safe_residual(const TaggedMatrix<Storage>& m, cplx target, int buffer) {
  return block_residual(m, target, m.space().cutoff() - buffer);
}

/// Max |M - M^dagger| entrywise.
[[nodiscard]] inline double hermiticity_residual(const OperatorMatrix& m) {
  const SparseMat diff = m.data() - SparseMat(m.data().adjoint());
  double worst = 0;
  for (Index j = 0; j < diff.outerSize(); ++j)
    for (SparseMat::InnerIterator it(diff, j); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

[[nodiscard]] inline double max_abs(const DenseMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace ncsq::fock
