#include "bargmann/fock.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/stellar.hpp"

namespace bargmann {

namespace {

void check_cutoffs(const AbcTriple& obj, const std::vector<Index>& cutoffs, Index max_elements) {
  if (static_cast<Index>(cutoffs.size()) != obj.dim()) {
    throw DomainError("cutoff count must match wire count");
  }
  Index total = 1;
  for (Index c : cutoffs) {
    if (c <= 0) throw DomainError("cutoffs must be positive");
    if (total > max_elements / c) throw DomainError("Fock array exceeds element budget");
    total *= c;
  }
}

double operator_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

bool all_ket_wires(const WireLayout& layout) {
  for (const Wire& w : layout.wires()) {
    if (w.kind != WireKind::Ket) return false;
  }
  return true;
}

void guard(const AbcTriple& obj, const FockOptions& options) {
  if (!options.guard_divergence) return;
  if (all_ket_wires(obj.layout()) && operator_norm(obj.A()) >= 1.0) {
    throw DivergentIntegralError("ket-like object has ||A|| >= 1; Fock series diverges");
  }
}

// Visits the index lattice in row-major odometer order; every componentwise
// predecessor of an index is visited before it.
template <typename F>
void for_each_index(const std::vector<Index>& shape, F&& body) {
  std::vector<Index> idx(shape.size(), 0);
  while (true) {
    body(idx);
    Index d = static_cast<Index>(shape.size()) - 1;
    while (d >= 0) {
      if (++idx[static_cast<std::size_t>(d)] < shape[static_cast<std::size_t>(d)]) break;
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) return;
  }
}

}  // namespace

FockArray::FockArray(std::vector<Index> shape) : shape_(std::move(shape)) {
  strides_.assign(shape_.size(), 1);
  Index total = 1;
  for (std::size_t d = shape_.size(); d-- > 0;) {
    strides_[d] = total;
    total *= shape_[d];
  }
  data_.assign(static_cast<std::size_t>(total), Complex{0.0, 0.0});
}

std::size_t FockArray::flat(const std::vector<Index>& idx) const {
  std::size_t off = 0;
  for (std::size_t d = 0; d < shape_.size(); ++d) {
    off += static_cast<std::size_t>(idx[d] * strides_[d]);
  }
  return off;
}

double FockArray::norm_squared() const {
  double out = 0.0;
  for (const Complex& z : data_) out += std::norm(z);
  return out;
}

FockArray fock_amplitudes(const AbcTriple& obj, const std::vector<Index>& cutoffs,
                          const FockOptions& options) {
  check_cutoffs(obj, cutoffs, options.max_elements);
  guard(obj, options);
  FockArray g(cutoffs);
  const Index n = obj.dim();
  std::vector<Index> pred(static_cast<std::size_t>(n), 0);
  for_each_index(cutoffs, [&](const std::vector<Index>& idx) {
    // target = idx; pick i = first nonzero axis, recurse from idx - 1_i.
    Index i = -1;
    for (Index d = 0; d < n; ++d) {
      if (idx[static_cast<std::size_t>(d)] > 0) {
        i = d;
        break;
      }
    }
    if (i < 0) {
      g.at(idx) = obj.c();
      return;
    }
    std::vector<Index>& k = pred;
    k = idx;
    --k[static_cast<std::size_t>(i)];
    Complex acc = obj.b()(i) * g.at(k);
    for (Index j = 0; j < n; ++j) {
      const Index kj = k[static_cast<std::size_t>(j)];
      if (kj == 0) continue;
      --k[static_cast<std::size_t>(j)];
      acc += std::sqrt(static_cast<double>(kj)) * obj.A()(i, j) * g.at(k);
      ++k[static_cast<std::size_t>(j)];
    }
    g.at(idx) = acc / std::sqrt(static_cast<double>(idx[static_cast<std::size_t>(i)]));
  });
  return g;
}

FockArray fock_amplitudes_stable(const AbcTriple& obj, const std::vector<Index>& cutoffs,
                                 const FockOptions& options) {
  check_cutoffs(obj, cutoffs, options.max_elements);
  guard(obj, options);
  FockArray g(cutoffs);
  const Index n = obj.dim();
  std::vector<Index> k1(static_cast<std::size_t>(n), 0);
  for_each_index(cutoffs, [&](const std::vector<Index>& idx) {
    int branches = 0;
    Complex acc{0.0, 0.0};
    for (Index i = 0; i < n; ++i) {
      const Index ki = idx[static_cast<std::size_t>(i)];
      if (ki == 0) continue;
      ++branches;
      std::vector<Index>& k = k1;
      k = idx;
      --k[static_cast<std::size_t>(i)];
      Complex term = obj.b()(i) * g.at(k);
      for (Index j = 0; j < n; ++j) {
        const Index kj_shifted = idx[static_cast<std::size_t>(j)] - (i == j ? 1 : 0);
        if (kj_shifted == 0) continue;
        --k[static_cast<std::size_t>(j)];
        term += std::sqrt(static_cast<double>(kj_shifted)) * obj.A()(i, j) * g.at(k);
        ++k[static_cast<std::size_t>(j)];
      }
      acc += term / std::sqrt(static_cast<double>(ki));
    }
    if (branches == 0) {
      g.at(idx) = obj.c();
    } else {
      g.at(idx) = acc / static_cast<double>(branches);
    }
  });
  return g;
}

HeraldResult herald(const AbcTriple& ket, const HeraldSpec& spec, const HeraldOptions& options) {
  if (spec.measured_modes.size() != spec.pattern.size()) {
    throw DomainError("herald: pattern length must match measured mode count");
  }
  for (int k : spec.pattern) {
    if (k < 0) throw DomainError("herald: photon counts must be nonnegative");
  }
  const bool dm_input = !all_ket_wires(ket.layout());
  for (int m : spec.measured_modes) {
    if (!ket.layout().contains({m, WireKind::Ket}) ||
        (dm_input && !ket.layout().contains({m, WireKind::Bra}))) {
      throw LayoutError("herald: pattern names unmeasured mode " + std::to_string(m));
    }
  }
  if (dm_input) {
    // density matrix: diagonal herald <k| rho |k> on the truncated path
    for (const Wire& w : ket.layout().wires()) {
      if (w.kind != WireKind::Ket && w.kind != WireKind::Bra) {
        throw LayoutError("herald expects a ket or a density matrix");
      }
    }
    std::vector<int> kept;
    for (int mode : ket.layout().modes()) {
      if (std::find(spec.measured_modes.begin(), spec.measured_modes.end(), mode) ==
          spec.measured_modes.end()) {
        kept.push_back(mode);
      }
    }
    std::vector<Wire> order;
    for (int mode : kept) order.push_back({mode, WireKind::Bra});
    for (int mode : kept) order.push_back({mode, WireKind::Ket});
    for (int mode : spec.measured_modes) order.push_back({mode, WireKind::Bra});
    for (int mode : spec.measured_modes) order.push_back({mode, WireKind::Ket});
    AbcTriple arranged_dm = reorder(ket, WireLayout(order));
    std::vector<Index> cutoffs(2 * kept.size(), options.direct_cutoff);
    for (int kph : spec.pattern) cutoffs.push_back(kph + 1);
    for (int kph : spec.pattern) cutoffs.push_back(kph + 1);
    FockOptions fopts;
    fopts.max_elements = options.max_elements;
    fopts.guard_divergence = false;
    FockArray full = fock_amplitudes(arranged_dm, cutoffs, fopts);
    FockArray slice(std::vector<Index>(2 * kept.size(), options.direct_cutoff));
    std::vector<Index> idx(cutoffs.size(), 0);
    HeraldResult out_dm;
    for_each_index(slice.shape(), [&](const std::vector<Index>& kept_idx) {
      for (std::size_t i = 0; i < 2 * kept.size(); ++i) idx[i] = kept_idx[i];
      for (std::size_t i = 0; i < spec.pattern.size(); ++i) {
        idx[2 * kept.size() + i] = spec.pattern[i];
        idx[2 * kept.size() + spec.pattern.size() + i] = spec.pattern[i];
      }
      slice.at(kept_idx) = full.at(idx);
    });
    out_dm.amplitudes = std::move(slice);
    out_dm.unitary = catalog::identity_gate(static_cast<int>(kept.size()));
    out_dm.kept_modes = kept;
    out_dm.exact = false;
    const Index maxdeg =
        static_cast<Index>(2 * kept.size()) * (options.direct_cutoff - 1);
    double tail = 0.0;
    for_each_index(out_dm.amplitudes.shape(), [&](const std::vector<Index>& kept_idx) {
      Index deg = std::accumulate(kept_idx.begin(), kept_idx.end(), Index{0});
      if (deg >= maxdeg - 1) tail += std::norm(out_dm.amplitudes.at(kept_idx));
    });
    out_dm.tail_norm = std::sqrt(tail);
    return out_dm;
  }

  // Kept modes first, measured modes last.
  std::vector<int> kept;
  for (const Wire& w : ket.layout().wires()) {
    if (std::find(spec.measured_modes.begin(), spec.measured_modes.end(), w.mode) ==
        spec.measured_modes.end()) {
      kept.push_back(w.mode);
    }
  }
  std::vector<Wire> order;
  for (int m : kept) order.push_back({m, WireKind::Ket});
  for (int m : spec.measured_modes) order.push_back({m, WireKind::Ket});
  AbcTriple arranged = reorder(ket, WireLayout(order));

  HeraldResult out;
  out.kept_modes = kept;
  const Index total_photons =
      std::accumulate(spec.pattern.begin(), spec.pattern.end(), Index{0});

  if (options.use_core_decomposition) {
    stellar::PureDecomposition dec =
        stellar::pure_decompose(arranged, static_cast<int>(kept.size()));
    std::vector<Index> cutoffs;
    for (std::size_t i = 0; i < kept.size(); ++i) cutoffs.push_back(total_photons + 1);
    for (int k : spec.pattern) cutoffs.push_back(k + 1);
    FockOptions fopts;
    fopts.max_elements = options.max_elements;
    fopts.guard_divergence = false;  // core blocks are exact by construction
    FockArray core = fock_amplitudes(dec.core, cutoffs, fopts);

    FockArray slice(std::vector<Index>(kept.size(), total_photons + 1));
    std::vector<Index> idx(cutoffs.size(), 0);
    for_each_index(slice.shape(), [&](const std::vector<Index>& kept_idx) {
      for (std::size_t i = 0; i < kept.size(); ++i) idx[i] = kept_idx[i];
      for (std::size_t i = 0; i < spec.pattern.size(); ++i) {
        idx[kept.size() + i] = spec.pattern[i];
      }
      slice.at(kept_idx) = core.at(idx);
    });
    out.amplitudes = std::move(slice);
    out.unitary = dec.unitary;
    out.exact = true;
    out.tail_norm = 0.0;
    return out;
  }

  std::vector<Index> cutoffs;
  for (std::size_t i = 0; i < kept.size(); ++i) cutoffs.push_back(options.direct_cutoff);
  for (int k : spec.pattern) cutoffs.push_back(k + 1);
  FockOptions fopts;
  fopts.max_elements = options.max_elements;
  FockArray full = fock_amplitudes(arranged, cutoffs, fopts);

  FockArray slice(std::vector<Index>(kept.size(), options.direct_cutoff));
  std::vector<Index> idx(cutoffs.size(), 0);
  for_each_index(slice.shape(), [&](const std::vector<Index>& kept_idx) {
    for (std::size_t i = 0; i < kept.size(); ++i) idx[i] = kept_idx[i];
    for (std::size_t i = 0; i < spec.pattern.size(); ++i) idx[kept.size() + i] = spec.pattern[i];
    slice.at(kept_idx) = full.at(idx);
  });

  // Tail witness from the last two total-degree shells of the slice.
  const Index maxdeg = static_cast<Index>(kept.size()) * (options.direct_cutoff - 1);
  double tail = 0.0;
  for_each_index(slice.shape(), [&](const std::vector<Index>& kept_idx) {
    Index deg = std::accumulate(kept_idx.begin(), kept_idx.end(), Index{0});
    if (deg >= maxdeg - 1) tail += std::norm(slice.at(kept_idx));
  });
  out.amplitudes = std::move(slice);
  out.unitary = catalog::identity_gate(static_cast<int>(kept.size()));
  out.exact = false;
  out.tail_norm = std::sqrt(tail);
  return out;
}

Matrix displacement_matrix_elements(Complex alpha, Index cutoff) {
  if (cutoff < 1) throw DomainError("displacement_matrix_elements: cutoff must be >= 1");
  Matrix d(cutoff, cutoff);
  const double x = std::norm(alpha);
  const double prefactor = std::exp(-0.5 * x);
  for (Index m = 0; m < cutoff; ++m) {
    for (Index n = 0; n <= m; ++n) {
      // factor = sqrt(n!/m!) alpha^{m-n}, built as a product of alpha/sqrt(j)
      Complex factor = 1.0;
      for (Index j = n + 1; j <= m; ++j) factor *= alpha / std::sqrt(static_cast<double>(j));
      // L_n^{(m-n)}(x) by upward recurrence in the lower index
      const double a = static_cast<double>(m - n);
      double lkm1 = 1.0;            // L_0
      double lk = 1.0 + a - x;      // L_1
      double lag = (n == 0) ? lkm1 : lk;
      for (Index k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double next = ((2.0 * kk + 1.0 + a - x) * lk - (kk + a) * lkm1) / (kk + 1.0);
        lkm1 = lk;
        lk = next;
        lag = next;
      }
      d(m, n) = prefactor * factor * lag;
      if (m != n) {
        // <n|D|m> = (-1)^{m-n} conj-free symmetry with alpha -> -conj(alpha)
        Complex factor2 = 1.0;
        for (Index j = n + 1; j <= m; ++j) {
          factor2 *= -std::conj(alpha) / std::sqrt(static_cast<double>(j));
        }
        d(n, m) = prefactor * factor2 * lag;
      }
    }
  }
  return d;
}

double effective_squeezing_exact(const FockArray& state, const AbcTriple& unitary,
                                 const Eigen::Vector2d& direction, double hbar) {
  if (state.rank() != 1) throw DomainError("effective_squeezing_exact expects a 1-mode vector");
  const double nrm2 = state.norm_squared();
  if (nrm2 <= 0.0) throw DomainError("zero-norm state");
  SymplecticUnitary su = abc_to_unitary(unitary, hbar);
  RealMatrix omega = symplectic_form(1, QuadOrder::XXPP);
  Eigen::Vector2d v = std::sqrt(2.0 * M_PI * hbar) * direction;
  Eigen::Vector2d vprime = -omega * su.S.transpose() * omega * v;
  const Complex alpha = Complex(vprime(0), vprime(1)) / std::sqrt(2.0 * hbar);
  const Index cutoff = state.shape()[0];
  Matrix d = displacement_matrix_elements(alpha, cutoff);
  Complex expectation = 0.0;
  for (Index m = 0; m < cutoff; ++m) {
    for (Index n = 0; n < cutoff; ++n) {
      expectation += std::conj(state.data()[static_cast<std::size_t>(m)]) * d(m, n) *
                     state.data()[static_cast<std::size_t>(n)];
    }
  }
  const double mag = std::abs(expectation) / nrm2;
  if (mag <= 0.0) return std::numeric_limits<double>::infinity();
  return (2.0 / M_PI) * std::log(1.0 / mag);
}

}  // namespace bargmann
