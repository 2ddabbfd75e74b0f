#include "nearfield/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "nearfield/parallel.hpp"
#include "nearfield/specfun.hpp"

namespace nearfield {

RecoveredMiddle recover_middle(const Discretization& disc, const CMatrix& F_S, const DenseOperator& L,
                               const DenseOperator& Lstar, const RecoveryConfig& config) {
  const int n = disc.node_count();
  const int nh = disc.harmonic_size();
  if (F_S.rows() != n || F_S.cols() != n || L.rows() != nh || L.cols() != n || Lstar.rows() != n ||
      Lstar.cols() != nh) {
    throw std::invalid_argument("recover_middle: operator shapes do not match the discretization");
  }
  const double tau = config.svd_threshold;
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("recover_middle: threshold must lie in (0, 1)");
  if (config.l_rec > disc.l_max()) throw std::invalid_argument("recover_middle: l_rec exceeds l_max");
  const RVector sw = disc.source_weights().cwiseSqrt();

  // L as a map L2(S) -> coefficients and L* as coefficients -> L2(S).
  const CMatrix Lw = L.matrix * sw.cwiseInverse().asDiagonal();
  const CMatrix Sw = sw.asDiagonal() * Lstar.matrix;
  const RVector sL = Eigen::BDCSVD<CMatrix>(Lw).singularValues();
  const RVector sS = Eigen::BDCSVD<CMatrix>(Sw).singularValues();
  auto retained = [&](const RVector& s) {
    int r = 0;
    while (r < s.size() && s[r] > tau * s[0]) ++r;
    return r;
  };
  RecoveredMiddle out;
  out.sigma_L.assign(sL.data(), sL.data() + sL.size());
  out.sigma_Lstar.assign(sS.data(), sS.data() + sS.size());
  out.retained_L = retained(sL);
  out.retained_Lstar = retained(sS);
  const int modes = std::min(out.retained_L, out.retained_Lstar);
  int lmax_ok = -1;
  while (lmax_ok < disc.l_max() && harmonic_count(lmax_ok + 1) <= modes) ++lmax_ok;
  out.l_rec_max = lmax_ok;
  const int lr = config.l_rec < 0 ? lmax_ok : config.l_rec;
  if (lr < 0) {
    std::ostringstream os;
    os << "only " << modes << " singular modes survive the threshold " << tau;
    throw RankError(os.str());
  }
  out.l_rec = lr;
  const int q = harmonic_count(lr);

  // 4 pi G = sum_p x_p a_p b_p^T with a_p = W^1/2 L*_{:,p} and b_p = (L_{p,:} W^1/2)^T.
  // Thin QR of A and B reduces the fit to the q x q block Qa^H (4 pi G) conj(Qb).
  const CMatrix A = Sw.leftCols(q);
  const CMatrix B = (L.matrix.topRows(q) * sw.asDiagonal()).transpose();
  Eigen::HouseholderQR<CMatrix> qa(A);
  Eigen::HouseholderQR<CMatrix> qb(B);
  const CMatrix Qa = qa.householderQ() * CMatrix::Identity(n, q);
  const CMatrix Qb = qb.householderQ() * CMatrix::Identity(n, q);
  const CMatrix Ra = qa.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  const CMatrix Rb = qb.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  const CMatrix G = (4.0 * kPi) * (sw.asDiagonal() * F_S * sw.asDiagonal());
  const CMatrix H = Qa.adjoint() * G * Qb.conjugate();

  auto design = [&](int cols, RVector& scale) {
    CMatrix D(cols * cols, cols);
    scale.resize(cols);
    for (int p = 0; p < cols; ++p) {
      const CMatrix term = Ra.topLeftCorner(cols, cols).col(p) * Rb.topLeftCorner(cols, cols).col(p).transpose();
      D.col(p) = Eigen::Map<const CVector>(term.data(), term.size());
      scale[p] = D.col(p).norm();
      if (scale[p] > 0.0) D.col(p) /= scale[p];
    }
    return D;
  };
  auto rank_error = [&](int degree, double condition) {
    std::ostringstream os;
    os << "diagonal fit up to degree " << degree << " is rank deficient at threshold " << tau << " (condition "
       << condition << ")";
    return RankError(os.str());
  };
  // The design for a lower degree is a column block of the one for a higher degree (R is
  // triangular), so conditioning only worsens with the degree. Probe cheap degrees first.
  RVector scale;
  for (int d = std::max(lmax_ok + 1, 0); d < lr; ++d) {
    const RVector s = Eigen::BDCSVD<CMatrix>(design(harmonic_count(d), scale)).singularValues();
    if (!(s[s.size() - 1] > tau * s[0])) throw rank_error(d, s[0] / s[s.size() - 1]);
  }
  const CMatrix D = design(q, scale);
  Eigen::BDCSVD<CMatrix> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector sd = svd.singularValues();
  out.design_condition = sd[q - 1] > 0.0 ? sd[0] / sd[q - 1] : std::numeric_limits<double>::infinity();
  if (!(sd[q - 1] > tau * sd[0])) throw rank_error(lr, out.design_condition);
  const CVector x = svd.solve(Eigen::Map<const CVector>(H.data(), H.size()));

  out.M = {CMatrix::Zero(nh, nh), L.row_space, L.row_space};
  for (int p = 0; p < q; ++p) out.M.matrix(p, p) = x[p] / scale[p];

  const double total = G.squaredNorm();
  const double inside = H.squaredNorm();
  const double fit = (D * x - Eigen::Map<const CVector>(H.data(), H.size())).squaredNorm();
  out.residual = total > 0.0 ? std::sqrt(std::max(0.0, total - inside + fit) / total) : 0.0;
  return out;
}

cdouble dtn_from_middle(cdouble m, cdouble f0, cdouble fout) {
  const cdouble d = f0 - fout;
  const cdouble denom = 1.0 + m / d;
  if (std::abs(denom) < 1e-14) throw DegenerateError("1 + m / (f0 - fout) vanishes");
  return fout + d / denom;
}

RecoveredDtn recover_dtn(const CMatrix& M, const HarmonicDiagonal& f0, const HarmonicDiagonal& fout, int l_rec) {
  if (l_rec < 0 || harmonic_count(l_rec) > M.rows() || l_rec > f0.l_max() || l_rec > fout.l_max()) {
    throw std::invalid_argument("recover_dtn: trusted degree out of range");
  }
  RecoveredDtn out;
  out.fn = {DtnKind::Fn, f0.k, f0.a, std::vector<cdouble>(l_rec + 1)};
  out.middle.resize(l_rec + 1);
  for (int l = 0; l <= l_rec; ++l) {
    cdouble mean = 0.0;
    for (int m = -l; m <= l; ++m) mean += M(harmonic_index(l, m), harmonic_index(l, m));
    mean /= static_cast<double>(2 * l + 1);
    out.middle[l] = mean;
    out.fn.entries[l] = dtn_from_middle(mean, f0[l], fout[l]);
  }
  const int q = harmonic_count(l_rec);
  const CMatrix block = M.topLeftCorner(q, q);
  const double total = block.squaredNorm();
  double diag = 0.0;
  for (int l = 0; l <= l_rec; ++l) diag += (2 * l + 1) * std::norm(out.middle[l]);
  out.leakage = total > 0.0 ? std::sqrt(std::max(0.0, total - diag) / total) : 0.0;
  return out;
}

int FitTemplate::parameter_count() const {
  int free_b = 0;
  for (std::size_t i = 0; i < initial.breakpoints.size(); ++i) {
    if (i >= fixed_breakpoints.size() || !fixed_breakpoints[i]) ++free_b;
  }
  return initial.shells() + free_b;
}

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

FitTemplate parse_fit_template(const std::string& spec) {
  FitTemplate t;
  std::vector<double> fixed;
  bool have_b = false;
  bool have_v = false;
  std::stringstream ss(spec);
  std::string part;
  try {
    while (std::getline(ss, part, ';')) {
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw std::invalid_argument(part);
      std::string key = part.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      const auto vals = parse_list(part.substr(eq + 1));
      if (key == "breakpoints") {
        t.initial.breakpoints = vals;
        have_b = true;
      } else if (key == "values") {
        t.initial.values = vals;
        have_v = true;
      } else if (key == "fixed") {
        fixed = vals;
      } else {
        throw std::invalid_argument("unknown field '" + key + "'");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("fit template: cannot parse '") + e.what() + "'");
  } catch (const std::out_of_range&) {
    throw ValidationError("fit template: number out of range");
  }
  if (!have_b || !have_v || t.initial.breakpoints.size() != t.initial.values.size()) {
    throw ValidationError("fit template needs breakpoints and values of equal length");
  }
  if (t.initial.shells() < 1 || t.initial.shells() > 4) throw ValidationError("fit template: 1 to 4 shells");
  t.fixed_breakpoints.assign(t.initial.breakpoints.size(), false);
  if (!fixed.empty()) {
    if (fixed.size() != t.initial.breakpoints.size()) throw ValidationError("fit template: 'fixed' length mismatch");
    for (std::size_t i = 0; i < fixed.size(); ++i) t.fixed_breakpoints[i] = fixed[i] != 0.0;
  }
  return t;
}

double fit_misfit(const HarmonicDiagonal& data, int l_rec, const RadialPotential& model, const RadialOptions& options) {
  RadialOptions opts = options;
  opts.source_integral = false;
  double sum = 0.0;
  for (int l = 0; l <= l_rec; ++l) {
    const double fm = solve_regular(model, l, data.k, data.a, opts).fn;
    sum += std::norm(fm - data[l]) / ((1.0 + l) * (1.0 + l));
  }
  return sum;
}

namespace {

class FitProblem {
 public:
  FitProblem(const HarmonicDiagonal& data, int l_rec, const FitTemplate& t, const FitConfig& cfg)
      : data_(data), l_rec_(l_rec), t_(t), cfg_(cfg) {
    for (std::size_t i = 0; i < t.initial.breakpoints.size(); ++i) {
      if (i >= t.fixed_breakpoints.size() || !t.fixed_breakpoints[i]) free_.push_back(static_cast<int>(i));
    }
  }

  std::vector<double> initial() const {
    std::vector<double> p = t_.initial.values;
    for (int i : free_) p.push_back(t_.initial.breakpoints[i]);
    return p;
  }

  int shells() const { return t_.initial.shells(); }

  bool in_bounds(const std::vector<double>& p) const {
    for (int j = 0; j < shells(); ++j) {
      if (!(p[j] >= cfg_.value_min && p[j] <= cfg_.value_max)) return false;
    }
    const auto pot = model(p);
    double prev = 0.0;
    for (double b : pot.breakpoints) {
      if (!(b > prev && b < data_.a)) return false;
      prev = b;
    }
    return true;
  }

  std::vector<double> project(std::vector<double> p) const {
    for (int j = 0; j < shells(); ++j) p[j] = std::clamp(p[j], cfg_.value_min, cfg_.value_max);
    const double gap = 1e-6 * data_.a;
    auto pot = model(p);
    double prev = 0.0;
    for (std::size_t i = 0; i < pot.breakpoints.size(); ++i) {
      pot.breakpoints[i] = std::clamp(pot.breakpoints[i], prev + gap, data_.a * (1.0 - 1e-6));
      prev = pot.breakpoints[i];
    }
    for (std::size_t q = 0; q < free_.size(); ++q) p[shells() + q] = pot.breakpoints[free_[q]];
    return p;
  }

  RadialPotential model(const std::vector<double>& p) const {
    RadialPotential pot = t_.initial;
    for (int j = 0; j < shells(); ++j) pot.values[j] = p[j];
    for (std::size_t q = 0; q < free_.size(); ++q) pot.breakpoints[free_[q]] = p[shells() + q];
    return pot;
  }

  Eigen::VectorXd residual(const std::vector<double>& p) const {
    const auto pot = model(p);
    RadialOptions opts = cfg_.radial;
    opts.source_integral = false;
    Eigen::VectorXd r(2 * (l_rec_ + 1));
    for (int l = 0; l <= l_rec_; ++l) {
      const double fm = solve_regular(pot, l, data_.k, data_.a, opts).fn;
      const cdouble d = (fm - data_[l]) / (1.0 + l);
      r[2 * l] = d.real();
      r[2 * l + 1] = d.imag();
    }
    return r;
  }

 private:
  const HarmonicDiagonal& data_;
  int l_rec_;
  const FitTemplate& t_;
  const FitConfig& cfg_;
  std::vector<int> free_;
};

}  // namespace

FitResult fit_potential(const HarmonicDiagonal& data, int l_rec, const FitTemplate& tmpl, const FitConfig& cfg) {
  if (l_rec < 0 || l_rec > data.l_max()) throw std::invalid_argument("fit_potential: trusted degree out of range");
  check_potential(tmpl.initial, data.a);
  const FitProblem prob(data, l_rec, tmpl, cfg);
  std::vector<double> p = prob.initial();
  if (!prob.in_bounds(p)) {
    throw BoundsError("fit template starts outside [value_min, value_max] x (0, a)");
  }
  const int np = static_cast<int>(p.size());

  Eigen::VectorXd r = prob.residual(p);
  double f = r.squaredNorm();
  FitResult res;
  res.log.push_back({0, f, p, "start"});
  double lambda = 1e-3;
  double search = 0.1;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (f <= cfg.tolerance) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd J(r.size(), np);
    std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (int i = 0; i < np; ++i) {
      try {
        std::vector<double> q = p;
        const double h = cfg.fd_step * std::max(std::abs(p[i]), 1e-3);
        q[i] += h;
        J.col(i) = (prob.residual(q) - r) / h;
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    bool accepted = false;
    double step_norm = 0.0;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      Eigen::MatrixXd A = JtJ;
      for (int i = 0; i < np; ++i) A(i, i) += lambda * std::max(JtJ(i, i), 1e-12);
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      std::vector<double> q = p;
      for (int i = 0; i < np; ++i) q[i] += delta[i];
      q = prob.project(q);
      const Eigen::VectorXd rq = prob.residual(q);
      const double fq = rq.squaredNorm();
      if (fq < f) {
        step_norm = 0.0;
        for (int i = 0; i < np; ++i) step_norm = std::max(step_norm, std::abs(q[i] - p[i]));
        p = q;
        r = rq;
        f = fq;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        res.log.push_back({it, f, p, "gauss-newton"});
      } else {
        lambda *= 4.0;
      }
    }

    if (!accepted) {
      // Coordinate search with shrinking pattern size.
      bool improved = false;
      while (!improved && search > cfg.step_tolerance) {
        for (int i = 0; i < np && !improved; ++i) {
          for (double sgn : {1.0, -1.0}) {
            std::vector<double> q = p;
            q[i] += sgn * search * std::max(std::abs(p[i]), 1e-2);
            q = prob.project(q);
            const Eigen::VectorXd rq = prob.residual(q);
            if (rq.squaredNorm() < f) {
              step_norm = std::abs(q[i] - p[i]);
              p = q;
              r = rq;
              f = rq.squaredNorm();
              improved = true;
              res.log.push_back({it, f, p, "coordinate"});
              break;
            }
          }
        }
        if (!improved) search *= 0.5;
      }
      if (!improved) {
        res.converged = true;  // no descent direction left at this resolution
        res.iterations = it;
        break;
      }
    }
    res.iterations = it;
    if (accepted && step_norm < cfg.step_tolerance * (1.0 + std::abs(p[0]))) {
      res.converged = true;
      break;
    }
  }
  if (f <= cfg.tolerance) res.converged = true;

  res.parameters = p;
  res.potential = prob.model(p);
  res.misfit = f;
  if (!res.converged) {
    std::ostringstream os;
    os << "fit did not converge in " << cfg.max_iterations << " iterations (best misfit " << f << ")";
    throw FitNonConvergence(os.str(), res);
  }
  return res;
}

}  // namespace nearfield
