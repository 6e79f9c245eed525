#include "fpinn/surrogate.hpp"

#include <stdexcept>

namespace fpinn {

namespace {

const std::vector<std::pair<std::string, VariantTag>>& registry() {
  static const std::vector<std::pair<std::string, VariantTag>> r = {
      {"standard_pinn", VariantTag::standard_pinn}, {"strong_bc_poly", VariantTag::strong_bc_poly},
      {"strong_bc_exp", VariantTag::strong_bc_exp}, {"fourier_pinn", VariantTag::fourier_pinn},
      {"fourier_pinn_no_ls", VariantTag::fourier_pinn_no_ls}, {"rff_pinn", VariantTag::rff_pinn},
      {"w_pinn", VariantTag::w_pinn},               {"a_pinn", VariantTag::a_pinn},
      {"spectral_only", VariantTag::spectral_only}};
  return r;
}

double axis_period(const PdeProblem& p, const ModelConfig& cfg, Eigen::Index axis) {
  if (!cfg.fourier_period.empty()) {
    if (static_cast<Eigen::Index>(cfg.fourier_period.size()) != p.dim())
      throw std::invalid_argument("make_model: one Fourier period per axis required");
    return cfg.fourier_period[static_cast<std::size_t>(axis)];
  }
  return p.upper(axis) - p.lower(axis);
}

// Column of candidate n inside the 1D bank [cos_1..cos_K | sin_1..sin_K].
Eigen::Index cos_col(int n) { return n - 1; }
Eigen::Index sin_col(const SurrogateModel& m, int n) { return m.max_freq + n - 1; }

Vector full_bank_coeffs(const SurrogateModel& m) {
  Vector coef = Vector::Zero(2 * m.max_freq);
  const auto& f = m.fourier1d;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    const int n = f.active_freqs[static_cast<std::size_t>(j)];
    coef(cos_col(n)) = f.cos_coeffs(j);
    coef(sin_col(m, n)) = f.sin_coeffs(j);
  }
  return coef;
}

void add_linear_jets(JetBatch& u, const FourierFeatures& f, const Vector& coef, int order) {
  u.value += f.value * coef;
  if (order >= 1) u.grad.col(0) += f.d1 * coef;
  if (order >= 2) u.second.col(0) += f.d2 * coef;
}

Vector rowdot(const DenseMatrix& a, const DenseMatrix& b) { return (a.array() * b.array()).rowwise().sum(); }

// A^T diag(w) B
DenseMatrix weighted_cross(const DenseMatrix& a, const Vector& w, const DenseMatrix& b) {
  return a.transpose() * (b.array().colwise() * w.array()).matrix();
}

template <typename Scalar>
Vector net_gradient(const SurrogateModel& m, const PointCache& c, const MlpTape<Scalar>& tape, const JetBatch& net_bar) {
  const MatrixX<Scalar> adj = to_channels<Scalar>(net_bar, c.layout);
  if constexpr (std::is_same_v<Scalar, float>) {
    return param_gradient(m.net.cast<float>(), tape, adj).template cast<double>();
  } else {
    return param_gradient(m.net, tape, adj);
  }
}

}  // namespace

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, t] : registry()) out.push_back(n);
    return out;
  }();
  return names;
}

std::string variant_name(VariantTag tag) {
  for (const auto& [n, t] : registry())
    if (t == tag) return n;
  throw std::invalid_argument("variant_name: unregistered tag");
}

VariantTag parse_variant(const std::string& name) {
  for (const auto& [n, t] : registry())
    if (n == name) return t;
  std::string valid;
  for (const auto& n : variant_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown variant '" + name + "'; valid variants: " + valid);
}

// ---------------------------------------------------------------------------

bool SurrogateModel::net_alive() const {
  if (!has_net()) return false;
  for (auto a : nn_active)
    if (a) return true;
  return false;
}

Eigen::Index SurrogateModel::fourier_count() const {
  if (!has_fourier()) return 0;
  return dim == 1 ? 2 * fourier1d.size() : fourier2d.beta.size();
}

Eigen::Index SurrogateModel::active_nn() const {
  Eigen::Index n = 0;
  for (auto a : nn_active) n += a ? 1 : 0;
  return n;
}

Eigen::Index SurrogateModel::active_fourier() const {
  if (!has_fourier()) return 0;
  return dim == 1 ? fourier1d.size() : fourier2d.active_count();
}

Eigen::Index SurrogateModel::w_count() const {
  return active_nn() + (has_fourier() ? (dim == 1 ? 2 * fourier1d.size() : fourier2d.active_count()) : 0);
}

SurrogateModel make_model(const VariantSpec& variant, const PdeProblem& problem, const ModelConfig& cfg) {
  SurrogateModel m;
  m.variant = variant;
  m.dim = problem.dim();
  m.single_precision = cfg.single_precision;
  m.freeze_fourier = cfg.freeze_fourier;
  if (m.dim < 1 || m.dim > 2) throw std::invalid_argument("make_model: 1D or 2D problems only");
  if (variant.strong() && !problem.all_faces_dirichlet())
    throw std::invalid_argument("make_model: " + variant_name(variant.tag) + " needs Dirichlet data on every face; '" +
                                problem.name + "' has a free face");
  if (variant.tag == VariantTag::rff_pinn && variant.rff_scales.empty())
    throw std::invalid_argument("make_model: rff_pinn needs at least one scale");
  if (variant.tag == VariantTag::w_pinn && !(variant.residual_weight > 0.0))
    throw std::invalid_argument("make_model: w_pinn residual weight must be positive");

  if (m.has_net()) {
    if (cfg.hidden.empty()) throw std::invalid_argument("make_model: at least one hidden layer required");
    int input = static_cast<int>(m.dim);
    if (variant.tag == VariantTag::rff_pinn) {
      m.rff = sample_rff(variant.rff_scales, variant.rff_features_per_scale, static_cast<int>(m.dim),
                         cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      input = static_cast<int>(m.rff->output_dim());
    }
    std::vector<int> widths{input};
    widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    widths.push_back(1);
    m.net = init_params(widths, cfg.seed,
                        variant.tag == VariantTag::a_pinn ? Activation::adaptive_tanh : Activation::tanh);
    m.nn_active.assign(static_cast<std::size_t>(m.net.width()), 1);
  }

  if (m.has_fourier()) {
    m.max_freq = cfg.max_freq;
    if (m.dim == 1) {
      m.fourier1d = make_candidates(cfg.max_freq, axis_period(problem, cfg, 0));
    } else {
      m.fourier2d = make_tensor_candidates(cfg.max_freq, cfg.max_freq, axis_period(problem, cfg, 0),
                                           axis_period(problem, cfg, 1), cfg.include_constant);
    }
  }

  if (m.strong()) {
    m.distance = variant.tag == VariantTag::strong_bc_poly
                     ? make_poly_distance(problem.lower, problem.upper)
                     : make_exp_distance(problem.lower, problem.upper, cfg.exp_alpha, cfg.train_alpha);
    const PointJetFn g = boundary_jet_fn(problem);
    m.lift = m.dim == 1 ? linear_lift(problem.lower(0), problem.upper(0), g)
                        : coons_lift(problem.lower, problem.upper, g);
  }
  return m;
}

Vector get_params(const SurrogateModel& m) {
  Vector out(m.parameter_count());
  if (m.has_net()) out.head(m.net_count()) = flatten(m.net);
  if (m.has_fourier()) {
    if (m.dim == 1)
      out.segment(m.fourier_offset(), m.fourier_count()) << m.fourier1d.cos_coeffs, m.fourier1d.sin_coeffs;
    else
      out.segment(m.fourier_offset(), m.fourier_count()) = m.fourier2d.beta;
  }
  if (m.trains_alpha()) out.segment(m.alpha_offset(), m.alpha_count()) = log_alpha(m.distance);
  return out;
}

void set_params(SurrogateModel& m, const Vector& flat) {
  if (flat.size() != m.parameter_count()) throw std::invalid_argument("set_params: size mismatch");
  if (m.has_net()) unflatten(m.net, flat.head(m.net_count()));
  if (m.has_fourier()) {
    if (m.dim == 1) {
      const Eigen::Index k = m.fourier1d.size();
      m.fourier1d.cos_coeffs = flat.segment(m.fourier_offset(), k);
      m.fourier1d.sin_coeffs = flat.segment(m.fourier_offset() + k, k);
    } else {
      m.fourier2d.beta = flat.segment(m.fourier_offset(), m.fourier_count());
    }
  }
  if (m.trains_alpha()) set_log_alpha(m.distance, flat.segment(m.alpha_offset(), m.alpha_count()));
}

void mask_gradient(const SurrogateModel& m, Vector& grad) {
  if (m.has_net()) {
    const Eigen::Index c0 = m.c_offset();
    for (std::size_t j = 0; j < m.nn_active.size(); ++j)
      if (!m.nn_active[j]) grad(c0 + static_cast<Eigen::Index>(j)) = 0.0;
    if (!m.net_alive()) grad.head(m.net_count()).setZero();
  }
  if (m.has_fourier()) {
    if (m.freeze_fourier) {
      grad.segment(m.fourier_offset(), m.fourier_count()).setZero();
    } else if (m.dim == 2) {
      for (std::size_t j = 0; j < m.fourier2d.active.size(); ++j)
        if (!m.fourier2d.active[j]) grad(m.fourier_offset() + static_cast<Eigen::Index>(j)) = 0.0;
    }
  }
}

std::vector<Eigen::Index> w_indices(const SurrogateModel& m) {
  std::vector<Eigen::Index> idx;
  if (m.has_net()) {
    const Eigen::Index c0 = m.c_offset();
    for (std::size_t j = 0; j < m.nn_active.size(); ++j)
      if (m.nn_active[j]) idx.push_back(c0 + static_cast<Eigen::Index>(j));
  }
  if (m.has_fourier()) {
    const Eigen::Index f0 = m.fourier_offset();
    if (m.dim == 1) {
      for (Eigen::Index j = 0; j < 2 * m.fourier1d.size(); ++j) idx.push_back(f0 + j);
    } else {
      for (std::size_t j = 0; j < m.fourier2d.active.size(); ++j)
        if (m.fourier2d.active[j]) idx.push_back(f0 + static_cast<Eigen::Index>(j));
    }
  }
  return idx;
}

// ---------------------------------------------------------------------------

PointCache make_cache(const SurrogateModel& m, const Eigen::MatrixXd& points, int order) {
  if (points.cols() != m.dim) throw std::invalid_argument("make_cache: point dimension mismatch");
  PointCache c;
  c.points = points;
  c.layout = {points.rows(), points.cols(), order};
  if (m.has_net()) {
    c.net_input = m.rff ? rff_input(*m.rff, points, order) : coordinate_input<double>(points, order);
    if (m.single_precision) c.net_input_f = c.net_input.cast<float>();
  }
  if (m.has_fourier()) {
    if (m.dim == 1) {
      std::vector<int> all(static_cast<std::size_t>(m.max_freq));
      for (int n = 1; n <= m.max_freq; ++n) all[static_cast<std::size_t>(n - 1)] = n;
      c.bank1d = fourier_features(m.fourier1d.domain_length, all, points.col(0), order);
    } else {
      for (int a = 0; a < 2; ++a)
        c.axis[a] = axis_features(m.fourier2d.lengths[a], m.fourier2d.freqs[a], m.fourier2d.include_constant,
                                  points.col(a), order);
    }
  }
  if (m.strong()) {
    c.lift = m.lift.eval(points, order);
    if (!m.trains_alpha()) c.phi = distance_jets(m.distance, points, order);
  }
  return c;
}

Evaluation evaluate(const SurrogateModel& m, const PointCache& c) {
  const auto& lay = c.layout;
  Evaluation e;
  e.u = JetBatch(lay.points, lay.dim, lay.order);
  e.net = JetBatch(lay.points, lay.dim, lay.order);
  if (m.net_alive()) {
    if (m.single_precision) {
      e.tape_f = forward(m.net.cast<float>(), c.net_input_f, lay);
      e.net = to_jets(e.tape_f.output, lay);
    } else {
      e.tape = forward(m.net, c.net_input, lay);
      e.net = to_jets(e.tape.output, lay);
    }
    e.net_evaluated = true;
  }
  if (m.strong()) {
    e.phi = m.trains_alpha() ? distance_jets(m.distance, c.points, lay.order) : c.phi;
    e.u = compose_strong(c.lift, e.phi, e.net);
  } else {
    e.u += e.net;
  }
  if (m.has_fourier()) {
    if (m.dim == 1) {
      add_linear_jets(e.u, c.bank1d, full_bank_coeffs(m), lay.order);
    } else {
      const auto& f = m.fourier2d;
      const auto b = f.beta.reshaped(f.axis_features(0), f.axis_features(1));
      const auto& a1 = c.axis[0];
      const auto& a2 = c.axis[1];
      const DenseMatrix t0 = a1.value * b;
      e.u.value += rowdot(t0, a2.value);
      if (lay.order >= 1) {
        e.u.grad.col(0) += rowdot(a1.d1 * b, a2.value);
        e.u.grad.col(1) += rowdot(t0, a2.d1);
      }
      if (lay.order >= 2) {
        e.u.second.col(0) += rowdot(a1.d2 * b, a2.value);
        e.u.second.col(1) += rowdot(t0, a2.d2);
      }
    }
  }
  return e;
}

Vector backward(const SurrogateModel& m, const PointCache& c, const Evaluation& e, const JetBatch& u_bar) {
  const auto& lay = c.layout;
  Vector grad = Vector::Zero(m.parameter_count());

  JetBatch net_bar = u_bar;
  if (m.strong()) {
    StrongAdjoint adj = compose_strong_adjoint(e.phi, e.net, u_bar);
    net_bar = std::move(adj.net_bar);
    if (m.trains_alpha()) {
      const auto sens = distance_log_alpha_sensitivity(m.distance, c.points, lay.order);
      for (std::size_t p = 0; p < sens.size(); ++p) {
        double g = adj.phi_bar.value.dot(sens[p].value);
        if (lay.order >= 1) g += (adj.phi_bar.grad.array() * sens[p].grad.array()).sum();
        if (lay.order >= 2) g += (adj.phi_bar.second.array() * sens[p].second.array()).sum();
        grad(m.alpha_offset() + static_cast<Eigen::Index>(p)) = g;
      }
    }
  }

  if (e.net_evaluated)
    grad.head(m.net_count()) = m.single_precision ? net_gradient(m, c, e.tape_f, net_bar)
                                                  : net_gradient(m, c, e.tape, net_bar);

  if (m.has_fourier()) {
    const Eigen::Index f0 = m.fourier_offset();
    if (m.dim == 1) {
      Vector gfull = c.bank1d.value.transpose() * u_bar.value;
      if (lay.order >= 1) gfull += c.bank1d.d1.transpose() * u_bar.grad.col(0);
      if (lay.order >= 2) gfull += c.bank1d.d2.transpose() * u_bar.second.col(0);
      const Eigen::Index k = m.fourier1d.size();
      for (Eigen::Index j = 0; j < k; ++j) {
        const int n = m.fourier1d.active_freqs[static_cast<std::size_t>(j)];
        grad(f0 + j) = gfull(cos_col(n));
        grad(f0 + k + j) = gfull(sin_col(m, n));
      }
    } else {
      const auto& a1 = c.axis[0];
      const auto& a2 = c.axis[1];
      DenseMatrix g = weighted_cross(a1.value, u_bar.value, a2.value);
      if (lay.order >= 1) {
        g += weighted_cross(a1.d1, u_bar.grad.col(0), a2.value);
        g += weighted_cross(a1.value, u_bar.grad.col(1), a2.d1);
      }
      if (lay.order >= 2) {
        g += weighted_cross(a1.d2, u_bar.second.col(0), a2.value);
        g += weighted_cross(a1.value, u_bar.second.col(1), a2.d2);
      }
      grad.segment(f0, g.size()) = g.reshaped();
    }
  }
  return grad;
}

Vector predict(const SurrogateModel& m, const Eigen::MatrixXd& points) {
  return evaluate(m, make_cache(m, points, 0)).u.value;
}

Vector predict_net_part(const SurrogateModel& m, const Eigen::MatrixXd& points) {
  if (!m.net_alive()) return Vector::Zero(points.rows());
  return evaluate(m, make_cache(m, points, 0)).net.value;
}

BasisJets basis_jets(const SurrogateModel& m, const PointCache& c, const Evaluation& e) {
  const auto& lay = c.layout;
  const Eigen::Index n = lay.points;
  const Eigen::Index p = m.w_count();
  BasisJets b;
  b.value.resize(n, p);
  if (lay.order >= 1) b.grad.assign(static_cast<std::size_t>(lay.dim), DenseMatrix(n, p));
  if (lay.order >= 2) b.second.assign(static_cast<std::size_t>(lay.dim), DenseMatrix(n, p));

  Eigen::Index col = 0;
  if (m.has_net() && m.active_nn() > 0) {
    if (!e.net_evaluated) throw std::logic_error("basis_jets: evaluation lacks the network tape");
    auto block = [&](Eigen::Index start) {
      return m.single_precision ? basis_block(e.tape_f, start) : basis_block(e.tape, start);
    };
    auto take = [&](const DenseMatrix& full, DenseMatrix& dst) {
      Eigen::Index k = col;
      for (std::size_t j = 0; j < m.nn_active.size(); ++j)
        if (m.nn_active[j]) dst.col(k++) = full.col(static_cast<Eigen::Index>(j));
    };
    take(block(0), b.value);
    for (Eigen::Index k = 0; k < lay.dim && lay.order >= 1; ++k) {
      take(block(lay.grad_block(k)), b.grad[static_cast<std::size_t>(k)]);
      if (lay.order >= 2) take(block(lay.second_block(k)), b.second[static_cast<std::size_t>(k)]);
    }
    col += m.active_nn();
  }

  if (m.has_fourier()) {
    if (m.dim == 1) {
      const Eigen::Index k = m.fourier1d.size();
      for (Eigen::Index j = 0; j < k; ++j) {
        const int f = m.fourier1d.active_freqs[static_cast<std::size_t>(j)];
        const Eigen::Index ca = cos_col(f), cb = sin_col(m, f);
        b.value.col(col + j) = c.bank1d.value.col(ca);
        b.value.col(col + k + j) = c.bank1d.value.col(cb);
        if (lay.order >= 1) {
          b.grad[0].col(col + j) = c.bank1d.d1.col(ca);
          b.grad[0].col(col + k + j) = c.bank1d.d1.col(cb);
        }
        if (lay.order >= 2) {
          b.second[0].col(col + j) = c.bank1d.d2.col(ca);
          b.second[0].col(col + k + j) = c.bank1d.d2.col(cb);
        }
      }
    } else {
      const auto& f = m.fourier2d;
      const Eigen::Index f1 = f.axis_features(0);
      const auto& a1 = c.axis[0];
      const auto& a2 = c.axis[1];
      Eigen::Index k = col;
      for (std::size_t j = 0; j < f.active.size(); ++j) {
        if (!f.active[j]) continue;
        const Eigen::Index ia = static_cast<Eigen::Index>(j) % f1, ib = static_cast<Eigen::Index>(j) / f1;
        b.value.col(k) = a1.value.col(ia).cwiseProduct(a2.value.col(ib));
        if (lay.order >= 1) {
          b.grad[0].col(k) = a1.d1.col(ia).cwiseProduct(a2.value.col(ib));
          b.grad[1].col(k) = a1.value.col(ia).cwiseProduct(a2.d1.col(ib));
        }
        if (lay.order >= 2) {
          b.second[0].col(k) = a1.d2.col(ia).cwiseProduct(a2.value.col(ib));
          b.second[1].col(k) = a1.value.col(ia).cwiseProduct(a2.d2.col(ib));
        }
        ++k;
      }
    }
  }
  return b;
}

}  // namespace fpinn
