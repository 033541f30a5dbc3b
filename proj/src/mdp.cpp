#include "rfx/mdp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rfx {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kEntryTol = 1e-12;
constexpr double kPsiNormTol = 1e-9;
constexpr double kInitDistTol = 1e-12;
constexpr double kSamplingTol = 1e-6;
constexpr int kVertexCap = 15;

}  // namespace

RewardFunction RewardFunction::zeros(int H, int S, int A) {
  RewardFunction r;
  r.horizon = H;
  r.num_states = S;
  r.num_actions = A;
  r.values.assign(H, Matrix::Zero(S, A));
  return r;
}

bool RewardFunction::in_unit_range(double tol) const {
  for (const Matrix& m : values) {
    if (!m.allFinite()) return false;
    if (m.minCoeff() < -tol || m.maxCoeff() > 1.0 + tol) return false;
  }
  return true;
}

Policy Policy::constant(int H, int S, int a) {
  Policy p;
  p.horizon = H;
  p.num_states = S;
  p.actions.assign(H, std::vector<int>(S, a));
  return p;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << issues.size() << " issue(s)";
  for (const auto& it : issues) os << "\n  " << it.what << " (magnitude " << it.magnitude << ")";
  return os.str();
}

LinearMixtureMdp::LinearMixtureMdp(int S, int A, int H, int d, double B,
                                   std::vector<Matrix> psi_maps, Vector theta_star,
                                   Vector init_dist)
    : num_states_(S),
      num_actions_(A),
      horizon_(H),
      dim_(d),
      param_bound_(B),
      psi_maps_(std::move(psi_maps)),
      theta_star_(std::move(theta_star)),
      init_dist_(std::move(init_dist)) {
  if (S < 1 || A < 1 || H < 1 || d < 1) throw std::invalid_argument("mdp: counts must be >= 1");
  if (!(B > 0.0)) throw std::invalid_argument("mdp: param bound must be positive");
  if (static_cast<int>(psi_maps_.size()) != S * A)
    throw std::invalid_argument("mdp: expected S*A feature maps");
  for (const Matrix& m : psi_maps_)
    if (m.rows() != d || m.cols() != S) throw std::invalid_argument("mdp: feature map must be d x S");
  if (theta_star_.size() != d) throw std::invalid_argument("mdp: theta must have length d");
  if (init_dist_.size() != S) throw std::invalid_argument("mdp: init distribution must have length S");

  prob_rows_.resize(psi_maps_.size());
  sampling_rows_.resize(psi_maps_.size());
  row_deviation_.assign(psi_maps_.size(), 0.0);
  for (std::size_t i = 0; i < psi_maps_.size(); ++i) {
    Vector row = psi_maps_[i].transpose() * theta_star_;
    prob_rows_[i] = row;
    double worst_neg = 0.0;
    Vector cleaned = row;
    for (int s2 = 0; s2 < S; ++s2) {
      if (cleaned[s2] < 0.0) {
        worst_neg = std::max(worst_neg, -cleaned[s2]);
        cleaned[s2] = 0.0;
      }
    }
    double sum = cleaned.sum();
    double dev = std::max(worst_neg, std::abs(row.sum() - 1.0));
    if (!row.allFinite()) dev = std::numeric_limits<double>::infinity();
    row_deviation_[i] = dev;
    if (dev <= kSamplingTol && sum > 0.0) {
      sampling_rows_[i] = cleaned / sum;
    }
  }
}

int LinearMixtureMdp::index(int s, int a) const {
  check_state(s);
  check_action(a);
  return s * num_actions_ + a;
}

void LinearMixtureMdp::check_state(int s) const {
  if (s < 0 || s >= num_states_) throw std::invalid_argument("mdp: state index out of range");
}

void LinearMixtureMdp::check_action(int a) const {
  if (a < 0 || a >= num_actions_) throw std::invalid_argument("mdp: action index out of range");
}

Vector LinearMixtureMdp::psi(const Vector& v, int s, int a) const {
  if (v.size() != num_states_) throw std::invalid_argument("psi: V must have length S");
  return psi_maps_[index(s, a)] * v;
}

int LinearMixtureMdp::sample_transition(int s, int a, SplitRng& rng) const {
  int i = index(s, a);
  if (row_deviation_[i] > kSamplingTol || sampling_rows_[i].size() == 0) {
    std::ostringstream os;
    os << "sample_transition: row (s=" << s << ", a=" << a
       << ") deviates from a distribution by " << row_deviation_[i];
    throw ModelError(os.str());
  }
  return rng.sample_discrete(sampling_rows_[i].data(), num_states_);
}

int LinearMixtureMdp::sample_initial(SplitRng& rng) const {
  return rng.sample_discrete(init_dist_.data(), num_states_);
}

double max_vertex_psi_norm(const Matrix& map) {
  const int d = static_cast<int>(map.rows());
  const int S = static_cast<int>(map.cols());
  if (S > kVertexCap) throw std::invalid_argument("max_vertex_psi_norm: state count above vertex cap");
  double best = 0.0;
  std::vector<double> y(d);
  const std::uint64_t count = 1ULL << S;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      double yi = 0.0;
      for (int j = 0; j < S; ++j)
        if (mask & (1ULL << j)) yi += map(i, j);
      y[i] = yi;
      norm2 += yi * yi;
    }
    best = std::max(best, norm2);
  }
  return std::sqrt(best);
}

ValidationReport LinearMixtureMdp::validate() const {
  ValidationReport report;
  auto issue = [&](std::string what, double mag) {
    report.issues.push_back({std::move(what), mag});
  };

  if (!theta_star_.allFinite()) issue("theta contains a non-finite entry", 0.0);
  if (!init_dist_.allFinite()) issue("init distribution contains a non-finite entry", 0.0);

  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      const int i = s * num_actions_ + a;
      const Matrix& m = psi_maps_[i];
      std::ostringstream loc;
      loc << "(s=" << s << ", a=" << a << ")";
      if (!m.allFinite()) {
        issue("non-finite feature entry at " + loc.str(), 0.0);
        continue;
      }
      const Vector& row = prob_rows_[i];
      double sum_err = std::abs(row.sum() - 1.0);
      if (sum_err > kRowSumTol) issue("transition row sum != 1 at " + loc.str(), sum_err);
      for (int s2 = 0; s2 < num_states_; ++s2) {
        if (row[s2] < -kEntryTol)
          issue("negative transition probability at " + loc.str(), -row[s2]);
        if (row[s2] > 1.0 + kEntryTol)
          issue("transition probability above one at " + loc.str(), row[s2] - 1.0);
      }
      // ||psi_V|| <= 1 over V: S -> [0,1]; the max over the box sits at a
      // vertex, so small state spaces are checked exactly.
      double psi_max;
      if (num_states_ <= kVertexCap) {
        psi_max = max_vertex_psi_norm(m);
      } else {
        psi_max = (m * Vector::Ones(num_states_)).norm();
        SplitRng probe(SplitRng::mix(0x70726f6265ULL, static_cast<std::uint64_t>(i)));
        Vector v(num_states_);
        for (int rep = 0; rep < 64; ++rep) {
          for (int j = 0; j < num_states_; ++j) v[j] = probe.next_double() < 0.5 ? 0.0 : 1.0;
          psi_max = std::max(psi_max, (m * v).norm());
        }
      }
      if (psi_max > 1.0 + kPsiNormTol)
        issue("||psi_V|| exceeds 1 at " + loc.str(), psi_max - 1.0);
    }
  }

  double theta_norm = theta_star_.norm();
  if (theta_norm > param_bound_ + kEntryTol)
    issue("||theta|| exceeds the parameter bound", theta_norm - param_bound_);

  double mu_err = std::abs(init_dist_.sum() - 1.0);
  if (mu_err > kInitDistTol) issue("init distribution sum != 1", mu_err);
  for (int s = 0; s < num_states_; ++s)
    if (init_dist_[s] < 0.0) issue("negative init probability", -init_dist_[s]);

  return report;
}

void LinearMixtureMdp::require_valid() const {
  ValidationReport report = validate();
  if (!report.ok()) throw ModelError("invalid linear mixture MDP: " + report.summary());
}

LinearMixtureMdp random_mdp(int S, int A, int H, int d, double B, std::uint64_t seed) {
  if (S < 1 || A < 1 || H < 1 || d < 1) throw std::invalid_argument("random_mdp: counts must be >= 1");
  if (!(B > 0.0)) throw std::invalid_argument("random_mdp: B must be positive");
  // Row sums force 1 = <psi_1, theta> <= ||psi_1|| ||theta|| <= B, so no valid
  // instance exists below B = 1.
  if (B < 1.0 - 1e-12)
    throw GenerationError("random_mdp: no valid instance exists with B < 1");

  SplitRng rng(seed);

  // Parameter direction, canonical sign so d = 1 gives theta = +1.
  Vector v(d);
  SplitRng dir = rng.at(1);
  for (int i = 0; i < d; ++i) v[i] = dir.next_gaussian();
  double vn = v.norm();
  if (vn < 1e-12) v.setConstant(1.0), vn = v.norm();
  v /= vn;
  int lead = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(v[i]) > std::abs(v[lead])) lead = i;
  if (v[lead] < 0.0) v = -v;

  // Baseline kernel with entries bounded away from zero.
  std::vector<Vector> base(static_cast<std::size_t>(S) * A);
  SplitRng base_rng = rng.at(2);
  for (auto& row : base) {
    row.resize(S);
    for (int j = 0; j < S; ++j) row[j] = 0.2 + base_rng.next_double();
    row /= row.sum();
  }

  // Zero-mass perturbations orthogonal to the parameter direction.
  std::vector<Matrix> noise(base.size());
  SplitRng noise_rng = rng.at(3);
  for (auto& E : noise) {
    E.resize(d, S);
    for (int j = 0; j < S; ++j)
      for (int i = 0; i < d; ++i) E(i, j) = noise_rng.next_range(-1.0, 1.0);
    for (int j = 0; j < S; ++j) {
      Vector col = E.col(j);
      E.col(j) = col - v * v.dot(col);
    }
    Vector mean = E.rowwise().mean();
    E.colwise() -= mean;
  }

  // Largest eps with ||psi_V||^2 = <P,V>^2 + eps^2 ||E V||^2 <= 1 on every
  // vertex (exact when S is small enough to enumerate).
  double eps_cap = 2.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Vector& p = base[i];
    const Matrix& E = noise[i];
    if (S <= kVertexCap) {
      const std::uint64_t count = 1ULL << S;
      for (std::uint64_t mask = 1; mask + 1 < count; ++mask) {
        double pv = 0.0;
        Vector ev = Vector::Zero(d);
        for (int j = 0; j < S; ++j) {
          if (mask & (1ULL << j)) {
            pv += p[j];
            ev += E.col(j);
          }
        }
        double en2 = ev.squaredNorm();
        if (en2 > 1e-24) eps_cap = std::min(eps_cap, std::sqrt(std::max(0.0, 1.0 - pv * pv) / en2));
      }
    } else {
      double col_sum = 0.0;
      for (int j = 0; j < S; ++j) col_sum += E.col(j).norm();
      double p_min = p.minCoeff();
      double slack = std::sqrt(std::max(0.0, 1.0 - (1.0 - p_min) * (1.0 - p_min)));
      if (col_sum > 1e-12) eps_cap = std::min(eps_cap, slack / (0.5 * col_sum));
    }
  }

  double eps = 0.9 * eps_cap;
  for (int attempt = 0; attempt < 40; ++attempt) {
    std::vector<Matrix> maps(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      maps[i] = v * base[i].transpose() + eps * noise[i];
    }
    Vector mu(S);
    SplitRng mu_rng = rng.at(4);
    for (int j = 0; j < S; ++j) mu[j] = 0.2 + mu_rng.next_double();
    mu /= mu.sum();

    LinearMixtureMdp mdp(S, A, H, d, B, std::move(maps), v, mu);
    if (mdp.validate().ok()) return mdp;
    eps *= 0.5;
  }
  throw GenerationError("random_mdp: could not satisfy invariants within the retry budget");
}

}  // namespace rfx
